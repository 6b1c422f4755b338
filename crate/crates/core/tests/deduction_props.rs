use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfix::deduction::{a_priori, apply_approx};
use qfix::metric::{DistributionModel, DistributionSpace};
use qfix::term::parse_term;
use qfix::{
    banach_delta, required_iterations, DerivationBuilder, GroundMetric, MetricModel, Pattern,
    QuantEquation, RejectReason, Signature, Term, Verdict,
};

fn pattern(n: usize) -> impl Strategy<Value = Pattern<f64>> {
    let tuple = (prop::collection::vec(0.0..1.0f64, n), 0.0..=1.0f64).prop_map(|(raw, mass)| {
        let total: f64 = raw.iter().sum::<f64>().max(1e-12);
        raw.iter().map(|w| w * mass / total).collect::<Vec<_>>()
    });
    prop::collection::vec(tuple, 1..4).prop_map(move |rows| Pattern::new(rows, n).unwrap())
}

fn pattern_and_eps() -> impl Strategy<Value = (Pattern<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..5).prop_flat_map(|n| {
        (
            pattern(n),
            prop::collection::vec(0.0..=1.0f64, n),
            prop::collection::vec(0.0..=1.0f64, n),
        )
    })
}

fn sig() -> Signature<f64> {
    Signature::new()
        .with("f", Pattern::new(vec![vec![0.3]], 1).unwrap())
        .unwrap()
        .with("g", Pattern::new(vec![vec![0.5, 0.5]], 2).unwrap())
        .unwrap()
        .with("h", Pattern::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap())
        .unwrap()
}

proptest! {
    #[test]
    fn delta_is_monotone((p, e, extra) in pattern_and_eps()) {
        let bigger: Vec<f64> = e.iter().zip(&extra).map(|(a, b)| (a + b).min(1.0)).collect();
        prop_assert!(banach_delta(&p, &e).unwrap() <= banach_delta(&p, &bigger).unwrap() + 1e-12);
    }

    #[test]
    fn delta_is_homogeneous((p, e, _x) in pattern_and_eps(), r in 0.0..=1.0f64) {
        let scaled: Vec<f64> = e.iter().map(|x| r * x).collect();
        let lhs = banach_delta(&p, &scaled).unwrap();
        let rhs = r * banach_delta(&p, &e).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn required_iterations_is_minimal(a in 0.0..0.999f64, exp in -12.0..0.0f64) {
        let eps = 10f64.powf(exp);
        let k = required_iterations(a, eps).unwrap();
        prop_assert!(a_priori(a, k) <= eps);
        if k > 0 {
            prop_assert!(a_priori(a, k - 1) > eps);
        }
    }

    #[test]
    fn approx_divides_by_one_minus_modulus(eps in 0.0..=0.5f64) {
        let s = sig();
        let premise = QuantEquation::parse("x1", "g(x1,x2)", eps, &s).unwrap();
        let body = parse_term("g(x1,x2)", &s).unwrap();
        let out = apply_approx(&premise, &body, 1, &[Term::var(2)], &s).unwrap();
        prop_assert!((out.eps - 2.0 * eps).abs() <= 1e-15);
        if eps == 0.0 {
            prop_assert_eq!(out.eps, 0.0);
        }
    }

    #[test]
    fn banach_chains_check_and_tampering_is_caught(
        e1 in 0.0..=1.0f64,
        e2 in 0.0..=1.0f64,
        ops in prop::collection::vec(0usize..3, 1..6),
        tamper in 0usize..6,
    ) {
        let mut b = DerivationBuilder::new(sig());
        let h1 = QuantEquation::parse("x1", "x2", e1, &sig()).unwrap();
        let h2 = QuantEquation::parse("x3", "x4", e2, &sig()).unwrap();
        b.set_hypotheses(vec![h1.clone(), h2.clone()]);
        let p1 = b.assume(h1).unwrap();
        let p2 = b.assume(h2).unwrap();
        let mut cur = p1;
        for op in &ops {
            cur = match op {
                0 => b.banach("f", vec![cur]).unwrap(),
                1 => b.banach("g", vec![cur, p2]).unwrap(),
                _ => b.nexp("h", vec![cur, cur]).unwrap(),
            };
        }
        let mut d = b.finish();
        prop_assert_eq!(d.check(), Verdict::Accepted);
        let k = 2 + tamper % ops.len();
        let claimed = d.steps[k].conclusion.conclusion.eps;
        if claimed > 1e-6 {
            d.steps[k].conclusion.conclusion.eps = claimed - 1e-6;
            match d.check() {
                Verdict::Rejected { step, reason } => {
                    prop_assert_eq!(step, k + 1);
                    prop_assert!(matches!(reason, RejectReason::WrongEpsilon { .. }), "{:?}", reason);
                }
                Verdict::Accepted => prop_assert!(false, "tampered step {} accepted", k + 1),
            }
        }
    }
}

#[test]
fn delta_bounds_model_distances() {
    // The Kantorovich lifting of a barycentric sum on a random line metric.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let positions: Vec<f64> = (0..4).map(|_| rng.gen()).collect();
        let eps: f64 = rng.gen();
        let model = DistributionModel::new(DistributionSpace {
            ground: GroundMetric::line(&positions).unwrap(),
        })
        .with("op", &format!("barycentric:{eps}"))
        .unwrap();
        let p = model.signature().lookup("op").unwrap().pattern.clone();
        for _ in 0..50 {
            let (a, b) = (model.sample(&mut rng), model.sample(&mut rng));
            let (c, d) = (model.sample(&mut rng), model.sample(&mut rng));
            let lhs = model
                .distance(&model.interpret("op", &[a.clone(), c.clone()]).unwrap(), &model.interpret("op", &[b.clone(), d.clone()]).unwrap())
                .unwrap();
            let delta = banach_delta(&p, &[model.distance(&a, &b).unwrap(), model.distance(&c, &d).unwrap()]).unwrap();
            assert!(lhs <= delta + 1e-9, "{lhs} > {delta}");
        }
    }
}
