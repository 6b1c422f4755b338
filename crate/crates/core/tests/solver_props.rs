use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfix::metric::{sup_distance, VectorModel, VectorSpace};
use qfix::solver::{evaluate, solve_mu, solve_mu_with, SolveOptions};
use qfix::term::parse_term;
use qfix::{BoundedVector, FocusedTerm, MetricModel, StopRule};

/// `g(x, y) = a x + c y + b` on `[0,1]`.
fn model(a: f64, c: f64, b: f64) -> VectorModel<f64> {
    let id = serde_json::json!({ "matrices": [[[a]], [[c]]], "offset": [b] });
    VectorModel::new(VectorSpace { dim: 1 }).with("g", &format!("affine:{id}")).unwrap()
}

fn focused(m: &VectorModel<f64>) -> FocusedTerm {
    FocusedTerm::new(parse_term("g(x1,x2)", m.signature()).unwrap(), 2, 1).unwrap()
}

fn scalar(x: f64) -> BoundedVector<f64> {
    BoundedVector::new(vec![x]).unwrap()
}

/// Coefficients with `a + c + b <= 1`, so `g` maps the unit interval into
/// itself.
fn coefficients() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..0.95f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, u, v)| {
        let c = (1.0 - a) * u;
        let b = (1.0 - a - c) * v;
        (a, c, b)
    })
}

#[test]
fn certified_accuracy_on_affine_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc);
    for trial in 0..1000 {
        let a: f64 = rng.gen_range(0.0..0.95);
        let c: f64 = rng.gen_range(0.0..=1.0 - a);
        let b: f64 = rng.gen_range(0.0..=1.0 - a - c);
        let y: f64 = rng.gen();
        let eps = 10f64.powf(rng.gen_range(-10.0..-1.0));
        let m = model(a, c, b);
        let cert = solve_mu(&m, &focused(&m), &[scalar(y)], eps, None).unwrap();
        let exact = (c * y + b) / (1.0 - a);
        let err = (cert.value.coords()[0] - exact).abs();
        assert!(cert.bound() <= eps, "trial {trial}");
        assert!(err <= cert.bound() + 1e-12, "trial {trial}: {err} > {}", cert.bound());
    }
}

proptest! {
    #[test]
    fn result_is_nearly_fixed((a, c, b) in coefficients(), y in 0.0..=1.0f64, exp in -10.0..-1.0f64) {
        let eps = 10f64.powf(exp);
        let m = model(a, c, b);
        let env = [scalar(y)];
        let cert = solve_mu(&m, &focused(&m), &env, eps, None).unwrap();
        let image = evaluate(&m, &focused(&m).term, &[cert.value.clone(), env[0].clone()]).unwrap();
        let gap = sup_distance(&cert.value, &image).unwrap();
        prop_assert!(gap <= eps * (1.0 + a) + 1e-12, "{} > {}", gap, eps * (1.0 + a));
    }

    #[test]
    fn residuals_decay_geometrically(
        (a, c, b) in coefficients(),
        y in 0.0..=1.0f64,
        seed in 0.0..=1.0f64,
    ) {
        let m = model(a, c, b);
        let opts = SolveOptions { rule: StopRule::APriori, inner_eps: None };
        let cert = solve_mu_with(&m, &focused(&m), &[scalar(y)], 1e-9, Some(scalar(seed)), opts).unwrap();
        for w in cert.residuals.windows(2) {
            prop_assert!(w[1] <= a * w[0] + 1e-15, "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn fixed_points_move_continuously(
        (a, c, b) in coefficients(),
        y in 0.0..=1.0f64,
        z in 0.0..=1.0f64,
    ) {
        let eps = 1e-9;
        let m = model(a, c, b);
        let t = focused(&m);
        let u = solve_mu(&m, &t, &[scalar(y)], eps, None).unwrap().value;
        let v = solve_mu(&m, &t, &[scalar(z)], eps, None).unwrap().value;
        let moved = sup_distance(&u, &v).unwrap();
        prop_assert!(moved <= c * (y - z).abs() / (1.0 - a) + 2.0 * eps);
    }

    #[test]
    fn stop_rules_agree((a, c, b) in coefficients(), y in 0.0..=1.0f64) {
        let eps = 1e-8;
        let m = model(a, c, b);
        let t = focused(&m);
        let mut values = Vec::new();
        for rule in [StopRule::Either, StopRule::APriori, StopRule::APosteriori] {
            let opts = SolveOptions { rule, inner_eps: None };
            let cert = solve_mu_with(&m, &t, &[scalar(y)], eps, None, opts).unwrap();
            prop_assert!(cert.bound() <= eps);
            values.push(cert.value);
        }
        for v in &values[1..] {
            prop_assert!(sup_distance(&values[0], v).unwrap() <= 2.0 * eps);
        }
    }
}

#[test]
fn single_precision_solves() {
    let id = serde_json::json!({ "matrices": [[[0.5]]], "offset": [0.25] });
    let m = VectorModel::<f32>::new(VectorSpace { dim: 1 }).with("h", &format!("affine:{id}")).unwrap();
    let t = FocusedTerm::new(parse_term("h(x1)", m.signature()).unwrap(), 1, 1).unwrap();
    let cert = solve_mu(&m, &t, &[], 1e-5, None).unwrap();
    assert!((cert.value.coords()[0] - 0.5).abs() <= 1e-5);
    assert_eq!(m.origin().coords(), &[0.0f32]);
}

#[test]
fn non_contractive_focus_is_refused() {
    let m = model(0.5, 0.5, 0.0);
    let t = FocusedTerm::new(parse_term("g(x2,x1)", m.signature()).unwrap(), 2, 1).unwrap();
    assert!(solve_mu(&m, &t, &[scalar(0.3)], 1e-6, None).is_ok());
    let id = FocusedTerm::new(parse_term("g(x1,x1)", m.signature()).unwrap(), 1, 1).unwrap();
    assert!(solve_mu(&m, &id, &[], 1e-6, None).is_err());
}
