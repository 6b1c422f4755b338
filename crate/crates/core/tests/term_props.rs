use proptest::prelude::*;
use proptest::strategy::BoxedStrategy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfix::metric::{VectorModel, VectorSpace};
use qfix::solver::{check_term_compliance, evaluate};
use qfix::term::{infer_pattern, iterate_term, parse_term, substitute_all};
use qfix::{BoundedVector, MetricModel, Term};

fn model() -> VectorModel<f64> {
    VectorModel::new(VectorSpace { dim: 2 })
        .with("f", r#"affine:{"matrices":[[[0.5,0.1],[0.0,0.4]]],"offset":[0.2,0.3]}"#)
        .unwrap()
        .with(
            "g",
            r#"affine:{"matrices":[[[0.3,0.0],[0.1,0.2]],[[0.4,0.0],[0.0,0.5]]],"offset":[0.1,0.1]}"#,
        )
        .unwrap()
        .with("b", "barycentric:0.3")
        .unwrap()
}

/// Well-formed terms over `arity` slots with at most one binder on any
/// path, which keeps nested solves cheap. Binders always wrap `g(x_j, _)`,
/// whose weight at `x_j` stays below 1 whatever the second argument is.
fn term(arity: usize, depth: u32) -> BoxedStrategy<Term> {
    term_with(arity, depth, true)
}

fn term_with(arity: usize, depth: u32, binder: bool) -> BoxedStrategy<Term> {
    let leaf = (1..=arity).prop_map(Term::var).boxed();
    if depth == 0 {
        return leaf;
    }
    let sub = move || term_with(arity, depth - 1, binder);
    let first_order = prop_oneof![
        2 => leaf,
        2 => sub().prop_map(|a| Term::app("f", vec![a])),
        2 => (sub(), sub()).prop_map(|(a, b)| Term::app("g", vec![a, b])),
        2 => (sub(), sub()).prop_map(|(a, b)| Term::app("b", vec![a, b])),
    ];
    if !binder {
        return first_order.boxed();
    }
    let mu = (1..=arity + 1).prop_flat_map(move |j| {
        term_with(arity + 1, depth - 1, false)
            .prop_map(move |body| Term::mu(j, Term::app("g", vec![Term::var(j), body])))
    });
    prop_oneof![8 => first_order, 1 => mu].boxed()
}

fn point(rng: &mut ChaCha8Rng) -> BoundedVector<f64> {
    BoundedVector::new(vec![rng.gen(), rng.gen()]).unwrap()
}

fn close(u: &BoundedVector<f64>, v: &BoundedVector<f64>, tol: f64) -> bool {
    u.coords().iter().zip(v.coords()).all(|(a, b)| (a - b).abs() <= tol)
}

proptest! {
    #[test]
    fn print_then_parse_roundtrips(t in term(3, 3)) {
        let m = model();
        let printed = t.to_string();
        prop_assert_eq!(parse_term(&printed, m.signature()).unwrap(), t);
    }

    #[test]
    fn substitution_pattern_is_composition(
        t in term(2, 3),
        s1 in term(3, 2),
        s2 in term(3, 2),
        seed in any::<u64>(),
    ) {
        let m = model();
        let sig = m.signature();
        let sub = substitute_all(&t, &[s1.clone(), s2.clone()], 3).unwrap();
        let direct = infer_pattern(&sub, sig, 3).unwrap();
        let inner = vec![infer_pattern(&s1, sig, 3).unwrap(), infer_pattern(&s2, sig, 3).unwrap()];
        let composed = infer_pattern(&t, sig, 2).unwrap().compose(&inner).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let eps: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let (a, b) = (direct.bound(&eps).unwrap(), composed.bound(&eps).unwrap());
            prop_assert!((a - b).abs() <= 1e-9, "{} vs {} on {:?}", a, b, eps);
        }
    }

    #[test]
    fn iterated_term_matches_repeated_evaluation(
        t in term_with(2, 3, false),
        focus in 1usize..=2,
        k in 1usize..5,
        seed in any::<u64>(),
    ) {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = vec![point(&mut rng), point(&mut rng)];
        let start = Term::var(focus);
        let unfolded = iterate_term(&t, focus, 2, k, &start).unwrap();
        let syntactic = evaluate(&m, &unfolded, &env).unwrap();
        let mut x = env[focus - 1].clone();
        for _ in 0..k {
            let mut e = env.clone();
            e[focus - 1] = x;
            x = evaluate(&m, &t, &e).unwrap();
        }
        prop_assert!(close(&syntactic, &x, 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inferred_pattern_is_sound(t in term(3, 3), seed in any::<u64>()) {
        let report = check_term_compliance(&model(), &t, 3, 1000, seed).unwrap();
        prop_assert!(report.passed, "{}: slack {}", t, report.max_slack);
    }
}

#[test]
fn shared_variables_are_contracted() {
    let m = model();
    let t = parse_term("b(x1,x1)", m.signature()).unwrap();
    let p = infer_pattern(&t, m.signature(), 1).unwrap();
    assert!((p.modulus(1).unwrap() - 1.0).abs() < 1e-12);
    let t = parse_term("mu 2. g(x2,x1)", m.signature()).unwrap();
    assert!((infer_pattern(&t, m.signature(), 1).unwrap().modulus(1).unwrap() - 0.5 / 0.7).abs() < 1e-12);
}
