use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfix::mdp::RewardAlgebra;
use qfix::metric::sup_distance;
use qfix::solver::evaluate;
use qfix::{
    required_iterations, BoundedVector, DiscountedSetup, Mdp, MdpError, Policy, PolicyTree,
};

fn stochastic_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() + 1e-6 })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut row = vec![0.0; n];
        row[rng.gen_range(0..n)] = 1.0;
        row
    } else {
        raw.iter().map(|v| v / total).collect()
    }
}

fn setup(seed: u64, gamma: f64) -> DiscountedSetup<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=3);
    let states = (0..n).map(|s| format!("s{s}")).collect();
    let actions = (0..k).map(|a| format!("a{a}")).collect();
    let transitions = (0..k)
        .map(|_| (0..n).map(|_| stochastic_row(&mut rng, n)).collect())
        .collect();
    let rewards = (0..k).map(|_| (0..n).map(|_| rng.gen()).collect()).collect();
    DiscountedSetup::new(Mdp::new(states, actions, transitions, rewards).unwrap(), gamma).unwrap()
}

fn policy(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Policy<f64> {
    Policy::new((0..n).map(|_| stochastic_row(rng, k)).collect()).unwrap()
}

fn tree(rng: &mut ChaCha8Rng, depth: usize, n: usize, k: usize) -> PolicyTree<f64> {
    if depth == 0 || rng.gen_bool(0.25) {
        return PolicyTree::Leaf(policy(rng, n, k));
    }
    let l = tree(rng, depth - 1, n, k);
    let r = tree(rng, depth - 1, n, k);
    PolicyTree::mix(rng.gen(), l, r).unwrap()
}

fn values(rng: &mut ChaCha8Rng, n: usize) -> BoundedVector<f64> {
    BoundedVector::new((0..n).map(|_| rng.gen()).collect()).unwrap()
}

/// Value iteration written against the raw MDP accessors.
fn oracle(s: &DiscountedSetup<f64>, pi: &Policy<f64>) -> Vec<f64> {
    let m = &s.mdp;
    let (n, k, g) = (m.num_states(), m.num_actions(), s.gamma());
    let mut v = vec![0.0; n];
    let sweeps = (1e-15f64.ln() / g.ln()).ceil() as usize + 1;
    for _ in 0..sweeps {
        v = (0..n)
            .map(|x| {
                (0..k)
                    .map(|a| {
                        let next: f64 = (0..n).map(|y| m.transition(a, x, y) * v[y]).sum();
                        pi.prob(x, a) * ((1.0 - g) * m.reward(a, x) + g * next)
                    })
                    .sum()
            })
            .collect();
    }
    v
}

fn gamma() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(0.9), Just(0.99), 0.05..0.95f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn o_term_computes_the_bellman_operator(seed in any::<u64>(), g in gamma(), depth in 0usize..4) {
        let s = setup(seed, g);
        let (n, k) = (s.mdp.num_states(), s.mdp.num_actions());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let t = tree(&mut rng, depth, n, k);
        let f = values(&mut rng, n);
        let mut alg = RewardAlgebra::new(s.clone());
        let term = alg.o_term(&t).unwrap();
        let lhs = evaluate(&alg, &term, std::slice::from_ref(&f)).unwrap();
        let rhs = s.bellman_apply(&t.denote().unwrap(), &f).unwrap();
        prop_assert!(sup_distance(&lhs, &rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn mixed_trees_match_their_denotation(seed in any::<u64>(), g in gamma()) {
        let eps = 1e-8;
        let s = setup(seed, g);
        let (n, k) = (s.mdp.num_states(), s.mdp.num_actions());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let t = tree(&mut rng, 3, n, k);
        let mixed = s.policy_value(&t, eps).unwrap();
        let flat = s.policy_value(&PolicyTree::Leaf(t.denote().unwrap()), eps).unwrap();
        prop_assert!(sup_distance(&mixed.value, &flat.value).unwrap() <= 2.0 * eps);
    }

    #[test]
    fn bellman_contracts_by_gamma(seed in any::<u64>(), g in gamma()) {
        let s = setup(seed, g);
        let (n, k) = (s.mdp.num_states(), s.mdp.num_actions());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let pi = policy(&mut rng, n, k);
        let (f, h) = (values(&mut rng, n), values(&mut rng, n));
        let before = sup_distance(&f, &h).unwrap();
        let after = sup_distance(&s.bellman_apply(&pi, &f).unwrap(), &s.bellman_apply(&pi, &h).unwrap()).unwrap();
        prop_assert!(after <= (g + 1e-9) * before + 1e-15);
    }

    #[test]
    fn certified_value_matches_value_iteration(seed in any::<u64>(), g in gamma(), exp in -9.0..-3.0f64) {
        let eps = 10f64.powf(exp);
        let s = setup(seed, g);
        let (n, k) = (s.mdp.num_states(), s.mdp.num_actions());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        let pi = policy(&mut rng, n, k);
        let cert = s.policy_value(&PolicyTree::Leaf(pi.clone()), eps).unwrap();
        let want = BoundedVector::new(oracle(&s, &pi)).unwrap();
        prop_assert!(sup_distance(&cert.value, &want).unwrap() <= eps + 1e-12);
        prop_assert!(sup_distance(&s.exact_policy_value(&pi).unwrap(), &want).unwrap() <= 1e-12);
        prop_assert!(cert.iterations <= required_iterations(g, eps).unwrap());
        prop_assert!((cert.modulus - g).abs() <= 1e-12);
    }

    #[test]
    fn json_roundtrips(seed in any::<u64>(), g in gamma()) {
        let s = setup(seed, g);
        let back = DiscountedSetup::<f64>::from_json(&s.to_json().to_string()).unwrap();
        prop_assert_eq!(back, s);
    }
}

#[test]
fn bad_documents_report_their_path() {
    let good = setup(5, 0.9).to_json();
    let cases: Vec<(Box<dyn Fn(&mut serde_json::Value)>, &str)> = vec![
        (Box::new(|v| v["transitions"]["a0"][0][0] = 7.0.into()), "transitions.a0[0]"),
        (Box::new(|v| v["rewards"]["a0"][0] = 1.5.into()), "rewards.a0[0]"),
        (Box::new(|v| v["gamma"] = 1.0.into()), "gamma"),
        (Box::new(|v| { v.as_object_mut().unwrap().remove("gamma"); }), "gamma"),
        (Box::new(|v| v["gamma"] = "high".into()), "gamma"),
    ];
    for (corrupt, path) in cases {
        let mut doc = good.clone();
        corrupt(&mut doc);
        let err: MdpError = DiscountedSetup::<f64>::from_json(&doc.to_string()).unwrap_err();
        assert_eq!(err.path(), path, "{err}");
        assert!(err.to_string().starts_with(path), "{err}");
    }
}
