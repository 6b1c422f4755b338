use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{DiscountedSetup, Policy, RewardAlgebra};
use crate::metric::{sup_distance, BoundedVector, MetricModel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomKind {
    /// Both sides must coincide.
    Equality,
    /// The distance of the two sides must not exceed the stated bound.
    Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub name: &'static str,
    pub kind: AxiomKind,
    /// Largest observed distance (equalities) or excess over the bound
    /// (bounds); never negative.
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbaReport {
    pub trials: usize,
    pub seed: u64,
    pub axioms: Vec<AxiomReport>,
}

impl RbaReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(|a| a.passed)
    }
}

/// Samples value functions, policies and parameters and checks the
/// barycentric and reward axioms in the value-function model:
///
/// - B1: `x +_1 y = x`
/// - B2: `x +_ε x = x`
/// - SC: `x +_ε y = y +_(1-ε) x`
/// - SA: `(x +_ε y) +_ε' z = x +_εε' (y +_((ε'-εε')/(1-εε')) z)`
/// - BA: `x =_p y, x' =_q y' ⊢ x +_ε x' =_(εp+(1-ε)q) y +_ε y'`
/// - R1: `⟨επ+(1-ε)π'⟩x = ⟨π⟩x +_ε ⟨π'⟩x`
/// - R2: `|επ+(1-ε)π'|x = |π|x +_ε |π'|x`
/// - R3: `x =_δ y ⊢ |π|x =_γδ |π|y`
pub fn check_rba_axioms<T: Scalar>(setup: &DiscountedSetup<T>, trials: usize, seed: u64) -> RbaReport {
    let trials = trials.max(1);
    let mut alg = RewardAlgebra::new(setup.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tolerance = 1e-12_f64.max(T::epsilon().as_f64() * 64.0);
    let names = ["B1", "B2", "SC", "SA", "BA", "R1", "R2", "R3"];
    let mut worst = [0.0_f64; 8];
    let n = setup.mdp.num_states();
    let k = setup.mdp.num_actions();
    for _ in 0..trials {
        let x = alg.sample(&mut rng);
        let y = alg.sample(&mut rng);
        let z = alg.sample(&mut rng);
        let w = alg.sample(&mut rng);
        let e = T::lit(rng.gen::<f64>());
        let mut e2 = T::lit(rng.gen::<f64>());
        if e * e2 >= T::one() {
            e2 = T::lit(0.5);
        }
        let pi = sample_policy(&mut rng, n, k);
        let pi2 = sample_policy(&mut rng, n, k);
        let checks = axioms(&mut alg, [&x, &y, &z, &w], e, e2, &pi, &pi2);
        for (slot, v) in worst.iter_mut().zip(checks) {
            *slot = slot.max(v);
        }
    }
    let axioms = names
        .iter()
        .zip(worst)
        .map(|(&name, v)| AxiomReport {
            name,
            kind: if name == "BA" || name == "R3" {
                AxiomKind::Bound
            } else {
                AxiomKind::Equality
            },
            max_violation: v,
            tolerance,
            passed: v <= tolerance,
        })
        .collect();
    RbaReport { trials, seed, axioms }
}

/// Per-axiom violation for one sample, in the order of [`check_rba_axioms`].
fn axioms<T: Scalar>(
    alg: &mut RewardAlgebra<T>,
    [x, y, z, w]: [&BoundedVector<T>; 4],
    e: T,
    e2: T,
    pi: &Policy<T>,
    pi2: &Policy<T>,
) -> [f64; 8] {
    let one = T::one();
    let d = |a: &BoundedVector<T>, b: &BoundedVector<T>| sup_distance(a, b).expect("same dimension");
    let plus = |alg: &mut RewardAlgebra<T>, eps: T, a: &BoundedVector<T>, b: &BoundedVector<T>| {
        let s = alg.plus(eps).expect("weight in [0, 1]");
        alg.interpret(&s, &[a.clone(), b.clone()]).expect("binary symbol")
    };
    let trans = |alg: &mut RewardAlgebra<T>, p: &Policy<T>, a: &BoundedVector<T>| {
        let s = alg.trans(p).expect("policy fits");
        alg.interpret(&s, std::slice::from_ref(a)).expect("unary symbol")
    };
    let reward = |alg: &mut RewardAlgebra<T>, p: &Policy<T>, a: &BoundedVector<T>| {
        let s = alg.reward(p).expect("policy fits");
        alg.interpret(&s, std::slice::from_ref(a)).expect("unary symbol")
    };
    let excess = |lhs: T, bound: T| (lhs - bound).max(T::zero()).as_f64();

    let b1 = d(&plus(alg, one, x, y), x).as_f64();
    let b2 = d(&plus(alg, e, x, x), x).as_f64();
    let sc = d(&plus(alg, e, x, y), &plus(alg, one - e, y, x)).as_f64();
    let ee = e * e2;
    let inner = (e2 - ee) / (one - ee);
    let sa_l = plus(alg, e, x, y);
    let sa_l = plus(alg, e2, &sa_l, z);
    let sa_r = plus(alg, inner, y, z);
    let sa_r = plus(alg, ee, x, &sa_r);
    let sa = d(&sa_l, &sa_r).as_f64();
    // x =_p z and y =_q w, so x +_ε y is within εp + (1-ε)q of z +_ε w.
    let (p, q) = (d(x, z), d(y, w));
    let ba = excess(d(&plus(alg, e, x, y), &plus(alg, e, z, w)), e * p + (one - e) * q);
    let mixed = pi.mix(e, pi2).expect("same shape");
    let r1_l = trans(alg, &mixed, x);
    let (ta, tb) = (trans(alg, pi, x), trans(alg, pi2, x));
    let r1 = d(&r1_l, &plus(alg, e, &ta, &tb)).as_f64();
    let r2_l = reward(alg, &mixed, x);
    let (ra, rb) = (reward(alg, pi, x), reward(alg, pi2, x));
    let r2 = d(&r2_l, &plus(alg, e, &ra, &rb)).as_f64();
    let r3 = excess(d(&reward(alg, pi, x), &reward(alg, pi, y)), alg.setup().gamma() * d(x, y));
    [b1, b2, sc, sa, ba, r1, r2, r3]
}

/// Per state, i.i.d. uniforms normalized to sum 1.
pub(super) fn sample_policy<T: Scalar>(rng: &mut dyn RngCore, states: usize, actions: usize) -> Policy<T> {
    let rows = (0..states)
        .map(|_| {
            let raw: Vec<f64> = (0..actions).map(|_| rng.gen::<f64>() + 1e-9).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|v| T::lit(v / total)).collect()
        })
        .collect();
    Policy::new(rows).expect("normalized rows")
}
