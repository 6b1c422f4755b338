use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{MetricModel, ModelError};
use crate::scalar::Scalar;

/// Result of sampling `d(f(ā), f(b̄)) - max_ᾱ Σ α_i d(a_i, b_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplianceReport {
    pub symbol: String,
    pub trials: usize,
    /// Largest observed excess of the output distance over the bound.
    pub max_slack: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Samples argument pairs and checks the declared pattern of `symbol`.
///
/// Each argument pair is drawn independently, except that with probability
/// 1/2 the two sides share the argument, so variations of single
/// arguments are probed as well as joint ones.
pub fn check_pattern_compliance<M: MetricModel>(
    model: &M,
    symbol: &str,
    trials: usize,
    seed: u64,
) -> Result<ComplianceReport, ModelError> {
    let sym = model.signature().lookup(symbol)?.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_slack = f64::NEG_INFINITY;
    for _ in 0..trials.max(1) {
        let mut a = Vec::with_capacity(sym.arity);
        let mut b = Vec::with_capacity(sym.arity);
        let mut eps = Vec::with_capacity(sym.arity);
        for _ in 0..sym.arity {
            let x = model.sample(&mut rng);
            let y = if rng.gen_bool(0.5) {
                x.clone()
            } else {
                model.sample(&mut rng)
            };
            eps.push(model.distance(&x, &y)?);
            a.push(x);
            b.push(y);
        }
        let lhs = model.distance(&model.interpret(symbol, &a)?, &model.interpret(symbol, &b)?)?;
        let rhs = sym.pattern.bound(&eps)?;
        max_slack = max_slack.max((lhs - rhs).as_f64());
    }
    let tolerance = M::Scalar::tol().as_f64();
    Ok(ComplianceReport {
        symbol: symbol.to_string(),
        trials: trials.max(1),
        max_slack,
        tolerance,
        passed: max_slack <= tolerance,
    })
}
