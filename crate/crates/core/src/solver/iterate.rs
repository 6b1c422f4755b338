use super::SolveError;
use crate::deduction::{a_priori, required_iterations};
use crate::scalar::Scalar;

/// Which bound may end the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    /// The first of the two bounds to reach the target.
    #[default]
    Either,
    /// `a^k / (1-a) <= ε`.
    APriori,
    /// `d(x_k, F x_k) / (1-a) <= ε`.
    APosteriori,
}

/// An approximate fixed point with its error bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<E, T> {
    pub value: E,
    pub iterations: usize,
    /// `a^k / (1-a)` for the returned iterate.
    pub a_priori_bound: T,
    /// `d(x_k, F x_k) / (1-a)` for the returned iterate.
    pub a_posteriori_bound: T,
    pub modulus: T,
    pub target_epsilon: T,
    /// `d(x_j, x_{j+1})` for `j = 0..=k`.
    pub residuals: Vec<T>,
}

impl<E, T: Scalar> Certificate<E, T> {
    /// The tighter of the two bounds on the distance to the fixed point.
    pub fn bound(&self) -> T {
        self.a_priori_bound.min(self.a_posteriori_bound)
    }
}

/// Iterates `x_{k+1} = F(x_k)` from `seed` until the stop rule certifies
/// that `x_k` is within `eps` of the fixed point of the `a`-contraction
/// `F`.
///
/// The a-priori bound assumes only that the space is 1-bounded, so any seed
/// is admissible; with [`StopRule::Either`] or [`StopRule::APriori`] the loop
/// ends after at most `required_iterations(a, eps)` steps.
pub fn banach_iterate<E, T, F, D>(
    mut map: F,
    mut dist: D,
    a: T,
    eps: T,
    seed: E,
    rule: StopRule,
) -> Result<Certificate<E, T>, SolveError>
where
    T: Scalar,
    F: FnMut(&E) -> Result<E, SolveError>,
    D: FnMut(&E, &E) -> Result<T, SolveError>,
{
    if eps <= T::zero() {
        return Err(SolveError::NonpositiveEpsilon(eps.as_f64()));
    }
    if !(a >= T::zero() && a < T::one()) {
        return Err(SolveError::NotContractive { modulus: a.as_f64() });
    }
    let budget = required_iterations(a, eps).map_err(|_| SolveError::NotContractive {
        modulus: a.as_f64(),
    })?;
    let limit = match rule {
        StopRule::APosteriori => budget.saturating_mul(10).saturating_add(1000),
        _ => budget,
    };
    let scale = T::one() - a;
    let mut x = seed;
    let mut residuals = Vec::new();
    for k in 0..=limit {
        let fx = map(&x)?;
        let residual = dist(&x, &fx)?;
        residuals.push(residual);
        let prior = a_priori(a, k);
        let posterior = residual / scale;
        let done = match rule {
            StopRule::Either => prior <= eps || posterior <= eps,
            StopRule::APriori => prior <= eps,
            StopRule::APosteriori => posterior <= eps,
        };
        if done {
            return Ok(Certificate {
                value: x,
                iterations: k,
                a_priori_bound: prior,
                a_posteriori_bound: posterior,
                modulus: a,
                target_epsilon: eps,
                residuals,
            });
        }
        x = fx;
    }
    Err(SolveError::NoConvergence { iterations: limit })
}
