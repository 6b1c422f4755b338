//! Closed-form bounds from the (Banach) rule and Banach iteration.

use super::DeductionError;
use crate::pattern::Pattern;
use crate::scalar::Scalar;

/// `δ = max_{ᾱ∈θ} Σ α_i ε_i`.
pub fn banach_delta<T: Scalar>(p: &Pattern<T>, eps: &[T]) -> Result<T, DeductionError> {
    if let Some(&e) = eps.iter().find(|&&e| e < T::zero()) {
        return Err(DeductionError::NegativeEpsilon(e.as_f64()));
    }
    Ok(p.bound(eps)?)
}

fn check_modulus<T: Scalar>(a: T) -> Result<(), DeductionError> {
    if a < T::zero() || a >= T::one() {
        return Err(DeductionError::NotContractive(a.as_f64()));
    }
    Ok(())
}

/// Smallest `k` with `a^k / (1 - a) <= eps`: the number of iterations after
/// which any seed is within `eps` of the fixed point.
pub fn required_iterations<T: Scalar>(a: T, eps: T) -> Result<usize, DeductionError> {
    check_modulus(a)?;
    if eps <= T::zero() {
        return Err(DeductionError::NonpositiveEpsilon(eps.as_f64()));
    }
    let bound = |k: usize| a_priori(a, k);
    if bound(0) <= eps {
        return Ok(0);
    }
    if a == T::zero() {
        return Ok(1);
    }
    // start just below the real-valued solution, then walk up
    let estimate = ((eps * (T::one() - a)).ln() / a.ln()).floor();
    let mut k = estimate.to_usize().unwrap_or(1).saturating_sub(1).max(1);
    while k > 1 && bound(k - 1) <= eps {
        k -= 1;
    }
    while bound(k) > eps {
        k += 1;
    }
    Ok(k)
}

/// `a^k / (1 - a)`.
pub fn a_priori<T: Scalar>(a: T, k: usize) -> T {
    pow(a, k) / (T::one() - a)
}

pub(crate) fn pow<T: Scalar>(a: T, k: usize) -> T {
    match i32::try_from(k) {
        Ok(k) => a.powi(k),
        Err(_) => a.powf(T::from_usize(k).unwrap_or_else(T::max_value)),
    }
}

/// `ε a^k (1 - a^l) / (1 - a)`: the distance between the `k`-th and
/// `(k+l)`-th iterates when consecutive iterates start `ε` apart.
pub fn iteration_bound<T: Scalar>(eps: T, a: T, k: usize, l: usize) -> Result<T, DeductionError> {
    check_modulus(a)?;
    Ok(eps * pow(a, k) * (T::one() - pow(a, l)) / (T::one() - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(tuples: &[&[f64]]) -> Pattern<f64> {
        Pattern::new(tuples.iter().map(|t| t.to_vec()).collect(), tuples[0].len()).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert!((banach_delta(&pat(&[&[0.3, 0.7]]), &[0.1, 0.2]).unwrap() - 0.17f64).abs() < 1e-15);
        assert_eq!(banach_delta(&pat(&[&[1.0, 0.0], &[0.0, 1.0]]), &[0.1, 0.2]).unwrap(), 0.2);
        let ex3 = pat(&[&[0.4, 0.6, 0.0], &[0.0, 0.0, 1.0]]);
        assert!((banach_delta(&ex3, &[0.5, 0.5, 0.3]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            banach_delta(&ex3, &[0.5, 0.5]),
            Err(DeductionError::Pattern(_))
        ));
        assert!(matches!(
            banach_delta(&ex3, &[0.5, -0.5, 0.1]),
            Err(DeductionError::NegativeEpsilon(_))
        ));
    }

    #[test]
    fn iteration_counts() {
        let k = required_iterations(0.9, 1e-6).unwrap();
        assert_eq!(k, 153);
        assert!(0.9f64.powi(153) / 0.1 <= 1e-6);
        assert!(0.9f64.powi(152) / 0.1 > 1e-6);
        assert_eq!(required_iterations(0.0, 0.5).unwrap(), 1);
        assert_eq!(required_iterations(0.5, 2.0).unwrap(), 0);
        assert!(matches!(
            required_iterations(1.0, 0.1),
            Err(DeductionError::NotContractive(_))
        ));
        assert!(matches!(
            required_iterations(0.5, 0.0),
            Err(DeductionError::NonpositiveEpsilon(_))
        ));
    }

    #[test]
    fn minimality() {
        for &a in &[0.1, 0.5, 0.77, 0.9, 0.99, 0.999] {
            for &eps in &[1e-2, 1e-6, 1e-9, 1e-12] {
                let k = required_iterations(a, eps).unwrap();
                assert!(a_priori(a, k) <= eps);
                assert!(k == 0 || a_priori(a, k - 1) > eps, "a={a} eps={eps} k={k}");
            }
        }
    }

    #[test]
    fn iteration_bound_formula() {
        assert!((iteration_bound(1.0, 0.5, 3, 2).unwrap() - 0.1875f64).abs() < 1e-15);
        assert_eq!(iteration_bound(0.3, 0.7, 0, 0).unwrap(), 0.0);
        let limit = 0.9f64.powi(10) / 0.1;
        let mut prev = 0.0;
        for l in [1, 10, 100, 1000] {
            let b = iteration_bound(1.0, 0.9, 10, l).unwrap();
            assert!(b >= prev && b <= limit + 1e-12);
            prev = b;
        }
        assert!((limit - prev).abs() < 1e-9);
        assert!((limit - 3.486_784_401).abs() < 1e-9);
    }
}
