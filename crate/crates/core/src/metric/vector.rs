use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::scalar::{le_tol, Scalar};

/// A point of `[0,1]^S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundedVector<T>(Vec<T>);

impl<T: Scalar> BoundedVector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self, MetricError> {
        for (k, &c) in coords.iter().enumerate() {
            if !(c >= -T::tol() && le_tol(c, T::one())) {
                return Err(MetricError::InvalidElement(format!(
                    "coordinate {k} is {c}, outside [0, 1]"
                )));
            }
        }
        Ok(BoundedVector(coords))
    }

    pub fn zeros(n: usize) -> Self {
        BoundedVector(vec![T::zero(); n])
    }

    pub fn constant(n: usize, c: T) -> Result<Self, MetricError> {
        Self::new(vec![c; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

/// `max_s |u(s) - v(s)|`.
pub fn sup_distance<T: Scalar>(u: &BoundedVector<T>, v: &BoundedVector<T>) -> Result<T, MetricError> {
    if u.dim() != v.dim() {
        return Err(MetricError::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok(u.0
        .iter()
        .zip(&v.0)
        .map(|(&a, &b)| (a - b).abs())
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> BoundedVector<f64> {
        BoundedVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn sup_examples() {
        assert!((sup_distance(&v(&[0.2, 0.9]), &v(&[0.5, 0.8])).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(sup_distance(&v(&[0.2, 0.9]), &v(&[0.2, 0.9])).unwrap(), 0.0);
        assert_eq!(sup_distance(&v(&[0.0]), &v(&[1.0])).unwrap(), 1.0);
        assert!(matches!(
            sup_distance(&v(&[0.0]), &v(&[1.0, 0.0])),
            Err(MetricError::DimensionMismatch { .. })
        ));
        assert!(BoundedVector::new(vec![1.2]).is_err());
    }
}
