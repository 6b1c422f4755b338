use super::MetricError;
use crate::scalar::Scalar;

/// A nonempty finite subset of a base metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePointSet<E> {
    elements: Vec<E>,
}

impl<E> FinitePointSet<E> {
    pub fn new(elements: Vec<E>) -> Result<Self, MetricError> {
        if elements.is_empty() {
            return Err(MetricError::EmptySet);
        }
        Ok(FinitePointSet { elements })
    }

    pub fn singleton(e: E) -> Self {
        FinitePointSet { elements: vec![e] }
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn into_elements(self) -> Vec<E> {
        self.elements
    }
}

/// `max(sup_a inf_b d(a,b), sup_b inf_a d(a,b))`.
pub fn hausdorff_distance<E, T, F>(a: &[E], b: &[E], base: F) -> Result<T, MetricError>
where
    T: Scalar,
    F: Fn(&E, &E) -> Result<T, MetricError>,
{
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptySet);
    }
    let mut table = Vec::with_capacity(a.len());
    for x in a {
        let row = b.iter().map(|y| base(x, y)).collect::<Result<Vec<T>, _>>()?;
        table.push(row);
    }
    let forward = table
        .iter()
        .map(|row| row.iter().copied().fold(T::infinity(), T::min))
        .fold(T::zero(), T::max);
    let backward = (0..b.len())
        .map(|j| table.iter().map(|row| row[j]).fold(T::infinity(), T::min))
        .fold(T::zero(), T::max);
    Ok(forward.max(backward))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(x: &f64, y: &f64) -> Result<f64, MetricError> {
        Ok((x - y).abs())
    }

    #[test]
    fn examples() {
        let h = hausdorff_distance(&[0.2], &[0.5, 0.9], line).unwrap();
        assert!((h - 0.7).abs() < 1e-15);
        assert_eq!(hausdorff_distance(&[0.2, 0.4], &[0.4, 0.2], line).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&[0.0], &[1.0], line).unwrap(), 1.0);
        assert_eq!(
            hausdorff_distance::<f64, f64, _>(&[], &[1.0], line),
            Err(MetricError::EmptySet)
        );
        assert!(FinitePointSet::<f64>::new(vec![]).is_err());
    }
}
