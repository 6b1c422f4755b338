use super::{DiscountedSetup, MdpError, Policy};
use crate::metric::BoundedVector;
use crate::scalar::Scalar;

impl<T: Scalar> DiscountedSetup<T> {
    /// `R^π(s) = Σ_a π(s)(a) R^a(s)`.
    pub fn expected_reward(&self, pi: &Policy<T>) -> Result<BoundedVector<T>, MdpError> {
        pi.fits(&self.mdp)?;
        let m = &self.mdp;
        let r = (0..m.num_states())
            .map(|s| (0..m.num_actions()).map(|a| pi.prob(s, a) * m.reward(a, s)).sum())
            .collect();
        Ok(clamp(r))
    }

    /// `P^π(s)(s') = Σ_a π(s)(a) P^a(s)(s')`.
    pub fn policy_transitions(&self, pi: &Policy<T>) -> Result<Vec<Vec<T>>, MdpError> {
        pi.fits(&self.mdp)?;
        let m = &self.mdp;
        let n = m.num_states();
        Ok((0..n)
            .map(|s| {
                (0..n)
                    .map(|t| (0..m.num_actions()).map(|a| pi.prob(s, a) * m.transition(a, s, t)).sum())
                    .collect()
            })
            .collect())
    }

    /// `⟨π⟩f (s) = Σ_a π(s)(a) Σ_s' P^a(s)(s') f(s')`.
    pub fn expected_next(&self, pi: &Policy<T>, f: &BoundedVector<T>) -> Result<BoundedVector<T>, MdpError> {
        self.check_dim(f)?;
        let p = self.policy_transitions(pi)?;
        Ok(clamp(
            p.iter()
                .map(|row| row.iter().zip(f.coords()).map(|(&q, &v)| q * v).sum())
                .collect(),
        ))
    }

    /// `T^π f = (1-γ) R^π + γ P^π f`.
    pub fn bellman_apply(&self, pi: &Policy<T>, f: &BoundedVector<T>) -> Result<BoundedVector<T>, MdpError> {
        let r = self.expected_reward(pi)?;
        let next = self.expected_next(pi, f)?;
        let g = self.gamma();
        Ok(clamp(
            r.coords()
                .iter()
                .zip(next.coords())
                .map(|(&r, &v)| (T::one() - g) * r + g * v)
                .collect(),
        ))
    }

    /// Solves `(I - γ P^π) V = (1-γ) R^π` by Gaussian elimination with
    /// partial pivoting. The system is strictly diagonally dominant with
    /// row gap at least `1-γ`.
    pub fn exact_policy_value(&self, pi: &Policy<T>) -> Result<BoundedVector<T>, MdpError> {
        let p = self.policy_transitions(pi)?;
        let r = self.expected_reward(pi)?;
        let g = self.gamma();
        let n = p.len();
        let mut a: Vec<Vec<T>> = p
            .iter()
            .enumerate()
            .map(|(s, row)| {
                row.iter()
                    .enumerate()
                    .map(|(t, &q)| if s == t { T::one() - g * q } else { -g * q })
                    .collect()
            })
            .collect();
        let mut b: Vec<T> = r.coords().iter().map(|&x| (T::one() - g) * x).collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite"))
                .expect("nonempty range");
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in col + 1..n {
                let factor = a[row][col] / a[col][col];
                if factor == T::zero() {
                    continue;
                }
                for k in col..n {
                    let delta = factor * a[col][k];
                    a[row][k] -= delta;
                }
                let delta = factor * b[col];
                b[row] -= delta;
            }
        }
        let mut v = vec![T::zero(); n];
        for row in (0..n).rev() {
            let tail: T = (row + 1..n).map(|k| a[row][k] * v[k]).sum();
            v[row] = (b[row] - tail) / a[row][row];
        }
        Ok(clamp(v))
    }

    fn check_dim(&self, f: &BoundedVector<T>) -> Result<(), MdpError> {
        if f.dim() != self.mdp.num_states() {
            return Err(MdpError::DimensionMismatch {
                path: "value".into(),
                expected: self.mdp.num_states(),
                found: f.dim(),
            });
        }
        Ok(())
    }
}

/// Convex combinations of points of `[0,1]` may leave it by round-off.
pub(super) fn clamp<T: Scalar>(v: Vec<T>) -> BoundedVector<T> {
    BoundedVector::new(v.into_iter().map(|x| x.max(T::zero()).min(T::one())).collect())
        .expect("clamped into the unit interval")
}
