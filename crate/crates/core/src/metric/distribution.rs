//! Finite distributions and the Kantorovich metric.
//!
//! Distances are computed exactly by a min-cost-flow transport solve
//! (successive shortest augmenting paths on the residual graph).

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::scalar::{le_tol, Scalar};

/// A finite metric space given by its distance matrix, validated to be a
/// 1-bounded metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct GroundMetric<T: Scalar> {
    points: Vec<String>,
    distance: Vec<Vec<T>>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
struct GroundDoc<T: Scalar> {
    #[serde(default)]
    points: Vec<String>,
    distance: Vec<Vec<T>>,
}

impl<'de, T: Scalar> Deserialize<'de> for GroundMetric<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = GroundDoc::deserialize(d)?;
        GroundMetric::new(doc.points, doc.distance).map_err(serde::de::Error::custom)
    }
}

impl<T: Scalar> GroundMetric<T> {
    /// Validates squareness, zero diagonal, symmetry, the triangle
    /// inequality and 1-boundedness. Out-of-range entries are rejected.
    pub fn new(points: Vec<String>, distance: Vec<Vec<T>>) -> Result<Self, MetricError> {
        let n = distance.len();
        let points = if points.is_empty() {
            (1..=n).map(|k| format!("p{k}")).collect()
        } else {
            points
        };
        if points.len() != n {
            return Err(MetricError::DimensionMismatch {
                expected: points.len(),
                found: n,
            });
        }
        if n == 0 {
            return Err(MetricError::GroundNotMetric("no points".into()));
        }
        let bad = |msg: String| Err(MetricError::GroundNotMetric(msg));
        for (i, row) in distance.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d >= T::zero()) || !le_tol(d, T::one()) {
                    return bad(format!("d({i},{j}) = {d} outside [0, 1]"));
                }
                if (d - distance[j][i]).abs() > T::tol() {
                    return bad(format!("d({i},{j}) != d({j},{i})"));
                }
            }
            if row[i] > T::tol() {
                return bad(format!("d({i},{i}) = {} is not 0", row[i]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !le_tol(distance[i][k], distance[i][j] + distance[j][k]) {
                        return bad(format!("triangle inequality fails for ({i},{j},{k})"));
                    }
                }
            }
        }
        Ok(GroundMetric { points, distance })
    }

    /// Every pair of distinct points at distance 1.
    pub fn discrete(n: usize) -> Self {
        let distance = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { T::zero() } else { T::one() })
                    .collect()
            })
            .collect();
        Self::new(Vec::new(), distance).expect("discrete metric")
    }

    /// Points of `[0, 1]` under `|x - y|`.
    pub fn line(positions: &[T]) -> Result<Self, MetricError> {
        let distance = positions
            .iter()
            .map(|&x| positions.iter().map(|&y| (x - y).abs()).collect())
            .collect();
        Self::new(Vec::new(), distance)
    }

    pub fn len(&self) -> usize {
        self.distance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distance.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn d(&self, i: usize, j: usize) -> T {
        self.distance[i][j]
    }
}

/// A probability distribution over the points of a ground space, stored
/// densely by point index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteDistribution<T>(Vec<T>);

impl<T: Scalar> FiniteDistribution<T> {
    pub fn new(masses: Vec<T>) -> Result<Self, MetricError> {
        if masses.is_empty() {
            return Err(MetricError::InvalidElement("empty distribution".into()));
        }
        if let Some(m) = masses.iter().find(|&&m| !(m >= -T::tol())) {
            return Err(MetricError::InvalidElement(format!("negative mass {m}")));
        }
        let total: T = masses.iter().copied().sum();
        if (total - T::one()).abs() > T::tol() {
            return Err(MetricError::InvalidElement(format!("masses sum to {total}")));
        }
        Ok(FiniteDistribution(masses))
    }

    /// Builds a distribution from a sparse support over `n` points.
    pub fn from_support(n: usize, support: &[usize], masses: &[T]) -> Result<Self, MetricError> {
        if support.len() != masses.len() {
            return Err(MetricError::DimensionMismatch {
                expected: support.len(),
                found: masses.len(),
            });
        }
        let mut dense = vec![T::zero(); n];
        for (&p, &m) in support.iter().zip(masses) {
            let slot = dense.get_mut(p).ok_or(MetricError::DimensionMismatch {
                expected: n,
                found: p + 1,
            })?;
            *slot += m;
        }
        Self::new(dense)
    }

    pub fn dirac(n: usize, k: usize) -> Self {
        let mut m = vec![T::zero(); n];
        m[k] = T::one();
        FiniteDistribution(m)
    }

    pub fn uniform(n: usize) -> Self {
        let w = T::one() / T::from_usize(n).expect("size");
        FiniteDistribution(vec![w; n])
    }

    pub fn masses(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `ε·self + (1-ε)·other`.
    pub fn mix(&self, eps: T, other: &Self) -> Self {
        FiniteDistribution(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| eps * a + (T::one() - eps) * b)
                .collect(),
        )
    }
}

/// Exact Kantorovich distance: the minimal cost `Σ c(x,y) d(x,y)` over
/// couplings `c` of `mu` and `nu`.
pub fn kantorovich_distance<T: Scalar>(
    mu: &FiniteDistribution<T>,
    nu: &FiniteDistribution<T>,
    ground: &GroundMetric<T>,
) -> Result<T, MetricError> {
    let n = ground.len();
    for m in [mu, nu] {
        if m.len() != n {
            return Err(MetricError::DimensionMismatch {
                expected: n,
                found: m.len(),
            });
        }
    }
    let (left, right): (T, T) = (mu.0.iter().copied().sum(), nu.0.iter().copied().sum());
    if (left - right).abs() > T::tol() {
        return Err(MetricError::MassMismatch {
            left: left.as_f64(),
            right: right.as_f64(),
        });
    }
    // Mass shared by both stays in place at zero cost; with a metric ground
    // this never increases the optimum.
    let mut supply = Vec::new();
    let mut demand = Vec::new();
    for k in 0..n {
        let (a, b) = (mu.0[k], nu.0[k]);
        if a > b {
            supply.push((k, a - b));
        } else if b > a {
            demand.push((k, b - a));
        }
    }
    transport(&supply, &demand, |i, j| ground.d(i, j))
}

/// Min-cost transport from `supply` to `demand` (point, amount) lists.
fn transport<T: Scalar>(
    supply: &[(usize, T)],
    demand: &[(usize, T)],
    cost: impl Fn(usize, usize) -> T,
) -> Result<T, MetricError> {
    let zero_cap = T::epsilon() * T::lit(4.0);
    let (ns, nd) = (supply.len(), demand.len());
    let c: Vec<Vec<T>> = supply
        .iter()
        .map(|&(i, _)| demand.iter().map(|&(j, _)| cost(i, j)).collect())
        .collect();
    let mut left: Vec<T> = supply.iter().map(|&(_, m)| m).collect();
    let mut need: Vec<T> = demand.iter().map(|&(_, m)| m).collect();
    let mut flow = vec![vec![T::zero(); nd]; ns];
    let inf = T::infinity();

    // Each augmentation saturates a supply, a demand, or a backward edge.
    let max_rounds = 4 * (ns + nd + 1) * (ns * nd + 1);
    for _ in 0..max_rounds {
        if left.iter().all(|&m| m <= zero_cap) || need.iter().all(|&m| m <= zero_cap) {
            break;
        }
        // Bellman-Ford over sources (0..ns) and sinks (0..nd).
        let mut ds: Vec<T> = left.iter().map(|&m| if m > zero_cap { T::zero() } else { inf }).collect();
        let mut dd = vec![inf; nd];
        let mut pred_s: Vec<Option<usize>> = vec![None; ns];
        let mut pred_d: Vec<usize> = vec![usize::MAX; nd];
        for _ in 0..(ns + nd + 1) {
            let mut changed = false;
            for i in 0..ns {
                if ds[i] == inf {
                    continue;
                }
                for j in 0..nd {
                    let cand = ds[i] + c[i][j];
                    if cand + zero_cap < dd[j] {
                        dd[j] = cand;
                        pred_d[j] = i;
                        changed = true;
                    }
                }
            }
            for j in 0..nd {
                if dd[j] == inf {
                    continue;
                }
                for i in 0..ns {
                    if flow[i][j] > zero_cap {
                        let cand = dd[j] - c[i][j];
                        if cand + zero_cap < ds[i] {
                            ds[i] = cand;
                            pred_s[i] = Some(j);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let target = (0..nd)
            .filter(|&j| need[j] > zero_cap && dd[j] < inf)
            .min_by(|&a, &b| dd[a].partial_cmp(&dd[b]).expect("finite distances"));
        let Some(mut j) = target else {
            return Err(MetricError::TransportFailed);
        };
        // Walk back to the source to find the bottleneck.
        let mut path = Vec::new();
        let mut bottleneck = need[j];
        let mut steps = 0;
        loop {
            let i = pred_d[j];
            path.push((i, j));
            match pred_s[i] {
                Some(prev) => {
                    bottleneck = bottleneck.min(flow[i][prev]);
                    path.push((i, prev));
                    j = prev;
                }
                None => {
                    bottleneck = bottleneck.min(left[i]);
                    left[i] -= bottleneck;
                    break;
                }
            }
            steps += 1;
            if steps > ns + nd {
                return Err(MetricError::TransportFailed);
            }
        }
        // path alternates forward (i -> j) and backward (i <- prev) edges
        for (k, &(i, jj)) in path.iter().enumerate() {
            if k % 2 == 0 {
                flow[i][jj] += bottleneck;
            } else {
                flow[i][jj] -= bottleneck;
            }
        }
        let sink = path[0].1;
        need[sink] -= bottleneck;
    }
    let mut total = T::zero();
    for i in 0..ns {
        for j in 0..nd {
            total += flow[i][j] * c[i][j];
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: &[f64]) -> FiniteDistribution<f64> {
        FiniteDistribution::new(m.to_vec()).unwrap()
    }

    #[test]
    fn two_point_closed_form() {
        let g = GroundMetric::discrete(2);
        let k = kantorovich_distance(&d(&[0.7, 0.3]), &d(&[0.4, 0.6]), &g).unwrap();
        assert!((k - 0.3).abs() < 1e-12);
        let g = GroundMetric::line(&[0.0, 0.25]).unwrap();
        let k = kantorovich_distance(&d(&[0.7, 0.3]), &d(&[0.4, 0.6]), &g).unwrap();
        assert!((k - 0.3 * 0.25).abs() < 1e-12);
        assert_eq!(kantorovich_distance(&d(&[0.7, 0.3]), &d(&[0.7, 0.3]), &g).unwrap(), 0.0);
    }

    #[test]
    fn line_matches_cdf_formula() {
        // On the line, K = ∫ |F_mu - F_nu|.
        let xs = [0.0, 0.1, 0.35, 0.6, 1.0];
        let g = GroundMetric::line(&xs).unwrap();
        let mu = d(&[0.1, 0.3, 0.2, 0.0, 0.4]);
        let nu = d(&[0.25, 0.05, 0.1, 0.5, 0.1]);
        let mut fm = 0.0;
        let mut fn_ = 0.0;
        let mut expected = 0.0;
        for k in 0..4 {
            fm += mu.masses()[k];
            fn_ += nu.masses()[k];
            expected += (fm - fn_).abs() * (xs[k + 1] - xs[k]);
        }
        let k = kantorovich_distance(&mu, &nu, &g).unwrap();
        assert!((k - expected).abs() < 1e-12, "{k} vs {expected}");
    }

    #[test]
    fn rejects_non_metrics() {
        assert!(GroundMetric::new(vec![], vec![vec![0.0, 1.5], vec![1.5, 0.0]]).is_err());
        assert!(GroundMetric::new(vec![], vec![vec![0.0, 0.5], vec![0.4, 0.0]]).is_err());
        assert!(GroundMetric::new(vec![], vec![vec![0.1, 0.5], vec![0.5, 0.0]]).is_err());
        let tri = vec![
            vec![0.0, 0.1, 0.9],
            vec![0.1, 0.0, 0.1],
            vec![0.9, 0.1, 0.0],
        ];
        assert!(matches!(
            GroundMetric::new(vec![], tri),
            Err(MetricError::GroundNotMetric(_))
        ));
        let g: Result<GroundMetric<f64>, _> =
            serde_json::from_str(r#"{"points":["a","b"],"distance":[[0,1.2],[1.2,0]]}"#);
        assert!(g.is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(FiniteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(FiniteDistribution::new(vec![-0.1, 1.1]).is_err());
        let s = FiniteDistribution::from_support(4, &[1, 3], &[0.25, 0.75]).unwrap();
        assert_eq!(s.masses(), &[0.0, 0.25, 0.0, 0.75]);
        let g = GroundMetric::discrete(3);
        assert!(matches!(
            kantorovich_distance(&d(&[1.0, 0.0]), &d(&[0.0, 1.0]), &g),
            Err(MetricError::DimensionMismatch { .. })
        ));
    }
}
