use proptest::prelude::*;

use qfix::metric::{hausdorff_distance, kantorovich_distance, sup_distance};
use qfix::{BoundedVector, FiniteDistribution, GroundMetric};

const TOL: f64 = 1e-9;

/// Random points of the unit square under the sup norm.
fn ground(n: usize) -> impl Strategy<Value = GroundMetric<f64>> {
    prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), n).prop_map(|pts| {
        let d = pts
            .iter()
            .map(|a| pts.iter().map(|b| (a.0 - b.0).abs().max((a.1 - b.1).abs())).collect())
            .collect();
        let names = (0..pts.len()).map(|k| format!("p{k}")).collect();
        GroundMetric::new(names, d).unwrap()
    })
}

fn distribution(n: usize) -> impl Strategy<Value = FiniteDistribution<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.0..1.0f64], n).prop_map(move |raw| {
        let total: f64 = raw.iter().sum();
        if total == 0.0 {
            FiniteDistribution::dirac(n, 0)
        } else {
            FiniteDistribution::new(raw.iter().map(|w| w / total).collect()).unwrap()
        }
    })
}

#[allow(clippy::type_complexity)]
fn kantorovich_case() -> impl Strategy<
    Value = (
        GroundMetric<f64>,
        FiniteDistribution<f64>,
        FiniteDistribution<f64>,
        FiniteDistribution<f64>,
    ),
> {
    (1usize..6).prop_flat_map(|n| (ground(n), distribution(n), distribution(n), distribution(n)))
}

fn vector(n: usize) -> impl Strategy<Value = BoundedVector<f64>> {
    prop::collection::vec(0.0..=1.0f64, n).prop_map(|v| BoundedVector::new(v).unwrap())
}

fn point_set() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, 1..5)
}

fn line(a: &f64, b: &f64) -> Result<f64, qfix::MetricError> {
    Ok((a - b).abs())
}

/// On the line the Kantorovich distance is the area between the two
/// cumulative distribution functions.
fn cdf_area(pos: &[f64], mu: &[f64], nu: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..pos.len()).collect();
    order.sort_by(|&i, &j| pos[i].total_cmp(&pos[j]));
    let (mut f, mut area) = (0.0, 0.0);
    for w in order.windows(2) {
        f += mu[w[0]] - nu[w[0]];
        area += f.abs() * (pos[w[1]] - pos[w[0]]);
    }
    area
}

proptest! {
    #[test]
    fn sup_is_a_metric((x, y, z) in (1usize..6).prop_flat_map(|n| (vector(n), vector(n), vector(n)))) {
        let d = |a: &BoundedVector<f64>, b: &BoundedVector<f64>| sup_distance(a, b).unwrap();
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + TOL);
        prop_assert!(d(&x, &y) <= 1.0);
    }

    #[test]
    fn kantorovich_is_a_metric((g, mu, nu, rho) in kantorovich_case()) {
        let k = |a: &FiniteDistribution<f64>, b: &FiniteDistribution<f64>| kantorovich_distance(a, b, &g).unwrap();
        prop_assert!(k(&mu, &mu).abs() <= TOL);
        prop_assert!((k(&mu, &nu) - k(&nu, &mu)).abs() <= TOL);
        prop_assert!(k(&mu, &rho) <= k(&mu, &nu) + k(&nu, &rho) + TOL);
        prop_assert!(k(&mu, &nu) >= -TOL && k(&mu, &nu) <= 1.0 + TOL);
    }

    #[test]
    fn kantorovich_is_convex_under_mixing(
        (g, mu, nu, rho) in kantorovich_case(),
        eps in 0.0..=1.0f64,
    ) {
        let k = |a: &FiniteDistribution<f64>, b: &FiniteDistribution<f64>| kantorovich_distance(a, b, &g).unwrap();
        let lhs = k(&mu.mix(eps, &rho), &nu.mix(eps, &rho));
        prop_assert!(lhs <= eps * k(&mu, &nu) + TOL);
        let lhs = k(&mu.mix(eps, &nu), &rho.mix(eps, &rho));
        prop_assert!(lhs <= eps * k(&mu, &rho) + (1.0 - eps) * k(&nu, &rho) + TOL);
    }

    #[test]
    fn kantorovich_on_the_line_is_the_cdf_area(
        (pos, mu, nu) in (1usize..7).prop_flat_map(|n| {
            (prop::collection::vec(0.0..=1.0f64, n), distribution(n), distribution(n))
        }),
    ) {
        let g = GroundMetric::line(&pos).unwrap();
        let got = kantorovich_distance(&mu, &nu, &g).unwrap();
        let want = cdf_area(&pos, mu.masses(), nu.masses());
        prop_assert!((got - want).abs() <= TOL, "{} vs {}", got, want);
    }

    #[test]
    fn hausdorff_is_a_metric(a in point_set(), b in point_set(), c in point_set()) {
        let h = |x: &[f64], y: &[f64]| hausdorff_distance(x, y, line).unwrap();
        prop_assert_eq!(h(&a, &a), 0.0);
        prop_assert_eq!(h(&a, &b), h(&b, &a));
        prop_assert!(h(&a, &c) <= h(&a, &b) + h(&b, &c) + TOL);
    }

    #[test]
    fn hausdorff_shrinks_under_common_union(a in point_set(), b in point_set(), c in point_set()) {
        let h = |x: &[f64], y: &[f64]| hausdorff_distance(x, y, line).unwrap();
        let ac: Vec<f64> = a.iter().chain(&c).copied().collect();
        let bc: Vec<f64> = b.iter().chain(&c).copied().collect();
        prop_assert!(h(&ac, &bc) <= h(&a, &b) + TOL);
    }
}

#[test]
fn empty_sets_have_no_distance() {
    assert!(hausdorff_distance::<f64, f64, _>(&[], &[0.5], line).is_err());
}

#[test]
fn kantorovich_between_diracs_is_the_ground_distance() {
    let g = GroundMetric::<f64>::line(&[0.0, 0.25, 0.9]).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let d = kantorovich_distance(&FiniteDistribution::dirac(3, i), &FiniteDistribution::dirac(3, j), &g).unwrap();
            assert!((d - g.d(i, j)).abs() < 1e-15);
        }
    }
}
