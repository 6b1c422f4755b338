//! Builtin interpretations and the models assembled from them.
//!
//! Interpretation ids:
//!
//! - `barycentric:<ε>`: `x +_ε y = ε·x + (1-ε)·y`, pattern `{⟨ε,1-ε⟩}`. On
//!   point sets it is the Minkowski combination `{a +_ε b}`.
//! - `union`: set union on point sets, pattern `{⟨1,0⟩,⟨0,1⟩}`.
//! - `affine:{"matrices":[M1..Mk],"offset":c}`: on vectors,
//!   `(x1..xk) ↦ Σ Mi·xi + c`, pattern `{⟨rowsum_1(s),…,rowsum_k(s)⟩ | s}`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{
    hausdorff_distance, kantorovich_distance, sup_distance, BoundedVector, FiniteDistribution,
    FinitePointSet, GroundMetric, MetricError, MetricModel, ModelError,
};
use crate::pattern::Pattern;
use crate::scalar::{close, le_tol, Scalar};
use crate::term::{FunctionSymbol, Signature};

/// Nonnegative affine map on `[0,1]^S` with total row mass at most 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct AffineMap<T: Scalar> {
    pub matrices: Vec<Vec<Vec<T>>>,
    pub offset: Vec<T>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(matrices: Vec<Vec<Vec<T>>>, offset: Vec<T>) -> Result<Self, String> {
        let n = offset.len();
        if n == 0 {
            return Err("offset must be nonempty".into());
        }
        for (k, m) in matrices.iter().enumerate() {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(format!("matrix {} is not {n}x{n}", k + 1));
            }
            if m.iter().flatten().any(|&w| !(w >= T::zero())) {
                return Err(format!("matrix {} has a negative entry", k + 1));
            }
        }
        for s in 0..n {
            let c = offset[s];
            if !(c >= T::zero()) || !le_tol(c, T::one()) {
                return Err(format!("offset {c} at state {s} outside [0, 1]"));
            }
            let total: T = matrices.iter().map(|m| m[s].iter().copied().sum::<T>()).sum::<T>() + c;
            if !le_tol(total, T::one()) {
                return Err(format!("row mass {total} at state {s} exceeds 1"));
            }
        }
        Ok(AffineMap { matrices, offset })
    }

    /// Scalar affine map `x1..xk ↦ Σ a_i x_i + c` on `[0,1]`.
    pub fn scalar(coefficients: &[T], c: T) -> Result<Self, String> {
        Self::new(coefficients.iter().map(|&a| vec![vec![a]]).collect(), vec![c])
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn arity(&self) -> usize {
        self.matrices.len()
    }

    pub fn pattern(&self) -> Pattern<T> {
        let k = self.arity();
        let rows = (0..self.dim())
            .map(|s| {
                self.matrices
                    .iter()
                    .map(|m| m[s].iter().copied().sum())
                    .collect()
            })
            .collect();
        Pattern::new(rows, k).expect("row masses are subconvex")
    }

    pub fn apply(&self, args: &[&[T]]) -> Vec<T> {
        let mut out = self.offset.clone();
        for (m, x) in self.matrices.iter().zip(args) {
            for (o, row) in out.iter_mut().zip(m) {
                *o += row.iter().zip(x.iter()).map(|(&w, &v)| w * v).sum::<T>();
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin<T: Scalar> {
    Barycentric(T),
    Union,
    Affine(AffineMap<T>),
}

impl<T: Scalar> Builtin<T> {
    pub fn parse(id: &str) -> Result<Self, ModelError> {
        let bad = |reason: String| ModelError::BadBuiltin {
            id: id.to_string(),
            reason,
        };
        let (head, rest) = match id.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (id.trim(), None),
        };
        match (head, rest) {
            ("barycentric", Some(r)) => {
                let eps: f64 = r.parse().map_err(|_| bad(format!("`{r}` is not a number")))?;
                if !(0.0..=1.0).contains(&eps) {
                    return Err(bad(format!("weight {eps} outside [0, 1]")));
                }
                Ok(Builtin::Barycentric(T::lit(eps)))
            }
            ("union", None) => Ok(Builtin::Union),
            ("affine", Some(r)) => {
                let doc: AffineMap<T> =
                    serde_json::from_str(r).map_err(|e| bad(e.to_string()))?;
                AffineMap::new(doc.matrices, doc.offset)
                    .map(Builtin::Affine)
                    .map_err(bad)
            }
            _ => Err(bad("unknown interpretation".into())),
        }
    }

    pub fn id(&self) -> String {
        match self {
            Builtin::Barycentric(e) => format!("barycentric:{e}"),
            Builtin::Union => "union".into(),
            Builtin::Affine(m) => {
                format!("affine:{}", serde_json::to_string(m).expect("serializable"))
            }
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Builtin::Barycentric(_) | Builtin::Union => 2,
            Builtin::Affine(m) => m.arity(),
        }
    }

    /// The pattern the operation satisfies on every carrier supporting it.
    pub fn natural_pattern(&self) -> Pattern<T> {
        match self {
            Builtin::Barycentric(e) => {
                Pattern::new(vec![vec![*e, T::one() - *e]], 2).expect("barycentric weights")
            }
            Builtin::Union => Pattern::nonexpansive(2),
            Builtin::Affine(m) => m.pattern(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Builtin::Barycentric(_) => "barycentric",
            Builtin::Union => "union",
            Builtin::Affine(_) => "affine",
        }
    }
}

/// A metric space able to host builtin operations.
pub trait Carrier<T: Scalar> {
    type Elem: Clone + Debug;

    fn name(&self) -> &'static str;

    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> Result<T, MetricError>;

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;

    fn origin(&self) -> Self::Elem;

    /// Errors unless the carrier can interpret `op`.
    fn supports(&self, op: &Builtin<T>) -> Result<(), ModelError>;

    fn apply(&self, op: &Builtin<T>, args: &[Self::Elem]) -> Result<Self::Elem, ModelError>;

    fn unsupported(&self, op: &Builtin<T>) -> ModelError {
        ModelError::Unsupported {
            builtin: op.kind().into(),
            carrier: self.name().into(),
        }
    }
}

/// `[0,1]^dim` under the sup metric.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpace {
    pub dim: usize,
}

impl<T: Scalar> Carrier<T> for VectorSpace {
    type Elem = BoundedVector<T>;

    fn name(&self) -> &'static str {
        "vectors"
    }

    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> Result<T, MetricError> {
        sup_distance(a, b)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem {
        let coords = (0..self.dim).map(|_| T::lit(rng.gen::<f64>())).collect();
        BoundedVector::new(coords).expect("unit interval")
    }

    fn origin(&self) -> Self::Elem {
        BoundedVector::zeros(self.dim)
    }

    fn supports(&self, op: &Builtin<T>) -> Result<(), ModelError> {
        match op {
            Builtin::Barycentric(_) => Ok(()),
            Builtin::Affine(m) if m.dim() == self.dim => Ok(()),
            Builtin::Affine(m) => Err(MetricError::DimensionMismatch {
                expected: self.dim,
                found: m.dim(),
            }
            .into()),
            Builtin::Union => Err(self.unsupported(op)),
        }
    }

    fn apply(&self, op: &Builtin<T>, args: &[Self::Elem]) -> Result<Self::Elem, ModelError> {
        for a in args {
            if a.dim() != self.dim {
                return Err(MetricError::DimensionMismatch {
                    expected: self.dim,
                    found: a.dim(),
                }
                .into());
            }
        }
        let out = match op {
            Builtin::Barycentric(e) => args[0]
                .coords()
                .iter()
                .zip(args[1].coords())
                .map(|(&x, &y)| *e * x + (T::one() - *e) * y)
                .collect(),
            Builtin::Affine(m) => {
                let views: Vec<&[T]> = args.iter().map(|a| a.coords()).collect();
                m.apply(&views)
            }
            Builtin::Union => return Err(self.unsupported(op)),
        };
        Ok(BoundedVector::new(out)?)
    }
}

/// Distributions over a finite ground space under the Kantorovich metric.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpace<T: Scalar> {
    pub ground: GroundMetric<T>,
}

fn sample_distribution<T: Scalar>(n: usize, rng: &mut dyn RngCore) -> FiniteDistribution<T> {
    // random support, then normalised uniform weights on it
    let forced = rng.gen_range(0..n);
    let raw: Vec<f64> = (0..n)
        .map(|k| {
            if k == forced || rng.gen_bool(0.5) {
                rng.gen::<f64>() + 1e-3
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    FiniteDistribution::new(raw.iter().map(|&w| T::lit(w / total)).collect())
        .expect("normalised weights")
}

impl<T: Scalar> Carrier<T> for DistributionSpace<T> {
    type Elem = FiniteDistribution<T>;

    fn name(&self) -> &'static str {
        "distributions"
    }

    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> Result<T, MetricError> {
        kantorovich_distance(a, b, &self.ground)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem {
        sample_distribution(self.ground.len(), rng)
    }

    fn origin(&self) -> Self::Elem {
        FiniteDistribution::uniform(self.ground.len())
    }

    fn supports(&self, op: &Builtin<T>) -> Result<(), ModelError> {
        match op {
            Builtin::Barycentric(_) => Ok(()),
            _ => Err(self.unsupported(op)),
        }
    }

    fn apply(&self, op: &Builtin<T>, args: &[Self::Elem]) -> Result<Self::Elem, ModelError> {
        match op {
            Builtin::Barycentric(e) => Ok(args[0].mix(*e, &args[1])),
            _ => Err(self.unsupported(op)),
        }
    }
}

/// Finite sets of distributions under Hausdorff-over-Kantorovich.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSetSpace<T: Scalar> {
    pub ground: GroundMetric<T>,
    /// Largest sampled set.
    pub max_size: usize,
}

impl<T: Scalar> PointSetSpace<T> {
    pub fn new(ground: GroundMetric<T>) -> Self {
        PointSetSpace { ground, max_size: 3 }
    }
}

fn same_distribution<T: Scalar>(a: &FiniteDistribution<T>, b: &FiniteDistribution<T>) -> bool {
    a.masses().iter().zip(b.masses()).all(|(&x, &y)| close(x, y))
}

fn dedup<T: Scalar>(items: Vec<FiniteDistribution<T>>) -> Vec<FiniteDistribution<T>> {
    let mut out: Vec<FiniteDistribution<T>> = Vec::with_capacity(items.len());
    for d in items {
        if !out.iter().any(|e| same_distribution(e, &d)) {
            out.push(d);
        }
    }
    out
}

impl<T: Scalar> Carrier<T> for PointSetSpace<T> {
    type Elem = FinitePointSet<FiniteDistribution<T>>;

    fn name(&self) -> &'static str {
        "point sets"
    }

    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> Result<T, MetricError> {
        hausdorff_distance(a.elements(), b.elements(), |x, y| {
            kantorovich_distance(x, y, &self.ground)
        })
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem {
        let size = rng.gen_range(1..=self.max_size.max(1));
        let items = (0..size)
            .map(|_| sample_distribution(self.ground.len(), rng))
            .collect();
        FinitePointSet::new(dedup(items)).expect("nonempty sample")
    }

    fn origin(&self) -> Self::Elem {
        FinitePointSet::singleton(FiniteDistribution::uniform(self.ground.len()))
    }

    fn supports(&self, op: &Builtin<T>) -> Result<(), ModelError> {
        match op {
            Builtin::Barycentric(_) | Builtin::Union => Ok(()),
            Builtin::Affine(_) => Err(self.unsupported(op)),
        }
    }

    fn apply(&self, op: &Builtin<T>, args: &[Self::Elem]) -> Result<Self::Elem, ModelError> {
        let items = match op {
            Builtin::Union => args[0]
                .elements()
                .iter()
                .chain(args[1].elements())
                .cloned()
                .collect(),
            Builtin::Barycentric(e) => {
                let mut v = Vec::new();
                for a in args[0].elements() {
                    for b in args[1].elements() {
                        v.push(a.mix(*e, b));
                    }
                }
                v
            }
            Builtin::Affine(_) => return Err(self.unsupported(op)),
        };
        Ok(FinitePointSet::new(dedup(items))?)
    }
}

/// A model whose symbols are bound to builtin operations on a carrier.
#[derive(Debug, Clone)]
pub struct BuiltinModel<T: Scalar, C: Carrier<T>> {
    carrier: C,
    ops: BTreeMap<String, Builtin<T>>,
    signature: Signature<T>,
}

pub type VectorModel<T> = BuiltinModel<T, VectorSpace>;
pub type DistributionModel<T> = BuiltinModel<T, DistributionSpace<T>>;
pub type PointSetModel<T> = BuiltinModel<T, PointSetSpace<T>>;

impl<T: Scalar, C: Carrier<T>> BuiltinModel<T, C> {
    pub fn new(carrier: C) -> Self {
        BuiltinModel {
            carrier,
            ops: BTreeMap::new(),
            signature: Signature::new(),
        }
    }

    pub fn carrier(&self) -> &C {
        &self.carrier
    }

    /// Binds `symbol` with the operation's natural pattern.
    pub fn bind(&mut self, symbol: &str, op: Builtin<T>) -> Result<(), ModelError> {
        let pattern = op.natural_pattern();
        self.bind_with_pattern(symbol, op, pattern)
    }

    /// Binds `symbol` declaring `pattern`, which is not checked against the
    /// operation (see [`super::check_pattern_compliance`]).
    pub fn bind_with_pattern(
        &mut self,
        symbol: &str,
        op: Builtin<T>,
        pattern: Pattern<T>,
    ) -> Result<(), ModelError> {
        self.carrier.supports(&op)?;
        if pattern.arity() != op.arity() {
            return Err(ModelError::Arity {
                symbol: symbol.into(),
                expected: op.arity(),
                found: pattern.arity(),
            });
        }
        self.signature.add(FunctionSymbol::new(symbol, pattern)?)?;
        self.ops.insert(symbol.to_string(), op);
        Ok(())
    }

    /// Builder-style [`BuiltinModel::bind`] from an interpretation id.
    pub fn with(mut self, symbol: &str, id: &str) -> Result<Self, ModelError> {
        self.bind(symbol, Builtin::parse(id)?)?;
        Ok(self)
    }

    pub fn builtin(&self, symbol: &str) -> Option<&Builtin<T>> {
        self.ops.get(symbol)
    }
}

impl<T: Scalar, C: Carrier<T>> MetricModel for BuiltinModel<T, C> {
    type Scalar = T;
    type Elem = C::Elem;

    fn signature(&self) -> &Signature<T> {
        &self.signature
    }

    fn distance(&self, x: &C::Elem, y: &C::Elem) -> Result<T, ModelError> {
        Ok(self.carrier.distance(x, y)?)
    }

    fn interpret(&self, symbol: &str, args: &[C::Elem]) -> Result<C::Elem, ModelError> {
        let op = self
            .ops
            .get(symbol)
            .ok_or_else(|| ModelError::Unbound(symbol.to_string()))?;
        if args.len() != op.arity() {
            return Err(ModelError::Arity {
                symbol: symbol.into(),
                expected: op.arity(),
                found: args.len(),
            });
        }
        self.carrier.apply(op, args)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> C::Elem {
        self.carrier.sample(rng)
    }

    fn origin(&self) -> C::Elem {
        self.carrier.origin()
    }
}
