//! Metric models: interpretations of a signature in a 1-bounded metric
//! space.
//!
//! Three carriers are provided: bounded vectors under the sup metric,
//! finite distributions over a finite ground space under the Kantorovich
//! metric, and finite sets of such distributions under the Hausdorff
//! metric. Symbols are bound to builtin operations ([`Builtin`]).

mod builtin;
mod compliance;
mod distribution;
mod pointset;
mod vector;

use std::fmt::Debug;

use rand::RngCore;
use thiserror::Error;

pub use builtin::{
    AffineMap, Builtin, BuiltinModel, Carrier, DistributionModel, DistributionSpace,
    PointSetModel, PointSetSpace, VectorModel, VectorSpace,
};
pub use compliance::{check_pattern_compliance, ComplianceReport};
pub use distribution::{kantorovich_distance, FiniteDistribution, GroundMetric};
pub use pointset::{hausdorff_distance, FinitePointSet};
pub use vector::{sup_distance, BoundedVector};

use crate::pattern::PatternError;
use crate::scalar::Scalar;
use crate::term::{Signature, TermError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ground distance is not a 1-bounded metric: {0}")]
    GroundNotMetric(String),
    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },
    #[error("empty point set")]
    EmptySet,
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("transport solver did not converge")]
    TransportFailed,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("symbol `{0}` has no interpretation")]
    Unbound(String),
    #[error("builtin `{builtin}` is not available on {carrier}")]
    Unsupported { builtin: String, carrier: String },
    #[error("invalid builtin `{id}`: {reason}")]
    BadBuiltin { id: String, reason: String },
    #[error("`{symbol}` takes {expected} arguments, got {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
}

/// An algebra over a signature whose carrier is a 1-bounded metric space.
pub trait MetricModel {
    type Scalar: Scalar;
    type Elem: Clone + Debug;

    fn signature(&self) -> &Signature<Self::Scalar>;

    fn distance(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Scalar, ModelError>;

    fn interpret(&self, symbol: &str, args: &[Self::Elem]) -> Result<Self::Elem, ModelError>;

    /// Draws an element; deterministic given the generator state.
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;

    /// Designated starting point for iteration.
    fn origin(&self) -> Self::Elem;
}
