//! Quantitative equational reasoning with fixed points.
//!
//! The crate is organised bottom-up:
//!
//! - [`pattern`]: Banach patterns, the per-argument contraction bookkeeping.
//! - [`term`]: signatures, terms with `mu` binders, parsing, substitution and
//!   pattern inference.
//! - [`deduction`]: bound propagation and a checker for derivations.
//! - [`metric`]: metric models (bounded vectors, Kantorovich, Hausdorff) and
//!   sampled pattern compliance.
//! - [`solver`]: certified Banach iteration and fixed-point law verifiers.
//! - [`mdp`]: policy evaluation for Markov decision processes as a fixed
//!   point of a term over the reward barycentric algebra.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod deduction;
pub mod mdp;
pub mod metric;
pub mod pattern;
pub mod scalar;
pub mod solver;
pub mod term;

pub use deduction::{
    banach_delta, check_derivation, iteration_bound, required_iterations, DeductionError,
    Derivation, DerivationBuilder, Judgement, QuantEquation, RejectReason, Verdict,
};
pub use mdp::{DiscountedSetup, Mdp, MdpError, Policy, PolicyTree};
pub use metric::{
    BoundedVector, Builtin, FiniteDistribution, FinitePointSet, GroundMetric, MetricError,
    MetricModel, ModelError,
};
pub use pattern::{Pattern, PatternError, WeightTuple};
pub use scalar::Scalar;
pub use solver::{Certificate, SolveError, StopRule};
pub use term::{FocusedTerm, FunctionSymbol, Signature, Term, TermError};

pub type Pattern64 = Pattern<f64>;
pub type WeightTuple64 = WeightTuple<f64>;
pub type Signature64 = Signature<f64>;
pub type QuantEquation64 = QuantEquation<f64>;
pub type Derivation64 = Derivation<f64>;
pub type Mdp64 = Mdp<f64>;
pub type Policy64 = Policy<f64>;
pub type PolicyTree64 = PolicyTree<f64>;
pub type DiscountedSetup64 = DiscountedSetup<f64>;
pub type GroundMetric64 = GroundMetric<f64>;
pub type FiniteDistribution64 = FiniteDistribution<f64>;
pub type BoundedVector64 = BoundedVector<f64>;
pub type VectorModel64 = metric::VectorModel<f64>;
pub type DistributionModel64 = metric::DistributionModel<f64>;
pub type PointSetModel64 = metric::PointSetModel<f64>;
