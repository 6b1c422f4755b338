//! Certified fixed points by Banach iteration, term evaluation in metric
//! models, and verifiers for the fixed-point laws.

mod eval;
mod iterate;
mod laws;

use thiserror::Error;

pub use eval::{
    check_term_compliance, compile, evaluate, solve_mu, solve_mu_two_seeds, solve_mu_with,
    CompiledTerm, Evaluator, SolveOptions,
};
pub use iterate::{banach_iterate, Certificate, StopRule};
pub use laws::{verify_law, Law, LawReport, LawSpec};

use crate::metric::ModelError;
use crate::pattern::PatternError;
use crate::term::TermError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("not contractive: modulus {modulus} is not below 1")]
    NotContractive { modulus: f64 },
    #[error("epsilon must be positive, got {0}")]
    NonpositiveEpsilon(f64),
    #[error("model evaluation failed: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("environment has {found} values, expected {expected}")]
    Environment { expected: usize, found: usize },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}
