pub mod analyze;
pub mod laws;
pub mod mdp;
pub mod pattern;
pub mod prove;
pub mod solve;

use std::path::Path;

use qfix::solver::SolveError;
use qfix::term::parse_term;
use qfix::{Signature, Term};

use crate::CliError;

/// Input problems exit with 2; a solve that could not certify exits with 1.
pub(crate) fn solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::NoConvergence { .. } | SolveError::Model(_) => CliError::Failed(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

pub(crate) fn term_at(src: &str, sig: &Signature<f64>, file: &Path, at: &str) -> Result<Term, CliError> {
    parse_term(src.trim(), sig).map_err(|e| CliError::document(file, at, e))
}
