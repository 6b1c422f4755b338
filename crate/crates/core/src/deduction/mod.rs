//! Quantitative equations, derivations, and their checker.
//!
//! A derivation is a list of steps, each concluding a judgement
//! `Γ ⊢ s =_ε t` by one rule from earlier steps. Hypotheses of a premise
//! must be included in the hypotheses of the step that uses it, except
//! under `Cut`, which discharges them.
//!
//! Rules: `Refl`, `Symm`, `Triang`, `Max`, `NExp`, `Banach`, `OneBound`,
//! `Approx`, `Assumpt`, `Cut`, `Subst`, and `Axiom` (cites an entry of the
//! derivation's axiom list). The infinitary continuity rule has no step
//! kind; limit arguments go through [`required_iterations`] and
//! [`iteration_bound`] instead.

mod bounds;
mod builder;
mod checker;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

pub use bounds::{a_priori, banach_delta, iteration_bound, required_iterations};
pub use builder::DerivationBuilder;
pub use checker::{apply_approx, check_derivation, RejectReason, Verdict};

use crate::pattern::PatternError;
use crate::scalar::{close, fmt_g, Scalar};
use crate::term::{parse_term, Signature, Term, TermError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeductionError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("negative epsilon {0}")]
    NegativeEpsilon(f64),
    #[error("epsilon must be positive, got {0}")]
    NonpositiveEpsilon(f64),
    #[error("modulus {0} is not below 1")]
    NotContractive(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{location}: {message}")]
    Load { location: String, message: String },
}

/// `s =_ε t`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantEquation<T> {
    pub lhs: Term,
    pub rhs: Term,
    pub eps: T,
}

impl<T: Scalar> QuantEquation<T> {
    pub fn new(lhs: Term, rhs: Term, eps: T) -> Result<Self, DeductionError> {
        if eps < T::zero() {
            return Err(DeductionError::NegativeEpsilon(eps.as_f64()));
        }
        Ok(QuantEquation { lhs, rhs, eps })
    }

    pub fn parse(lhs: &str, rhs: &str, eps: T, sig: &Signature<T>) -> Result<Self, DeductionError> {
        Self::new(parse_term(lhs, sig)?, parse_term(rhs, sig)?, eps)
    }

    pub fn same_terms(&self, other: &Self) -> bool {
        self.lhs == other.lhs && self.rhs == other.rhs
    }

    /// Same terms and `ε` within tolerance.
    pub fn matches(&self, other: &Self) -> bool {
        self.same_terms(other) && close(self.eps, other.eps)
    }

    pub fn need(&self) -> usize {
        self.lhs.need().max(self.rhs.need())
    }
}

impl<T: Scalar> fmt::Display for QuantEquation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =[{}] {}", self.lhs, fmt_g(self.eps.as_f64()), self.rhs)
    }
}

/// `Γ ⊢ φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Judgement<T> {
    pub hypotheses: Vec<QuantEquation<T>>,
    pub conclusion: QuantEquation<T>,
}

impl<T: Scalar> Judgement<T> {
    pub fn new(hypotheses: Vec<QuantEquation<T>>, conclusion: QuantEquation<T>) -> Self {
        Judgement {
            hypotheses,
            conclusion,
        }
    }

    pub fn has_hypothesis(&self, eq: &QuantEquation<T>) -> bool {
        self.hypotheses.iter().any(|h| h.matches(eq))
    }
}

impl<T: Scalar> fmt::Display for Judgement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, h) in self.hypotheses.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, " ⊢ {}", self.conclusion)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivationStep<T> {
    pub rule: String,
    /// 0-based indices of earlier steps.
    pub premises: Vec<usize>,
    pub conclusion: Judgement<T>,
    pub params: Map<String, Value>,
    /// Accept any conclusion `ε` at least the derived one.
    pub weakened: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation<T: Scalar> {
    pub signature: Signature<T>,
    pub axioms: Vec<Judgement<T>>,
    pub steps: Vec<DerivationStep<T>>,
}

impl<T: Scalar> Derivation<T> {
    pub fn check(&self) -> Verdict {
        check_derivation(self)
    }

    pub fn from_json(src: &str) -> Result<Self, DeductionError> {
        let doc: DerivationDoc<T> = serde_json::from_str(src).map_err(|e| DeductionError::Load {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        doc.resolve()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DerivationDoc::from_derivation(self))
            .expect("derivations serialize")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct EquationDoc<T: Scalar> {
    lhs: String,
    rhs: String,
    eps: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct JudgementDoc<T: Scalar> {
    #[serde(default)]
    hypotheses: Vec<EquationDoc<T>>,
    equation: EquationDoc<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct StepDoc<T: Scalar> {
    rule: String,
    #[serde(default)]
    premises: Vec<usize>,
    conclusion: JudgementDoc<T>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    weakened: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct DerivationDoc<T: Scalar> {
    signature: Signature<T>,
    #[serde(default)]
    axioms: Vec<JudgementDoc<T>>,
    steps: Vec<StepDoc<T>>,
}

impl<T: Scalar> EquationDoc<T> {
    fn resolve(&self, sig: &Signature<T>, location: &str) -> Result<QuantEquation<T>, DeductionError> {
        QuantEquation::parse(&self.lhs, &self.rhs, self.eps, sig).map_err(|e| DeductionError::Load {
            location: location.to_string(),
            message: e.to_string(),
        })
    }

    fn from_equation(eq: &QuantEquation<T>) -> Self {
        EquationDoc {
            lhs: eq.lhs.to_string(),
            rhs: eq.rhs.to_string(),
            eps: eq.eps,
        }
    }
}

impl<T: Scalar> JudgementDoc<T> {
    fn resolve(&self, sig: &Signature<T>, location: &str) -> Result<Judgement<T>, DeductionError> {
        let hypotheses = self
            .hypotheses
            .iter()
            .enumerate()
            .map(|(k, h)| h.resolve(sig, &format!("{location}.hypotheses[{k}]")))
            .collect::<Result<_, _>>()?;
        let conclusion = self.equation.resolve(sig, &format!("{location}.equation"))?;
        Ok(Judgement::new(hypotheses, conclusion))
    }

    fn from_judgement(j: &Judgement<T>) -> Self {
        JudgementDoc {
            hypotheses: j.hypotheses.iter().map(EquationDoc::from_equation).collect(),
            equation: EquationDoc::from_equation(&j.conclusion),
        }
    }
}

impl<T: Scalar> DerivationDoc<T> {
    fn resolve(self) -> Result<Derivation<T>, DeductionError> {
        let sig = self.signature;
        let axioms = self
            .axioms
            .iter()
            .enumerate()
            .map(|(k, a)| a.resolve(&sig, &format!("axioms[{k}]")))
            .collect::<Result<_, _>>()?;
        let steps = self
            .steps
            .into_iter()
            .enumerate()
            .map(|(k, s)| {
                Ok(DerivationStep {
                    conclusion: s.conclusion.resolve(&sig, &format!("steps[{k}].conclusion"))?,
                    rule: s.rule,
                    premises: s.premises,
                    params: s.params,
                    weakened: s.weakened,
                })
            })
            .collect::<Result<_, DeductionError>>()?;
        Ok(Derivation {
            signature: sig,
            axioms,
            steps,
        })
    }

    fn from_derivation(d: &Derivation<T>) -> Self {
        DerivationDoc {
            signature: d.signature.clone(),
            axioms: d.axioms.iter().map(JudgementDoc::from_judgement).collect(),
            steps: d
                .steps
                .iter()
                .map(|s| StepDoc {
                    rule: s.rule.clone(),
                    premises: s.premises.clone(),
                    conclusion: JudgementDoc::from_judgement(&s.conclusion),
                    params: s.params.clone(),
                    weakened: s.weakened,
                })
                .collect(),
        }
    }
}
