//! Terms over a Banach signature, with positional `mu` binders.
//!
//! A term is read over a context of `m` slots `x1..xm`. In `Mu(i, body)`
//! the body is read over `m + 1` slots: the outer context with the bound
//! slot inserted at position `i`. Body variables `xk` with `k < i` refer to
//! outer slot `k`, `xi` is the bound variable, and `k > i` refers to outer
//! slot `k - 1`.

mod parse;
mod signature;
mod subst;

use std::fmt;

use thiserror::Error;

pub use parse::{parse_term, parse_term_unchecked};
pub use signature::{FunctionSymbol, Signature};
pub use subst::{identify, iterate_term, lift, substitute, substitute_all};

use crate::pattern::{Pattern, PatternError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TermError {
    #[error("syntax error at column {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("mu over slot {slot} is not contractive (modulus {weight})")]
    NotContractive { slot: usize, weight: f64 },
    #[error("slot {slot} out of range for context arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid symbol `{name}`: {reason}")]
    InvalidSymbol { name: String, reason: String },
    #[error(transparent)]
    Pattern(PatternError),
}

impl From<PatternError> for TermError {
    fn from(e: PatternError) -> Self {
        match e {
            PatternError::NotContractive { slot, weight } => {
                TermError::NotContractive { slot, weight }
            }
            other => TermError::Pattern(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    /// `xk`, 1-based.
    Var(usize),
    App(String, Vec<Term>),
    /// `mu i. body`.
    Mu(usize, Box<Term>),
}

impl Term {
    pub fn var(k: usize) -> Self {
        Term::Var(k)
    }

    pub fn app(symbol: &str, args: Vec<Term>) -> Self {
        Term::App(symbol.to_string(), args)
    }

    pub fn constant(symbol: &str) -> Self {
        Term::App(symbol.to_string(), Vec::new())
    }

    pub fn mu(slot: usize, body: Term) -> Self {
        Term::Mu(slot, Box::new(body))
    }

    /// The smallest context arity the term can be read over.
    pub fn need(&self) -> usize {
        match self {
            Term::Var(k) => *k,
            Term::App(_, args) => args.iter().map(Term::need).max().unwrap_or(0),
            Term::Mu(i, body) => body.need().max(*i) - 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Mu(_, body) => 1 + body.depth(),
        }
    }

    /// Checks symbols, arities, slot ranges and contractivity over `arity`
    /// context slots.
    pub fn check<T: Scalar>(&self, sig: &Signature<T>, arity: usize) -> Result<(), TermError> {
        infer_pattern(self, sig, arity).map(|_| ())
    }
}

/// Infers the Banach pattern of `t` read over `m` context slots.
///
/// Variables yield unit tuples, applications compose the symbol pattern
/// with the argument patterns (so shared variables are contracted
/// automatically), and `mu` applies the fixed-point pattern operation.
/// Dominated tuples are dropped after every step; they never change the
/// bound, and composition would otherwise multiply them.
pub fn infer_pattern<T: Scalar>(t: &Term, sig: &Signature<T>, m: usize) -> Result<Pattern<T>, TermError> {
    match t {
        Term::Var(k) => {
            if *k == 0 || *k > m {
                return Err(TermError::SlotOutOfRange { slot: *k, arity: m });
            }
            Ok(Pattern::unit(m, *k)?)
        }
        Term::App(name, args) => {
            let symbol = sig.lookup(name)?;
            if symbol.arity != args.len() {
                return Err(TermError::ArityMismatch {
                    symbol: name.clone(),
                    expected: symbol.arity,
                    found: args.len(),
                });
            }
            let inner = args
                .iter()
                .map(|a| infer_pattern(a, sig, m))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(symbol.pattern.compose_into(&inner, m)?.prune_dominated())
        }
        Term::Mu(i, body) => {
            if *i == 0 || *i > m + 1 {
                return Err(TermError::SlotOutOfRange {
                    slot: *i,
                    arity: m + 1,
                });
            }
            Ok(infer_pattern(body, sig, m + 1)?.mu(*i)?.prune_dominated())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(k) => write!(f, "x{k}"),
            Term::App(name, args) if args.is_empty() => write!(f, "{name}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::Mu(i, body) => write!(f, "mu {i}. {body}"),
        }
    }
}

/// `f⦅x_i⦆`: a term with a distinguished slot.
#[derive(Debug, Clone, PartialEq)]
pub struct FocusedTerm {
    pub term: Term,
    /// Context arity the term is read over.
    pub arity: usize,
    pub focus: usize,
}

impl FocusedTerm {
    pub fn new(term: Term, arity: usize, focus: usize) -> Result<Self, TermError> {
        if focus == 0 || focus > arity {
            return Err(TermError::SlotOutOfRange { slot: focus, arity });
        }
        if term.need() > arity {
            return Err(TermError::SlotOutOfRange {
                slot: term.need(),
                arity,
            });
        }
        Ok(FocusedTerm { term, arity, focus })
    }

    /// Contraction modulus of the term at its focus.
    pub fn modulus<T: Scalar>(&self, sig: &Signature<T>) -> Result<T, TermError> {
        Ok(infer_pattern(&self.term, sig, self.arity)?.modulus(self.focus)?)
    }

    /// `mu i. t`, read over `arity - 1` slots.
    pub fn bind(&self) -> Term {
        Term::mu(self.focus, self.term.clone())
    }
}
