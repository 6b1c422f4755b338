//! Banach patterns: finite sets of subconvex weight tuples.
//!
//! A pattern `θ ⊆ 𝕌_n` for an `n`-ary operation `f` bounds the output
//! distance by `max_{ᾱ∈θ} Σ α_k d(a_k, b_k)`. This module implements the
//! tuple space `𝕌_n` and the pattern algebra (scaling, subconvex sums,
//! contraction of two slots, composition, and the fixed-point operation).
//!
//! All slot indices in the public API are 1-based.
//!
//! Equality of patterns is equality of tuple sets (within tolerance). Two
//! patterns can induce the same bound function without being equal, e.g.
//! when one contains a tuple dominated by another; use
//! [`Pattern::prune_dominated`] to discard such tuples explicitly.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{close, le_tol, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("pattern has no tuples")]
    EmptyPattern,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("weight {value} at position {position} lies outside [0, 1]")]
    WeightOutOfRange { position: usize, value: f64 },
    #[error("weights sum to {sum}, which exceeds 1")]
    SumExceedsOne { sum: f64 },
    #[error("scalar {value} lies outside [0, 1]")]
    ScalarOutOfRange { value: f64 },
    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("contraction requires i < j, got i={i}, j={j}")]
    IndicesNotOrdered { i: usize, j: usize },
    #[error("pattern is not {slot}-contractive (weight {weight} at slot {slot})")]
    NotContractive { slot: usize, weight: f64 },
}

/// A tuple `ᾱ ∈ 𝕌_n`: weights in `[0, 1]` whose sum is at most 1.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct WeightTuple<T> {
    weights: Vec<T>,
}

impl<T: Scalar> WeightTuple<T> {
    pub fn new(weights: Vec<T>) -> Result<Self, PatternError> {
        let mut sum = T::zero();
        for (k, &w) in weights.iter().enumerate() {
            if !(w >= -T::tol() && le_tol(w, T::one())) {
                return Err(PatternError::WeightOutOfRange {
                    position: k + 1,
                    value: w.as_f64(),
                });
            }
            sum += w;
        }
        if !le_tol(sum, T::one()) {
            return Err(PatternError::SumExceedsOne { sum: sum.as_f64() });
        }
        Ok(WeightTuple { weights })
    }

    /// The `k`-th unit tuple of `𝕌_n` (1-based).
    pub fn unit(n: usize, k: usize) -> Result<Self, PatternError> {
        check_slot(k, n)?;
        let mut weights = vec![T::zero(); n];
        weights[k - 1] = T::one();
        Ok(WeightTuple { weights })
    }

    pub fn zero(n: usize) -> Self {
        WeightTuple {
            weights: vec![T::zero(); n],
        }
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weight at 1-based slot `i`.
    pub fn weight(&self, i: usize) -> Result<T, PatternError> {
        check_slot(i, self.arity())?;
        Ok(self.weights[i - 1])
    }

    pub fn sum(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// `Σ α_k ε_k`.
    pub fn weighted_sum(&self, eps: &[T]) -> T {
        self.weights
            .iter()
            .zip(eps)
            .map(|(&w, &e)| w * e)
            .sum()
    }

    pub fn scaled(&self, r: T) -> Self {
        WeightTuple {
            weights: self.weights.iter().map(|&w| w * r).collect(),
        }
    }

    /// Componentwise equality within tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.arity() == other.arity()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(&a, &b)| close(a, b))
    }

    /// `self` dominates `other` if it is at least as large in every slot.
    pub fn dominates(&self, other: &Self) -> bool {
        self.arity() == other.arity()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(&a, &b)| a + T::tol() >= b)
    }
}

impl<T: Scalar> fmt::Display for WeightTuple<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (k, w) in self.weights.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "⟩")
    }
}

fn check_slot(i: usize, arity: usize) -> Result<(), PatternError> {
    if i == 0 || i > arity {
        Err(PatternError::IndexOutOfRange { index: i, arity })
    } else {
        Ok(())
    }
}

fn check_unit_scalar<T: Scalar>(r: T) -> Result<(), PatternError> {
    if r >= -T::tol() && le_tol(r, T::one()) {
        Ok(())
    } else {
        Err(PatternError::ScalarOutOfRange { value: r.as_f64() })
    }
}

/// Serialized form: `{"arity": n, "tuples": [[w, ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PatternDoc<T> {
    arity: usize,
    tuples: Vec<Vec<T>>,
}

/// A finite nonempty set of tuples of a common arity.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(
    try_from = "PatternDoc<T>",
    into = "PatternDoc<T>",
    bound(serialize = "T: Scalar", deserialize = "T: Scalar")
)]
pub struct Pattern<T> {
    arity: usize,
    tuples: Vec<WeightTuple<T>>,
}

impl<T: Scalar> TryFrom<PatternDoc<T>> for Pattern<T> {
    type Error = PatternError;

    fn try_from(doc: PatternDoc<T>) -> Result<Self, PatternError> {
        Pattern::new(doc.tuples, doc.arity)
    }
}

impl<T: Scalar> From<Pattern<T>> for PatternDoc<T> {
    fn from(p: Pattern<T>) -> Self {
        PatternDoc {
            arity: p.arity,
            tuples: p.tuples.into_iter().map(|t| t.weights).collect(),
        }
    }
}

impl<T: Scalar> Pattern<T> {
    /// Validates every tuple against `𝕌_n` and removes duplicates.
    pub fn new(tuples: Vec<Vec<T>>, arity: usize) -> Result<Self, PatternError> {
        let tuples = tuples
            .into_iter()
            .map(|w| {
                if w.len() != arity {
                    return Err(PatternError::ArityMismatch {
                        expected: arity,
                        found: w.len(),
                    });
                }
                WeightTuple::new(w)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_tuples(tuples, arity)
    }

    pub fn from_tuples(tuples: Vec<WeightTuple<T>>, arity: usize) -> Result<Self, PatternError> {
        if tuples.is_empty() {
            return Err(PatternError::EmptyPattern);
        }
        let mut unique: Vec<WeightTuple<T>> = Vec::with_capacity(tuples.len());
        for t in tuples {
            if t.arity() != arity {
                return Err(PatternError::ArityMismatch {
                    expected: arity,
                    found: t.arity(),
                });
            }
            if !unique.iter().any(|u| u.approx_eq(&t)) {
                unique.push(t);
            }
        }
        Ok(Pattern {
            arity,
            tuples: unique,
        })
    }

    /// Revalidates raw weight vectors produced by an operation.
    fn rebuild(raw: Vec<Vec<T>>, arity: usize) -> Result<Self, PatternError> {
        Self::new(raw, arity)
    }

    /// `{e_k}`: the pattern of the projection onto slot `k` of `𝕌_n`.
    pub fn unit(n: usize, k: usize) -> Result<Self, PatternError> {
        Ok(Pattern {
            arity: n,
            tuples: vec![WeightTuple::unit(n, k)?],
        })
    }

    /// `{0̄}`: the pattern of a constant read in an `n`-slot context.
    pub fn zero(n: usize) -> Self {
        Pattern {
            arity: n,
            tuples: vec![WeightTuple::zero(n)],
        }
    }

    /// `{e_1, …, e_n}`: plain nonexpansiveness.
    pub fn nonexpansive(n: usize) -> Self {
        if n == 0 {
            return Self::zero(0);
        }
        let tuples = (1..=n)
            .map(|k| WeightTuple::unit(n, k).expect("slot in range"))
            .collect();
        Pattern { arity: n, tuples }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[WeightTuple<T>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// `λθ = {λᾱ | ᾱ ∈ θ}`.
    pub fn scale(&self, r: T) -> Result<Self, PatternError> {
        check_unit_scalar(r)?;
        let raw = self.tuples.iter().map(|t| t.scaled(r).weights).collect();
        Self::rebuild(raw, self.arity)
    }

    /// `Σ_k λ_k θ^k`: all cross-combinations of one tuple per pattern.
    pub fn subconvex_sum(weights: &WeightTuple<T>, patterns: &[Pattern<T>]) -> Result<Self, PatternError> {
        if weights.arity() != patterns.len() {
            return Err(PatternError::ArityMismatch {
                expected: weights.arity(),
                found: patterns.len(),
            });
        }
        let arity = common_arity(patterns)?;
        let raw = cross_combinations(patterns, arity, |k, tuple, acc| {
            let lambda = weights.weights[k];
            for (a, &w) in acc.iter_mut().zip(tuple.weights()) {
                *a += lambda * w;
            }
        });
        Self::rebuild(raw, arity)
    }

    /// `θ[i<j]`: slot `j` is merged into slot `i` (`α_i + α_j`), arity `n-1`.
    pub fn contract(&self, i: usize, j: usize) -> Result<Self, PatternError> {
        check_slot(i, self.arity)?;
        check_slot(j, self.arity)?;
        if i >= j {
            return Err(PatternError::IndicesNotOrdered { i, j });
        }
        let raw = self
            .tuples
            .iter()
            .map(|t| {
                let mut w = t.weights.clone();
                let merged = w[j - 1];
                w[i - 1] += merged;
                w.remove(j - 1);
                w
            })
            .collect();
        Self::rebuild(raw, self.arity - 1)
    }

    /// `θ ∘ ⟨ζ_1..ζ_n⟩ = {Σ_k α_k β̄^k | ᾱ ∈ θ, β̄^k ∈ ζ_k}`.
    ///
    /// Needs at least one inner pattern to fix the target arity; use
    /// [`Pattern::compose_into`] for constants.
    pub fn compose(&self, inner: &[Pattern<T>]) -> Result<Self, PatternError> {
        let m = common_arity(inner)?;
        self.compose_into(inner, m)
    }

    /// Composition with an explicit target arity `m`. A 0-ary outer pattern
    /// composed with no inner patterns yields `{0̄}` in `𝕌_m`.
    pub fn compose_into(&self, inner: &[Pattern<T>], m: usize) -> Result<Self, PatternError> {
        if inner.len() != self.arity {
            return Err(PatternError::ArityMismatch {
                expected: self.arity,
                found: inner.len(),
            });
        }
        for z in inner {
            if z.arity != m {
                return Err(PatternError::ArityMismatch {
                    expected: m,
                    found: z.arity,
                });
            }
        }
        if self.arity == 0 {
            return Ok(Self::zero(m));
        }
        let mut raw = Vec::new();
        for outer in &self.tuples {
            raw.extend(cross_combinations(inner, m, |k, tuple, acc| {
                let alpha = outer.weights[k];
                for (a, &w) in acc.iter_mut().zip(tuple.weights()) {
                    *a += alpha * w;
                }
            }));
        }
        Self::rebuild(raw, m)
    }

    /// `μi.θ = {(1/(1-α_i))·(ᾱ∖i) | ᾱ ∈ θ}`; requires `θ ▷ i`.
    pub fn mu(&self, i: usize) -> Result<Self, PatternError> {
        check_slot(i, self.arity)?;
        let raw = self
            .tuples
            .iter()
            .map(|t| {
                let a = t.weights[i - 1];
                if a >= T::one() - T::tol() {
                    return Err(PatternError::NotContractive {
                        slot: i,
                        weight: a.as_f64(),
                    });
                }
                let scale = (T::one() - a).recip();
                Ok(t.weights
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i - 1)
                    .map(|(_, &w)| w * scale)
                    .collect())
            })
            .collect::<Result<Vec<Vec<T>>, _>>()?;
        Self::rebuild(raw, self.arity - 1)
    }

    /// `a = max{α_i | ᾱ ∈ θ}`.
    pub fn modulus(&self, i: usize) -> Result<T, PatternError> {
        check_slot(i, self.arity)?;
        Ok(self
            .tuples
            .iter()
            .map(|t| t.weights[i - 1])
            .fold(T::zero(), T::max))
    }

    /// `θ ▷ i`: every tuple has `α_i < 1`.
    pub fn is_contractive(&self, i: usize) -> bool {
        self.modulus(i)
            .map(|a| a < T::one() - T::tol())
            .unwrap_or(false)
    }

    /// `max_{ᾱ∈θ} Σ α_k ε_k`, the bound the pattern induces on distances `ε̄`.
    pub fn bound(&self, eps: &[T]) -> Result<T, PatternError> {
        if eps.len() != self.arity {
            return Err(PatternError::ArityMismatch {
                expected: self.arity,
                found: eps.len(),
            });
        }
        Ok(self
            .tuples
            .iter()
            .map(|t| t.weighted_sum(eps))
            .fold(T::zero(), T::max))
    }

    /// Drops every tuple dominated by another tuple of the pattern. The
    /// induced bound is unchanged.
    pub fn prune_dominated(&self) -> Self {
        let mut kept: Vec<WeightTuple<T>> = Vec::new();
        for (k, t) in self.tuples.iter().enumerate() {
            let dominated = self
                .tuples
                .iter()
                .enumerate()
                .any(|(l, u)| l != k && u.dominates(t) && !(t.dominates(u) && l > k));
            if !dominated {
                kept.push(t.clone());
            }
        }
        Pattern {
            arity: self.arity,
            tuples: kept,
        }
    }

    fn contains(&self, t: &WeightTuple<T>) -> bool {
        self.tuples.iter().any(|u| u.approx_eq(t))
    }
}

impl<T: Scalar> PartialEq for Pattern<T> {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity
            && self.tuples.iter().all(|t| other.contains(t))
            && other.tuples.iter().all(|t| self.contains(t))
    }
}

impl<T: Scalar> fmt::Display for Pattern<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, t) in self.tuples.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

fn common_arity<T: Scalar>(patterns: &[Pattern<T>]) -> Result<usize, PatternError> {
    let first = patterns.first().ok_or(PatternError::EmptyPattern)?;
    for p in patterns {
        if p.arity != first.arity {
            return Err(PatternError::ArityMismatch {
                expected: first.arity,
                found: p.arity,
            });
        }
    }
    Ok(first.arity)
}

/// Enumerates every choice of one tuple per pattern and folds each choice
/// into a zero-initialised accumulator of length `arity`.
fn cross_combinations<T, F>(patterns: &[Pattern<T>], arity: usize, mut add: F) -> Vec<Vec<T>>
where
    T: Scalar,
    F: FnMut(usize, &WeightTuple<T>, &mut Vec<T>),
{
    let mut out = Vec::new();
    let mut choice = vec![0usize; patterns.len()];
    loop {
        let mut acc = vec![T::zero(); arity];
        for (k, p) in patterns.iter().enumerate() {
            add(k, &p.tuples[choice[k]], &mut acc);
        }
        out.push(acc);
        // odometer increment
        let mut k = patterns.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < patterns[k].tuples.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}
