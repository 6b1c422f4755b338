//! Markov decision processes as reward barycentric algebras: the data
//! model, the Bellman operator, its syntactic counterpart `O^π`, certified
//! policy evaluation and an exact linear-solve oracle.

mod algebra;
mod axioms;
mod bellman;
mod policy;

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

pub use algebra::{RbaOp, RewardAlgebra};
pub use axioms::{check_rba_axioms, AxiomKind, AxiomReport, RbaReport};
pub use policy::{Policy, PolicyTree};

use crate::scalar::{le_tol, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MdpError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("transitions.{action}[{state}]: row sums to {sum}, not 1")]
    RowNotStochastic {
        action: String,
        state: usize,
        sum: f64,
    },
    #[error("{path}: {message}")]
    NegativeProbability { path: String, message: String },
    #[error("rewards.{action}[{state}]: {value} is outside [0, 1]")]
    RewardOutOfRange {
        action: String,
        state: usize,
        value: f64,
    },
    #[error("states: the state set is empty")]
    EmptyStateSet,
    #[error("actions: the action set is empty")]
    EmptyActionSet,
    #[error("{path}: expected length {expected}, found {found}")]
    DimensionMismatch {
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("gamma: {0} is not in (0, 1)")]
    GammaOutOfRange(f64),
    #[error("{path}: {message}")]
    ActionSetMismatch { path: String, message: String },
    #[error("{path}: masses sum to {sum}, not 1")]
    PolicyNotDistribution { path: String, sum: f64 },
}

impl MdpError {
    /// Location of the offending field in the input document.
    pub fn path(&self) -> String {
        match self {
            MdpError::Schema { path, .. }
            | MdpError::NegativeProbability { path, .. }
            | MdpError::DimensionMismatch { path, .. }
            | MdpError::ActionSetMismatch { path, .. }
            | MdpError::PolicyNotDistribution { path, .. } => path.clone(),
            MdpError::RowNotStochastic { action, state, .. } => format!("transitions.{action}[{state}]"),
            MdpError::RewardOutOfRange { action, state, .. } => format!("rewards.{action}[{state}]"),
            MdpError::EmptyStateSet => "states".into(),
            MdpError::EmptyActionSet => "actions".into(),
            MdpError::GammaOutOfRange(_) => "gamma".into(),
        }
    }
}

/// `(S, A, (P^a), (R^a))` with row-stochastic `P^a` and `R^a ∈ [0,1]^S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp<T> {
    states: Vec<String>,
    actions: Vec<String>,
    /// `transitions[a][s][s']`.
    transitions: Vec<Vec<Vec<T>>>,
    /// `rewards[a][s]`.
    rewards: Vec<Vec<T>>,
}

impl<T: Scalar> Mdp<T> {
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        transitions: Vec<Vec<Vec<T>>>,
        rewards: Vec<Vec<T>>,
    ) -> Result<Self, MdpError> {
        let n = states.len();
        if n == 0 {
            return Err(MdpError::EmptyStateSet);
        }
        if actions.is_empty() {
            return Err(MdpError::EmptyActionSet);
        }
        let shape = |path: String, expected, found| MdpError::DimensionMismatch { path, expected, found };
        if transitions.len() != actions.len() {
            return Err(shape("transitions".into(), actions.len(), transitions.len()));
        }
        if rewards.len() != actions.len() {
            return Err(shape("rewards".into(), actions.len(), rewards.len()));
        }
        for (a, name) in actions.iter().enumerate() {
            if transitions[a].len() != n {
                return Err(shape(format!("transitions.{name}"), n, transitions[a].len()));
            }
            for (s, row) in transitions[a].iter().enumerate() {
                if row.len() != n {
                    return Err(shape(format!("transitions.{name}[{s}]"), n, row.len()));
                }
                if let Some(k) = row.iter().position(|&p| p < T::zero()) {
                    return Err(MdpError::NegativeProbability {
                        path: format!("transitions.{name}[{s}][{k}]"),
                        message: format!("probability {} is negative", row[k]),
                    });
                }
                let sum: T = row.iter().copied().sum();
                if (sum - T::one()).abs() > T::tol() {
                    return Err(MdpError::RowNotStochastic {
                        action: name.clone(),
                        state: s,
                        sum: sum.as_f64(),
                    });
                }
            }
            if rewards[a].len() != n {
                return Err(shape(format!("rewards.{name}"), n, rewards[a].len()));
            }
            for (s, &r) in rewards[a].iter().enumerate() {
                if !(r >= T::zero() && le_tol(r, T::one())) {
                    return Err(MdpError::RewardOutOfRange {
                        action: name.clone(),
                        state: s,
                        value: r.as_f64(),
                    });
                }
            }
        }
        for (what, names) in [("states", &states), ("actions", &actions)] {
            let mut seen = std::collections::BTreeSet::new();
            for (k, s) in names.iter().enumerate() {
                if !seen.insert(s) {
                    return Err(MdpError::Schema {
                        path: format!("{what}[{k}]"),
                        message: format!("duplicate name `{s}`"),
                    });
                }
            }
        }
        Ok(Mdp {
            states,
            actions,
            transitions,
            rewards,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    /// `P^a(s)(s')`.
    pub fn transition(&self, a: usize, s: usize, s2: usize) -> T {
        self.transitions[a][s][s2]
    }

    /// `R^a(s)`.
    pub fn reward(&self, a: usize, s: usize) -> T {
        self.rewards[a][s]
    }
}

/// An MDP with a discount factor `γ ∈ (0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountedSetup<T> {
    pub mdp: Mdp<T>,
    gamma: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetupDoc<T> {
    states: Option<Vec<String>>,
    actions: Option<Vec<String>>,
    gamma: Option<T>,
    transitions: Option<BTreeMap<String, Vec<Vec<T>>>>,
    rewards: Option<BTreeMap<String, Vec<T>>>,
}

fn required<V>(v: Option<V>, path: &str) -> Result<V, MdpError> {
    v.ok_or_else(|| MdpError::Schema {
        path: path.into(),
        message: "missing field".into(),
    })
}

impl<T: Scalar> DiscountedSetup<T> {
    pub fn new(mdp: Mdp<T>, gamma: T) -> Result<Self, MdpError> {
        if !(gamma > T::zero() && gamma < T::one()) {
            return Err(MdpError::GammaOutOfRange(gamma.as_f64()));
        }
        Ok(DiscountedSetup { mdp, gamma })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Reads `{"states", "actions", "gamma", "transitions": {a: P^a},
    /// "rewards": {a: R^a}}`.
    pub fn from_json(src: &str) -> Result<Self, MdpError> {
        let de = &mut serde_json::Deserializer::from_str(src);
        let doc: SetupDoc<T> = serde_path_to_error::deserialize(de).map_err(|e| MdpError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        let states = required(doc.states, "states")?;
        let actions = required(doc.actions, "actions")?;
        let gamma = required(doc.gamma, "gamma")?;
        let mut transitions = required(doc.transitions, "transitions")?;
        let mut rewards = required(doc.rewards, "rewards")?;
        let mut p = Vec::with_capacity(actions.len());
        let mut r = Vec::with_capacity(actions.len());
        for a in &actions {
            p.push(required(transitions.remove(a), &format!("transitions.{a}"))?);
            r.push(required(rewards.remove(a), &format!("rewards.{a}"))?);
        }
        let leftover = [
            ("transitions", transitions.keys().next()),
            ("rewards", rewards.keys().next()),
        ];
        for (what, extra) in leftover {
            if let Some(extra) = extra {
                return Err(MdpError::ActionSetMismatch {
                    path: format!("{what}.{extra}"),
                    message: format!("`{extra}` is not a declared action"),
                });
            }
        }
        DiscountedSetup::new(Mdp::new(states, actions, p, r)?, gamma)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m = &self.mdp;
        let mut transitions = serde_json::Map::new();
        let mut rewards = serde_json::Map::new();
        for (a, name) in m.actions.iter().enumerate() {
            let rows: Vec<Vec<f64>> = m.transitions[a]
                .iter()
                .map(|row| row.iter().map(|p| p.as_f64()).collect())
                .collect();
            transitions.insert(name.clone(), rows.into());
            let rs: Vec<f64> = m.rewards[a].iter().map(|r| r.as_f64()).collect();
            rewards.insert(name.clone(), rs.into());
        }
        serde_json::json!({
            "states": m.states,
            "actions": m.actions,
            "gamma": self.gamma.as_f64(),
            "transitions": transitions,
            "rewards": rewards,
        })
    }
}
