use serde_json::{Map, Value};

use super::{Mdp, MdpError};
use crate::scalar::Scalar;

/// `π : S → ΔA`, stored as `probs[s][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy<T> {
    probs: Vec<Vec<T>>,
}

impl<T: Scalar> Policy<T> {
    pub fn new(probs: Vec<Vec<T>>) -> Result<Self, MdpError> {
        for (s, row) in probs.iter().enumerate() {
            if let Some(a) = row.iter().position(|&p| p < T::zero()) {
                return Err(MdpError::NegativeProbability {
                    path: format!("policy[{s}][{a}]"),
                    message: format!("probability {} is negative", row[a]),
                });
            }
            let sum: T = row.iter().copied().sum();
            if (sum - T::one()).abs() > T::tol() {
                return Err(MdpError::PolicyNotDistribution {
                    path: format!("policy[{s}]"),
                    sum: sum.as_f64(),
                });
            }
        }
        Ok(Policy { probs })
    }

    /// `â`: the Dirac distribution on action `a` in every state.
    pub fn constant(states: usize, actions: usize, a: usize) -> Self {
        let row: Vec<T> = (0..actions).map(|b| if a == b { T::one() } else { T::zero() }).collect();
        Policy {
            probs: vec![row; states],
        }
    }

    pub fn uniform(states: usize, actions: usize) -> Self {
        let p = T::one() / T::lit(actions as f64);
        Policy {
            probs: vec![vec![p; actions]; states],
        }
    }

    /// `επ + (1-ε)π'` pointwise.
    pub fn mix(&self, eps: T, other: &Policy<T>) -> Result<Self, MdpError> {
        if self.num_states() != other.num_states() || self.num_actions() != other.num_actions() {
            return Err(MdpError::DimensionMismatch {
                path: "policy".into(),
                expected: self.num_states(),
                found: other.num_states(),
            });
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| a.iter().zip(b).map(|(&p, &q)| eps * p + (T::one() - eps) * q).collect())
            .collect();
        Ok(Policy { probs })
    }

    pub fn num_states(&self) -> usize {
        self.probs.len()
    }

    pub fn num_actions(&self) -> usize {
        self.probs.first().map_or(0, Vec::len)
    }

    /// `π(s)(a)`.
    pub fn prob(&self, s: usize, a: usize) -> T {
        self.probs[s][a]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.probs
    }

    /// Checks that the policy is over the MDP's states and actions.
    pub fn fits<U>(&self, mdp: &Mdp<U>) -> Result<(), MdpError> {
        if self.num_states() != mdp.states.len() {
            return Err(MdpError::ActionSetMismatch {
                path: "policy".into(),
                message: format!(
                    "policy covers {} states, the MDP has {}",
                    self.num_states(),
                    mdp.states.len()
                ),
            });
        }
        if self.num_actions() != mdp.actions.len() {
            return Err(MdpError::ActionSetMismatch {
                path: "policy".into(),
                message: format!(
                    "policy ranges over {} actions, the MDP has {}",
                    self.num_actions(),
                    mdp.actions.len()
                ),
            });
        }
        Ok(())
    }

    /// Reads `{"s": {"a": p, ..}, ..}`; omitted actions have mass 0.
    pub fn from_json_value(v: &Value, mdp: &Mdp<T>, path: &str) -> Result<Self, MdpError> {
        let obj = v.as_object().ok_or_else(|| MdpError::Schema {
            path: path.into(),
            message: "expected an object of states".into(),
        })?;
        let mut probs = vec![vec![T::zero(); mdp.num_actions()]; mdp.num_states()];
        for key in obj.keys() {
            if mdp.state_index(key).is_none() {
                return Err(MdpError::ActionSetMismatch {
                    path: join(path, key),
                    message: format!("`{key}` is not a state"),
                });
            }
        }
        for (s, name) in mdp.states().iter().enumerate() {
            let here = join(path, name);
            let row = obj
                .get(name)
                .ok_or_else(|| MdpError::Schema {
                    path: here.clone(),
                    message: "missing state".into(),
                })?
                .as_object()
                .ok_or_else(|| MdpError::Schema {
                    path: here.clone(),
                    message: "expected an object of actions".into(),
                })?;
            for (a_name, p) in row {
                let at = format!("{here}.{a_name}");
                let a = mdp.action_index(a_name).ok_or_else(|| MdpError::ActionSetMismatch {
                    path: at.clone(),
                    message: format!("`{a_name}` is not an action"),
                })?;
                let p = p.as_f64().ok_or_else(|| MdpError::Schema {
                    path: at.clone(),
                    message: "expected a number".into(),
                })?;
                if p < 0.0 {
                    return Err(MdpError::NegativeProbability {
                        path: at,
                        message: format!("probability {p} is negative"),
                    });
                }
                probs[s][a] = T::lit(p);
            }
            let sum: T = probs[s].iter().copied().sum();
            if (sum - T::one()).abs() > T::tol() {
                return Err(MdpError::PolicyNotDistribution {
                    path: here,
                    sum: sum.as_f64(),
                });
            }
        }
        Ok(Policy { probs })
    }

    pub fn to_json_value(&self, mdp: &Mdp<T>) -> Value {
        let mut out = Map::new();
        for (s, name) in mdp.states().iter().enumerate() {
            let mut row = Map::new();
            for (a, a_name) in mdp.actions().iter().enumerate() {
                let p = self.probs[s][a];
                if p != T::zero() {
                    row.insert(a_name.clone(), p.as_f64().into());
                }
            }
            out.insert(name.clone(), Value::Object(row));
        }
        Value::Object(out)
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// A policy written as nested convex combinations.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyTree<T> {
    Leaf(Policy<T>),
    /// `ε·left + (1-ε)·right`.
    Mix {
        eps: T,
        left: Box<PolicyTree<T>>,
        right: Box<PolicyTree<T>>,
    },
}

impl<T: Scalar> PolicyTree<T> {
    pub fn mix(eps: T, left: PolicyTree<T>, right: PolicyTree<T>) -> Result<Self, MdpError> {
        if !(eps >= T::zero() && eps <= T::one()) {
            return Err(MdpError::Schema {
                path: "mix.eps".into(),
                message: format!("{eps} is outside [0, 1]"),
            });
        }
        Ok(PolicyTree::Mix {
            eps,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    /// The policy the tree stands for.
    pub fn denote(&self) -> Result<Policy<T>, MdpError> {
        match self {
            PolicyTree::Leaf(p) => Ok(p.clone()),
            PolicyTree::Mix { eps, left, right } => left.denote()?.mix(*eps, &right.denote()?),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PolicyTree::Leaf(_) => 0,
            PolicyTree::Mix { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Reads `{"mix": {"eps", "left", "right"}}` or `{"leaf": policy}`. Any
    /// other object is read as a bare policy.
    pub fn from_json_value(v: &Value, mdp: &Mdp<T>) -> Result<Self, MdpError> {
        Self::read(v, mdp, "")
    }

    fn read(v: &Value, mdp: &Mdp<T>, path: &str) -> Result<Self, MdpError> {
        let obj = v.as_object().ok_or_else(|| MdpError::Schema {
            path: if path.is_empty() { "policy".into() } else { path.into() },
            message: "expected an object".into(),
        })?;
        if obj.len() == 1 {
            if let Some(leaf) = obj.get("leaf") {
                return Ok(PolicyTree::Leaf(Policy::from_json_value(leaf, mdp, &join(path, "leaf"))?));
            }
            if let Some(m) = obj.get("mix") {
                let here = join(path, "mix");
                let field = |k: &str| {
                    m.get(k).ok_or_else(|| MdpError::Schema {
                        path: format!("{here}.{k}"),
                        message: "missing field".into(),
                    })
                };
                let eps = field("eps")?.as_f64().ok_or_else(|| MdpError::Schema {
                    path: format!("{here}.eps"),
                    message: "expected a number".into(),
                })?;
                let left = Self::read(field("left")?, mdp, &format!("{here}.left"))?;
                let right = Self::read(field("right")?, mdp, &format!("{here}.right"))?;
                return Self::mix(T::lit(eps), left, right).map_err(|_| MdpError::Schema {
                    path: format!("{here}.eps"),
                    message: format!("{eps} is outside [0, 1]"),
                });
            }
        }
        Ok(PolicyTree::Leaf(Policy::from_json_value(v, mdp, path)?))
    }

    pub fn to_json_value(&self, mdp: &Mdp<T>) -> Value {
        match self {
            PolicyTree::Leaf(p) => serde_json::json!({ "leaf": p.to_json_value(mdp) }),
            PolicyTree::Mix { eps, left, right } => serde_json::json!({
                "mix": {
                    "eps": eps.as_f64(),
                    "left": left.to_json_value(mdp),
                    "right": right.to_json_value(mdp),
                }
            }),
        }
    }
}
