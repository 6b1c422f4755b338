use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use super::bellman::clamp;
use super::{DiscountedSetup, MdpError, Policy, PolicyTree};
use crate::metric::{sup_distance, BoundedVector, MetricModel, ModelError};
use crate::pattern::Pattern;
use crate::scalar::Scalar;
use crate::solver::{solve_mu, Certificate, SolveError};
use crate::term::{FocusedTerm, FunctionSymbol, Signature, Term};

/// An operation of the reward barycentric signature.
#[derive(Debug, Clone, PartialEq)]
pub enum RbaOp<T> {
    /// `x +_ε y`, pattern `{⟨ε, 1-ε⟩}`.
    Plus(T),
    /// `⟨π⟩x`, pattern `{⟨1⟩}`.
    Trans(Policy<T>),
    /// `|π|x`, pattern `{⟨γ⟩}`.
    Reward(Policy<T>),
}

/// The value-function model `[0,1]^S` of an MDP. Symbols are registered
/// on demand, one per distinct parameter, as `plusK`, `transK` and
/// `rewardK`.
#[derive(Debug, Clone)]
pub struct RewardAlgebra<T: Scalar> {
    setup: DiscountedSetup<T>,
    signature: Signature<T>,
    ops: BTreeMap<String, RbaOp<T>>,
}

impl<T: Scalar> RewardAlgebra<T> {
    pub fn new(setup: DiscountedSetup<T>) -> Self {
        RewardAlgebra {
            setup,
            signature: Signature::new(),
            ops: BTreeMap::new(),
        }
    }

    pub fn setup(&self) -> &DiscountedSetup<T> {
        &self.setup
    }

    pub fn op(&self, symbol: &str) -> Option<&RbaOp<T>> {
        self.ops.get(symbol)
    }

    fn register(&mut self, prefix: &str, op: RbaOp<T>, pattern: Pattern<T>) -> Result<String, MdpError> {
        if let Some((name, _)) = self.ops.iter().find(|(n, o)| n.starts_with(prefix) && **o == op) {
            return Ok(name.clone());
        }
        let name = format!("{prefix}{}", self.ops.keys().filter(|n| n.starts_with(prefix)).count() + 1);
        let err = |e: crate::term::TermError| MdpError::Schema {
            path: name.clone(),
            message: e.to_string(),
        };
        self.signature
            .add(FunctionSymbol::new(&name, pattern).map_err(err)?)
            .map_err(err)?;
        self.ops.insert(name.clone(), op);
        Ok(name)
    }

    /// Symbol for `+_ε`.
    pub fn plus(&mut self, eps: T) -> Result<String, MdpError> {
        if !(eps >= T::zero() && eps <= T::one()) {
            return Err(MdpError::Schema {
                path: "eps".into(),
                message: format!("{eps} is outside [0, 1]"),
            });
        }
        let p = Pattern::new(vec![vec![eps, T::one() - eps]], 2).map_err(|e| MdpError::Schema {
            path: "eps".into(),
            message: e.to_string(),
        })?;
        self.register("plus", RbaOp::Plus(eps), p)
    }

    /// Symbol for `⟨π⟩`.
    pub fn trans(&mut self, pi: &Policy<T>) -> Result<String, MdpError> {
        pi.fits(&self.setup.mdp)?;
        self.register("trans", RbaOp::Trans(pi.clone()), Pattern::unit(1, 1).expect("unit pattern"))
    }

    /// Symbol for `|π|`.
    pub fn reward(&mut self, pi: &Policy<T>) -> Result<String, MdpError> {
        pi.fits(&self.setup.mdp)?;
        let g = Pattern::new(vec![vec![self.setup.gamma()]], 1).expect("gamma below 1");
        self.register("reward", RbaOp::Reward(pi.clone()), g)
    }

    /// `O^π x1`: a leaf `π` becomes `|π|⟨π⟩x1`, a mix becomes
    /// `O^L x1 +_ε O^R x1`.
    pub fn o_term(&mut self, tree: &PolicyTree<T>) -> Result<Term, MdpError> {
        Ok(match tree {
            PolicyTree::Leaf(pi) => {
                let t = self.trans(pi)?;
                let r = self.reward(pi)?;
                Term::app(&r, vec![Term::app(&t, vec![Term::var(1)])])
            }
            PolicyTree::Mix { eps, left, right } => {
                let l = self.o_term(left)?;
                let r = self.o_term(right)?;
                let p = self.plus(*eps)?;
                Term::app(&p, vec![l, r])
            }
        })
    }

    /// Certified `μ1. O^π x1` for the policy denoted by `tree`.
    pub fn policy_value(
        &mut self,
        tree: &PolicyTree<T>,
        eps: T,
    ) -> Result<Certificate<BoundedVector<T>, T>, SolveError> {
        let term = self
            .o_term(tree)
            .map_err(|e| SolveError::PreconditionViolated(e.to_string()))?;
        let focused = FocusedTerm::new(term, 1, 1)?;
        solve_mu(self, &focused, &[], eps, None)
    }
}

impl<T: Scalar> DiscountedSetup<T> {
    /// Certified value of the policy denoted by `tree`, solved as
    /// `μ1. O^π x1` in the value-function model.
    pub fn policy_value(
        &self,
        tree: &PolicyTree<T>,
        eps: T,
    ) -> Result<Certificate<BoundedVector<T>, T>, SolveError> {
        RewardAlgebra::new(self.clone()).policy_value(tree, eps)
    }
}

impl<T: Scalar> MetricModel for RewardAlgebra<T> {
    type Scalar = T;
    type Elem = BoundedVector<T>;

    fn signature(&self) -> &Signature<T> {
        &self.signature
    }

    fn distance(&self, x: &BoundedVector<T>, y: &BoundedVector<T>) -> Result<T, ModelError> {
        Ok(sup_distance(x, y)?)
    }

    fn interpret(&self, symbol: &str, args: &[BoundedVector<T>]) -> Result<BoundedVector<T>, ModelError> {
        let op = self
            .ops
            .get(symbol)
            .ok_or_else(|| ModelError::Unbound(symbol.to_string()))?;
        let expected = if matches!(op, RbaOp::Plus(_)) { 2 } else { 1 };
        if args.len() != expected {
            return Err(ModelError::Arity {
                symbol: symbol.to_string(),
                expected,
                found: args.len(),
            });
        }
        let fail = |e: MdpError| ModelError::BadBuiltin {
            id: symbol.to_string(),
            reason: e.to_string(),
        };
        match op {
            RbaOp::Plus(e) => {
                sup_distance(&args[0], &args[1])?;
                Ok(clamp(
                    args[0]
                        .coords()
                        .iter()
                        .zip(args[1].coords())
                        .map(|(&x, &y)| *e * x + (T::one() - *e) * y)
                        .collect(),
                ))
            }
            RbaOp::Trans(pi) => self.setup.expected_next(pi, &args[0]).map_err(fail),
            RbaOp::Reward(pi) => {
                let r = self.setup.expected_reward(pi).map_err(fail)?;
                sup_distance(&r, &args[0])?;
                let g = self.setup.gamma();
                Ok(clamp(
                    r.coords()
                        .iter()
                        .zip(args[0].coords())
                        .map(|(&r, &v)| (T::one() - g) * r + g * v)
                        .collect(),
                ))
            }
        }
    }

    /// Coordinatewise uniform on `[0,1]`.
    fn sample(&self, rng: &mut dyn RngCore) -> BoundedVector<T> {
        let n = self.setup.mdp.num_states();
        clamp((0..n).map(|_| T::lit(rng.gen::<f64>())).collect())
    }

    fn origin(&self) -> BoundedVector<T> {
        BoundedVector::zeros(self.setup.mdp.num_states())
    }
}
