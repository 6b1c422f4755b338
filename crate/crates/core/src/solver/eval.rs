use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{banach_iterate, Certificate, SolveError, StopRule};
use crate::metric::{ComplianceReport, MetricModel};
use crate::scalar::Scalar;
use crate::term::{infer_pattern, FocusedTerm, Signature, Term, TermError};

#[derive(Debug, Clone)]
enum Node<T> {
    /// 0-based slot.
    Var(usize),
    App(String, Vec<Node<T>>),
    Mu {
        /// 0-based slot.
        slot: usize,
        modulus: T,
        body: Box<Node<T>>,
    },
}

/// A term resolved against a signature, with the contraction modulus of
/// every binder precomputed.
#[derive(Debug, Clone)]
pub struct CompiledTerm<T> {
    root: Node<T>,
    arity: usize,
}

impl<T> CompiledTerm<T> {
    pub fn arity(&self) -> usize {
        self.arity
    }
}

pub fn compile<T: Scalar>(term: &Term, sig: &Signature<T>, arity: usize) -> Result<CompiledTerm<T>, SolveError> {
    infer_pattern(term, sig, arity)?;
    Ok(CompiledTerm {
        root: compile_node(term, sig, arity)?,
        arity,
    })
}

fn compile_node<T: Scalar>(term: &Term, sig: &Signature<T>, m: usize) -> Result<Node<T>, SolveError> {
    Ok(match term {
        Term::Var(k) => Node::Var(k - 1),
        Term::App(f, args) => Node::App(
            f.clone(),
            args.iter()
                .map(|a| compile_node(a, sig, m))
                .collect::<Result<_, _>>()?,
        ),
        Term::Mu(i, body) => Node::Mu {
            slot: i - 1,
            modulus: infer_pattern(body, sig, m + 1)?.modulus(*i)?,
            body: Box::new(compile_node(body, sig, m + 1)?),
        },
    })
}

/// Evaluates compiled terms in a model. Nested binders are solved by
/// Banach iteration to `inner_eps` from the model origin.
pub struct Evaluator<'m, M: MetricModel> {
    model: &'m M,
    inner_eps: M::Scalar,
}

impl<'m, M: MetricModel> Evaluator<'m, M> {
    pub fn new(model: &'m M, inner_eps: M::Scalar) -> Self {
        Evaluator { model, inner_eps }
    }

    pub fn model(&self) -> &'m M {
        self.model
    }

    pub fn eval(&self, t: &CompiledTerm<M::Scalar>, env: &[M::Elem]) -> Result<M::Elem, SolveError> {
        if env.len() != t.arity {
            return Err(SolveError::Environment {
                expected: t.arity,
                found: env.len(),
            });
        }
        self.node(&t.root, env)
    }

    fn node(&self, n: &Node<M::Scalar>, env: &[M::Elem]) -> Result<M::Elem, SolveError> {
        match n {
            Node::Var(k) => Ok(env[*k].clone()),
            Node::App(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.node(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(self.model.interpret(f, &vals)?)
            }
            Node::Mu {
                slot,
                modulus,
                body,
            } => {
                let cert = self.fixed_point(body, *slot, *modulus, env, self.inner_eps, self.model.origin(), StopRule::Either)?;
                Ok(cert.value)
            }
        }
    }

    /// Solves `x = body(env[x/slot])`.
    #[allow(clippy::too_many_arguments)]
    fn fixed_point(
        &self,
        body: &Node<M::Scalar>,
        slot: usize,
        modulus: M::Scalar,
        env: &[M::Elem],
        eps: M::Scalar,
        seed: M::Elem,
        rule: StopRule,
    ) -> Result<Certificate<M::Elem, M::Scalar>, SolveError> {
        let mut local: Vec<M::Elem> = Vec::with_capacity(env.len() + 1);
        local.extend_from_slice(&env[..slot]);
        local.push(seed.clone());
        local.extend_from_slice(&env[slot..]);
        banach_iterate(
            |x: &M::Elem| {
                local[slot] = x.clone();
                self.node(body, &local)
            },
            |x, y| Ok(self.model.distance(x, y)?),
            modulus,
            eps,
            seed,
            rule,
        )
    }
}

/// Evaluates `term` over `env.len()` slots with nested binders solved to
/// `1e-12`.
pub fn evaluate<M: MetricModel>(model: &M, term: &Term, env: &[M::Elem]) -> Result<M::Elem, SolveError> {
    let compiled = compile(term, model.signature(), env.len())?;
    Evaluator::new(model, M::Scalar::lit(1e-12)).eval(&compiled, env)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions<T> {
    pub rule: StopRule,
    /// Accuracy for binders nested inside the solved term; defaults to
    /// `ε · 1e-3`.
    pub inner_eps: Option<T>,
}

impl<T> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            rule: StopRule::Either,
            inner_eps: None,
        }
    }
}

/// Certified `μi.t` at `env` (the values of the other slots), iterating
/// from `seed` or the model origin.
pub fn solve_mu<M: MetricModel>(
    model: &M,
    t: &FocusedTerm,
    env: &[M::Elem],
    eps: M::Scalar,
    seed: Option<M::Elem>,
) -> Result<Certificate<M::Elem, M::Scalar>, SolveError> {
    solve_mu_with(model, t, env, eps, seed, SolveOptions::default())
}

pub fn solve_mu_with<M: MetricModel>(
    model: &M,
    t: &FocusedTerm,
    env: &[M::Elem],
    eps: M::Scalar,
    seed: Option<M::Elem>,
    opts: SolveOptions<M::Scalar>,
) -> Result<Certificate<M::Elem, M::Scalar>, SolveError> {
    if eps <= M::Scalar::zero() {
        return Err(SolveError::NonpositiveEpsilon(eps.as_f64()));
    }
    if env.len() + 1 != t.arity {
        return Err(SolveError::Environment {
            expected: t.arity - 1,
            found: env.len(),
        });
    }
    let sig = model.signature();
    let pattern = infer_pattern(&t.term, sig, t.arity).map_err(|e| match e {
        TermError::NotContractive { weight, .. } => SolveError::NotContractive { modulus: weight },
        other => other.into(),
    })?;
    let a = pattern.modulus(t.focus)?;
    if a >= M::Scalar::one() - M::Scalar::tol() {
        return Err(SolveError::NotContractive { modulus: a.as_f64() });
    }
    let body = compile(&t.term, sig, t.arity)?;
    let inner = opts.inner_eps.unwrap_or(eps * M::Scalar::lit(1e-3));
    let ev = Evaluator::new(model, inner);
    let seed = seed.unwrap_or_else(|| model.origin());
    ev.fixed_point(&body.root, t.focus - 1, a, env, eps, seed, opts.rule)
}

/// Solves from two seeds; both values lie within `ε` of the unique fixed
/// point, hence within `2ε` of each other.
pub fn solve_mu_two_seeds<M: MetricModel>(
    model: &M,
    t: &FocusedTerm,
    env: &[M::Elem],
    eps: M::Scalar,
    seed_a: M::Elem,
    seed_b: M::Elem,
) -> Result<(Certificate<M::Elem, M::Scalar>, Certificate<M::Elem, M::Scalar>), SolveError> {
    Ok((
        solve_mu(model, t, env, eps, Some(seed_a))?,
        solve_mu(model, t, env, eps, Some(seed_b))?,
    ))
}

/// Samples environment pairs and checks the inferred pattern of `term`
/// against its evaluation, as [`crate::metric::check_pattern_compliance`]
/// does for single symbols.
pub fn check_term_compliance<M: MetricModel>(
    model: &M,
    term: &Term,
    arity: usize,
    trials: usize,
    seed: u64,
) -> Result<ComplianceReport, SolveError> {
    let pattern = infer_pattern(term, model.signature(), arity)?;
    let compiled = compile(term, model.signature(), arity)?;
    let inner = M::Scalar::lit(1e-12);
    let ev = Evaluator::new(model, inner);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_slack = f64::NEG_INFINITY;
    for _ in 0..trials.max(1) {
        let mut a = Vec::with_capacity(arity);
        let mut b = Vec::with_capacity(arity);
        let mut eps = Vec::with_capacity(arity);
        for _ in 0..arity {
            let x = model.sample(&mut rng);
            let y = if rng.gen_bool(0.5) {
                x.clone()
            } else {
                model.sample(&mut rng)
            };
            eps.push(model.distance(&x, &y)?);
            a.push(x);
            b.push(y);
        }
        let lhs = model.distance(&ev.eval(&compiled, &a)?, &ev.eval(&compiled, &b)?)?;
        let rhs = pattern.bound(&eps)?;
        max_slack = max_slack.max((lhs - rhs).as_f64());
    }
    let tolerance = M::Scalar::tol().as_f64();
    Ok(ComplianceReport {
        symbol: term.to_string(),
        trials: trials.max(1),
        max_slack,
        tolerance,
        passed: max_slack <= tolerance,
    })
}
