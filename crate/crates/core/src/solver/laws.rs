use std::fmt;
use std::str::FromStr;

use num_traits::{Float, One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::{compile, solve_mu, Evaluator};
use super::{banach_iterate, SolveError, StopRule};
use crate::metric::MetricModel;
use crate::scalar::Scalar;
use crate::term::{identify, infer_pattern, substitute, substitute_all, FocusedTerm, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Dinaturality,
    Diagonal,
    Amalgamation,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::Dinaturality => "dinaturality",
            Law::Diagonal => "diagonal",
            Law::Amalgamation => "amalgamation",
        })
    }
}

impl FromStr for Law {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dinaturality" => Ok(Law::Dinaturality),
            "diagonal" => Ok(Law::Diagonal),
            "amalgamation" => Ok(Law::Amalgamation),
            _ => Err(format!("unknown law `{s}`")),
        }
    }
}

/// The data of one law instance. All terms are read over `arity` slots;
/// slots not named by the law are parameters bound by the environment.
#[derive(Debug, Clone, PartialEq)]
pub enum LawSpec {
    /// `μk. f[g/k] = f[μk. g[f/k] / k]`.
    Dinaturality {
        f: Term,
        g: Term,
        arity: usize,
        slot: usize,
    },
    /// `μi. f(.. xi .. xi ..) = μ(j-1). μi. f` for `i < j`.
    Diagonal {
        f: Term,
        arity: usize,
        i: usize,
        j: usize,
    },
    /// The solution of `s_k = f_k(s_1..s_p)` equals `μ1. g` for every `k`,
    /// where the family variables are slots `1..=p` and `g` is read over
    /// `arity - p + 1` slots with the diagonal variable first. When `g` is
    /// omitted it is `f_1` with the family slots identified.
    Amalgamation {
        family: Vec<Term>,
        arity: usize,
        g: Option<Term>,
    },
}

impl LawSpec {
    pub fn law(&self) -> Law {
        match self {
            LawSpec::Dinaturality { .. } => Law::Dinaturality,
            LawSpec::Diagonal { .. } => Law::Diagonal,
            LawSpec::Amalgamation { .. } => Law::Amalgamation,
        }
    }

    /// Number of environment values the law expects.
    pub fn parameters(&self) -> usize {
        match self {
            LawSpec::Dinaturality { arity, .. } => arity - 1,
            LawSpec::Diagonal { arity, .. } => arity - 2,
            LawSpec::Amalgamation { family, arity, .. } => arity - family.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawReport<E> {
    pub law: Law,
    /// Largest model distance between the two sides.
    pub discrepancy: f64,
    pub epsilon: f64,
    pub passed: bool,
    pub lhs: E,
    /// One value for dinaturality and diagonal; `s_1..s_p` for amalgamation.
    pub rhs: Vec<E>,
}

/// Computes both sides of a law to `ε/4` each and compares them under the
/// model metric.
pub fn verify_law<M: MetricModel>(
    model: &M,
    spec: &LawSpec,
    env: &[M::Elem],
    eps: M::Scalar,
) -> Result<LawReport<M::Elem>, SolveError> {
    if eps <= M::Scalar::zero() {
        return Err(SolveError::NonpositiveEpsilon(eps.as_f64()));
    }
    if env.len() != spec.parameters() {
        return Err(SolveError::Environment {
            expected: spec.parameters(),
            found: env.len(),
        });
    }
    let quarter = eps / M::Scalar::lit(4.0);
    let (lhs, rhs) = match spec {
        LawSpec::Dinaturality { f, g, arity, slot } => dinaturality(model, f, g, *arity, *slot, env, quarter)?,
        LawSpec::Diagonal { f, arity, i, j } => diagonal(model, f, *arity, *i, *j, env, quarter)?,
        LawSpec::Amalgamation { family, arity, g } => amalgamation(model, family, *arity, g.as_ref(), env, quarter)?,
    };
    let mut discrepancy = M::Scalar::zero();
    for r in &rhs {
        discrepancy = discrepancy.max(model.distance(&lhs, r)?);
    }
    Ok(LawReport {
        law: spec.law(),
        discrepancy: discrepancy.as_f64(),
        epsilon: eps.as_f64(),
        passed: discrepancy <= eps,
        lhs,
        rhs,
    })
}

type Sides<E> = (E, Vec<E>);

fn contractive_at<T: Scalar>(
    model_sig: &crate::term::Signature<T>,
    t: &Term,
    arity: usize,
    slot: usize,
    what: &str,
) -> Result<(), SolveError> {
    let a = infer_pattern(t, model_sig, arity)?.modulus(slot)?;
    if a >= T::one() - T::tol() {
        return Err(SolveError::PreconditionViolated(format!(
            "{what} has modulus {} at slot {slot}, not below 1",
            a.as_f64()
        )));
    }
    Ok(())
}

fn dinaturality<M: MetricModel>(
    model: &M,
    f: &Term,
    g: &Term,
    arity: usize,
    slot: usize,
    env: &[M::Elem],
    eps: M::Scalar,
) -> Result<Sides<M::Elem>, SolveError> {
    let sig = model.signature();
    let fg = substitute(f, slot, g, arity)?;
    let gf = substitute(g, slot, f, arity)?;
    contractive_at(sig, &fg, arity, slot, "f[g/k]")?;
    contractive_at(sig, &gf, arity, slot, "g[f/k]")?;
    let lhs = solve_mu(model, &FocusedTerm::new(fg, arity, slot)?, env, eps, None)?.value;
    // f is nonexpansive at the slot, so an ε/4 error in v stays ε/4 in f(v).
    let v = solve_mu(model, &FocusedTerm::new(gf, arity, slot)?, env, eps, None)?.value;
    let mut full = env.to_vec();
    full.insert(slot - 1, v);
    let compiled = compile(f, sig, arity)?;
    let rhs = Evaluator::new(model, eps * M::Scalar::lit(1e-3)).eval(&compiled, &full)?;
    Ok((lhs, vec![rhs]))
}

fn diagonal<M: MetricModel>(
    model: &M,
    f: &Term,
    arity: usize,
    i: usize,
    j: usize,
    env: &[M::Elem],
    eps: M::Scalar,
) -> Result<Sides<M::Elem>, SolveError> {
    if i == 0 || j <= i || j > arity {
        return Err(SolveError::PreconditionViolated(format!(
            "slots must satisfy 1 <= i < j <= {arity}, got i={i}, j={j}"
        )));
    }
    let p = infer_pattern(f, model.signature(), arity)?;
    for w in p.tuples() {
        let s = w.weight(i)? + w.weight(j)?;
        if s >= M::Scalar::one() - M::Scalar::tol() {
            return Err(SolveError::PreconditionViolated(format!(
                "α_{i} + α_{j} = {} is not below 1 in {w}",
                s.as_f64()
            )));
        }
    }
    let merged = identify(f, i, j, arity)?;
    let lhs = solve_mu(model, &FocusedTerm::new(merged, arity - 1, i)?, env, eps, None)?.value;
    let nested = FocusedTerm::new(Term::mu(i, f.clone()), arity - 1, j - 1)?;
    let rhs = solve_mu(model, &nested, env, eps, None)?.value;
    Ok((lhs, vec![rhs]))
}

fn amalgamation<M: MetricModel>(
    model: &M,
    family: &[Term],
    arity: usize,
    g: Option<&Term>,
    env: &[M::Elem],
    eps: M::Scalar,
) -> Result<Sides<M::Elem>, SolveError> {
    let sig = model.signature();
    let p = family.len();
    if p == 0 || p > arity {
        return Err(SolveError::PreconditionViolated(format!(
            "family of {p} maps does not fit {arity} slots"
        )));
    }
    let mut alpha: Option<M::Scalar> = None;
    for (k, f) in family.iter().enumerate() {
        for w in infer_pattern(f, sig, arity)?.tuples() {
            let s: M::Scalar = w.weights()[..p].iter().copied().sum();
            match alpha {
                None => alpha = Some(s),
                Some(a) if (a - s).abs() > M::Scalar::tol() => {
                    return Err(SolveError::PreconditionViolated(format!(
                        "family weight sums differ: {} vs {} in f{}",
                        a.as_f64(),
                        s.as_f64(),
                        k + 1
                    )))
                }
                _ => {}
            }
        }
    }
    let alpha = alpha.unwrap_or_else(M::Scalar::zero);
    if alpha >= M::Scalar::one() - M::Scalar::tol() {
        return Err(SolveError::PreconditionViolated(format!(
            "family weight sum {} is not below 1",
            alpha.as_f64()
        )));
    }

    let g_arity = arity - p + 1;
    let diag: Vec<Term> = (1..=arity)
        .map(|k| if k <= p { Term::Var(1) } else { Term::Var(k - p + 1) })
        .collect();
    let inner = eps * M::Scalar::lit(1e-3);
    let ev = Evaluator::new(model, inner);
    let g = match g {
        Some(g) => {
            check_diagonal_agreement(model, &ev, family, &diag, g, g_arity, eps)?;
            g.clone()
        }
        None => substitute_all(&family[0], &diag, g_arity)?,
    };

    let compiled = family
        .iter()
        .map(|f| compile(f, sig, arity))
        .collect::<Result<Vec<_>, _>>()?;
    let origin = model.origin();
    let joint = banach_iterate(
        |s: &Vec<M::Elem>| {
            let mut full = s.clone();
            full.extend_from_slice(env);
            compiled.iter().map(|c| ev.eval(c, &full)).collect()
        },
        |x, y| {
            let mut d = M::Scalar::zero();
            for (a, b) in x.iter().zip(y) {
                d = d.max(model.distance(a, b)?);
            }
            Ok(d)
        },
        alpha,
        eps,
        vec![origin; p],
        StopRule::Either,
    )?;
    let lhs = solve_mu(model, &FocusedTerm::new(g, g_arity, 1)?, env, eps, None)?.value;
    Ok((lhs, joint.value))
}

/// Samples points and checks `f_k(x..x) = g(x)` for every member.
fn check_diagonal_agreement<M: MetricModel>(
    model: &M,
    ev: &Evaluator<'_, M>,
    family: &[Term],
    diag: &[Term],
    g: &Term,
    g_arity: usize,
    eps: M::Scalar,
) -> Result<(), SolveError> {
    let sig = model.signature();
    let gc = compile(g, sig, g_arity)?;
    let merged = family
        .iter()
        .map(|f| compile(&substitute_all(f, diag, g_arity)?, sig, g_arity))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..32 {
        let point: Vec<M::Elem> = (0..g_arity).map(|_| model.sample(&mut rng)).collect();
        let gv = ev.eval(&gc, &point)?;
        for (k, m) in merged.iter().enumerate() {
            let d = model.distance(&ev.eval(m, &point)?, &gv)?;
            if d > eps {
                return Err(SolveError::PreconditionViolated(format!(
                    "f{}(x..x) differs from g(x) by {}",
                    k + 1,
                    d.as_f64()
                )));
            }
        }
    }
    Ok(())
}
