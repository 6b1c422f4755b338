use std::fmt;

use serde_json::{Map, Value};

use super::{banach_delta, DeductionError, Derivation, DerivationStep, Judgement, QuantEquation};
use crate::scalar::{close, fmt_g, le_tol, Scalar};
use crate::term::{infer_pattern, parse_term, substitute_all, Signature, Term};

#[derive(Debug, Clone, PartialEq)]
pub enum RejectReason {
    WrongEpsilon { expected: f64, found: f64 },
    ShapeMismatch(String),
    BadPremise(String),
    UnknownRule(String),
    NotContractive { slot: usize, modulus: f64 },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::WrongEpsilon { expected, found } => write!(
                f,
                "WrongEpsilon expected={} found={}",
                fmt_g(*expected),
                fmt_g(*found)
            ),
            RejectReason::ShapeMismatch(m) => write!(f, "ShapeMismatch ({m})"),
            RejectReason::BadPremise(m) => write!(f, "BadPremise ({m})"),
            RejectReason::UnknownRule(r) => write!(f, "UnknownRule ({r})"),
            RejectReason::NotContractive { slot, modulus } => {
                write!(f, "NotContractive slot={slot} modulus={}", fmt_g(*modulus))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Accepted,
    /// `step` is 1-based.
    Rejected { step: usize, reason: RejectReason },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => write!(f, "ACCEPTED"),
            Verdict::Rejected { step, reason } => write!(f, "REJECTED step={step} reason={reason}"),
        }
    }
}

type Check = Result<(), RejectReason>;

fn shape(msg: impl Into<String>) -> RejectReason {
    RejectReason::ShapeMismatch(msg.into())
}

fn bad_premise(msg: impl Into<String>) -> RejectReason {
    RejectReason::BadPremise(msg.into())
}

fn expect_eps<T: Scalar>(derived: T, found: T, weakened: bool) -> Check {
    let ok = if weakened {
        le_tol(derived, found)
    } else {
        close(derived, found)
    };
    if ok {
        Ok(())
    } else {
        Err(RejectReason::WrongEpsilon {
            expected: derived.as_f64(),
            found: found.as_f64(),
        })
    }
}

/// `u =_ε t(s̄[u/i]) ⊢ u =_{ε/(1-a)} (μi.t)(s̄∖i)` where `a` is the modulus
/// of `t` at slot `i` and `args` is `s̄∖i`.
pub fn apply_approx<T: Scalar>(
    premise: &QuantEquation<T>,
    body: &Term,
    slot: usize,
    args: &[Term],
    sig: &Signature<T>,
) -> Result<QuantEquation<T>, DeductionError> {
    let n = args.len() + 1;
    if slot == 0 || slot > n {
        return Err(DeductionError::ShapeMismatch(format!(
            "slot {slot} out of range for {n} slots"
        )));
    }
    let a = infer_pattern(body, sig, n)?.modulus(slot)?;
    if a >= T::one() - T::tol() {
        return Err(DeductionError::NotContractive(a.as_f64()));
    }
    let u = &premise.lhs;
    let target = args.iter().map(Term::need).fold(u.need(), usize::max);
    let mut unfolded = args.to_vec();
    unfolded.insert(slot - 1, u.clone());
    let expected = substitute_all(body, &unfolded, target)?;
    if expected != premise.rhs {
        return Err(DeductionError::ShapeMismatch(format!(
            "premise right side is `{}`, expected `{expected}`",
            premise.rhs
        )));
    }
    let rhs = substitute_all(&Term::mu(slot, body.clone()), args, target)?;
    QuantEquation::new(u.clone(), rhs, premise.eps / (T::one() - a))
}

/// Checks every step in order and reports the first failure.
pub fn check_derivation<T: Scalar>(d: &Derivation<T>) -> Verdict {
    for (k, step) in d.steps.iter().enumerate() {
        if let Err(reason) = check_step(d, k, step) {
            return Verdict::Rejected { step: k + 1, reason };
        }
    }
    Verdict::Accepted
}

struct Ctx<'a, T: Scalar> {
    d: &'a Derivation<T>,
    step: &'a DerivationStep<T>,
}

impl<'a, T: Scalar> Ctx<'a, T> {
    fn concl(&self) -> &'a QuantEquation<T> {
        &self.step.conclusion.conclusion
    }

    fn hyps(&self) -> &'a [QuantEquation<T>] {
        &self.step.conclusion.hypotheses
    }

    fn premise(&self, k: usize) -> &'a Judgement<T> {
        &self.d.steps[self.step.premises[k]].conclusion
    }

    fn arity(&self, n: usize) -> Check {
        if self.step.premises.len() == n {
            Ok(())
        } else {
            Err(bad_premise(format!(
                "{} expects {n} premises, got {}",
                self.step.rule,
                self.step.premises.len()
            )))
        }
    }

    fn included(&self, hyps: &[QuantEquation<T>]) -> Check {
        for h in hyps {
            if !self.step.conclusion.has_hypothesis(h) {
                return Err(bad_premise(format!("hypothesis `{h}` is not carried by the conclusion")));
            }
        }
        Ok(())
    }

    fn premise_hyps_included(&self) -> Check {
        for k in 0..self.step.premises.len() {
            self.included(&self.premise(k).hypotheses)?;
        }
        Ok(())
    }

    fn eps(&self, derived: T) -> Check {
        expect_eps(derived, self.concl().eps, self.step.weakened)
    }

    fn param(&self, key: &str) -> Result<&'a Value, RejectReason> {
        self.step
            .params
            .get(key)
            .ok_or_else(|| shape(format!("missing parameter `{key}`")))
    }

    fn term_param(&self, v: &Value) -> Result<Term, RejectReason> {
        let s = v.as_str().ok_or_else(|| shape("term parameters are strings"))?;
        parse_term(s, &self.d.signature).map_err(|e| shape(format!("term `{s}`: {e}")))
    }
}

fn param_usize(v: &Value, key: &str) -> Result<usize, RejectReason> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| shape(format!("parameter `{key}` must be a natural number")))
}

fn check_step<T: Scalar>(d: &Derivation<T>, index: usize, step: &DerivationStep<T>) -> Check {
    for &p in &step.premises {
        if p >= index {
            return Err(bad_premise(format!("premise {p} is not an earlier step")));
        }
    }
    let cx = Ctx { d, step };
    match step.rule.as_str() {
        "Refl" => refl(&cx),
        "Symm" => symm(&cx),
        "Triang" => triang(&cx),
        "Max" => max(&cx),
        "NExp" => congruence(&cx, false),
        "Banach" => congruence(&cx, true),
        "OneBound" => one_bound(&cx),
        "Approx" => approx(&cx),
        "Assumpt" => assumpt(&cx),
        "Axiom" => axiom(&cx),
        "Cut" => cut(&cx),
        "Subst" => subst(&cx),
        other => Err(RejectReason::UnknownRule(other.to_string())),
    }
}

fn refl<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(0)?;
    if cx.concl().lhs != cx.concl().rhs {
        return Err(shape("Refl needs identical sides"));
    }
    cx.eps(T::zero())
}

fn symm<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(1)?;
    cx.premise_hyps_included()?;
    let p = &cx.premise(0).conclusion;
    if cx.concl().lhs != p.rhs || cx.concl().rhs != p.lhs {
        return Err(shape("Symm swaps the premise sides"));
    }
    cx.eps(p.eps)
}

fn triang<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(2)?;
    cx.premise_hyps_included()?;
    let p = &cx.premise(0).conclusion;
    let q = &cx.premise(1).conclusion;
    if p.rhs != q.lhs {
        return Err(shape("Triang premises do not chain"));
    }
    if cx.concl().lhs != p.lhs || cx.concl().rhs != q.rhs {
        return Err(shape("Triang conclusion must join the outer terms"));
    }
    cx.eps(p.eps + q.eps)
}

fn max<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(1)?;
    cx.premise_hyps_included()?;
    let p = &cx.premise(0).conclusion;
    if !cx.concl().same_terms(p) {
        return Err(shape("Max keeps the premise terms"));
    }
    match cx.step.params.get("by") {
        Some(v) => {
            let by = v
                .as_f64()
                .filter(|b| *b >= 0.0)
                .ok_or_else(|| shape("parameter `by` must be a nonnegative number"))?;
            cx.eps(p.eps + T::lit(by))
        }
        None => expect_eps(p.eps, cx.concl().eps, true),
    }
}

/// `NExp` (common ε, conclusion ε equal to it) and `Banach` (δ from the
/// symbol pattern) share the congruence shape `f(s̄) =_ε f(t̄)`.
fn congruence<T: Scalar>(cx: &Ctx<T>, banach: bool) -> Check {
    let (Term::App(f, ls), Term::App(g, rs)) = (&cx.concl().lhs, &cx.concl().rhs) else {
        return Err(shape("both sides must be applications"));
    };
    if f != g {
        return Err(shape(format!("symbols differ: `{f}` vs `{g}`")));
    }
    let symbol = cx
        .d
        .signature
        .lookup(f)
        .map_err(|e| shape(e.to_string()))?;
    cx.arity(symbol.arity)?;
    cx.premise_hyps_included()?;
    let mut eps = Vec::with_capacity(ls.len());
    for (k, (l, r)) in ls.iter().zip(rs).enumerate() {
        let p = &cx.premise(k).conclusion;
        if p.lhs != *l || p.rhs != *r {
            return Err(shape(format!("argument {} does not match premise {}", k + 1, k + 1)));
        }
        eps.push(p.eps);
    }
    if banach {
        let delta = banach_delta(&symbol.pattern, &eps).map_err(|e| shape(e.to_string()))?;
        return cx.eps(delta);
    }
    match eps.first() {
        None => Ok(()),
        Some(&e) => {
            if eps.iter().any(|&x| !close(x, e)) {
                return Err(shape("NExp premises need a common epsilon"));
            }
            cx.eps(e)
        }
    }
}

fn one_bound<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(0)?;
    cx.eps(T::one())
}

fn approx<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(1)?;
    cx.premise_hyps_included()?;
    let body = cx.term_param(cx.param("term")?)?;
    let slot = param_usize(cx.param("slot")?, "slot")?;
    let args = cx
        .param("args")?
        .as_array()
        .ok_or_else(|| shape("parameter `args` must be a list of terms"))?
        .iter()
        .map(|v| cx.term_param(v))
        .collect::<Result<Vec<_>, _>>()?;
    let premise = &cx.premise(0).conclusion;
    let derived = match apply_approx(premise, &body, slot, &args, &cx.d.signature) {
        Ok(eq) => eq,
        Err(DeductionError::NotContractive(a)) => {
            return Err(RejectReason::NotContractive { slot, modulus: a })
        }
        Err(e) => return Err(shape(e.to_string())),
    };
    if !cx.concl().same_terms(&derived) {
        return Err(shape(format!(
            "Approx concludes `{} = {}`",
            derived.lhs, derived.rhs
        )));
    }
    cx.eps(derived.eps)
}

/// Finds `eq` among `pool` by terms, then compares ε.
fn match_equation<T: Scalar>(cx: &Ctx<T>, pool: &[QuantEquation<T>], what: &str) -> Check {
    let concl = cx.concl();
    if pool.iter().any(|h| h.matches(concl)) {
        return Ok(());
    }
    match pool.iter().find(|h| h.same_terms(concl)) {
        Some(h) => cx.eps(h.eps),
        None => Err(shape(format!("`{concl}` is not {what}"))),
    }
}

fn assumpt<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(0)?;
    match_equation(cx, cx.hyps(), "a hypothesis")
}

fn axiom<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(0)?;
    let k = param_usize(cx.param("index")?, "index")?;
    let ax = cx
        .d
        .axioms
        .get(k)
        .ok_or_else(|| shape(format!("no axiom with index {k}")))?;
    cx.included(&ax.hypotheses)?;
    match_equation(cx, std::slice::from_ref(&ax.conclusion), "the cited axiom")
}

fn cut<T: Scalar>(cx: &Ctx<T>) -> Check {
    if cx.step.premises.is_empty() {
        return Err(bad_premise("Cut needs a main premise"));
    }
    let main = cx.premise(0);
    for k in 1..cx.step.premises.len() {
        cx.included(&cx.premise(k).hypotheses)?;
    }
    for theta in &main.hypotheses {
        let discharged = (1..cx.step.premises.len())
            .any(|k| cx.premise(k).conclusion.matches(theta))
            || cx.step.conclusion.has_hypothesis(theta);
        if !discharged {
            return Err(bad_premise(format!("hypothesis `{theta}` is neither proved nor kept")));
        }
    }
    if !cx.concl().same_terms(&main.conclusion) {
        return Err(shape("Cut keeps the main premise's equation"));
    }
    cx.eps(main.conclusion.eps)
}

fn subst<T: Scalar>(cx: &Ctx<T>) -> Check {
    cx.arity(1)?;
    let map: &Map<String, Value> = cx
        .param("map")?
        .as_object()
        .ok_or_else(|| shape("parameter `map` must map slots to terms"))?;
    let mut images = Vec::with_capacity(map.len());
    for (key, v) in map {
        let slot: usize = key
            .parse()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| shape(format!("`{key}` is not a slot")))?;
        images.push((slot, cx.term_param(v)?));
    }
    let premise = cx.premise(0);
    let (sigma, target) = substitution_for(premise, images);
    let apply = |eq: &QuantEquation<T>| -> Result<QuantEquation<T>, RejectReason> {
        Ok(QuantEquation {
            lhs: substitute_all(&eq.lhs, &sigma, target).map_err(|e| shape(e.to_string()))?,
            rhs: substitute_all(&eq.rhs, &sigma, target).map_err(|e| shape(e.to_string()))?,
            eps: eq.eps,
        })
    };
    let hyps = premise
        .hypotheses
        .iter()
        .map(apply)
        .collect::<Result<Vec<_>, _>>()?;
    cx.included(&hyps)?;
    let derived = apply(&premise.conclusion)?;
    if !cx.concl().same_terms(&derived) {
        return Err(shape(format!(
            "substitution yields `{} = {}`",
            derived.lhs, derived.rhs
        )));
    }
    cx.eps(derived.eps)
}

/// Completes a partial slot map with identities over the premise's slots
/// and picks the target arity.
pub(crate) fn substitution_for<T: Scalar>(
    premise: &Judgement<T>,
    images: Vec<(usize, Term)>,
) -> (Vec<Term>, usize) {
    let source = premise
        .hypotheses
        .iter()
        .chain(std::iter::once(&premise.conclusion))
        .map(QuantEquation::need)
        .chain(images.iter().map(|(k, _)| *k))
        .max()
        .unwrap_or(0);
    let mut sigma: Vec<Option<Term>> = vec![None; source];
    for (k, t) in images {
        sigma[k - 1] = Some(t);
    }
    let target = sigma
        .iter()
        .enumerate()
        .map(|(k, t)| t.as_ref().map_or(k + 1, Term::need))
        .max()
        .unwrap_or(0);
    let sigma = sigma
        .into_iter()
        .enumerate()
        .map(|(k, t)| t.unwrap_or(Term::Var(k + 1)))
        .collect();
    (sigma, target)
}
