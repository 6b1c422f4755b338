use serde_json::{Map, Value};

use super::checker::substitution_for;
use super::{
    apply_approx, banach_delta, DeductionError, Derivation, DerivationStep, Judgement,
    QuantEquation,
};
use crate::scalar::Scalar;
use crate::term::{substitute_all, Signature, Term, TermError};

/// Emits derivation steps whose conclusions are computed by the rules
/// themselves, so the result always checks.
///
/// Every step is concluded under the current hypothesis set `Γ`
/// ([`DerivationBuilder::set_hypotheses`]).
#[derive(Debug, Clone)]
pub struct DerivationBuilder<T: Scalar> {
    signature: Signature<T>,
    axioms: Vec<Judgement<T>>,
    steps: Vec<DerivationStep<T>>,
    hypotheses: Vec<QuantEquation<T>>,
}

impl<T: Scalar> DerivationBuilder<T> {
    pub fn new(signature: Signature<T>) -> Self {
        DerivationBuilder {
            signature,
            axioms: Vec::new(),
            steps: Vec::new(),
            hypotheses: Vec::new(),
        }
    }

    pub fn signature(&self) -> &Signature<T> {
        &self.signature
    }

    pub fn set_hypotheses(&mut self, hypotheses: Vec<QuantEquation<T>>) {
        self.hypotheses = hypotheses;
    }

    /// Registers an axiom and returns its index.
    pub fn add_axiom(&mut self, axiom: Judgement<T>) -> usize {
        self.axioms.push(axiom);
        self.axioms.len() - 1
    }

    pub fn conclusion(&self, step: usize) -> &QuantEquation<T> {
        &self.steps[step].conclusion.conclusion
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn push(
        &mut self,
        rule: &str,
        premises: Vec<usize>,
        conclusion: QuantEquation<T>,
        params: Map<String, Value>,
    ) -> usize {
        self.steps.push(DerivationStep {
            rule: rule.to_string(),
            premises,
            conclusion: Judgement::new(self.hypotheses.clone(), conclusion),
            params,
            weakened: false,
        });
        self.steps.len() - 1
    }

    fn premise(&self, k: usize) -> Result<&QuantEquation<T>, DeductionError> {
        self.steps
            .get(k)
            .map(|s| &s.conclusion.conclusion)
            .ok_or_else(|| DeductionError::ShapeMismatch(format!("no step {k}")))
    }

    pub fn assume(&mut self, eq: QuantEquation<T>) -> Result<usize, DeductionError> {
        if !self.hypotheses.iter().any(|h| h.matches(&eq)) {
            return Err(DeductionError::ShapeMismatch(format!("`{eq}` is not a hypothesis")));
        }
        Ok(self.push("Assumpt", vec![], eq, Map::new()))
    }

    pub fn axiom(&mut self, index: usize) -> Result<usize, DeductionError> {
        let eq = self
            .axioms
            .get(index)
            .ok_or_else(|| DeductionError::ShapeMismatch(format!("no axiom {index}")))?
            .conclusion
            .clone();
        let mut params = Map::new();
        params.insert("index".into(), index.into());
        Ok(self.push("Axiom", vec![], eq, params))
    }

    pub fn refl(&mut self, t: Term) -> usize {
        self.push("Refl", vec![], QuantEquation::new(t.clone(), t, T::zero()).expect("zero"), Map::new())
    }

    pub fn one_bound(&mut self, s: Term, t: Term) -> usize {
        self.push("OneBound", vec![], QuantEquation::new(s, t, T::one()).expect("one"), Map::new())
    }

    pub fn symm(&mut self, p: usize) -> Result<usize, DeductionError> {
        let e = self.premise(p)?;
        let eq = QuantEquation::new(e.rhs.clone(), e.lhs.clone(), e.eps)?;
        Ok(self.push("Symm", vec![p], eq, Map::new()))
    }

    pub fn triang(&mut self, p: usize, q: usize) -> Result<usize, DeductionError> {
        let (a, b) = (self.premise(p)?, self.premise(q)?);
        if a.rhs != b.lhs {
            return Err(DeductionError::ShapeMismatch("premises do not chain".into()));
        }
        let eq = QuantEquation::new(a.lhs.clone(), b.rhs.clone(), a.eps + b.eps)?;
        Ok(self.push("Triang", vec![p, q], eq, Map::new()))
    }

    /// Raises `ε` by exactly `by`.
    pub fn max(&mut self, p: usize, by: T) -> Result<usize, DeductionError> {
        if by < T::zero() {
            return Err(DeductionError::NegativeEpsilon(by.as_f64()));
        }
        let e = self.premise(p)?;
        let eq = QuantEquation::new(e.lhs.clone(), e.rhs.clone(), e.eps + by)?;
        let mut params = Map::new();
        params.insert("by".into(), by.as_f64().into());
        Ok(self.push("Max", vec![p], eq, params))
    }

    fn congruence(
        &mut self,
        rule: &str,
        symbol: &str,
        premises: Vec<usize>,
    ) -> Result<usize, DeductionError> {
        let sym = self.signature.lookup(symbol)?.clone();
        if sym.arity != premises.len() {
            return Err(TermError::ArityMismatch {
                symbol: symbol.into(),
                expected: sym.arity,
                found: premises.len(),
            }
            .into());
        }
        let mut ls = Vec::new();
        let mut rs = Vec::new();
        let mut eps = Vec::new();
        for &p in &premises {
            let e = self.premise(p)?;
            ls.push(e.lhs.clone());
            rs.push(e.rhs.clone());
            eps.push(e.eps);
        }
        let derived = if rule == "Banach" {
            banach_delta(&sym.pattern, &eps)?
        } else {
            let first = eps.first().copied().unwrap_or(T::zero());
            if eps.iter().any(|&x| (x - first).abs() > T::tol()) {
                return Err(DeductionError::ShapeMismatch("NExp needs a common epsilon".into()));
            }
            first
        };
        let eq = QuantEquation::new(Term::app(symbol, ls), Term::app(symbol, rs), derived)?;
        Ok(self.push(rule, premises, eq, Map::new()))
    }

    pub fn nexp(&mut self, symbol: &str, premises: Vec<usize>) -> Result<usize, DeductionError> {
        self.congruence("NExp", symbol, premises)
    }

    pub fn banach(&mut self, symbol: &str, premises: Vec<usize>) -> Result<usize, DeductionError> {
        self.congruence("Banach", symbol, premises)
    }

    pub fn approx(
        &mut self,
        p: usize,
        body: &Term,
        slot: usize,
        args: &[Term],
    ) -> Result<usize, DeductionError> {
        let eq = apply_approx(self.premise(p)?, body, slot, args, &self.signature)?;
        let mut params = Map::new();
        params.insert("term".into(), body.to_string().into());
        params.insert("slot".into(), slot.into());
        params.insert(
            "args".into(),
            args.iter().map(|a| Value::from(a.to_string())).collect(),
        );
        Ok(self.push("Approx", vec![p], eq, params))
    }

    /// Discharges hypotheses of `main` proved by the steps in `proofs`.
    pub fn cut(&mut self, main: usize, proofs: Vec<usize>) -> Result<usize, DeductionError> {
        let eq = self.premise(main)?.clone();
        for &q in &proofs {
            self.premise(q)?;
        }
        let mut premises = vec![main];
        premises.extend(proofs);
        Ok(self.push("Cut", premises, eq, Map::new()))
    }

    /// Applies `xk ↦ t` for each `(k, t)`; other slots are kept.
    pub fn subst(&mut self, p: usize, map: Vec<(usize, Term)>) -> Result<usize, DeductionError> {
        let premise = self
            .steps
            .get(p)
            .ok_or_else(|| DeductionError::ShapeMismatch(format!("no step {p}")))?
            .conclusion
            .clone();
        let mut params = Map::new();
        for (k, t) in &map {
            params.insert(k.to_string(), t.to_string().into());
        }
        let (sigma, target) = substitution_for(&premise, map);
        let c = &premise.conclusion;
        let eq = QuantEquation::new(
            substitute_all(&c.lhs, &sigma, target)?,
            substitute_all(&c.rhs, &sigma, target)?,
            c.eps,
        )?;
        let mut outer = Map::new();
        outer.insert("map".into(), Value::Object(params));
        Ok(self.push("Subst", vec![p], eq, outer))
    }

    pub fn finish(self) -> Derivation<T> {
        Derivation {
            signature: self.signature,
            axioms: self.axioms,
            steps: self.steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{RejectReason, Verdict};
    use super::*;
    use crate::pattern::Pattern;
    use crate::term::parse_term;

    fn sig() -> Signature<f64> {
        Signature::new()
            .with("f", Pattern::new(vec![vec![0.3]], 1).unwrap())
            .unwrap()
            .with("g", Pattern::new(vec![vec![0.5, 0.5]], 2).unwrap())
            .unwrap()
            .with("h", Pattern::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap())
            .unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &sig()).unwrap()
    }

    fn eq(l: &str, r: &str, e: f64) -> QuantEquation<f64> {
        QuantEquation::new(t(l), t(r), e).unwrap()
    }

    #[test]
    fn three_step_banach() {
        let mut b = DerivationBuilder::new(sig());
        b.set_hypotheses(vec![eq("x1", "x2", 0.1)]);
        let a = b.assume(eq("x1", "x2", 0.1)).unwrap();
        let s = b.banach("f", vec![a]).unwrap();
        assert!((b.conclusion(s).eps - 0.03).abs() < 1e-15);
        b.max(s, 0.02).unwrap();
        let mut d = b.finish();
        assert_eq!(d.check(), Verdict::Accepted);
        d.steps[1].conclusion.conclusion.eps = 0.02;
        match d.check() {
            Verdict::Rejected {
                step: 2,
                reason: RejectReason::WrongEpsilon { expected, found },
            } => {
                assert!((expected - 0.03).abs() < 1e-12);
                assert_eq!(found, 0.02);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn every_rule_roundtrips_through_json() {
        let mut b = DerivationBuilder::new(sig());
        let ax = b.add_axiom(Judgement::new(vec![], eq("x1", "f(x1)", 0.4)));
        b.set_hypotheses(vec![eq("x1", "x2", 0.1), eq("x3", "x4", 0.1)]);
        let h1 = b.assume(eq("x1", "x2", 0.1)).unwrap();
        let h2 = b.assume(eq("x3", "x4", 0.1)).unwrap();
        let r = b.refl(t("x2"));
        let sy = b.symm(h1).unwrap();
        let tr = b.triang(h1, r).unwrap();
        b.triang(tr, sy).unwrap();
        b.nexp("h", vec![h1, h2]).unwrap();
        b.banach("g", vec![h1, h2]).unwrap();
        b.one_bound(t("x1"), t("f(x3)"));
        b.set_hypotheses(vec![]);
        let a = b.axiom(ax).unwrap();
        b.subst(a, vec![(1, t("g(x2,x5)"))]).unwrap();
        let d = b.finish();
        assert_eq!(d.check(), Verdict::Accepted);
        let back = Derivation::<f64>::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.check(), Verdict::Accepted);
    }

    #[test]
    fn approx_and_cut() {
        let mut b = DerivationBuilder::new(sig());
        let premise = eq("x1", "g(x1,x2)", 0.1);
        b.set_hypotheses(vec![premise.clone()]);
        let h = b.assume(premise.clone()).unwrap();
        let ap = b.approx(h, &t("g(x1,x2)"), 1, &[t("x2")]).unwrap();
        assert_eq!(b.conclusion(ap).rhs, t("mu 1. g(x1,x3)"));
        assert!((b.conclusion(ap).eps - 0.2).abs() < 1e-15);
        let main = ap;
        b.set_hypotheses(vec![]);
        let ax = b.add_axiom(Judgement::new(vec![], premise));
        let proof = b.axiom(ax).unwrap();
        let c = b.cut(main, vec![proof]).unwrap();
        assert!(b.steps[c].conclusion.hypotheses.is_empty());
        let d = b.finish();
        assert_eq!(d.check(), Verdict::Accepted);
    }

    #[test]
    fn approx_rejects_non_contractive() {
        let mut b = DerivationBuilder::new(sig());
        let premise = eq("x1", "h(x1,x2)", 0.1);
        b.set_hypotheses(vec![premise.clone()]);
        let h = b.assume(premise).unwrap();
        assert!(matches!(
            b.approx(h, &t("h(x1,x2)"), 1, &[t("x2")]),
            Err(DeductionError::NotContractive(_))
        ));
    }

    #[test]
    fn uniqueness_instance_keeps_zero() {
        let mut b = DerivationBuilder::new(sig());
        let premise = eq("x1", "g(x1,x2)", 0.0);
        b.set_hypotheses(vec![premise.clone()]);
        let h = b.assume(premise).unwrap();
        let ap = b.approx(h, &t("g(x1,x2)"), 1, &[t("x2")]).unwrap();
        assert_eq!(b.conclusion(ap).eps, 0.0);
    }

    #[test]
    fn structural_rejections() {
        let mut b = DerivationBuilder::new(sig());
        b.set_hypotheses(vec![eq("x1", "x2", 0.1)]);
        let a = b.assume(eq("x1", "x2", 0.1)).unwrap();
        b.banach("f", vec![a]).unwrap();
        let d = b.finish();

        let mut bad = d.clone();
        bad.steps[1].rule = "Magic".into();
        assert!(matches!(
            bad.check(),
            Verdict::Rejected { step: 2, reason: RejectReason::UnknownRule(_) }
        ));
        let mut bad = d.clone();
        bad.steps[1].premises = vec![1];
        assert!(matches!(
            bad.check(),
            Verdict::Rejected { step: 2, reason: RejectReason::BadPremise(_) }
        ));
        let mut bad = d.clone();
        bad.steps[1].conclusion.hypotheses.clear();
        assert!(matches!(
            bad.check(),
            Verdict::Rejected { step: 2, reason: RejectReason::BadPremise(_) }
        ));
        let mut bad = d.clone();
        bad.steps[1].conclusion.conclusion.rhs = t("f(x3)");
        assert!(matches!(
            bad.check(),
            Verdict::Rejected { step: 2, reason: RejectReason::ShapeMismatch(_) }
        ));
        let mut weak = d;
        weak.steps[1].conclusion.conclusion.eps = 0.5;
        assert!(!weak.check().is_accepted());
        weak.steps[1].weakened = true;
        assert!(weak.check().is_accepted());
        weak.steps[1].conclusion.conclusion.eps = 0.01;
        assert!(!weak.check().is_accepted());
    }

    #[test]
    fn perturbations_are_rejected() {
        let mut b = DerivationBuilder::new(sig());
        b.set_hypotheses(vec![eq("x1", "x2", 0.1), eq("x3", "x4", 0.2)]);
        let h1 = b.assume(eq("x1", "x2", 0.1)).unwrap();
        let h2 = b.assume(eq("x3", "x4", 0.2)).unwrap();
        let g = b.banach("g", vec![h1, h2]).unwrap();
        let r = b.refl(t("g(x2,x4)"));
        b.triang(g, r).unwrap();
        let d = b.finish();
        for k in 0..d.steps.len() {
            for delta in [2e-9, -2e-9, 0.05] {
                let mut bad = d.clone();
                let e = &mut bad.steps[k].conclusion.conclusion.eps;
                *e = (*e + delta).max(0.0);
                if (*e - d.steps[k].conclusion.conclusion.eps).abs() <= 1e-9 {
                    continue;
                }
                match bad.check() {
                    Verdict::Rejected { step, .. } => assert_eq!(step, k + 1),
                    Verdict::Accepted => panic!("accepted perturbation at step {}", k + 1),
                }
            }
        }
    }
}
