//! The packaged derivations under `data/derivations` are rebuilt here with
//! the builder and compared field by field. Set `QFIX_BLESS=1` to rewrite
//! the files from the builder output.

use std::path::PathBuf;

use qfix::{
    Derivation, DerivationBuilder, Judgement, Pattern, QuantEquation, Signature, Term, Verdict,
};

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
    qfix::term::parse_term(s, &sig()).unwrap()
}

fn eq(l: &str, r: &str, e: f64) -> QuantEquation<f64> {
    QuantEquation::new(t(l), t(r), e).unwrap()
}

/// Congruence steps through nested symbols, closed by Triang, Symm and Max.
fn banach_chain() -> Derivation<f64> {
    let mut b = DerivationBuilder::new(sig());
    b.set_hypotheses(vec![eq("x1", "x2", 0.1), eq("x3", "x4", 0.2)]);
    let h1 = b.assume(eq("x1", "x2", 0.1)).unwrap();
    let h2 = b.assume(eq("x3", "x4", 0.2)).unwrap();
    let g = b.banach("g", vec![h1, h2]).unwrap();
    let fg = b.banach("f", vec![g]).unwrap();
    let up = b.max(fg, 0.055).unwrap();
    let hh = b.nexp("h", vec![up, h1]).unwrap();
    let r = b.refl(t("h(f(g(x2,x4)),x2)"));
    let tr = b.triang(hh, r).unwrap();
    let sy = b.symm(tr).unwrap();
    b.max(sy, 0.05).unwrap();
    b.finish()
}

/// `y =_0.1 z ⊢ [f]^4(y) =_(0.1·0.3^4) [f]^4(z)`.
fn banach_iterate() -> Derivation<f64> {
    let mut b = DerivationBuilder::new(sig());
    b.set_hypotheses(vec![eq("x1", "x2", 0.1)]);
    let mut s = b.assume(eq("x1", "x2", 0.1)).unwrap();
    for _ in 0..4 {
        s = b.banach("f", vec![s]).unwrap();
    }
    b.finish()
}

/// `x1 =_0.1 g(x1,x2) ⊢ x1 =_0.2 mu 1. g(x1,x3)`, then the hypothesis is
/// discharged by an axiom and the result pushed through `f`.
fn approx() -> Derivation<f64> {
    let mut b = DerivationBuilder::new(sig());
    let premise = eq("x1", "g(x1,x2)", 0.1);
    let ax = b.add_axiom(Judgement::new(vec![], premise.clone()));
    b.set_hypotheses(vec![premise.clone()]);
    let h = b.assume(premise).unwrap();
    let ap = b.approx(h, &t("g(x1,x2)"), 1, &[t("x2")]).unwrap();
    b.set_hypotheses(vec![]);
    let proof = b.axiom(ax).unwrap();
    let c = b.cut(ap, vec![proof]).unwrap();
    let f = b.banach("f", vec![c]).unwrap();
    b.max(f, 0.04).unwrap();
    b.finish()
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/derivations")
}

fn compare(name: &str, built: Derivation<f64>) {
    assert_eq!(built.check(), Verdict::Accepted, "{name} built");
    let path = data_dir().join(name);
    if std::env::var_os("QFIX_BLESS").is_some() {
        std::fs::create_dir_all(data_dir()).unwrap();
        std::fs::write(&path, built.to_json() + "\n").unwrap();
    }
    let src = std::fs::read_to_string(&path).unwrap();
    let packaged = Derivation::<f64>::from_json(&src).unwrap();
    assert_eq!(packaged, built, "{name} differs from the builder");
    assert_eq!(packaged.check(), Verdict::Accepted);
}

#[test]
fn packaged_banach_chain() {
    compare("banach_chain.json", banach_chain());
}

#[test]
fn packaged_banach_iterate() {
    let d = banach_iterate();
    let last = &d.steps.last().unwrap().conclusion.conclusion;
    assert!((last.eps - 0.1 * 0.3f64.powi(4)).abs() < 1e-15);
    assert_eq!(last.lhs, t("f(f(f(f(x1))))"));
    compare("banach_iterate.json", d);
}

#[test]
fn packaged_approx() {
    let d = approx();
    let ap = &d.steps[1].conclusion.conclusion;
    assert_eq!(ap.rhs, t("mu 1. g(x1,x3)"));
    assert!((ap.eps - 0.2).abs() < 1e-15);
    assert!(d.steps[3].conclusion.hypotheses.is_empty());
    compare("approx.json", d);
}
