use serde_json::Value;

use qfix::solver::check_term_compliance;
use qfix::term::infer_pattern;
use qfix::Signature;

use super::{solve_error, term_at};
use crate::commands::pattern::show;
use crate::io::{load_json, number, read_text, render_object};
use crate::model::LoadedModel;
use crate::{with_model, AnalyzeArgs, Cli, CliError, Outcome};

pub fn run(args: &AnalyzeArgs, cli: &Cli) -> Result<Outcome, CliError> {
    let model = args.model.as_deref().map(LoadedModel::load).transpose()?;
    let sig: Signature<f64> = match (&model, &args.signature) {
        (Some(m), _) => with_model!(m, m => qfix::MetricModel::signature(m).clone()),
        (None, Some(path)) => load_json(path)?,
        (None, None) => return Err(CliError::Usage("--signature or --model is required".into())),
    };
    let src = read_text(&args.term)?;
    let term = term_at(&src, &sig, &args.term, "")?;
    let arity = args.arity.unwrap_or_else(|| term.need());
    let pattern = infer_pattern(&term, &sig, arity).map_err(|e| CliError::document(&args.term, "", e))?;
    let moduli: Vec<f64> = (1..=arity)
        .map(|i| pattern.modulus(i).expect("slot in range"))
        .collect();

    let mut compliance = None;
    if let (Some(m), Some(trials)) = (&model, args.trials) {
        let report = with_model!(m, m => check_term_compliance(m, &term, arity, trials, cli.seed)).map_err(solve_error)?;
        compliance = Some(report);
    }
    let sampling = args.trials.map(|n| {
        format!(
            "{n} environment pairs drawn from the model sampler, each argument pair shared with probability 1/2, ChaCha8 seed {}",
            cli.seed
        )
    });
    let passed = compliance.as_ref().is_none_or(|r| r.passed);

    let output = if cli.json {
        let mut fields = vec![
            ("term", Value::from(term.to_string())),
            ("arity", Value::from(arity)),
            ("pattern", serde_json::to_value(&pattern).expect("patterns serialize")),
            ("moduli", Value::from(moduli.clone())),
        ];
        if let (Some(s), Some(r)) = (&sampling, &compliance) {
            fields.push(("sampling", Value::from(s.clone())));
            fields.push(("compliance", serde_json::to_value(r).expect("reports serialize")));
        }
        render_object(&fields) + "\n"
    } else {
        let mut out = String::new();
        if let Some(s) = &sampling {
            out += &format!("# sampling: {s}\n");
        }
        out += &format!("term: {term}\narity: {arity}\npattern: {}\n", show(&pattern, false));
        for (i, a) in moduli.iter().enumerate() {
            let kind = if pattern.is_contractive(i + 1) { "contractive" } else { "nonexpansive" };
            out += &format!("x{}: modulus {} {kind}\n", i + 1, number(*a));
        }
        if let Some(r) = &compliance {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            out += &format!(
                "compliance: trials={} max_slack={} tolerance={} {verdict}\n",
                r.trials,
                number(r.max_slack),
                number(r.tolerance)
            );
        }
        out
    };
    Ok(Outcome::verdict(output, passed))
}
