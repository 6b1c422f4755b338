use serde::Deserialize;
use serde_json::Value;

use qfix::solver::{solve_mu, Certificate};
use qfix::FocusedTerm;

use super::{solve_error, term_at};
use crate::io::{parse_json, read_text, render_object};
use crate::model::{ElemJson, LoadedModel};
use crate::{with_model, CliError, Outcome, SolveArgs};

/// `{"term": "g(x1,x2)", "focus": 1, "env": [[0.5]]}`; the context has
/// one slot more than `env`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    term: String,
    #[serde(default = "first")]
    focus: usize,
    #[serde(default)]
    env: Value,
}

fn first() -> usize {
    1
}

pub fn run(args: &SolveArgs, eps: f64) -> Result<Outcome, CliError> {
    let model = LoadedModel::load(&args.model)?;
    let src = read_text(&args.term)?;
    let seed = args.seed_value.as_deref().map(read_text).transpose()?;
    let output = with_model!(&model, m => solve_in(m, &src, args, seed.as_deref(), eps))?;
    Ok(Outcome::ok(output + "\n"))
}

fn solve_in<M: ElemJson>(m: &M, src: &str, args: &SolveArgs, seed: Option<&str>, eps: f64) -> Result<String, CliError> {
    let file = args.term.as_path();
    let (term, focus, env) = if src.trim_start().starts_with('{') {
        let doc: TermDoc = parse_json(src, file)?;
        let term = term_at(&doc.term, m.signature(), file, "term")?;
        let env = m.env_from_json(Some(&doc.env), file, "env")?;
        (term, doc.focus, env)
    } else {
        let term = term_at(src, m.signature(), file, "")?;
        if term.need() > 1 {
            return Err(CliError::document(
                file,
                "",
                "the term has parameters; give them as a JSON term document with \"env\"",
            ));
        }
        (term, 1, Vec::new())
    };
    let focused = FocusedTerm::new(term, env.len() + 1, focus).map_err(|e| CliError::document(file, "", e))?;
    let start = match (seed, args.seed_value.as_deref()) {
        (Some(text), Some(path)) => {
            let v: Value = parse_json(text, path)?;
            Some(m.elem_from_json(&v, path, "")?)
        }
        _ => None,
    };
    let cert = solve_mu(m, &focused, &env, eps, start).map_err(solve_error)?;
    Ok(certificate(m, &cert, eps, &[]))
}

/// The certificate fields shared by `solve` and `mdp eval`.
pub fn certificate<M: ElemJson>(
    m: &M,
    cert: &Certificate<M::Elem, f64>,
    eps: f64,
    extra: &[(&str, Value)],
) -> String {
    let mut fields: Vec<(&str, Value)> = extra.to_vec();
    fields.extend([
        ("value", m.elem_to_json(&cert.value)),
        ("iterations", Value::from(cert.iterations)),
        ("a_priori", Value::from(cert.a_priori_bound)),
        ("a_posteriori", Value::from(cert.a_posteriori_bound)),
        ("modulus", Value::from(cert.modulus)),
        ("epsilon", Value::from(eps)),
    ]);
    render_object(&fields)
}
