use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use qfix::solver::{verify_law, Law, LawSpec};

use super::{solve_error, term_at};
use crate::io::{load_json, number, render, render_object};
use crate::model::{ElemJson, LoadedModel};
use crate::{with_model, CliError, LawsArgs, Outcome};

/// ```json
/// {"model": <model document or path>, "arity": 2, "env": [..],
///  "f": "..", "g": "..", "slot": 1, "i": 1, "j": 2, "family": [".."]}
/// ```
///
/// Dinaturality reads `f`, `g`, `slot`; diagonal reads `f`, `i`, `j`;
/// amalgamation reads `family` and an optional `g`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LawDoc {
    model: Value,
    arity: usize,
    #[serde(default)]
    env: Value,
    f: Option<String>,
    g: Option<String>,
    slot: Option<usize>,
    i: Option<usize>,
    j: Option<usize>,
    family: Option<Vec<String>>,
}

pub fn run(args: &LawsArgs, eps: f64, json: bool) -> Result<Outcome, CliError> {
    let law: Law = args.law.parse().map_err(CliError::Usage)?;
    let file = args.spec.as_path();
    let doc: LawDoc = load_json(file)?;
    let model = match &doc.model {
        Value::String(p) => {
            let path: PathBuf = file.parent().unwrap_or(Path::new(".")).join(p);
            LoadedModel::load(&path)?
        }
        v => LoadedModel::from_value(v, file)?,
    };
    with_model!(&model, m => check(m, law, &doc, file, eps, json))
}

fn need<T: Clone>(v: &Option<T>, file: &Path, at: &str, law: Law) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::document(file, at, format!("required by {law}")))
}

fn check<M: ElemJson>(m: &M, law: Law, doc: &LawDoc, file: &Path, eps: f64, json: bool) -> Result<Outcome, CliError> {
    let sig = m.signature();
    let term = |field: &Option<String>, at: &str| -> Result<_, CliError> {
        term_at(&need(field, file, at, law)?, sig, file, at)
    };
    let spec = match law {
        Law::Dinaturality => LawSpec::Dinaturality {
            f: term(&doc.f, "f")?,
            g: term(&doc.g, "g")?,
            arity: doc.arity,
            slot: need(&doc.slot, file, "slot", law)?,
        },
        Law::Diagonal => LawSpec::Diagonal {
            f: term(&doc.f, "f")?,
            arity: doc.arity,
            i: need(&doc.i, file, "i", law)?,
            j: need(&doc.j, file, "j", law)?,
        },
        Law::Amalgamation => LawSpec::Amalgamation {
            family: need(&doc.family, file, "family", law)?
                .iter()
                .enumerate()
                .map(|(k, s)| term_at(s, sig, file, &format!("family[{k}]")))
                .collect::<Result<_, _>>()?,
            arity: doc.arity,
            g: doc.g.as_ref().map(|s| term_at(s, sig, file, "g")).transpose()?,
        },
    };
    let env = m.env_from_json(Some(&doc.env), file, "env")?;
    let report = verify_law(m, &spec, &env, eps).map_err(solve_error)?;
    let rhs: Vec<Value> = report.rhs.iter().map(|e| m.elem_to_json(e)).collect();
    let sampling = (law == Law::Amalgamation && doc.g.is_some())
        .then_some("supplied g compared with the default on 32 sampled environments, ChaCha8 seed 0x5eed");
    let output = if json {
        let mut fields = vec![
            ("law", Value::from(law.to_string())),
            ("discrepancy", Value::from(report.discrepancy)),
            ("epsilon", Value::from(report.epsilon)),
            ("passed", Value::from(report.passed)),
            ("lhs", m.elem_to_json(&report.lhs)),
            ("rhs", Value::Array(rhs)),
        ];
        if let Some(s) = sampling {
            fields.push(("sampling", Value::from(s)));
        }
        render_object(&fields)
    } else {
        let mut out = String::new();
        if let Some(s) = sampling {
            out += &format!("# sampling: {s}\n");
        }
        out += &format!(
            "law: {law}\ndiscrepancy: {}\nepsilon: {}\nlhs: {}\nrhs: {}\n{}",
            number(report.discrepancy),
            number(report.epsilon),
            render(&m.elem_to_json(&report.lhs)),
            render(&Value::Array(rhs)),
            if report.passed { "PASS" } else { "FAIL" }
        );
        out
    };
    Ok(Outcome::verdict(output + "\n", report.passed))
}
