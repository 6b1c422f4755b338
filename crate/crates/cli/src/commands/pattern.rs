use std::path::Path;

use qfix::Pattern;

use crate::io::{load_json, number, render};
use crate::{CliError, Outcome, PatternOp};

pub fn run(op: &PatternOp, json: bool) -> Result<Outcome, CliError> {
    let fail = |file: &Path, e: qfix::PatternError| CliError::document(file, "", e);
    let result = match op {
        PatternOp::Compose { input, inner } => {
            let outer: Pattern<f64> = load_json(input)?;
            let inner = inner.iter().map(|p| load_json(p)).collect::<Result<Vec<Pattern<f64>>, _>>()?;
            outer.compose(&inner).map_err(|e| fail(input, e))?
        }
        PatternOp::Contract { input, i, j } => {
            let p: Pattern<f64> = load_json(input)?;
            p.contract(*i, *j).map_err(|e| fail(input, e))?
        }
        PatternOp::Mu { input, slot } => {
            let p: Pattern<f64> = load_json(input)?;
            p.mu(*slot).map_err(|e| fail(input, e))?
        }
        PatternOp::Scale { input, by } => {
            let p: Pattern<f64> = load_json(input)?;
            p.scale(*by).map_err(|e| fail(input, e))?
        }
        PatternOp::Modulus { input, slot } => {
            let p: Pattern<f64> = load_json(input)?;
            let a = p.modulus(*slot).map_err(|e| fail(input, e))?;
            let text = if json {
                render(&serde_json::json!({ "slot": slot, "modulus": a, "contractive": p.is_contractive(*slot) }))
            } else {
                number(a)
            };
            return Ok(Outcome::ok(text + "\n"));
        }
    };
    Ok(Outcome::ok(show(&result, json) + "\n"))
}

/// `{⟨w,..⟩,..}` with 12 significant digits, or the pattern document.
pub fn show(p: &Pattern<f64>, json: bool) -> String {
    if json {
        return render(&serde_json::to_value(p).expect("patterns serialize"));
    }
    let tuples: Vec<String> = p
        .tuples()
        .iter()
        .map(|t| {
            let ws: Vec<String> = t.weights().iter().map(|&w| number(w)).collect();
            format!("⟨{}⟩", ws.join(","))
        })
        .collect();
    format!("{{{}}}", tuples.join(","))
}
