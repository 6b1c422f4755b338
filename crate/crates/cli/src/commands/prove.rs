use std::path::Path;

use serde_json::Value;

use qfix::{Derivation, Verdict};

use crate::io::{read_text, render_object};
use crate::{CliError, Outcome};

pub fn run(file: &Path, json: bool) -> Result<Outcome, CliError> {
    let src = read_text(file)?;
    let d = Derivation::<f64>::from_json(&src).map_err(|e| CliError::document(file, "", e))?;
    let verdict = d.check();
    let output = if json {
        match &verdict {
            Verdict::Accepted => render_object(&[("verdict", Value::from("ACCEPTED"))]),
            Verdict::Rejected { step, reason } => render_object(&[
                ("verdict", Value::from("REJECTED")),
                ("step", Value::from(*step)),
                ("reason", Value::from(reason.to_string())),
            ]),
        }
    } else {
        verdict.to_string()
    };
    Ok(Outcome::verdict(output + "\n", verdict.is_accepted()))
}
