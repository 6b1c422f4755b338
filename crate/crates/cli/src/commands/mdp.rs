use std::path::Path;

use serde_json::Value;

use qfix::mdp::RewardAlgebra;
use qfix::{DiscountedSetup, MdpError, PolicyTree};

use super::solve::certificate;
use super::solve_error;
use crate::io::{number, parse_json, read_text, render_object};
use crate::model::ElemJson;
use crate::{CliError, Outcome};

fn mdp_error(file: &Path, e: MdpError) -> CliError {
    CliError::document(file, "", e)
}

fn load_setup(file: &Path) -> Result<DiscountedSetup<f64>, CliError> {
    DiscountedSetup::from_json(&read_text(file)?).map_err(|e| mdp_error(file, e))
}

impl ElemJson for RewardAlgebra<f64> {
    fn elem_from_json(&self, v: &Value, file: &Path, at: &str) -> Result<qfix::BoundedVector<f64>, CliError> {
        let xs: Vec<f64> = parse_json(&v.to_string(), file)?;
        if xs.len() != self.setup().mdp.num_states() {
            return Err(CliError::document(file, at, "one value per state expected"));
        }
        qfix::BoundedVector::new(xs).map_err(|e| CliError::document(file, at, e))
    }

    fn elem_to_json(&self, e: &qfix::BoundedVector<f64>) -> Value {
        crate::io::floats(e.coords())
    }
}

pub fn eval(mdp: &Path, policy: &Path, eps: f64) -> Result<Outcome, CliError> {
    let setup = load_setup(mdp)?;
    let doc: Value = parse_json(&read_text(policy)?, policy)?;
    let tree = PolicyTree::from_json_value(&doc, &setup.mdp).map_err(|e| mdp_error(policy, e))?;
    let states = Value::from(setup.mdp.states().to_vec());
    let mut alg = RewardAlgebra::new(setup);
    let cert = alg.policy_value(&tree, eps).map_err(solve_error)?;
    Ok(Outcome::ok(certificate(&alg, &cert, eps, &[("states", states)]) + "\n"))
}

pub fn axioms(mdp: &Path, trials: usize, seed: u64, json: bool) -> Result<Outcome, CliError> {
    let setup = load_setup(mdp)?;
    let report = qfix::mdp::check_rba_axioms(&setup, trials, seed);
    let sampling = format!(
        "{} trials per axiom; value functions uniform on [0,1]^S, policies with i.i.d. uniform weights normalized per state, mixing weights uniform on [0,1]; ChaCha8 seed {seed}",
        report.trials
    );
    let output = if json {
        render_object(&[
            ("sampling", Value::from(sampling)),
            ("trials", Value::from(report.trials)),
            ("seed", Value::from(report.seed)),
            ("axioms", serde_json::to_value(&report.axioms).expect("reports serialize")),
            ("passed", Value::from(report.passed())),
        ])
    } else {
        let mut out = format!("# sampling: {sampling}\n");
        for a in &report.axioms {
            let kind = serde_json::to_value(a.kind).expect("kinds serialize");
            out += &format!(
                "{} {} max_violation={} tolerance={} {}\n",
                a.name,
                kind.as_str().unwrap_or_default(),
                number(a.max_violation),
                number(a.tolerance),
                if a.passed { "PASS" } else { "FAIL" }
            );
        }
        out.pop();
        out
    };
    Ok(Outcome::verdict(output + "\n", report.passed()))
}
