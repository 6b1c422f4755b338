//! Model documents and the JSON form of carrier elements.
//!
//! ```json
//! {"carrier": {"vectors": {"dim": 2}},
//!  "bind": {"f": "affine:{...}"},
//!  "patterns": {"f": {"arity": 1, "tuples": [[0.5]]}}}
//! ```
//!
//! Carriers are `{"vectors": {"dim": n}}`, `{"distributions": <ground>}` and
//! `{"point_sets": <ground>}` with `<ground> = {"points": [...], "distance":
//! [[...]]}`. `patterns` is optional and overrides the natural pattern of a
//! binding. Elements are arrays: coordinates, masses, or arrays of masses.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use qfix::metric::{
    Builtin, BuiltinModel, Carrier, DistributionModel, DistributionSpace, PointSetModel,
    PointSetSpace, VectorModel, VectorSpace,
};
use qfix::{BoundedVector, FiniteDistribution, FinitePointSet, GroundMetric, MetricModel, Pattern};

use crate::io::{floats, parse_json};
use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    carrier: CarrierDoc,
    bind: BTreeMap<String, String>,
    #[serde(default)]
    patterns: BTreeMap<String, Pattern<f64>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum CarrierDoc {
    Vectors { dim: usize },
    Distributions(GroundMetric<f64>),
    PointSets(GroundMetric<f64>),
}

pub enum LoadedModel {
    Vectors(VectorModel<f64>),
    Distributions(DistributionModel<f64>),
    PointSets(PointSetModel<f64>),
}

/// Runs `$body` with `$m` bound to the concrete model.
#[macro_export]
macro_rules! with_model {
    ($model:expr, $m:ident => $body:expr) => {
        match $model {
            $crate::model::LoadedModel::Vectors($m) => $body,
            $crate::model::LoadedModel::Distributions($m) => $body,
            $crate::model::LoadedModel::PointSets($m) => $body,
        }
    };
}

impl LoadedModel {
    pub fn from_value(v: &Value, file: &Path) -> Result<Self, CliError> {
        let doc: ModelDoc = parse_json(&v.to_string(), file)?;
        Self::from_doc(doc, file)
    }

    pub fn load(file: &Path) -> Result<Self, CliError> {
        let doc: ModelDoc = crate::io::load_json(file)?;
        Self::from_doc(doc, file)
    }

    fn from_doc(doc: ModelDoc, file: &Path) -> Result<Self, CliError> {
        if let Some(name) = doc.patterns.keys().find(|k| !doc.bind.contains_key(*k)) {
            return Err(CliError::document(file, &format!("patterns.{name}"), "symbol is not bound"));
        }
        Ok(match doc.carrier {
            CarrierDoc::Vectors { dim } => {
                if dim == 0 {
                    return Err(CliError::document(file, "carrier.vectors.dim", "must be positive"));
                }
                LoadedModel::Vectors(bind(BuiltinModel::new(VectorSpace { dim }), &doc.bind, &doc.patterns, file)?)
            }
            CarrierDoc::Distributions(ground) => LoadedModel::Distributions(bind(
                BuiltinModel::new(DistributionSpace { ground }),
                &doc.bind,
                &doc.patterns,
                file,
            )?),
            CarrierDoc::PointSets(ground) => LoadedModel::PointSets(bind(
                BuiltinModel::new(PointSetSpace::new(ground)),
                &doc.bind,
                &doc.patterns,
                file,
            )?),
        })
    }
}

fn bind<C: Carrier<f64>>(
    mut model: BuiltinModel<f64, C>,
    ids: &BTreeMap<String, String>,
    patterns: &BTreeMap<String, Pattern<f64>>,
    file: &Path,
) -> Result<BuiltinModel<f64, C>, CliError> {
    for (symbol, id) in ids {
        let at = format!("bind.{symbol}");
        let op = Builtin::parse(id).map_err(|e| CliError::document(file, &at, e))?;
        let result = match patterns.get(symbol) {
            Some(p) => model.bind_with_pattern(symbol, op, p.clone()),
            None => model.bind(symbol, op),
        };
        result.map_err(|e| CliError::document(file, &at, e))?;
    }
    Ok(model)
}

/// JSON reading and writing of model elements.
pub trait ElemJson: MetricModel<Scalar = f64> {
    fn elem_from_json(&self, v: &Value, file: &Path, at: &str) -> Result<Self::Elem, CliError>;
    fn elem_to_json(&self, e: &Self::Elem) -> Value;

    fn env_from_json(&self, v: Option<&Value>, file: &Path, at: &str) -> Result<Vec<Self::Elem>, CliError> {
        match v {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(k, item)| self.elem_from_json(item, file, &format!("{at}[{k}]")))
                .collect(),
            Some(_) => Err(CliError::document(file, at, "expected an array of elements")),
        }
    }
}

fn numbers(v: &Value, file: &Path, at: &str) -> Result<Vec<f64>, CliError> {
    let items = v
        .as_array()
        .ok_or_else(|| CliError::document(file, at, "expected an array of numbers"))?;
    items
        .iter()
        .enumerate()
        .map(|(k, x)| {
            x.as_f64()
                .ok_or_else(|| CliError::document(file, &format!("{at}[{k}]"), "expected a number"))
        })
        .collect()
}

fn check_len(found: usize, expected: usize, file: &Path, at: &str) -> Result<(), CliError> {
    if found != expected {
        return Err(CliError::document(file, at, format!("expected {expected} entries, found {found}")));
    }
    Ok(())
}

impl ElemJson for VectorModel<f64> {
    fn elem_from_json(&self, v: &Value, file: &Path, at: &str) -> Result<BoundedVector<f64>, CliError> {
        let xs = numbers(v, file, at)?;
        check_len(xs.len(), self.carrier().dim, file, at)?;
        BoundedVector::new(xs).map_err(|e| CliError::document(file, at, e))
    }

    fn elem_to_json(&self, e: &BoundedVector<f64>) -> Value {
        floats(e.coords())
    }
}

fn distribution(v: &Value, n: usize, file: &Path, at: &str) -> Result<FiniteDistribution<f64>, CliError> {
    let xs = numbers(v, file, at)?;
    check_len(xs.len(), n, file, at)?;
    FiniteDistribution::new(xs).map_err(|e| CliError::document(file, at, e))
}

impl ElemJson for DistributionModel<f64> {
    fn elem_from_json(&self, v: &Value, file: &Path, at: &str) -> Result<FiniteDistribution<f64>, CliError> {
        distribution(v, self.carrier().ground.len(), file, at)
    }

    fn elem_to_json(&self, e: &FiniteDistribution<f64>) -> Value {
        floats(e.masses())
    }
}

impl ElemJson for PointSetModel<f64> {
    fn elem_from_json(
        &self,
        v: &Value,
        file: &Path,
        at: &str,
    ) -> Result<FinitePointSet<FiniteDistribution<f64>>, CliError> {
        let items = v
            .as_array()
            .ok_or_else(|| CliError::document(file, at, "expected an array of distributions"))?;
        let n = self.carrier().ground.len();
        let elems = items
            .iter()
            .enumerate()
            .map(|(k, item)| distribution(item, n, file, &format!("{at}[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        FinitePointSet::new(elems).map_err(|e| CliError::document(file, at, e))
    }

    fn elem_to_json(&self, e: &FinitePointSet<FiniteDistribution<f64>>) -> Value {
        Value::Array(e.elements().iter().map(|d| floats(d.masses())).collect())
    }
}
