use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TermError;
use crate::pattern::Pattern;
use crate::scalar::Scalar;

/// `f : n : θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct FunctionSymbol<T: Scalar> {
    pub name: String,
    pub arity: usize,
    pub pattern: Pattern<T>,
}

impl<T: Scalar> FunctionSymbol<T> {
    pub fn new(name: impl Into<String>, pattern: Pattern<T>) -> Result<Self, TermError> {
        let name = name.into();
        if !is_symbol_name(&name) {
            return Err(TermError::InvalidSymbol {
                name,
                reason: "names are identifiers and must not look like variables".into(),
            });
        }
        Ok(FunctionSymbol {
            arity: pattern.arity(),
            name,
            pattern,
        })
    }

    /// A constant, carrying the empty-tuple pattern `{⟨⟩}`.
    pub fn constant(name: impl Into<String>) -> Result<Self, TermError> {
        Self::new(name, Pattern::zero(0))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn variable_index(s: &str) -> Option<usize> {
    let digits = s.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn is_symbol_name(s: &str) -> bool {
    is_identifier(s) && variable_index(s).is_none() && s != "mu"
}

/// A Banach signature: symbols indexed by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Signature<T: Scalar> {
    symbols: BTreeMap<String, FunctionSymbol<T>>,
}

impl<T: Scalar> Signature<T> {
    pub fn new() -> Self {
        Signature {
            symbols: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, symbol: FunctionSymbol<T>) -> Result<(), TermError> {
        if self.symbols.contains_key(&symbol.name) {
            return Err(TermError::DuplicateSymbol(symbol.name));
        }
        self.symbols.insert(symbol.name.clone(), symbol);
        Ok(())
    }

    /// Builder-style [`Signature::add`].
    pub fn with(mut self, name: &str, pattern: Pattern<T>) -> Result<Self, TermError> {
        self.add(FunctionSymbol::new(name, pattern)?)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&FunctionSymbol<T>> {
        self.symbols.get(name)
    }

    pub fn lookup(&self, name: &str) -> Result<&FunctionSymbol<T>, TermError> {
        self.get(name)
            .ok_or_else(|| TermError::UnknownSymbol(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &FunctionSymbol<T>> {
        self.symbols.values()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct SymbolDoc<T: Scalar> {
    name: String,
    arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<Pattern<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct SignatureDoc<T: Scalar> {
    symbols: Vec<SymbolDoc<T>>,
}

impl<T: Scalar> Signature<T> {
    fn from_doc(doc: SignatureDoc<T>) -> Result<Self, TermError> {
        let mut sig = Signature::new();
        for s in doc.symbols {
            let pattern = match s.pattern {
                Some(p) => p,
                None if s.arity == 0 => Pattern::zero(0),
                None => {
                    return Err(TermError::InvalidSymbol {
                        name: s.name,
                        reason: "missing pattern".into(),
                    })
                }
            };
            if pattern.arity() != s.arity {
                return Err(TermError::InvalidSymbol {
                    name: s.name,
                    reason: format!(
                        "declared arity {} but pattern arity {}",
                        s.arity,
                        pattern.arity()
                    ),
                });
            }
            sig.add(FunctionSymbol::new(s.name, pattern)?)?;
        }
        Ok(sig)
    }

    fn to_doc(&self) -> SignatureDoc<T> {
        SignatureDoc {
            symbols: self
                .iter()
                .map(|s| SymbolDoc {
                    name: s.name.clone(),
                    arity: s.arity,
                    pattern: Some(s.pattern.clone()),
                })
                .collect(),
        }
    }
}

impl<T: Scalar> Serialize for Signature<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Signature<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = SignatureDoc::deserialize(d)?;
        Signature::from_doc(doc).map_err(serde::de::Error::custom)
    }
}
