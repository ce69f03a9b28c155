//! Label forests used for hypernym-aware label matching.

use std::collections::HashMap;

use serde_yaml::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("label `{0}` is declared more than once in the taxonomy")]
    Duplicate(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("malformed taxonomy: {0}")]
    Malformed(String),
}

/// A forest of labels. Each label appears once and knows its parent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Taxonomy {
    parents: HashMap<String, Option<String>>,
    order: Vec<String>,
}

impl Taxonomy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `label` under `parent` (or as a root).
    pub fn insert(&mut self, label: &str, parent: Option<&str>) -> Result<(), TaxonomyError> {
        if self.parents.contains_key(label) {
            return Err(TaxonomyError::Duplicate(label.to_string()));
        }
        if let Some(p) = parent {
            if !self.parents.contains_key(p) {
                return Err(TaxonomyError::UnknownLabel(p.to_string()));
            }
        }
        self.parents
            .insert(label.to_string(), parent.map(str::to_string));
        self.order.push(label.to_string());
        Ok(())
    }

    /// Reads the nested list form: every item is either a leaf label or a
    /// single-key map from a label to the list of its children.
    pub fn from_yaml(value: &Value) -> Result<Self, TaxonomyError> {
        let mut tax = Taxonomy::new();
        tax.read_children(value, None)?;
        Ok(tax)
    }

    pub fn from_yaml_str(src: &str) -> Result<Self, TaxonomyError> {
        let value: Value =
            serde_yaml::from_str(src).map_err(|e| TaxonomyError::Malformed(e.to_string()))?;
        Self::from_yaml(&value)
    }

    fn read_children(&mut self, value: &Value, parent: Option<&str>) -> Result<(), TaxonomyError> {
        let items = match value {
            Value::Sequence(items) => items,
            Value::Null => return Ok(()),
            other => {
                return Err(TaxonomyError::Malformed(format!(
                    "expected a list of labels, found {}",
                    describe(other)
                )))
            }
        };
        for item in items {
            match item {
                Value::String(label) => self.insert(label, parent)?,
                Value::Mapping(map) if map.len() == 1 => {
                    let (key, children) = map.iter().next().expect("one entry");
                    let label = key.as_str().ok_or_else(|| {
                        TaxonomyError::Malformed(format!(
                            "taxonomy labels must be strings, found {}",
                            describe(key)
                        ))
                    })?;
                    self.insert(label, parent)?;
                    self.read_children(children, Some(label))?;
                }
                other => {
                    return Err(TaxonomyError::Malformed(format!(
                        "expected a label or a single-key map, found {}",
                        describe(other)
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, label: &str) -> bool {
        self.parents.contains_key(label)
    }

    /// Declared labels in declaration order.
    pub fn labels(&self) -> &[String] {
        &self.order
    }

    /// `label` followed by each of its ancestors up to the root.
    pub fn hierarchy(&self, label: &str) -> Result<Vec<String>, TaxonomyError> {
        let mut out = vec![label.to_string()];
        let mut current = self
            .parents
            .get(label)
            .ok_or_else(|| TaxonomyError::UnknownLabel(label.to_string()))?;
        while let Some(parent) = current {
            out.push(parent.clone());
            current = &self.parents[parent];
        }
        Ok(out)
    }

    pub fn is_a(&self, label: &str, ancestor: &str) -> bool {
        let mut current = Some(label);
        while let Some(l) = current {
            if l == ancestor {
                return true;
            }
            current = self.parents.get(l).and_then(|p| p.as_deref());
        }
        false
    }
}

fn describe(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Sequence(_) => "a list",
        Value::Mapping(_) => "a map",
        Value::Tagged(_) => "a tagged value",
    }
}

/// Whether a mention carrying `labels` satisfies the label `query`.
///
/// Without a taxonomy this is plain membership. With one, the ancestors of
/// the primary label also count.
pub fn label_matches(labels: &[String], query: &str, taxonomy: Option<&Taxonomy>) -> bool {
    if labels.iter().any(|l| l == query) {
        return true;
    }
    match (taxonomy, labels.first()) {
        (Some(tax), Some(primary)) => tax.is_a(primary, query),
        _ => false,
    }
}
