//! Deterministic JSON summary of one command run.

use std::collections::BTreeMap;
use std::path::PathBuf;

use phs_core::numerics::ComplexMatrix;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub command: String,
    pub verdicts: BTreeMap<String, bool>,
    pub scalars: BTreeMap<String, Value>,
    pub settings: BTreeMap<String, Value>,
    pub outputs: Vec<PathBuf>,
}

impl ResultRecord {
    pub fn new(command: &str) -> Self {
        ResultRecord {
            command: command.to_string(),
            verdicts: BTreeMap::new(),
            scalars: BTreeMap::new(),
            settings: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn verdict(&mut self, name: &str, ok: bool) {
        self.verdicts.insert(name.to_string(), ok);
    }

    pub fn scalar(&mut self, name: &str, value: impl Into<Value>) {
        self.scalars.insert(name.to_string(), value.into());
    }

    pub fn setting(&mut self, name: &str, value: impl Into<Value>) {
        self.settings.insert(name.to_string(), value.into());
    }

    pub fn to_value(&self) -> Value {
        let outputs: Vec<String> = self
            .outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        json!({
            "command": self.command,
            "verdicts": self.verdicts,
            "scalars": self.scalars,
            "settings": self.settings,
            "outputs": outputs,
        })
    }

    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("record values are serializable")
    }
}

/// Matrix as nested rows of `[re, im]` pairs; negative zeros print as `0.0`.
pub fn matrix_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| {
                row.iter()
                    .map(|z| json!([z.re + 0.0, z.im + 0.0]))
                    .collect()
            })
            .collect(),
    )
}
