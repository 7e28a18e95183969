//! JSON operation files (schema version 1).
//!
//! ```json
//! {
//!   "version": 1,
//!   "states": 3,
//!   "alphabet": 2,
//!   "transitions": [[0, 1, 2], [1, 2, 2]],
//!   "forbidden_state": 2,
//!   "initial_state": 0
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::avoidance::StatefulOperation;
use crate::error::{Error, Result};

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationSpecFile {
    pub version: u32,
    pub states: usize,
    pub alphabet: usize,
    pub transitions: Vec<Vec<usize>>,
    pub forbidden_state: usize,
    #[serde(default)]
    pub initial_state: usize,
}

impl OperationSpecFile {
    pub fn from_operation(op: &StatefulOperation) -> Self {
        OperationSpecFile {
            version: SPEC_VERSION,
            states: op.states(),
            alphabet: op.alphabet(),
            transitions: op.transitions().to_vec(),
            forbidden_state: op.forbidden(),
            initial_state: op.initial(),
        }
    }

    pub fn into_operation(self) -> Result<StatefulOperation> {
        if self.version != SPEC_VERSION {
            return Err(Error::Spec(format!(
                "unsupported version {}, expected {SPEC_VERSION}",
                self.version
            )));
        }
        if self.transitions.len() != self.alphabet {
            return Err(Error::Spec(format!(
                "alphabet is {} but {} transition rows were given",
                self.alphabet,
                self.transitions.len()
            )));
        }
        StatefulOperation::new(
            self.states,
            self.transitions,
            self.forbidden_state,
            self.initial_state,
        )
        .map_err(|e| Error::Spec(e.to_string()))
    }
}

pub fn parse_operation(json: &str) -> Result<StatefulOperation> {
    let file: OperationSpecFile =
        serde_json::from_str(json).map_err(|e| Error::Spec(e.to_string()))?;
    file.into_operation()
}

pub fn load_operation(path: &Path) -> Result<StatefulOperation> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
    parse_operation(&text)
}

/// Compact JSON with one transition row per line.
pub fn operation_to_json(op: &StatefulOperation) -> String {
    let file = OperationSpecFile::from_operation(op);
    let rows: Vec<String> = file
        .transitions
        .iter()
        .map(|r| format!("    {}", serde_json::to_string(r).expect("plain integers")))
        .collect();
    format!(
        "{{\n  \"version\": {},\n  \"states\": {},\n  \"alphabet\": {},\n  \"transitions\": [\n{}\n  ],\n  \"forbidden_state\": {},\n  \"initial_state\": {}\n}}\n",
        file.version,
        file.states,
        file.alphabet,
        rows.join(",\n"),
        file.forbidden_state,
        file.initial_state
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::binary_four_sum_instance;

    #[test]
    fn round_trips_instances() {
        let op = binary_four_sum_instance();
        assert_eq!(parse_operation(&operation_to_json(&op)).unwrap(), op);
    }

    #[test]
    fn initial_state_defaults_to_zero() {
        let op = parse_operation(
            r#"{"version":1,"states":2,"alphabet":1,"transitions":[[0,1]],"forbidden_state":1}"#,
        )
        .unwrap();
        assert_eq!(op.initial(), 0);
    }

    #[test]
    fn rejects_bad_files() {
        let cases = [
            // unknown field
            r#"{"version":1,"states":2,"alphabet":1,"transitions":[[0,1]],"forbidden_state":1,"extra":0}"#,
            // wrong version
            r#"{"version":2,"states":2,"alphabet":1,"transitions":[[0,1]],"forbidden_state":1}"#,
            // row count mismatch
            r#"{"version":1,"states":2,"alphabet":2,"transitions":[[0,1]],"forbidden_state":1}"#,
            // state out of range
            r#"{"version":1,"states":2,"alphabet":1,"transitions":[[0,5]],"forbidden_state":1}"#,
            // initial equals forbidden
            r#"{"version":1,"states":2,"alphabet":1,"transitions":[[0,1]],"forbidden_state":0}"#,
            // missing field
            r#"{"version":1,"states":2,"alphabet":1,"forbidden_state":1}"#,
            "not json",
        ];
        for case in cases {
            let err = parse_operation(case).unwrap_err();
            assert_eq!(err.code(), "SpecError", "{case}");
        }
    }
}
