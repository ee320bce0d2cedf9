//! JSONL dataset rows and ingestion.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::PipelineError;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelOutputs {
    /// Direct yes/no judgement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m1: Option<String>,
    /// Regular expression or grammar text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<String>,
    /// NILE expression text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m3: Option<String>,
}

/// Human judgements of the model outputs. The unprefixed fields refer to the
/// NILE output (m3), the `m2` fields to the classical representation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_correct: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub syntactic_match: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2_semantic_correct: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2_syntactic_match: Option<bool>,
    /// For grammar outputs, which cannot be checked mechanically: does the
    /// grammar generate the reference language?
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2_matches_reference: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetRow {
    pub id: String,
    pub task_id: String,
    pub format: String,
    pub alphabet: Vec<String>,
    pub reference_nile: String,
    pub description: String,
    /// 1 correct, 2 ambiguous incl. the solution, 3 one wrong language,
    /// 4 several wrong languages, 5 invalid (never scored).
    pub category: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_outputs: Option<ModelOutputs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<Annotations>,
}

impl DatasetRow {
    /// Tasks R* are regular (classical representation: RE); C* are
    /// context-free (classical representation: CFG).
    pub fn is_regular(&self) -> bool {
        self.task_id.starts_with('R')
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowDiagnostic {
    /// 1-based line number in the input.
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Ingested {
    pub rows: Vec<DatasetRow>,
    pub diagnostics: Vec<RowDiagnostic>,
}

fn check_row(row: &DatasetRow) -> Result<(), String> {
    if !(1..=5).contains(&row.category) {
        return Err(format!("category {} is outside 1..=5", row.category));
    }
    if row.alphabet.is_empty() {
        return Err("empty alphabet".into());
    }
    if row.alphabet.iter().any(|s| s.chars().count() != 1) {
        return Err("alphabet symbols must be single characters".into());
    }
    if row.reference_nile.trim().is_empty() {
        return Err("empty referenceNile".into());
    }
    Ok(())
}

/// Parses JSONL text. Blank lines are skipped; bad rows become diagnostics.
pub fn ingest_str(text: &str) -> Ingested {
    let mut out = Ingested::default();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<DatasetRow>(line).map_err(|e| e.to_string()).and_then(|row| {
            check_row(&row)?;
            Ok(row)
        });
        match parsed {
            Ok(row) => out.rows.push(row),
            Err(message) => out.diagnostics.push(RowDiagnostic { line: k + 1, message }),
        }
    }
    out
}

pub fn ingest(path: &Path) -> Result<Ingested, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
    Ok(ingest_str(&text))
}
