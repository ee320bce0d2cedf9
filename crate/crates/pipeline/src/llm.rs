//! Chat-completion client for the M1–M3 prompts.
//!
//! Speaks the common `/chat/completions` JSON shape: a `messages` array in,
//! `choices[0].message.content` out. Temperature is always 0.

use std::fs;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dataset::DatasetRow;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("endpoint failed after {attempts} attempt(s): {message}")]
    Endpoint { attempts: usize, message: String },
    #[error("prompt template missing: {0}")]
    TemplateMissing(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    /// Does the description fit the task? (yes/no)
    M1,
    /// Regular expression for the description.
    M2Re,
    /// Context-free grammar for the description.
    M2Cfg,
    /// NILE expression for the description.
    M3,
}

impl PromptKind {
    /// Resolves `m1` / `m2` / `m3`; `m2` depends on whether the task is regular.
    pub fn from_method(method: &str, regular: bool) -> Option<PromptKind> {
        match method.to_ascii_lowercase().as_str() {
            "m1" => Some(PromptKind::M1),
            "m2" if regular => Some(PromptKind::M2Re),
            "m2" => Some(PromptKind::M2Cfg),
            "m2a" => Some(PromptKind::M2Re),
            "m2b" => Some(PromptKind::M2Cfg),
            "m3" => Some(PromptKind::M3),
            _ => None,
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            PromptKind::M1 => "m1.md",
            PromptKind::M2Re => "m2a.md",
            PromptKind::M2Cfg => "m2b.md",
            PromptKind::M3 => "m3.md",
        }
    }

    fn bundled(self) -> &'static str {
        match self {
            PromptKind::M1 => include_str!("../prompts/m1.md"),
            PromptKind::M2Re => include_str!("../prompts/m2a.md"),
            PromptKind::M2Cfg => include_str!("../prompts/m2b.md"),
            PromptKind::M3 => include_str!("../prompts/m3.md"),
        }
    }
}

/// Where templates come from.
#[derive(Clone, Debug, Default)]
pub enum Templates {
    #[default]
    Bundled,
    Dir(PathBuf),
}

impl Templates {
    pub fn load(&self, kind: PromptKind) -> Result<String, LlmError> {
        match self {
            Templates::Bundled => Ok(kind.bundled().to_string()),
            Templates::Dir(dir) => {
                let path = dir.join(kind.file_name());
                fs::read_to_string(&path).map_err(|_| LlmError::TemplateMissing(path))
            }
        }
    }
}

/// Formats an alphabet the way the templates expect, e.g. `{a, b, c}`.
pub fn alphabet_text(symbols: &[String]) -> String {
    format!("{{{}}}", symbols.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromptInput {
    /// The description to translate or judge.
    pub description: String,
    pub alphabet: Vec<String>,
    /// The task's own description; used by M1.
    pub task_description: String,
}

/// Fills `%ALPH%`, `%TASK%` and `%DESCRIPTION%`.
pub fn fill_template(template: &str, input: &PromptInput) -> String {
    template
        .replace("%ALPH%", &alphabet_text(&input.alphabet))
        .replace("%TASK%", &input.task_description)
        .replace("%DESCRIPTION%", &input.description)
}

#[derive(Clone, Debug)]
pub struct EndpointConfig {
    /// Base URL up to and including the API version, e.g. `http://host/v1`.
    pub base_url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    /// Total attempts for transient failures (connection errors, 429, 5xx).
    pub max_attempts: usize,
    /// First retry delay; doubles on every further retry.
    pub backoff: Duration,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            base_url: base_url.into(),
            api_key: None,
            model: model.into(),
            timeout: Duration::from_secs(120),
            max_attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }

    /// Reads `NILE_LLM_BASE_URL`, `NILE_LLM_MODEL` and optionally `NILE_LLM_API_KEY`.
    pub fn from_env() -> Option<Self> {
        let base = std::env::var("NILE_LLM_BASE_URL").ok()?;
        let model = std::env::var("NILE_LLM_MODEL").ok()?;
        let mut cfg = EndpointConfig::new(base, model);
        cfg.api_key = std::env::var("NILE_LLM_API_KEY").ok();
        Some(cfg)
    }
}

enum Attempt {
    Done(String),
    Transient(String),
    Fatal(String),
}

fn attempt(client: &reqwest::blocking::Client, cfg: &EndpointConfig, body: &Value) -> Attempt {
    let url = format!("{}/chat/completions", cfg.base_url.trim_end_matches('/'));
    let mut req = client.post(url).json(body);
    if let Some(key) = &cfg.api_key {
        req = req.bearer_auth(key);
    }
    let resp = match req.send() {
        Ok(r) => r,
        Err(e) => return Attempt::Transient(e.to_string()),
    };
    let status = resp.status();
    if status.is_server_error() || status.as_u16() == 429 {
        return Attempt::Transient(format!("HTTP {status}"));
    }
    if !status.is_success() {
        return Attempt::Fatal(format!("HTTP {status}"));
    }
    let value: Value = match resp.json() {
        Ok(v) => v,
        Err(e) => return Attempt::Fatal(format!("invalid JSON: {e}")),
    };
    match value.pointer("/choices/0/message/content").and_then(Value::as_str) {
        Some(text) => Attempt::Done(text.to_string()),
        None => Attempt::Fatal("response has no choices[0].message.content".into()),
    }
}

/// Sends one prompt and returns the model's raw text.
pub fn llm_translate(
    input: &PromptInput,
    kind: PromptKind,
    cfg: &EndpointConfig,
    templates: &Templates,
) -> Result<String, LlmError> {
    let system = fill_template(&templates.load(kind)?, input);
    let body = json!({
        "model": cfg.model,
        "temperature": 0,
        "messages": [
            {"role": "system", "content": system},
            {"role": "user", "content": input.description},
        ],
    });
    let client = reqwest::blocking::Client::builder()
        .timeout(cfg.timeout)
        .build()
        .map_err(|e| LlmError::Endpoint { attempts: 0, message: e.to_string() })?;
    let attempts = cfg.max_attempts.max(1);
    let mut last = String::new();
    for k in 0..attempts {
        if k > 0 {
            thread::sleep(cfg.backoff * 2u32.saturating_pow(k as u32 - 1));
        }
        match attempt(&client, cfg, &body) {
            Attempt::Done(text) => return Ok(text),
            Attempt::Fatal(message) => return Err(LlmError::Endpoint { attempts: k + 1, message }),
            Attempt::Transient(message) => {
                log::warn!("chat completion attempt {} failed: {message}", k + 1);
                last = message;
            }
        }
    }
    Err(LlmError::Endpoint { attempts, message: last })
}

/// Translates many inputs with at most `parallelism` requests in flight.
/// Results keep the input order.
pub fn translate_batch(
    inputs: &[PromptInput],
    kind: PromptKind,
    cfg: &EndpointConfig,
    templates: &Templates,
    parallelism: usize,
) -> Vec<Result<String, LlmError>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(parallelism.max(1)).build();
    let run = || inputs.par_iter().map(|i| llm_translate(i, kind, cfg, templates)).collect();
    match pool {
        Ok(pool) => pool.install(run),
        Err(_) => inputs.iter().map(|i| llm_translate(i, kind, cfg, templates)).collect(),
    }
}

impl PromptInput {
    /// The prompt input for a dataset row. M1 compares against the task's
    /// corpus description when there is one, else against its reference.
    pub fn for_row(row: &DatasetRow) -> Self {
        let task_description = nile::corpus::corpus_entry(&row.task_id)
            .map(|e| e.english_description.clone())
            .unwrap_or_else(|| row.reference_nile.clone());
        PromptInput { description: row.description.clone(), alphabet: row.alphabet.clone(), task_description }
    }
}

/// Fills `modelOutputs.<method>` for every row. Rows whose request failed
/// keep their previous output; their ids are returned with the error.
pub fn translate_rows(
    rows: &mut [DatasetRow],
    method: &str,
    cfg: &EndpointConfig,
    templates: &Templates,
    parallelism: usize,
) -> Vec<(String, LlmError)> {
    let mut failures = Vec::new();
    for regular in [true, false] {
        let Some(kind) = PromptKind::from_method(method, regular) else { continue };
        let picked: Vec<usize> = (0..rows.len()).filter(|&k| rows[k].is_regular() == regular).collect();
        let inputs: Vec<PromptInput> = picked.iter().map(|&k| PromptInput::for_row(&rows[k])).collect();
        for (k, result) in picked.into_iter().zip(translate_batch(&inputs, kind, cfg, templates, parallelism)) {
            let row = &mut rows[k];
            match result {
                Ok(text) => {
                    let outputs = row.model_outputs.get_or_insert_with(Default::default);
                    let slot = match kind {
                        PromptKind::M1 => &mut outputs.m1,
                        PromptKind::M2Re | PromptKind::M2Cfg => &mut outputs.m2,
                        PromptKind::M3 => &mut outputs.m3,
                    };
                    *slot = Some(text.trim().to_string());
                }
                Err(e) => failures.push((row.id.clone(), e)),
            }
        }
    }
    failures
}

/// Path of the template directory shipped with this crate.
pub fn bundled_template_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/prompts"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholders() {
        let input = PromptInput {
            description: "every a is followed by b".into(),
            alphabet: vec!["a".into(), "b".into(), "c".into()],
            task_description: "t".into(),
        };
        let filled = fill_template(&Templates::Bundled.load(PromptKind::M3).unwrap(), &input);
        assert!(filled.contains("{a, b, c}"));
        assert!(!filled.contains('%'), "unfilled placeholder");
        for kind in [PromptKind::M1, PromptKind::M2Re, PromptKind::M2Cfg] {
            let t = fill_template(&Templates::Bundled.load(kind).unwrap(), &input);
            assert!(t.contains("{a, b, c}") && !t.contains("%ALPH%"));
        }
    }

    #[test]
    fn method_names() {
        assert_eq!(PromptKind::from_method("m2", true), Some(PromptKind::M2Re));
        assert_eq!(PromptKind::from_method("M2", false), Some(PromptKind::M2Cfg));
        assert_eq!(PromptKind::from_method("m4", true), None);
    }

    #[test]
    fn template_dir() {
        let t = Templates::Dir(bundled_template_dir().to_path_buf());
        assert_eq!(t.load(PromptKind::M1).unwrap(), Templates::Bundled.load(PromptKind::M1).unwrap());
        let missing = Templates::Dir(PathBuf::from("/nonexistent"));
        assert!(matches!(missing.load(PromptKind::M3), Err(LlmError::TemplateMissing(_))));
    }
}
