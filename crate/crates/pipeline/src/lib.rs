//! Evaluation pipeline for plain-language descriptions of formal languages.
//!
//! A dataset row pairs a student description with the exercise's reference
//! expression and, optionally, model answers for three methods: a direct
//! yes/no judgement (M1), a regular expression or grammar (M2), and a NILE
//! expression (M3). [`score::score`] turns rows into the statistics table;
//! [`llm`] produces the model answers from a chat-completion endpoint.

use std::path::PathBuf;

use thiserror::Error;

pub mod dataset;
pub mod llm;
pub mod score;

pub use dataset::{ingest, ingest_str, DatasetRow, Ingested};
pub use llm::{llm_translate, EndpointConfig, LlmError, PromptKind, Templates};
pub use score::{score, StatsTable};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Llm(#[from] LlmError),
}
