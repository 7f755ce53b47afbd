use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a video file: {0}")]
    NotVideoFile(PathBuf),
    #[error("not a flow file: {0}")]
    NotFlowFile(PathBuf),
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("inconsistent export: {0}")]
    InconsistentExport(String),
    #[error("missing labels: {0}")]
    MissingLabels(String),
    #[error("missing labels: degenerate test labels ({0})")]
    DegenerateTestLabels(String),
    #[error("invalid AUROC {value} for ({pair_id}, {model_id})")]
    InvalidAuroc { pair_id: String, model_id: String, value: String },
    #[error("duplicate id: {0}")]
    DuplicateId(String),
    #[error("unknown model id: {0}")]
    UnknownModel(String),
    #[error("no embeddable content for pair {0}")]
    NoEmbeddableContent(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("ReAct requires exported head")]
    ReactMissingHead,
    #[error("ASH requires exported head")]
    AshMissingHead,
    #[error("detector {detector} failed on pair {pair_id}: {source}")]
    Detector {
        pair_id: String,
        detector: String,
        #[source]
        source: Box<Error>,
    },
    #[error("unparseable recommendation: {0:?}")]
    UnparseableRecommendation(String),
    #[error("llm request failed: {0}")]
    Llm(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv error in {context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json { context: context.into(), source }
    }

    pub(crate) fn csv(context: impl Into<String>, source: csv::Error) -> Self {
        Error::Csv { context: context.into(), source }
    }
}
