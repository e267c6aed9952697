use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by every stage of the pipeline.
///
/// Manifest errors carry the 1-based line number of the offending record so
/// the CLI can print a one-line diagnostic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed JSON: {message}")]
    MalformedJson { line: usize, message: String },

    #[error("line {line}: duplicate line_id {line_id:?}")]
    DuplicateLineId { line: usize, line_id: String },

    #[error("line {line}: record {line_id:?} has no non-blank transcription")]
    EmptyTranscriptions { line: usize, line_id: String },

    #[error("line {line}: record {line_id:?} has unknown source tag {tag:?}")]
    UnknownSource {
        line: usize,
        line_id: String,
        tag: String,
    },

    #[error("line {line}: record {line_id:?} sets an annotator on non-human source {tag:?}")]
    AnnotatorOnAutomatic {
        line: usize,
        line_id: String,
        tag: String,
    },

    #[error("line {line}: record {line_id:?} has unknown split {split:?}")]
    UnknownSplit {
        line: usize,
        line_id: String,
        split: String,
    },

    #[error("line {line}: record {line_id:?} has agreement {value} outside [0, 100]")]
    AgreementOutOfRange {
        line: usize,
        line_id: String,
        value: f64,
    },

    #[error("reference is empty, rate is undefined")]
    EmptyReference,

    #[error("at least one input sequence is required")]
    NoInputs,

    #[error("record {line_id:?} has no human transcription")]
    NoHumanTranscription { line_id: String },

    #[error("record {line_id:?} has no agreement score")]
    MissingScore { line_id: String },

    #[error("record {line_id:?} has no split assignment")]
    MissingSplit { line_id: String },

    #[error("record {line_id:?} has no {source_tag} transcription")]
    MissingAggregate {
        line_id: String,
        source_tag: &'static str,
    },

    #[error("split sizes {train}+{validation}+{test} do not sum to corpus size {total}")]
    SizeMismatch {
        train: usize,
        validation: usize,
        test: usize,
        total: usize,
    },

    #[error("threshold {0} is outside [0, 100]")]
    ThresholdOutOfRange(f64),

    #[error("{field} of record {line_id:?} contains a tab or newline")]
    InvalidTsvField {
        line_id: String,
        field: &'static str,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the content of a manifest rather than by
    /// the environment or by the caller's arguments.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io { .. } | Error::SizeMismatch { .. } | Error::ThresholdOutOfRange(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
