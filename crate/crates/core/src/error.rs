use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("delimited file error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown record format `{0}`")]
    UnknownFormat(String),

    #[error("duplicate record id `{0}`")]
    DuplicateRecord(String),

    #[error("reference string is empty or whitespace-only")]
    EmptyReference,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("entity spans overlap: {first:?} and {second:?}")]
    OverlappingSpans { first: (usize, usize), second: (usize, usize) },

    #[error("entity span {start}..{end} lies outside the text ({len} characters)")]
    SpanOutOfBounds { start: usize, end: usize, len: usize },

    #[error("curated merge references unknown surface form `{0}`")]
    UnknownSurfaceForm(String),

    #[error("record `{0}` has no authors")]
    NoAuthors(String),

    #[error("all values are zero")]
    AllZero,

    #[error("input is constant")]
    ConstantInput,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("similarity matrices cover different paper sets")]
    MismatchedPapers,

    #[error("degenerate contingency table: {0}")]
    DegenerateTable(String),

    #[error("graph has {0} nodes; at least 3 are required")]
    TooFewNodes(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
