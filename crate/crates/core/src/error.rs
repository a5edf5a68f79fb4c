use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: shape mismatch in {dim}: {detail}")]
    ShapeMismatch {
        op: &'static str,
        dim: &'static str,
        detail: String,
    },

    #[error("{op}: non-finite value produced")]
    NonFinite { op: &'static str },

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("missing gradient for parameter `{0}`")]
    MissingGradient(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    // weight files
    #[error("weight file not found: {}", .0.display())]
    WeightFileMissing(PathBuf),

    #[error("bad magic: expected \"FSTW\", found {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported weight file version {0}")]
    UnsupportedVersion(u32),

    #[error("weight file truncated while reading {0}")]
    Truncated(String),

    #[error("weight file has {0} trailing bytes")]
    TrailingBytes(usize),

    #[error("unexpected tensor at position {index}: expected `{expected}`, found `{found}`")]
    UnexpectedTensor {
        index: usize,
        expected: String,
        found: String,
    },

    #[error("shape mismatch for `{name}`: expected {expected:?}, found {found:?}")]
    WeightShape {
        name: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    // PGM ingestion
    #[error("not a binary PGM (expected magic P5, found {0:?})")]
    PgmMagic(String),

    #[error("unsupported PGM maxval {0} (only 255 is accepted)")]
    PgmMaxval(u32),

    #[error("malformed PGM header: {0}")]
    PgmHeader(String),

    #[error("PGM payload truncated: expected {expected} bytes, found {found}")]
    PgmTruncated { expected: usize, found: usize },

    // datasets
    #[error("missing data directory: {}", .0.display())]
    MissingDirectory(PathBuf),

    #[error("no usable examples for category `{0}`")]
    EmptyCategory(String),

    #[error("class {label} has {count} examples; at least 2 are required to split")]
    ClassTooSmall { label: u8, count: usize },

    #[error("invalid partition: {0}")]
    Partition(String),

    // federated engine
    #[error("expected {expected} client shards, got {found}")]
    ShardCount { expected: usize, found: usize },

    #[error("client {0} has an empty shard")]
    EmptyShard(usize),

    #[error("stage two requires stage-one weights; run stage one first ({0})")]
    StageOrdering(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    // metrics
    #[error("{0} is undefined: zero denominator")]
    UndefinedMetric(&'static str),

    #[error("ROC curve undefined: labels contain a single class")]
    SingleClass,

    #[error("malformed ROC curve: {0}")]
    MalformedRoc(String),

    #[error("{0}")]
    Io(String, #[source] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, dim: &'static str, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            op,
            dim,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, err: std::io::Error) -> Self {
        Error::Io(context.into(), err)
    }
}
