use thiserror::Error;

/// Errors surfaced by the analytics library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed phone number {0:?}: expected optional '+' followed by 7-15 digits")]
    MalformedNumber(String),

    #[error("country prefix table is not prefix-free: {shorter:?} is a prefix of {longer:?}")]
    PrefixTableConflict { shorter: String, longer: String },

    #[error("invalid country prefix table line {line}: {reason}")]
    PrefixTableParse { line: usize, reason: String },

    #[error("group has neither an icon uid nor a title; cannot identify it")]
    CannotIdentifyGroup,

    #[error("unknown group uid {0:?}")]
    UnknownGroup(String),

    #[error("centrality undefined: node {0:?} is in a singleton component")]
    UndefinedCentrality(String),

    #[error("clustering coefficient undefined: node {0:?} has degree < 2")]
    UndefinedClustering(String),

    #[error("Goel virality undefined for a single-node cascade (root {0:?})")]
    UndefinedVirality(String),

    #[error("group {0:?} has no messages")]
    EmptyGroup(String),

    #[error("labeled corpus is empty")]
    EmptyLabeledCorpus,

    #[error("decision references unknown candidate {0:?}")]
    UnknownCandidate(String),

    #[error("dataset too small: need at least {need} rows, have {have}")]
    DatasetTooSmall { need: usize, have: usize },

    #[error("invalid fold count {0}: need k >= 2")]
    InvalidFoldCount(usize),

    #[error("k-nearest-neighbors requires 1 <= k <= train size (k={k}, train={train})")]
    InvalidK { k: usize, train: usize },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("{context}: sample is degenerate (need >= {need} observations with variance)")]
    DegenerateSample { context: &'static str, need: usize },

    #[error("design matrix is rank deficient: column {0:?} is collinear with earlier columns")]
    RankDeficient(String),

    #[error("empty period {0:?}")]
    EmptyPeriod(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {reason}")]
    Record { path: String, line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
