use thiserror::Error;

/// Workspace-wide error type. Every variant maps to a stable machine-readable
/// category (see [`Error::category`]) so the CLI can report failures uniformly.
#[derive(Debug, Error)]
pub enum Error {
    /// An element was handed to a model it does not belong to (wrong coordinate
    /// rank or finite part out of range).
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// A precondition on the mathematical domain was violated (element not in
    /// the subgroup, radius out of range, edge not in the universe, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter failed validation; the string names the offending key path.
    #[error("invalid parameter `{key}`: {reason}")]
    Parameter { key: String, reason: String },

    /// A structural contract that should hold by construction was observed to
    /// fail (order axiom, preimage count, downward closure, dual-path rank
    /// disagreement). These indicate a bug, not bad input.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An enumeration exceeded a configured size cap.
    #[error("size limit exceeded: {what} reached {reached}, cap {cap}")]
    SizeLimit {
        what: String,
        reached: usize,
        cap: usize,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable category string for machine-readable CLI error reports.
    pub fn category(&self) -> &'static str {
        match self {
            Error::ModelMismatch(_) => "model-mismatch",
            Error::Domain(_) => "domain",
            Error::Parameter { .. } => "parameter",
            Error::Contract(_) => "contract",
            Error::SizeLimit { .. } => "size-limit",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }

    /// CLI process exit code for this category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter { .. } | Error::Parse(_) => 2,
            Error::ModelMismatch(_) | Error::Domain(_) => 3,
            Error::SizeLimit { .. } => 4,
            Error::Io(_) => 5,
            Error::Contract(_) => 6,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
