use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read scenario file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario file: {0}")]
    Parse(String),

    #[error("unsupported scenario schema {found} (expected {expected})")]
    Schema { found: i64, expected: i64 },

    /// A configuration value violates one of its invariants.
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("distance {0} m is below the 1 m reference distance")]
    BelowReferenceDistance(f64),

    #[error("probability {0} is outside (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("at least one virtual time slot must be simulated")]
    NoSlots,

    #[error("sample set is empty")]
    EmptySamples,

    #[error("blockage fraction {fraction} at cell (theta={theta_deg} deg, column {column}) is not realizable with arrival rate {lambda_per_s}/s")]
    UnrealizableBlockage {
        fraction: f64,
        theta_deg: f64,
        column: usize,
        lambda_per_s: f64,
    },

    #[error("decision region needs at least one beamwidth and one blockage value")]
    EmptyAxis,

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
