use thiserror::Error;

/// Errors raised by the engine, instrumentation and lab.
///
/// Non-convergence of a trial and failure of a property check are results,
/// not errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("probability vector sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("gap undefined: reference support is zero")]
    ZeroSupport,

    #[error("variant {0} has no aggregate fast path")]
    UnsupportedVariant(String),

    #[error("enumeration of {outcomes} outcomes exceeds the cap of {cap}")]
    EnumerationTooLarge { outcomes: u128, cap: u128 },

    #[error("opinion {opinion} is not strong at phase start")]
    NotStrong { opinion: u32 },

    #[error("round moves carry no sample detail; coloring needs agent-mode steps")]
    MissingSampleDetail,

    #[error("accounting identity violated for opinion {opinion}: {detail}")]
    AccountingViolation { opinion: u32, detail: String },

    #[error("offspring mean {0} is not subcritical")]
    Supercritical(f64),

    #[error("degenerate regression design: {0}")]
    DegenerateDesign(String),

    #[error("invalid experiment: {0}")]
    InvalidSpec(String),

    #[error("precondition not met: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
