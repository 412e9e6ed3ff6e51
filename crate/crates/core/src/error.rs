use alloc::string::String;

use crate::spectral::BandName;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("total launch power {requested_dbm:.3} dBm exceeds the safety cap of {cap_dbm:.3} dBm (set the override flag to proceed)")]
    PowerCap { requested_dbm: f64, cap_dbm: f64 },
    #[error("channel {channel} reached a non-positive power at z = {position_km:.3} km with step {step_km} km; reduce the step")]
    StepSize {
        channel: usize,
        position_km: f64,
        step_km: f64,
    },
    #[error("band {band} has {count} notch probe(s); interpolation needs at least 2")]
    Interpolation { band: BandName, count: usize },
    #[error("numeric NLI oracle accepts at most {max} channels, plan has {channels}; use the closed form or a smaller plan")]
    OracleTooLarge { channels: usize, max: usize },
    #[error("constellation line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("optimizer grid is empty")]
    EmptyGrid,
    #[error("optimizer grid has {count} points, the limit is {limit}")]
    GridTooLarge { count: usize, limit: usize },
    #[error("evaluation at tilt {tilt_db} dB failed: {source}")]
    Evaluation {
        tilt_db: f64,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::StepSize { .. } => true,
            Error::Evaluation { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
