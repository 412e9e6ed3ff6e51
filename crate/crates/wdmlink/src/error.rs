use std::fmt;
use std::path::PathBuf;

/// Pipeline step an error came from; printed as a tag in messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Scenario,
    Plan,
    Link,
    NotchProbe,
    Gmi,
    Optimize,
    Output,
    PlotData,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Scenario => "scenario",
            Stage::Plan => "plan",
            Stage::Link => "link",
            Stage::NotchProbe => "notch-probe",
            Stage::Gmi => "gmi",
            Stage::Optimize => "optimize",
            Stage::Output => "output",
            Stage::PlotData => "plotdata",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ErrorKind {
    #[error(transparent)]
    Model(#[from] wdmlink_core::Error),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {kind}")]
pub struct Error {
    pub stage: Stage,
    #[source]
    pub kind: ErrorKind,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn new(stage: Stage, kind: impl Into<ErrorKind>) -> Self {
        Error { stage, kind: kind.into() }
    }

    pub fn invalid(stage: Stage, message: impl Into<String>) -> Self {
        Error::new(stage, ErrorKind::Invalid(message.into()))
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::new(
            Stage::Scenario,
            ErrorKind::Parse {
                path: path.into(),
                message: message.into(),
            },
        )
    }

    pub fn io(stage: Stage, path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::new(stage, ErrorKind::Io { path: path.into(), source })
    }

    /// 1 for bad input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match &self.kind {
            ErrorKind::Model(e) => {
                if e.is_numeric() || matches!(e, wdmlink_core::Error::Domain(_)) {
                    2
                } else {
                    1
                }
            }
            ErrorKind::Parse { .. } | ErrorKind::Invalid(_) => 1,
            ErrorKind::Io { .. } | ErrorKind::Format(_) => 2,
        }
    }
}

/// Attaches a stage to core results.
pub(crate) trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T>;
}

impl<T> AtStage<T> for std::result::Result<T, wdmlink_core::Error> {
    fn at(self, stage: Stage) -> Result<T> {
        self.map_err(|e| Error::new(stage, e))
    }
}
