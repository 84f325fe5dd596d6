//! Error classification into the stable process exit codes.

use std::fmt;
use std::path::Path;

use vpc_core::error::{AnalysisError, BundleError, CorpusError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Validation,
    Io,
    Degenerate,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        match self {
            ExitKind::Validation => 2,
            ExitKind::Io => 3,
            ExitKind::Degenerate => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn validation(msg: impl fmt::Display) -> Self {
        Self {
            kind: ExitKind::Validation,
            error: anyhow::anyhow!("{msg}"),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self {
            kind: ExitKind::Io,
            error: anyhow::anyhow!("{}: {err}", path.display()),
        }
    }

    pub fn context(mut self, ctx: impl fmt::Display + Send + Sync + 'static) -> Self {
        self.error = self.error.context(ctx);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        Self {
            kind: ExitKind::Validation,
            error: e.into(),
        }
    }
}

impl From<BundleError> for CliError {
    fn from(e: BundleError) -> Self {
        let kind = match &e {
            BundleError::Io { .. } | BundleError::AlreadyExists(_) => ExitKind::Io,
            _ => ExitKind::Validation,
        };
        Self {
            kind,
            error: e.into(),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        let kind = match &e {
            AnalysisError::NoSuchLayer { .. }
            | AnalysisError::InvalidParameter(_)
            | AnalysisError::Sample { .. } => ExitKind::Validation,
            AnalysisError::MissingCategory(_)
            | AnalysisError::DegenerateGrouping { .. }
            | AnalysisError::Geometry(_)
            | AnalysisError::Mds(_)
            | AnalysisError::Report(_) => ExitKind::Degenerate,
        };
        Self {
            kind,
            error: e.into(),
        }
    }
}
