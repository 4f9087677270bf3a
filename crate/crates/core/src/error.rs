use std::path::PathBuf;

/// Every failure the library reports.
///
/// Variants split into two families: bad input ([`Error::is_validation`])
/// and numerical trouble (everything else). The CLI maps them to exit
/// codes 1 and 2.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mode l = 1 is excluded (center-of-mass constraint)")]
    ExcludedMode,
    #[error("pole: {0}")]
    Pole(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("near-degenerate root: {0}")]
    DegenerateRoot(String),
    #[error("resonance set failed validation: {0}")]
    Invariant(String),
    #[error("degenerate design matrix: {0}")]
    DegenerateFit(String),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::ExcludedMode | Error::Format(_) | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
