//! Error type shared across the crate.
//!
//! Every fallible operation returns [`Error`]. Variants are grouped by the
//! process exit code they map to when surfaced through the CLI: configuration
//! and domain errors exit 2, convergence failures exit 3, I/O errors exit 4.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Convergence diagnostics attached to Picard iteration failures.
///
/// Carried inside the error so a failed run can still report what the
/// iteration did (the CLI prints it before exiting nonzero).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Number of completed Picard updates.
    pub iterations: usize,
    /// Sup-norm (over the time grid) of successive iterate differences,
    /// one entry per update.
    pub diffs: Vec<f64>,
    /// Largest ratio of consecutive differences, if at least two updates ran.
    /// A value below 1 certifies observed contraction.
    pub contraction_factor: Option<f64>,
}

impl ConvergenceReport {
    pub fn new(diffs: Vec<f64>) -> Self {
        let contraction_factor = diffs
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        ConvergenceReport {
            iterations: diffs.len(),
            diffs,
            contraction_factor,
        }
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iterations: {}", self.iterations)?;
        if let Some(c) = self.contraction_factor {
            write!(f, ", max contraction ratio: {c:.3e}")?;
        }
        write!(f, ", diffs: [")?;
        for (i, d) in self.diffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d:.3e}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Arguments outside an operation's domain (bad exponents, negative
    /// counts, mismatched lengths, non-finite values, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration file rejected (syntax, unknown field, missing field,
    /// or a value that fails validation).
    #[error("config error: {0}")]
    Config(String),

    /// Picard iteration observed non-decreasing differences.
    #[error("picard iteration is not contracting ({report})")]
    NonContraction { report: ConvergenceReport },

    /// Picard iteration still converging at the iteration cap.
    #[error("picard iteration hit the iteration limit before reaching tolerance ({report})")]
    IterationLimit { report: ConvergenceReport },

    /// Underlying file-system failure.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) => 2,
            Error::NonContraction { .. } | Error::IterationLimit { .. } => 3,
            Error::Io { .. } => 4,
        }
    }

    /// Convergence diagnostics, when this is an iteration failure.
    pub fn convergence_report(&self) -> Option<&ConvergenceReport> {
        match self {
            Error::NonContraction { report } | Error::IterationLimit { report } => Some(report),
            _ => None,
        }
    }
}
