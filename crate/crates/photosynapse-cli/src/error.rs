//! CLI error type with stable machine-readable codes.

use photosynapse::analysis::AnalysisError;
use photosynapse::fitting::FitError;
use photosynapse::io::FormatError;
use photosynapse::kinetics::KineticsError;
use photosynapse::protocols::ProtocolError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// Stable code for the error JSON emitted on failure.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config_error",
            CliError::Usage(_) => "usage_error",
            CliError::Kinetics(KineticsError::UnknownDevice(_)) => "unknown_device",
            CliError::Kinetics(_) => "kinetics_error",
            CliError::Protocol(ProtocolError::ThresholdUnreachable { .. }) => {
                "threshold_unreachable"
            }
            CliError::Protocol(ProtocolError::UnsatisfiableGate { .. }) => "unsatisfiable_gate",
            CliError::Protocol(_) => "protocol_error",
            CliError::Fit(FitError::DegenerateTrace) => "degenerate_fit",
            CliError::Fit(FitError::TooFewSamples { .. }) => "too_few_samples",
            CliError::Fit(_) => "fit_error",
            CliError::Analysis(AnalysisError::NoAbsorptionEdge { .. }) => "no_absorption_edge",
            CliError::Analysis(_) => "analysis_error",
            CliError::Format(_) => "format_error",
            CliError::Io { .. } => "io_error",
        }
    }
}

pub fn io_err(path: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
