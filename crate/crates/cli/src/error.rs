use thiserror::Error;

/// Failure of a subcommand, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable files, malformed or invalid configuration.
    #[error("{0}")]
    Input(String),
    /// The inputs were valid but the computation could not produce a result.
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) => 3,
        }
    }

    /// Classifies a library error, prefixing `context`.
    pub fn core(context: &str, err: piqfc_core::Error) -> Self {
        use piqfc_core::Error as E;
        let msg = if context.is_empty() {
            err.to_string()
        } else {
            format!("{context}: {err}")
        };
        match err {
            E::AllZeroCounts
            | E::FitDiverged(_)
            | E::UnreachableTarget { .. }
            | E::ZeroSuccess(_)
            | E::NotPsd(_)
            | E::NotHermitian(_)
            | E::ZeroTrace(_)
            | E::NonFinite => CliError::Compute(msg),
            E::DimensionMismatch { .. }
            | E::InvalidState(_)
            | E::InvalidParameter { .. }
            | E::NegativePower(_)
            | E::InsufficientData(_)
            | E::NotInformationallyComplete(_)
            | E::EmptyRecords => CliError::Input(msg),
        }
    }
}
