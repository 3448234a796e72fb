use thiserror::Error;

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input; the message names the offending field.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    /// A computation failed on valid input.
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::Compute(_) => 1,
        }
    }

    pub fn field(name: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{name}: {msg}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<fou_core::ModelError> for CliError {
    fn from(e: fou_core::ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<vol_model::VolError> for CliError {
    fn from(e: vol_model::VolError) -> Self {
        match e {
            vol_model::VolError::Quadrature { .. } => CliError::Compute(e.to_string()),
            _ => CliError::field("vol", e),
        }
    }
}

impl From<fou_sampler::SamplerError> for CliError {
    fn from(e: fou_sampler::SamplerError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<asymptotic_pricer::PricerError> for CliError {
    fn from(e: asymptotic_pricer::PricerError) -> Self {
        match e {
            asymptotic_pricer::PricerError::Invalid(m) => CliError::Validation(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<tt_field::FieldError> for CliError {
    fn from(e: tt_field::FieldError) -> Self {
        match e {
            tt_field::FieldError::NotPositiveDefinite { .. } => CliError::Compute(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<mc_oracle::McError> for CliError {
    fn from(e: mc_oracle::McError) -> Self {
        match e {
            mc_oracle::McError::Invalid(m) => CliError::field("mc", m),
            mc_oracle::McError::Model(m) => m.into(),
            mc_oracle::McError::Pricer(p) => p.into(),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}
