use bayesrisk::bounds::BoundsError;
use bayesrisk::channels::ChannelError;
use bayesrisk::coding::CodingError;
use bayesrisk::hypothesis::HypothesisError;
use bayesrisk::numerics::NumericsError;
use bayesrisk::prob::ProbError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RESOURCE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid probability vector: {0}")]
    Prob(#[from] ProbError),
    #[error("invalid channel: {0}")]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("malformed channel spec: {0}")]
    Spec(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Coding(CodingError::BudgetExceeded { .. }) => exit::RESOURCE,
            CliError::Io(_) | CliError::Internal(_) => exit::FAILURE,
            CliError::Channel(ChannelError::NumericallyUnstable { .. })
            | CliError::Numerics(NumericsError::MaxDepthExceeded { .. }) => exit::FAILURE,
            _ => exit::USAGE,
        }
    }

    /// Short machine-readable name of the failure, printed alongside the message.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Prob(e) => match e {
                ProbError::Empty => "Empty",
                ProbError::NegativeWeight { .. } => "NegativeWeight",
                ProbError::SumOutOfTolerance { .. } => "SumOutOfTolerance",
                ProbError::LengthMismatch { .. } => "LengthMismatch",
                ProbError::InvalidLikelihood { .. } => "InvalidLikelihood",
                ProbError::ZeroEvidence => "ZeroEvidence",
            },
            CliError::Channel(ChannelError::NumericallyUnstable { .. }) => "NumericallyUnstable",
            CliError::Channel(_) => "InvalidChannel",
            CliError::Coding(CodingError::BudgetExceeded { .. }) => "BudgetExceeded",
            CliError::Coding(_) => "InvalidEnsemble",
            CliError::Hypothesis(_) => "InvalidProblem",
            CliError::Bounds(_) => "InvalidBound",
            CliError::Numerics(_) => "Numerics",
            CliError::Spec(_) => "MalformedSpec",
            CliError::Io(_) => "Io",
            CliError::Internal(_) => "Internal",
        }
    }
}
