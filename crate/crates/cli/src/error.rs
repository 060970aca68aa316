use nhjc_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    /// 0 ok, 1 usage, 2 two-level degeneracy, 3 loop through an EP, 4 failed verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(CoreError::GmmExceptionalPoint { .. } | CoreError::ZeroGmmCoupling) => 2,
            CliError::Core(CoreError::LoopThroughEp { .. }) => 3,
            CliError::Core(_) => 1,
            CliError::Verify(_) => 4,
        }
    }
}
