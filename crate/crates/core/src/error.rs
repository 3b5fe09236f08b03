use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("chi must be finite and non-negative, got {0}")]
    NegativeChi(f64),
    #[error("tunnelling strength must be finite and positive, got {0}")]
    NonPositiveTunnelling(f64),
    #[error("unknown state kind `{0}` (expected fock, coherent, squeezed or vacuum)")]
    UnknownStateKind(String),
    #[error("well {well}: {reason}")]
    InvalidState { well: usize, reason: String },
    #[error("expected exactly 3 wells, got {0}")]
    WrongWellCount(usize),
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
    #[error("n_traj must be at least 1")]
    NoTrajectories,
    #[error("measure time {0} is outside [0, t_final] or off the step grid")]
    InvalidMeasureTime(f64),
    #[error("bin width must be finite and positive, got {0}")]
    InvalidBinWidth(f64),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("all {0} trajectories diverged")]
    AllDiverged(u64),
    #[error("no chunks to reduce")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("cannot bin an empty sample set")]
    EmptySamples,
    #[error("bin widths differ: {0} vs {1}")]
    BinWidthMismatch(f64, f64),
    #[error("need at least 2 completed trajectories, got {0}")]
    InsufficientTrajectories(u64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}
