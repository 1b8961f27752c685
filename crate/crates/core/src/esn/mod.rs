//! Echo state network baseline: fixed sparse random reservoir, leaky tanh
//! units and a ridge readout selected on the validation split.

mod readout;
mod reservoir;
mod sweep;

use thiserror::Error;

use crate::metrics::MetricError;

pub use readout::{fit_readout, MaskedDesign, ReadoutSolution, RidgeProblem};
pub use reservoir::{
    build_reservoir, default_density, run_states, run_states_from, spectral_radius, Csr, EsnConfig,
    RawReservoir, Reservoir, DEGENERATE_RADIUS, MAX_ATTEMPTS, POWER_BLOCK, POWER_MAX_ITERS,
    POWER_PATIENCE, POWER_TOL,
};
pub use sweep::{
    esn_sweep, esn_sweep_missing, evaluate_point, point_key, EsnGrid, GridPoint, PointResult,
    SweepSpec,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EsnError {
    #[error("invalid ESN configuration: {0}")]
    InvalidConfig(String),
    #[error("reservoir degenerate (spectral radius below 1e-12) in all {attempts} draws")]
    Degenerate { attempts: u64 },
    #[error("non-finite reservoir state at step {step}")]
    NonFinite { step: usize },
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("singular readout system at {0}")]
    Singular(String),
    #[error("every ridge value failed")]
    AllRidgesFailed,
    #[error("training split has no masked timestep")]
    NoMaskedSteps,
    #[error(transparent)]
    Metric(#[from] MetricError),
}
