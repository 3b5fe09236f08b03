//! Phase-space simulation of the three-well inline Bose-Hubbard model.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the model
//! definition, initial-state samplers for the truncated Wigner and positive-P
//! representations, the two integrators, a deterministic (serial) ensemble
//! runner and the number-distribution statistics. File formats, the parallel
//! runner and the command line live in the `trimer` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod rng;
pub mod sampling;
pub mod stats;

pub use num_complex::Complex64;

pub use crate::dynamics::{pp_step, wigner_rhs, wigner_step, TimeGrid};
pub use crate::ensemble::{run_chunk, run_ensemble, ChunkResult, EnsembleResult, RunPlan};
pub use crate::error::{EnsembleError, ScenarioError, StatsError};
pub use crate::model::{
    classical_energy, ModelParams, PPField, PpScheme, Representation, Scenario, SqueezeConvention,
    StateSpec, WignerField, N_WELLS,
};
pub use crate::rng::RngStream;
pub use crate::sampling::{sample_initial_fields, sample_positive_p, sample_wigner, InitialField};
pub use crate::stats::{
    bhattacharyya_coefficient, bhattacharyya_distance, bin_distribution,
    bootstrap_coefficient_error, moment_series, Moment, MomentSeries, NumberDistribution,
};
