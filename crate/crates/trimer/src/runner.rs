//! Parallel ensemble execution.
//!
//! Trajectories are split into the same fixed chunks the serial runner uses
//! and merged in index order, so the result does not depend on the number of
//! worker threads.

use rayon::prelude::*;
use thiserror::Error;
use trimer_core::ensemble::chunk_ranges;
use trimer_core::{run_chunk, EnsembleError, EnsembleResult, RunPlan, Scenario};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "TRIMER_THREADS";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("invalid {THREADS_ENV} value `{0}`")]
    BadThreads(String),
}

/// Worker count from `TRIMER_THREADS`, or all available cores.
pub fn default_threads() -> Result<usize, RunError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(RunError::BadThreads(v)),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run_parallel(scenario: &Scenario, threads: usize) -> Result<EnsembleResult, RunError> {
    let plan = RunPlan::new(scenario).map_err(EnsembleError::from)?;
    let ranges = chunk_ranges(scenario.n_traj);
    let chunks = if threads <= 1 {
        ranges
            .into_iter()
            .map(|r| run_chunk(scenario, &plan, r))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?;
        pool.install(|| {
            ranges
                .into_par_iter()
                .map(|r| run_chunk(scenario, &plan, r))
                .collect()
        })
    };
    Ok(EnsembleResult::from_chunks(scenario, &plan, chunks)?)
}
