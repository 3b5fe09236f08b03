//! The `simulate` and `compare` subcommands as library calls.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;
use trimer_core::{
    bhattacharyya_coefficient, bin_distribution, bootstrap_coefficient_error, moment_series,
    EnsembleError, NumberDistribution, Representation, Scenario,
};

use crate::config::{parse_scenario, ConfigError};
use crate::csv_io::{
    read_distribution, write_comparisons, write_distribution, write_moments, Comparison, CsvError,
    MomentTable,
};
use crate::runner::{run_parallel, RunError};

/// Bootstrap resamples used for the error on B.
pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const BOOTSTRAP_SEED: u64 = 0;

pub const MOMENTS_FILE: &str = "moments.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";

#[derive(Debug, Error)]
pub enum CommandError {
    /// Bad arguments, unreadable or invalid input files.
    #[error("{0}")]
    Usage(String),
    /// Numerical failure or an output that could not be written.
    #[error("{0}")]
    Runtime(String),
}

impl CommandError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Usage(_) => 2,
            CommandError::Runtime(_) => 1,
        }
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Usage(e.to_string())
    }
}

impl From<RunError> for CommandError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Ensemble(EnsembleError::Scenario(s)) => CommandError::Usage(s.to_string()),
            RunError::BadThreads(_) => CommandError::Usage(e.to_string()),
            other => CommandError::Runtime(other.to_string()),
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CommandError {
    CommandError::Runtime(e.to_string())
}

/// Command-line values that replace the ones in a scenario file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n_traj: Option<u64>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub representation: Option<Representation>,
}

impl Overrides {
    pub fn apply(&self, scenario: &mut Scenario) {
        if let Some(n) = self.n_traj {
            scenario.n_traj = n;
        }
        if let Some(s) = self.seed {
            scenario.seed = s;
        }
        if let Some(dt) = self.dt {
            scenario.dt = dt;
        }
        if let Some(r) = self.representation {
            scenario.representation = r;
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CommandError> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CommandError::Usage(format!("{}: file not found", path.display()))
        } else {
            CommandError::Usage(format!("{}: {e}", path.display()))
        }
    })?;
    parse_scenario(&text).map_err(|e| CommandError::Usage(format!("{}: {e}", path.display())))
}

pub fn distribution_file_name(t: f64) -> String {
    format!("distribution_t{t}.csv")
}

/// Reduced output of one scenario run. Raw per-trajectory samples are binned
/// and dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub scenario: Scenario,
    pub moments: MomentTable,
    pub distributions: Vec<NumberDistribution>,
    pub completed: u64,
    pub discarded: u64,
    pub wall_time: Duration,
}

impl SimulationOutput {
    pub fn discard_fraction(&self) -> f64 {
        self.discarded as f64 / (self.completed + self.discarded) as f64
    }

    pub fn is_reliable(&self) -> bool {
        self.discard_fraction() <= trimer_core::EnsembleResult::MAX_DISCARD_FRACTION
    }

    /// File names written by [`SimulationOutput::write`], relative to the output directory.
    pub fn file_names(scenario: &Scenario) -> Vec<String> {
        let mut names = vec![MOMENTS_FILE.to_string()];
        names.extend(
            scenario
                .measure_times
                .iter()
                .map(|&t| distribution_file_name(t)),
        );
        names
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CommandError> {
        fs::create_dir_all(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
        let names = Self::file_names(&self.scenario);
        let paths: Vec<PathBuf> = names.iter().map(|n| dir.join(n)).collect();
        write_moments(&paths[0], &self.moments).map_err(runtime)?;
        for (d, p) in self.distributions.iter().zip(&paths[1..]) {
            write_distribution(p, d).map_err(runtime)?;
        }
        Ok(paths)
    }

    pub fn report(&self) -> String {
        format!(
            "representation {}, trajectories {} ({} completed, {} discarded), seed {}, wall time {:.2} s",
            self.scenario.representation.as_str(),
            self.completed + self.discarded,
            self.completed,
            self.discarded,
            self.scenario.seed,
            self.wall_time.as_secs_f64()
        )
    }
}

pub fn run_scenario(scenario: &Scenario, threads: usize) -> Result<SimulationOutput, CommandError> {
    let start = Instant::now();
    let result = run_parallel(scenario, threads)?;
    let series = moment_series(&result).map_err(runtime)?;
    let moments = MomentTable::from_series(
        &series,
        scenario.representation.as_str(),
        result.n_traj(),
        result.discarded,
        scenario.seed,
    );
    let mut distributions = Vec::with_capacity(result.snapshot_times.len());
    for (m, &t) in result.snapshot_times.iter().enumerate() {
        let d = bin_distribution(result.samples(m, scenario.measure_well), scenario.bin_width)
            .map_err(runtime)?;
        distributions.push(d.with_meta(scenario.measure_well, t));
    }
    Ok(SimulationOutput {
        scenario: scenario.clone(),
        moments,
        distributions,
        completed: result.completed,
        discarded: result.discarded,
        wall_time: start.elapsed(),
    })
}

pub fn simulate(
    config: &Path,
    out_dir: &Path,
    overrides: &Overrides,
    threads: usize,
) -> Result<SimulationOutput, CommandError> {
    let mut scenario = load_scenario(config)?;
    overrides.apply(&mut scenario);
    scenario
        .validate()
        .map_err(|e| CommandError::Usage(e.to_string()))?;
    let out = run_scenario(&scenario, threads)?;
    out.write(out_dir)?;
    Ok(out)
}

/// B with its bootstrap error and D for two distributions.
pub fn compare_distributions(
    label: &str,
    a: &NumberDistribution,
    b: &NumberDistribution,
) -> Result<Comparison, CommandError> {
    let usage = |e: trimer_core::StatsError| CommandError::Usage(e.to_string());
    let coefficient = bhattacharyya_coefficient(a, b).map_err(usage)?;
    let b_err =
        bootstrap_coefficient_error(a, b, BOOTSTRAP_RESAMPLES, BOOTSTRAP_SEED).map_err(usage)?;
    Ok(Comparison {
        pair_label: label.to_string(),
        b: coefficient,
        b_err,
        d: trimer_core::stats::distance_from_coefficient(coefficient),
    })
}

fn read_input(path: &Path) -> Result<NumberDistribution, CommandError> {
    read_distribution(path).map_err(|e| match e {
        CsvError::Io { ref source, .. } if source.kind() == std::io::ErrorKind::NotFound => {
            CommandError::Usage(format!("{}: file not found", path.display()))
        }
        other => CommandError::Usage(other.to_string()),
    })
}

pub fn compare(a: &Path, b: &Path, out_dir: Option<&Path>) -> Result<Comparison, CommandError> {
    let (da, db) = (read_input(a)?, read_input(b)?);
    let label = format!("{} vs {}", a.display(), b.display());
    let row = compare_distributions(&label, &da, &db)?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
        write_comparisons(&dir.join(COMPARISON_FILE), std::slice::from_ref(&row))
            .map_err(runtime)?;
    }
    Ok(row)
}
