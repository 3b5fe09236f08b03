//! Ensemble runner.
//!
//! Trajectories are split into fixed chunks of [`CHUNK_SIZE`] consecutive
//! indices. Each chunk is reduced on its own and chunks are merged strictly in
//! index order, so the result is bit-identical whether the chunks run serially
//! here or on a thread pool elsewhere.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::dynamics::{pp_step, wigner_step, TimeGrid};
use crate::error::{EnsembleError, ScenarioError};
use crate::model::{Representation, Scenario, N_WELLS};
use crate::rng::RngStream;
use crate::sampling::{sample_initial_fields, InitialField};

pub const CHUNK_SIZE: u64 = 512;

/// Streaming mean and sum of squared deviations (Welford), mergeable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunningMoments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.count as f64, other.count as f64, n as f64);
        self.mean += delta * nb / nf;
        self.m2 += other.m2 + delta * delta * na * nb / nf;
        self.count = n;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Step bookkeeping shared by every trajectory of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub grid: TimeGrid,
    pub record_steps: Vec<usize>,
    pub snapshot_steps: Vec<usize>,
    /// Sorted union of record and snapshot steps.
    pub events: Vec<usize>,
    /// Divergence threshold on `Σ|α|² + Σ|α⁺|²` (positive-P only).
    pub guard_bound: f64,
}

impl RunPlan {
    pub fn new(scenario: &Scenario) -> Result<Self, ScenarioError> {
        scenario.validate()?;
        let grid = scenario.time_grid()?;
        let snapshot_steps = scenario
            .measure_times
            .iter()
            .map(|&t| {
                grid.step_index(t)
                    .ok_or(ScenarioError::InvalidMeasureTime(t))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let nominal: f64 = scenario.wells.iter().map(|w| w.nominal_number()).sum();
        let record_steps = grid.record_steps();
        let mut events: Vec<usize> = record_steps
            .iter()
            .chain(&snapshot_steps)
            .copied()
            .collect();
        events.sort_unstable();
        events.dedup();
        Ok(Self {
            record_steps,
            events,
            grid,
            snapshot_steps,
            guard_bound: scenario.guard_factor * nominal.max(1.0),
        })
    }

    pub fn record_times(&self) -> Vec<f64> {
        self.record_steps
            .iter()
            .map(|&k| self.grid.time(k))
            .collect()
    }
}

/// Partial reduction over one contiguous range of trajectory indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkResult {
    pub first_index: u64,
    /// Per recorded time, per well.
    pub moments: Vec<[RunningMoments; N_WELLS]>,
    /// Per recorded time, total-number estimator.
    pub totals: Vec<RunningMoments>,
    /// Per measure time, per well, number estimators in trajectory order.
    pub snapshots: Vec<[Vec<f64>; N_WELLS]>,
    pub completed: u64,
    pub discarded: u64,
}

impl ChunkResult {
    fn empty(plan: &RunPlan, first_index: u64) -> Self {
        Self {
            first_index,
            moments: vec![[RunningMoments::default(); N_WELLS]; plan.record_steps.len()],
            totals: vec![RunningMoments::default(); plan.record_steps.len()],
            snapshots: vec![Default::default(); plan.snapshot_steps.len()],
            completed: 0,
            discarded: 0,
        }
    }

    fn absorb(&mut self, other: ChunkResult) {
        for (a, b) in self.moments.iter_mut().zip(&other.moments) {
            for w in 0..N_WELLS {
                a[w].merge(&b[w]);
            }
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            a.merge(b);
        }
        for (a, b) in self.snapshots.iter_mut().zip(other.snapshots) {
            for (dst, src) in a.iter_mut().zip(b) {
                dst.extend(src);
            }
        }
        self.completed += other.completed;
        self.discarded += other.discarded;
    }
}

/// Splits `0..n_traj` into the fixed chunks every runner must use.
pub fn chunk_ranges(n_traj: u64) -> Vec<Range<u64>> {
    (0..n_traj)
        .step_by(CHUNK_SIZE as usize)
        .map(|start| start..(start + CHUNK_SIZE).min(n_traj))
        .collect()
}

struct Buffers {
    records: Vec<[f64; N_WELLS + 1]>,
    snapshots: Vec<[f64; N_WELLS]>,
}

/// Cursor over the event steps of one trajectory.
struct Observer<'a> {
    plan: &'a RunPlan,
    next_record: usize,
    next_event: usize,
}

impl Observer<'_> {
    fn due(&self, step: usize) -> bool {
        self.plan.events.get(self.next_event) == Some(&step)
    }

    fn observe(&mut self, step: usize, numbers: [f64; N_WELLS], buf: &mut Buffers) {
        self.next_event += 1;
        if self.plan.record_steps.get(self.next_record) == Some(&step) {
            let total = numbers.iter().sum();
            buf.records[self.next_record] = [numbers[0], numbers[1], numbers[2], total];
            self.next_record += 1;
        }
        for (slot, &s) in buf.snapshots.iter_mut().zip(&self.plan.snapshot_steps) {
            if s == step {
                *slot = numbers;
            }
        }
    }
}

/// Integrates one trajectory, filling `buf`. Returns `false` if it diverged.
fn run_trajectory(scenario: &Scenario, plan: &RunPlan, index: u64, buf: &mut Buffers) -> bool {
    let mut rng = RngStream::new(scenario.seed, index);
    let params = &scenario.params;
    let dt = plan.grid.dt;
    let mut obs = Observer {
        plan,
        next_record: 0,
        next_event: 0,
    };

    match sample_initial_fields(scenario, &mut rng) {
        InitialField::Wigner(mut field) => {
            obs.observe(0, field.number_estimators(), buf);
            for step in 1..=plan.grid.n_steps {
                field = wigner_step(&field, params, dt);
                if obs.due(step) {
                    if !field.is_finite() {
                        return false;
                    }
                    obs.observe(step, field.number_estimators(), buf);
                }
            }
            field.is_finite()
        }
        InitialField::PositiveP(mut field) => {
            obs.observe(0, field.number_estimators(), buf);
            for step in 1..=plan.grid.n_steps {
                field = pp_step(&field, params, dt, scenario.scheme, &mut rng);
                let norm = field.phase_space_norm();
                if !norm.is_finite() || norm > plan.guard_bound {
                    return false;
                }
                if obs.due(step) {
                    obs.observe(step, field.number_estimators(), buf);
                }
            }
            true
        }
    }
}

/// Runs trajectories `range` of `scenario` serially.
pub fn run_chunk(scenario: &Scenario, plan: &RunPlan, range: Range<u64>) -> ChunkResult {
    let mut out = ChunkResult::empty(plan, range.start);
    let mut buf = Buffers {
        records: vec![[0.0; N_WELLS + 1]; plan.record_steps.len()],
        snapshots: vec![[0.0; N_WELLS]; plan.snapshot_steps.len()],
    };
    for index in range {
        if !run_trajectory(scenario, plan, index, &mut buf) {
            out.discarded += 1;
            continue;
        }
        out.completed += 1;
        for (k, rec) in buf.records.iter().enumerate() {
            for (acc, &x) in out.moments[k].iter_mut().zip(rec) {
                acc.push(x);
            }
            out.totals[k].push(rec[N_WELLS]);
        }
        for (m, snap) in buf.snapshots.iter().enumerate() {
            for (dst, &x) in out.snapshots[m].iter_mut().zip(snap) {
                dst.push(x);
            }
        }
    }
    out
}

/// Reduced output of a full ensemble.
///
/// All number estimators already carry the ordering correction of the
/// representation: `|α_i|² − 1/2` for Wigner, `Re(α_i⁺α_i)` for positive-P.
/// The total-number series is the sum of the three estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub representation: Representation,
    pub record_times: Vec<f64>,
    pub moments: Vec<[RunningMoments; N_WELLS]>,
    pub totals: Vec<RunningMoments>,
    pub snapshot_times: Vec<f64>,
    pub snapshots: Vec<[Vec<f64>; N_WELLS]>,
    pub completed: u64,
    pub discarded: u64,
}

impl EnsembleResult {
    /// Largest discarded fraction for which results are considered reliable.
    pub const MAX_DISCARD_FRACTION: f64 = 1e-3;

    /// Merges chunk results in ascending `first_index` order.
    pub fn from_chunks(
        scenario: &Scenario,
        plan: &RunPlan,
        mut chunks: Vec<ChunkResult>,
    ) -> Result<Self, EnsembleError> {
        chunks.sort_by_key(|c| c.first_index);
        let mut iter = chunks.into_iter();
        let mut acc = iter.next().ok_or(EnsembleError::Empty)?;
        for c in iter {
            acc.absorb(c);
        }
        if acc.completed == 0 {
            return Err(EnsembleError::AllDiverged(acc.discarded));
        }
        Ok(Self {
            representation: scenario.representation,
            record_times: plan.record_times(),
            moments: acc.moments,
            totals: acc.totals,
            snapshot_times: scenario.measure_times.clone(),
            snapshots: acc.snapshots,
            completed: acc.completed,
            discarded: acc.discarded,
        })
    }

    pub fn n_traj(&self) -> u64 {
        self.completed + self.discarded
    }

    pub fn discard_fraction(&self) -> f64 {
        self.discarded as f64 / self.n_traj() as f64
    }

    pub fn is_reliable(&self) -> bool {
        self.discard_fraction() <= Self::MAX_DISCARD_FRACTION
    }

    /// Index into `record_times` of the time closest to `t`.
    pub fn record_index(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &s) in self.record_times.iter().enumerate() {
            if (s - t).abs() < (self.record_times[best] - t).abs() {
                best = i;
            }
        }
        best
    }

    /// Raw number samples of `well` (1-based) at measure time index `m`.
    pub fn samples(&self, m: usize, well: usize) -> &[f64] {
        &self.snapshots[m][well - 1]
    }
}

/// Runs every trajectory of `scenario` on the current thread.
pub fn run_ensemble(scenario: &Scenario) -> Result<EnsembleResult, EnsembleError> {
    let plan = RunPlan::new(scenario)?;
    let chunks = chunk_ranges(scenario.n_traj)
        .into_iter()
        .map(|r| run_chunk(scenario, &plan, r))
        .collect();
    EnsembleResult::from_chunks(scenario, &plan, chunks)
}
