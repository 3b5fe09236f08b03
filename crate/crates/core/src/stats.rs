//! Binned number distributions, moment series and Bhattacharyya statistics.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Binomial, Distribution};

use crate::ensemble::EnsembleResult;
use crate::error::StatsError;
use crate::model::N_WELLS;
use crate::rng::RngStream;

/// Bins beyond this index are rejected rather than allocated.
const MAX_BINS: usize = 1 << 26;

/// Probability distribution of an atom number on a uniform grid.
///
/// Bin `k` is centred on `k·bin_width` and covers
/// `[k·w − w/2, k·w + w/2)`. Samples below `−w/2` are clamped into bin 0 and
/// counted in `clamped`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDistribution {
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
    pub sample_count: u64,
    pub clamped: u64,
    /// 1-based well index, 0 if unknown.
    pub well: usize,
    pub time: f64,
}

impl NumberDistribution {
    pub fn from_counts(bin_width: f64, counts: Vec<u64>, clamped: u64) -> Result<Self, StatsError> {
        if !bin_width.is_finite() || bin_width <= 0.0 {
            return Err(StatsError::InvalidDistribution(format!(
                "bin width must be positive, got {bin_width}"
            )));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(StatsError::EmptySamples);
        }
        let probabilities = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(Self {
            bin_width,
            counts,
            probabilities,
            sample_count: total,
            clamped,
            well: 0,
            time: 0.0,
        })
    }

    /// Rebuilds a distribution from stored probabilities; counts are
    /// recovered as `round(p·sample_count)`.
    pub fn from_probabilities(
        bin_width: f64,
        probabilities: Vec<f64>,
        sample_count: u64,
    ) -> Result<Self, StatsError> {
        if !bin_width.is_finite() || bin_width <= 0.0 {
            return Err(StatsError::InvalidDistribution(format!(
                "bin width must be positive, got {bin_width}"
            )));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(StatsError::InvalidDistribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(StatsError::InvalidDistribution(format!(
                "probabilities sum to {sum}"
            )));
        }
        let counts = probabilities
            .iter()
            .map(|p| (p * sample_count as f64).round() as u64)
            .collect();
        Ok(Self {
            bin_width,
            counts,
            probabilities,
            sample_count,
            clamped: 0,
            well: 0,
            time: 0.0,
        })
    }

    pub fn with_meta(mut self, well: usize, time: f64) -> Self {
        self.well = well;
        self.time = time;
        self
    }

    pub fn center(&self, k: usize) -> f64 {
        k as f64 * self.bin_width
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| self.center(k) * p)
            .sum()
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| (self.center(k) - m).powi(2) * p)
            .sum::<f64>()
            .sqrt()
    }

    /// Bin with the largest probability (lowest index on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = k;
            }
        }
        best
    }

    pub fn clamp_fraction(&self) -> f64 {
        self.clamped as f64 / self.sample_count as f64
    }

    /// Pools the samples of two distributions on the same grid.
    pub fn merge(&self, other: &Self) -> Result<Self, StatsError> {
        check_widths(self, other)?;
        let len = self.counts.len().max(other.counts.len());
        let mut counts = vec![0u64; len];
        for (k, c) in counts.iter_mut().enumerate() {
            *c = self.counts.get(k).copied().unwrap_or(0)
                + other.counts.get(k).copied().unwrap_or(0);
        }
        Ok(
            Self::from_counts(self.bin_width, counts, self.clamped + other.clamped)?
                .with_meta(self.well, self.time),
        )
    }
}

/// Histograms per-trajectory number estimators onto the integer grid.
pub fn bin_distribution(samples: &[f64], bin_width: f64) -> Result<NumberDistribution, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySamples);
    }
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(StatsError::InvalidDistribution(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    let mut counts: Vec<u64> = Vec::new();
    let mut clamped = 0;
    for &x in samples {
        if !x.is_finite() {
            return Err(StatsError::InvalidDistribution(format!(
                "non-finite sample {x}"
            )));
        }
        let k = (x / bin_width + 0.5).floor();
        let k = if k < 0.0 {
            clamped += 1;
            0
        } else if k >= MAX_BINS as f64 {
            return Err(StatsError::InvalidDistribution(format!(
                "sample {x} exceeds the bin range"
            )));
        } else {
            k as usize
        };
        if k >= counts.len() {
            counts.resize(k + 1, 0);
        }
        counts[k] += 1;
    }
    NumberDistribution::from_counts(bin_width, counts, clamped)
}

fn check_widths(p: &NumberDistribution, q: &NumberDistribution) -> Result<(), StatsError> {
    if (p.bin_width - q.bin_width).abs() > 1e-12 * p.bin_width.max(q.bin_width) {
        return Err(StatsError::BinWidthMismatch(p.bin_width, q.bin_width));
    }
    Ok(())
}

fn overlap(p: &[f64], q: &[f64]) -> f64 {
    let cross: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    let norm = (p.iter().sum::<f64>() * q.iter().sum::<f64>()).sqrt();
    if norm == 0.0 {
        0.0
    } else {
        (cross / norm).min(1.0)
    }
}

/// `B = Σ_n √(P₁(n) P₂(n))` on the union of both grids.
///
/// Rounding in stored probabilities is normalised away so identical inputs
/// give exactly 1.
pub fn bhattacharyya_coefficient(
    p1: &NumberDistribution,
    p2: &NumberDistribution,
) -> Result<f64, StatsError> {
    check_widths(p1, p2)?;
    Ok(overlap(&p1.probabilities, &p2.probabilities))
}

/// `D = −ln B`; infinite for disjoint supports.
pub fn bhattacharyya_distance(
    p1: &NumberDistribution,
    p2: &NumberDistribution,
) -> Result<f64, StatsError> {
    let b = bhattacharyya_coefficient(p1, p2)?;
    Ok(distance_from_coefficient(b))
}

pub fn distance_from_coefficient(b: f64) -> f64 {
    if b <= 0.0 {
        f64::INFINITY
    } else {
        0.0 - b.ln()
    }
}

fn multinomial(counts: &[u64], total: u64, rng: &mut RngStream, out: &mut Vec<f64>) {
    out.clear();
    let mut remaining_n = total;
    let mut remaining_c = total;
    for &c in counts {
        let draw = if remaining_n == 0 || c == 0 {
            0
        } else if c >= remaining_c {
            remaining_n
        } else {
            let p = c as f64 / remaining_c as f64;
            Binomial::new(remaining_n, p)
                .expect("p in [0, 1]")
                .sample(rng)
        };
        out.push(draw as f64);
        remaining_n -= draw;
        remaining_c -= c;
    }
}

/// Standard deviation of B under a nonparametric bootstrap over trajectories.
///
/// Resampling trajectories with replacement is equivalent to a multinomial
/// draw of the bin counts, which is what is done here.
pub fn bootstrap_coefficient_error(
    p1: &NumberDistribution,
    p2: &NumberDistribution,
    resamples: usize,
    seed: u64,
) -> Result<f64, StatsError> {
    check_widths(p1, p2)?;
    if resamples < 2 {
        return Ok(0.0);
    }
    let (n1, n2) = (p1.counts.iter().sum(), p2.counts.iter().sum());
    let mut a = Vec::with_capacity(p1.counts.len());
    let mut b = Vec::with_capacity(p2.counts.len());
    let mut values = Vec::with_capacity(resamples);
    for i in 0..resamples {
        let mut rng = RngStream::new(seed, i as u64);
        multinomial(&p1.counts, n1, &mut rng, &mut a);
        multinomial(&p2.counts, n2, &mut rng, &mut b);
        values.push(overlap(&a, &b));
    }
    let mean = values.iter().sum::<f64>() / resamples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    Ok(var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
}

/// Per-well number moments on the recorded time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeries {
    pub times: Vec<f64>,
    pub wells: [Vec<Moment>; N_WELLS],
    pub sample_count: u64,
}

impl MomentSeries {
    /// Moment of `well` (1-based) at record index `k`.
    pub fn at(&self, well: usize, k: usize) -> Moment {
        self.wells[well - 1][k]
    }
}

/// Means, variances and standard errors of the number estimators.
///
/// The ordering correction was applied once, when the estimators were
/// accumulated; the variance is that of the estimator itself.
pub fn moment_series(result: &EnsembleResult) -> Result<MomentSeries, StatsError> {
    if result.completed < 2 {
        return Err(StatsError::InsufficientTrajectories(result.completed));
    }
    let mut wells: [Vec<Moment>; N_WELLS] = Default::default();
    for per_time in &result.moments {
        for (w, m) in per_time.iter().enumerate() {
            wells[w].push(Moment {
                mean: m.mean,
                variance: m.variance(),
                stderr: m.stderr(),
            });
        }
    }
    Ok(MomentSeries {
        times: result.record_times.clone(),
        wells,
        sample_count: result.completed,
    })
}
