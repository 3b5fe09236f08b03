//! Model parameters, initial-state descriptions and scenario validation.
//!
//! Units have ħ = 1 and the tunnelling rate sets the clock, so every time in
//! the crate is the dimensionless product `J·t`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::TimeGrid;
use crate::error::ScenarioError;

pub const N_WELLS: usize = 3;

/// On-site interaction `chi` and nearest-neighbour tunnelling `j_tunnel`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub chi: f64,
    pub j_tunnel: f64,
}

impl ModelParams {
    pub fn new(chi: f64, j_tunnel: f64) -> Result<Self, ScenarioError> {
        let params = Self { chi, j_tunnel };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !self.chi.is_finite() || self.chi < 0.0 {
            return Err(ScenarioError::NegativeChi(self.chi));
        }
        if !self.j_tunnel.is_finite() || self.j_tunnel <= 0.0 {
            return Err(ScenarioError::NonPositiveTunnelling(self.j_tunnel));
        }
        Ok(())
    }

    pub const fn n_wells(&self) -> usize {
        N_WELLS
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            chi: 0.0,
            j_tunnel: 1.0,
        }
    }
}

/// How the squeezing parameter maps to the amplitude-quadrature variance,
/// with `X = a + a†` (vacuum variance 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SqueezeConvention {
    /// `Var(X) = e^{-r}`, `Var(Y) = e^{r}`.
    #[default]
    ExpR,
    /// `Var(X) = e^{-2r}`, `Var(Y) = e^{2r}` (the usual `S(r)` operator).
    Exp2R,
}

impl SqueezeConvention {
    /// Natural log of the anti-squeezed quadrature variance.
    pub fn log_variance(self, r: f64) -> f64 {
        match self {
            Self::ExpR => r,
            Self::Exp2R => 2.0 * r,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ExpR => "exp_r",
            Self::Exp2R => "exp_2r",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exp_r" => Some(Self::ExpR),
            "exp_2r" => Some(Self::Exp2R),
            _ => None,
        }
    }
}

/// Initial quantum state of one well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Vacuum,
    Fock {
        n: u64,
    },
    Coherent {
        n: f64,
        phase: f64,
    },
    /// Amplitude-squeezed state: the quadrature along the mean-field phase is
    /// the squeezed one.
    Squeezed {
        n: f64,
        phase: f64,
        r: f64,
        convention: SqueezeConvention,
    },
}

impl StateSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Fock { .. } => "fock",
            Self::Coherent { .. } => "coherent",
            Self::Squeezed { .. } => "squeezed",
        }
    }

    /// `|⟨a⟩|²` for coherent/squeezed states, the occupation for Fock states.
    pub fn nominal_number(&self) -> f64 {
        match *self {
            Self::Vacuum => 0.0,
            Self::Fock { n } => n as f64,
            Self::Coherent { n, .. } | Self::Squeezed { n, .. } => n,
        }
    }

    pub fn phase(&self) -> f64 {
        match *self {
            Self::Coherent { phase, .. } | Self::Squeezed { phase, .. } => phase,
            _ => 0.0,
        }
    }

    /// `⟨a⟩`; zero for Fock and vacuum.
    pub fn mean_amplitude(&self) -> Complex64 {
        match *self {
            Self::Coherent { n, phase } | Self::Squeezed { n, phase, .. } => {
                Complex64::from_polar(n.sqrt(), phase)
            }
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Exact `⟨a†a⟩`.
    pub fn mean_number(&self) -> f64 {
        match *self {
            Self::Squeezed {
                n, r, convention, ..
            } => n + (convention.log_variance(r).cosh() - 1.0) / 2.0,
            _ => self.nominal_number(),
        }
    }

    pub fn validate(&self, well: usize) -> Result<(), ScenarioError> {
        let bad = |reason: &str| ScenarioError::InvalidState {
            well,
            reason: reason.to_string(),
        };
        match *self {
            Self::Vacuum | Self::Fock { .. } => Ok(()),
            Self::Coherent { n, phase } => {
                if !n.is_finite() || n < 0.0 {
                    return Err(bad("n must be finite and non-negative"));
                }
                if !phase.is_finite() {
                    return Err(bad("phase must be finite"));
                }
                Ok(())
            }
            Self::Squeezed { n, phase, r, .. } => {
                if !n.is_finite() || n < 0.0 {
                    return Err(bad("n must be finite and non-negative"));
                }
                if !phase.is_finite() {
                    return Err(bad("phase must be finite"));
                }
                if !r.is_finite() {
                    return Err(bad("r must be finite"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Representation {
    #[default]
    Wigner,
    PositiveP,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Wigner => "wigner",
            Self::PositiveP => "positive_p",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "wigner" => Some(Self::Wigner),
            "positive_p" => Some(Self::PositiveP),
            _ => None,
        }
    }
}

/// Positive-P integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PpScheme {
    #[default]
    SemiImplicit,
    EulerMaruyama,
}

impl PpScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SemiImplicit => "semi_implicit",
            Self::EulerMaruyama => "euler",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "semi_implicit" => Some(Self::SemiImplicit),
            "euler" => Some(Self::EulerMaruyama),
            _ => None,
        }
    }
}

/// A complete experiment: model, initial states, integration and sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ModelParams,
    pub wells: [StateSpec; N_WELLS],
    pub representation: Representation,
    pub t_final: f64,
    pub dt: f64,
    pub n_traj: u64,
    pub seed: u64,
    /// Scaled times at which raw per-trajectory numbers are kept for binning.
    pub measure_times: Vec<f64>,
    /// Well (1-based) whose distribution is written at each measure time.
    pub measure_well: usize,
    pub bin_width: f64,
    /// Moments are recorded every `record_every` steps (plus the final step).
    pub record_every: usize,
    pub scheme: PpScheme,
    /// Positive-P divergence guard, as a multiple of the nominal total number.
    pub guard_factor: f64,
}

impl Scenario {
    pub const DEFAULT_DT: f64 = 1e-3;
    pub const DEFAULT_GUARD_FACTOR: f64 = 1e4;

    /// Scenario with the documented defaults: `J = 1`, `dt = 1e-3`, Wigner,
    /// one trajectory, seed 0, no snapshots, unit bins.
    pub fn new(chi: f64, wells: [StateSpec; N_WELLS], t_final: f64) -> Self {
        Self {
            params: ModelParams { chi, j_tunnel: 1.0 },
            wells,
            representation: Representation::Wigner,
            t_final,
            dt: Self::DEFAULT_DT,
            n_traj: 1,
            seed: 0,
            measure_times: Vec::new(),
            measure_well: 2,
            bin_width: 1.0,
            record_every: 1,
            scheme: PpScheme::SemiImplicit,
            guard_factor: Self::DEFAULT_GUARD_FACTOR,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.params.validate()?;
        for (i, w) in self.wells.iter().enumerate() {
            w.validate(i + 1)?;
        }
        let grid = self.time_grid()?;
        if self.n_traj == 0 {
            return Err(ScenarioError::NoTrajectories);
        }
        for &t in &self.measure_times {
            grid.step_index(t)
                .ok_or(ScenarioError::InvalidMeasureTime(t))?;
        }
        if !(1..=N_WELLS).contains(&self.measure_well) {
            return Err(ScenarioError::Invalid(format!(
                "measure well must be 1, 2 or 3, got {}",
                self.measure_well
            )));
        }
        if !self.bin_width.is_finite() || self.bin_width <= 0.0 {
            return Err(ScenarioError::InvalidBinWidth(self.bin_width));
        }
        if !self.guard_factor.is_finite() || self.guard_factor <= 1.0 {
            return Err(ScenarioError::Invalid(format!(
                "guard factor must exceed 1, got {}",
                self.guard_factor
            )));
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<TimeGrid, ScenarioError> {
        TimeGrid::new(self.t_final, self.dt, self.record_every)
    }

    /// `Σ ⟨a_i†a_i⟩` of the initial state.
    pub fn initial_number(&self) -> f64 {
        self.wells.iter().map(StateSpec::mean_number).sum()
    }
}

/// Truncated Wigner configuration: one complex amplitude per well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerField {
    pub alpha: [Complex64; N_WELLS],
}

impl WignerField {
    pub fn new(alpha: [Complex64; N_WELLS]) -> Self {
        Self { alpha }
    }

    /// `Σ |α_i|²`, conserved exactly by the mean-field flow.
    pub fn total_number(&self) -> f64 {
        self.alpha.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Symmetrically ordered number estimators `|α_i|² − 1/2`.
    pub fn number_estimators(&self) -> [f64; N_WELLS] {
        self.alpha.map(|a| a.norm_sqr() - 0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.iter().all(|a| a.is_finite())
    }

    /// Applies `α_i → e^{iθ} α_i` to every well.
    pub fn rotated(&self, theta: f64) -> Self {
        let u = Complex64::from_polar(1.0, theta);
        Self::new(self.alpha.map(|a| a * u))
    }
}

/// Positive-P configuration: independent `α_i` and `α_i⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PPField {
    pub alpha: [Complex64; N_WELLS],
    pub alpha_plus: [Complex64; N_WELLS],
}

impl PPField {
    pub fn new(alpha: [Complex64; N_WELLS], alpha_plus: [Complex64; N_WELLS]) -> Self {
        Self { alpha, alpha_plus }
    }

    /// Field with `α⁺ = α*`, i.e. a product of coherent states.
    pub fn conjugate_pair(alpha: [Complex64; N_WELLS]) -> Self {
        Self::new(alpha, alpha.map(|a| a.conj()))
    }

    /// `Re Σ α_i⁺ α_i`.
    pub fn total_number(&self) -> f64 {
        self.number_estimators().iter().sum()
    }

    /// Normally ordered number estimators `Re(α_i⁺ α_i)`.
    pub fn number_estimators(&self) -> [f64; N_WELLS] {
        let mut out = [0.0; N_WELLS];
        for (o, (a, p)) in out.iter_mut().zip(self.alpha.iter().zip(&self.alpha_plus)) {
            *o = (a * p).re;
        }
        out
    }

    /// `Σ |α_i|² + Σ |α_i⁺|²`, the quantity watched by the divergence guard.
    pub fn phase_space_norm(&self) -> f64 {
        self.alpha
            .iter()
            .chain(self.alpha_plus.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.alpha
            .iter()
            .chain(self.alpha_plus.iter())
            .all(|a| a.is_finite())
    }
}

/// Mean-field energy `χ Σ|α_i|⁴ − J(α₁*α₂ + α₂*α₁ + α₂*α₃ + α₃*α₂)`.
pub fn classical_energy(field: &WignerField, params: &ModelParams) -> f64 {
    let [a1, a2, a3] = field.alpha;
    let interaction: f64 = field.alpha.iter().map(|a| a.norm_sqr().powi(2)).sum();
    let hopping = 2.0 * ((a1.conj() * a2).re + (a2.conj() * a3).re);
    params.chi * interaction - params.j_tunnel * hopping
}
