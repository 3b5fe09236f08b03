//! Integrators for the truncated Wigner flow and the positive-P Itô SDEs.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::ScenarioError;
use crate::model::{ModelParams, PPField, PpScheme, WignerField, N_WELLS};
use crate::rng::RngStream;

type Modes = [Complex64; N_WELLS];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Number of fixed-point passes for the semi-implicit midpoint.
const MIDPOINT_ITERATIONS: usize = 3;

/// Uniform step grid from 0 to `t_final`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
    pub sample_stride: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, dt: f64, sample_stride: usize) -> Result<Self, ScenarioError> {
        if !t_final.is_finite() || !dt.is_finite() || dt <= 0.0 || dt > t_final {
            return Err(ScenarioError::InvalidTimeGrid(format!(
                "need 0 < dt <= t_final, got dt={dt}, t_final={t_final}"
            )));
        }
        if sample_stride == 0 {
            return Err(ScenarioError::InvalidTimeGrid(
                "record stride must be at least 1".into(),
            ));
        }
        let n_steps = (t_final / dt).round();
        if (n_steps * dt - t_final).abs() > 1e-12 * t_final.max(1.0) {
            return Err(ScenarioError::InvalidTimeGrid(format!(
                "t_final={t_final} is not a whole number of steps of dt={dt}"
            )));
        }
        Ok(Self {
            dt,
            n_steps: n_steps as usize,
            sample_stride,
        })
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.time(self.n_steps)
    }

    /// Step whose time equals `t` (to 1e-9), if any.
    pub fn step_index(&self, t: f64) -> Option<usize> {
        if !t.is_finite() || t < 0.0 {
            return None;
        }
        let k = (t / self.dt).round();
        if k > self.n_steps as f64 || (k * self.dt - t).abs() > 1e-9 * t.max(1.0) {
            return None;
        }
        Some(k as usize)
    }

    /// Steps at which moments are recorded: every stride, always including
    /// the first and the last.
    pub fn record_steps(&self) -> Vec<usize> {
        let mut steps: Vec<usize> = (0..=self.n_steps).step_by(self.sample_stride).collect();
        if steps.last() != Some(&self.n_steps) {
            steps.push(self.n_steps);
        }
        steps
    }
}

/// Right-hand side of the truncated Wigner equations,
/// `dα_i/dt = −2iχ|α_i|²α_i + iJ Σ_{neighbours} α_j`.
pub fn wigner_rhs(alpha: &Modes, params: &ModelParams) -> Modes {
    let [a1, a2, a3] = *alpha;
    let kerr = |a: Complex64| a * Complex64::new(0.0, -2.0 * params.chi * a.norm_sqr());
    let ij = I * params.j_tunnel;
    [
        kerr(a1) + ij * a2,
        kerr(a2) + ij * (a1 + a3),
        kerr(a3) + ij * a2,
    ]
}

fn axpy(x: &Modes, h: f64, k: &Modes) -> Modes {
    let mut out = *x;
    for (o, d) in out.iter_mut().zip(k) {
        *o += d * h;
    }
    out
}

/// One classical RK4 step of the Wigner flow.
pub fn wigner_step(field: &WignerField, params: &ModelParams, dt: f64) -> WignerField {
    let a = &field.alpha;
    let k1 = wigner_rhs(a, params);
    let k2 = wigner_rhs(&axpy(a, 0.5 * dt, &k1), params);
    let k3 = wigner_rhs(&axpy(a, 0.5 * dt, &k2), params);
    let k4 = wigner_rhs(&axpy(a, dt, &k3), params);
    let mut out = *a;
    for i in 0..N_WELLS {
        out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
    }
    WignerField::new(out)
}

/// Deterministic part of the positive-P equations for `(α, α⁺)`.
pub fn pp_drift(field: &PPField, params: &ModelParams) -> (Modes, Modes) {
    let [a1, a2, a3] = field.alpha;
    let [p1, p2, p3] = field.alpha_plus;
    let ij = I * params.j_tunnel;
    let kerr = Complex64::new(0.0, 2.0 * params.chi);
    let da = [
        -kerr * p1 * a1 * a1 + ij * a2,
        -kerr * p2 * a2 * a2 + ij * (a1 + a3),
        -kerr * p3 * a3 * a3 + ij * a2,
    ];
    let dp = [
        kerr * p1 * p1 * a1 - ij * p2,
        kerr * p2 * p2 * a2 - ij * (p1 + p3),
        kerr * p3 * p3 * a3 - ij * p2,
    ];
    (da, dp)
}

/// Principal square root of `z²`, given `z`.
fn principal_root_of_square(z: Complex64) -> Complex64 {
    if z.re > 0.0 || (z.re == 0.0 && z.im >= 0.0) {
        z
    } else {
        -z
    }
}

/// Noise coefficients `√(−2iχα_j²)` and `√(2iχα_j⁺²)`, principal roots.
///
/// `−2iχα² = (√χ(1 − i)α)²`, so the root is `±√χ(1 − i)α` with the sign
/// chosen for the right half-plane.
pub fn pp_noise_coefficients(field: &PPField, params: &ModelParams) -> (Modes, Modes) {
    let s = params.chi.sqrt();
    let minus = Complex64::new(s, -s);
    let plus = Complex64::new(s, s);
    (
        field.alpha.map(|a| principal_root_of_square(minus * a)),
        field.alpha_plus.map(|p| principal_root_of_square(plus * p)),
    )
}

/// Advances the positive-P variables by one step.
///
/// Six real Wiener increments are drawn per step in the order
/// `η₁(α₁), η₂(α₁⁺), η₃(α₂), …`. The noise coefficients are evaluated at the
/// start of the step, which keeps the scheme consistent with the Itô
/// equations. The semi-implicit variant evaluates the drift at an iterated
/// midpoint that already carries half of the noise increment:
///
/// ```text
/// m ← x + ½(A(m)·dt + B(x)·ΔW)     (three passes, m₀ = x)
/// x' = 2m − x
/// ```
pub fn pp_step(
    field: &PPField,
    params: &ModelParams,
    dt: f64,
    scheme: PpScheme,
    rng: &mut RngStream,
) -> PPField {
    let sqrt_dt = dt.sqrt();
    let (ba, bp) = pp_noise_coefficients(field, params);
    let mut noise_a = [Complex64::new(0.0, 0.0); N_WELLS];
    let mut noise_p = noise_a;
    for i in 0..N_WELLS {
        noise_a[i] = ba[i] * (sqrt_dt * rng.normal());
        noise_p[i] = bp[i] * (sqrt_dt * rng.normal());
    }

    match scheme {
        PpScheme::EulerMaruyama => {
            let (da, dp) = pp_drift(field, params);
            let mut out = *field;
            for i in 0..N_WELLS {
                out.alpha[i] += da[i] * dt + noise_a[i];
                out.alpha_plus[i] += dp[i] * dt + noise_p[i];
            }
            out
        }
        PpScheme::SemiImplicit => {
            let mut mid = *field;
            for _ in 0..MIDPOINT_ITERATIONS {
                let (da, dp) = pp_drift(&mid, params);
                for i in 0..N_WELLS {
                    mid.alpha[i] = field.alpha[i] + (da[i] * dt + noise_a[i]) * 0.5;
                    mid.alpha_plus[i] = field.alpha_plus[i] + (dp[i] * dt + noise_p[i]) * 0.5;
                }
            }
            let mut out = mid;
            for i in 0..N_WELLS {
                out.alpha[i] = mid.alpha[i] * 2.0 - field.alpha[i];
                out.alpha_plus[i] = mid.alpha_plus[i] * 2.0 - field.alpha_plus[i];
            }
            out
        }
    }
}
