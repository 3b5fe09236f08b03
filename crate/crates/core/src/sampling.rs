//! Initial-condition samplers for the Wigner and positive-P representations.
//!
//! Quadratures are `X = a + a†` and `Y = −i(a − a†)`, so a Wigner amplitude
//! `α = (X + iY)/2` and the vacuum has `Var(X) = Var(Y) = 1`.
//!
//! Positive-P samples use the canonical construction: a centre `μ` drawn from
//! the Husimi Q function of the state and an offset `δ` with
//! `⟨|δ|²⟩ = 1`, giving `α = μ + δ` and `α⁺ = (μ − δ)*`. Coherent and vacuum
//! states are sampled as their exact delta functions.

use core::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::model::{PPField, Representation, Scenario, StateSpec, WignerField, N_WELLS};
use crate::rng::RngStream;

/// One initial configuration in whichever representation the scenario uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialField {
    Wigner(WignerField),
    PositiveP(PPField),
}

/// Amplitude and phase quadrature standard deviations `(σ_x, σ_y)` of `Re α`
/// and `Im α` in the frame of the mean field.
fn squeezed_sigmas(log_var: f64) -> (f64, f64) {
    (0.5 * (-0.5 * log_var).exp(), 0.5 * (0.5 * log_var).exp())
}

/// Draws one Wigner amplitude for `spec`.
///
/// Fock states use the fixed-modulus ring `√(n + 1/2)·e^{iθ}`.
pub fn sample_wigner(spec: &StateSpec, rng: &mut RngStream) -> Complex64 {
    match *spec {
        StateSpec::Vacuum => rng.complex_normal(0.5),
        StateSpec::Coherent { .. } => spec.mean_amplitude() + rng.complex_normal(0.5),
        StateSpec::Fock { n } => {
            let theta = TAU * rng.uniform();
            Complex64::from_polar((n as f64 + 0.5).sqrt(), theta)
        }
        StateSpec::Squeezed {
            n,
            phase,
            r,
            convention,
        } => {
            let (sx, sy) = squeezed_sigmas(convention.log_variance(r));
            let dx = sx * rng.normal();
            let dy = sy * rng.normal();
            Complex64::from_polar(1.0, phase) * Complex64::new(n.sqrt() + dx, dy)
        }
    }
}

/// Draws one `(α, α⁺)` pair for `spec`.
pub fn sample_positive_p(spec: &StateSpec, rng: &mut RngStream) -> (Complex64, Complex64) {
    let centre = match *spec {
        StateSpec::Vacuum => return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        StateSpec::Coherent { .. } => {
            let a = spec.mean_amplitude();
            return (a, a.conj());
        }
        StateSpec::Fock { n } => {
            // Q(μ) ∝ |μ|^{2n} e^{-|μ|²}: |μ|² is Gamma(n + 1, 1) with uniform phase.
            let gamma = Gamma::new(n as f64 + 1.0, 1.0).expect("shape is positive");
            let modulus_sq: f64 = gamma.sample(rng);
            let theta = TAU * rng.random::<f64>();
            Complex64::from_polar(modulus_sq.sqrt(), theta)
        }
        StateSpec::Squeezed {
            n,
            phase,
            r,
            convention,
        } => {
            // Q function quadrature variances are the Wigner ones plus 1.
            let log_var = convention.log_variance(r);
            let sx = 0.5 * ((-log_var).exp() + 1.0).sqrt();
            let sy = 0.5 * (log_var.exp() + 1.0).sqrt();
            let dx = sx * rng.normal();
            let dy = sy * rng.normal();
            Complex64::from_polar(1.0, phase) * Complex64::new(n.sqrt() + dx, dy)
        }
    };
    let delta = rng.complex_normal(FRAC_1_SQRT_2);
    (centre + delta, (centre - delta).conj())
}

/// Draws every well independently with the scenario's representation.
pub fn sample_initial_fields(scenario: &Scenario, rng: &mut RngStream) -> InitialField {
    match scenario.representation {
        Representation::Wigner => {
            let mut alpha = [Complex64::new(0.0, 0.0); N_WELLS];
            for (a, spec) in alpha.iter_mut().zip(&scenario.wells) {
                *a = sample_wigner(spec, rng);
            }
            InitialField::Wigner(WignerField::new(alpha))
        }
        Representation::PositiveP => {
            let mut alpha = [Complex64::new(0.0, 0.0); N_WELLS];
            let mut alpha_plus = alpha;
            for i in 0..N_WELLS {
                let (a, p) = sample_positive_p(&scenario.wells[i], rng);
                alpha[i] = a;
                alpha_plus[i] = p;
            }
            InitialField::PositiveP(PPField::new(alpha, alpha_plus))
        }
    }
}
