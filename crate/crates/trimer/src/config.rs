//! Scenario files.
//!
//! Scenarios are TOML documents with four tables:
//!
//! ```toml
//! [model]
//! chi = 1e-3          # required, >= 0
//! j = 1.0             # default 1
//!
//! [[wells]]           # exactly three, left to right
//! kind = "fock"       # fock | coherent | squeezed | vacuum
//! n = 100             # fock: integer occupation; coherent/squeezed: |<a>|^2
//! # phase = 0.0       # coherent/squeezed, radians
//! # r = 0.5           # squeezed only
//! # convention = "exp_r"   # squeezed only: exp_r (Var X = e^-r) or exp_2r
//!
//! [run]
//! representation = "wigner"   # wigner | positive_p
//! t_final = 1.11              # default: last measure time, else 1.11
//! dt = 1e-3
//! n_traj = 1000
//! seed = 0                    # integer, or a decimal string for seeds > 2^63
//! record_every = 1            # moment stride in steps
//! scheme = "semi_implicit"    # positive-P only: semi_implicit | euler
//! guard_factor = 1e4          # positive-P divergence guard
//!
//! [measure]
//! times = [1.11]
//! bin_width = 1.0
//! well = 2
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;
use trimer_core::{
    ModelParams, PpScheme, Representation, Scenario, ScenarioError, SqueezeConvention, StateSpec,
    N_WELLS,
};

/// Used when neither `run.t_final` nor any measure time is given.
pub const DEFAULT_T_FINAL: f64 = 1.11;
pub const DEFAULT_N_TRAJ: u64 = 1000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed scenario file: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("cannot serialize scenario: {0}")]
    Serialize(#[from] toml::ser::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
}

impl Number {
    fn value(self) -> f64 {
        match self {
            Number::Int(i) => i as f64,
            Number::Float(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Seed {
    Int(i64),
    Text(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    model: RawModel,
    #[serde(default)]
    wells: Vec<RawWell>,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    measure: RawMeasure,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    chi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWell {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    convention: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    representation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_traj: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<Seed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    record_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    guard_factor: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    #[serde(default)]
    times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bin_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    well: Option<usize>,
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

fn state_from_raw(raw: &RawWell, well: usize) -> Result<StateSpec, ScenarioError> {
    let state_err = |reason: &str| ScenarioError::InvalidState {
        well,
        reason: reason.to_string(),
    };
    let n = raw.n.map(Number::value);
    let phase = raw.phase.unwrap_or(0.0);
    let reject = |field: &str, present: bool| {
        if present {
            Err(state_err(&format!(
                "`{field}` does not apply to {}",
                raw.kind
            )))
        } else {
            Ok(())
        }
    };
    let spec = match raw.kind.as_str() {
        "vacuum" => {
            if n.is_some_and(|n| n != 0.0) {
                return Err(state_err("vacuum must have n = 0"));
            }
            reject("phase", raw.phase.is_some())?;
            reject("r", raw.r.is_some())?;
            reject("convention", raw.convention.is_some())?;
            StateSpec::Vacuum
        }
        "fock" => {
            let n = n.ok_or_else(|| state_err("fock state needs `n`"))?;
            if !n.is_finite() || n < 0.0 || n.fract() != 0.0 || n > 9.007_199_254_740_992e15 {
                return Err(state_err(&format!(
                    "fock occupation must be a non-negative integer, got {n}"
                )));
            }
            reject("phase", raw.phase.is_some())?;
            reject("r", raw.r.is_some())?;
            reject("convention", raw.convention.is_some())?;
            StateSpec::Fock { n: n as u64 }
        }
        "coherent" => {
            let n = n.ok_or_else(|| state_err("coherent state needs `n`"))?;
            reject("r", raw.r.is_some())?;
            reject("convention", raw.convention.is_some())?;
            StateSpec::Coherent { n, phase }
        }
        "squeezed" => {
            let n = n.ok_or_else(|| state_err("squeezed state needs `n`"))?;
            let r = raw.r.ok_or_else(|| state_err("squeezed state needs `r`"))?;
            let convention = match raw.convention.as_deref() {
                None => SqueezeConvention::default(),
                Some(c) => SqueezeConvention::parse(c).ok_or_else(|| {
                    state_err(&format!("unknown convention `{c}` (exp_r or exp_2r)"))
                })?,
            };
            StateSpec::Squeezed {
                n,
                phase,
                r,
                convention,
            }
        }
        other => return Err(ScenarioError::UnknownStateKind(other.to_string())),
    };
    spec.validate(well)?;
    Ok(spec)
}

fn state_to_raw(spec: &StateSpec) -> RawWell {
    let mut raw = RawWell {
        kind: spec.kind().to_string(),
        n: None,
        phase: None,
        r: None,
        convention: None,
    };
    match *spec {
        StateSpec::Vacuum => {}
        StateSpec::Fock { n } => raw.n = Some(Number::Int(n as i64)),
        StateSpec::Coherent { n, phase } => {
            raw.n = Some(Number::Float(n));
            raw.phase = Some(phase);
        }
        StateSpec::Squeezed {
            n,
            phase,
            r,
            convention,
        } => {
            raw.n = Some(Number::Float(n));
            raw.phase = Some(phase);
            raw.r = Some(r);
            raw.convention = Some(convention.as_str().to_string());
        }
    }
    raw
}

/// Parses and validates a scenario file, filling documented defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let raw: RawScenario = toml::from_str(text)?;

    if raw.wells.len() != N_WELLS {
        return Err(ScenarioError::WrongWellCount(raw.wells.len()).into());
    }
    let mut wells = [StateSpec::Vacuum; N_WELLS];
    for (i, w) in raw.wells.iter().enumerate() {
        wells[i] = state_from_raw(w, i + 1)?;
    }
    let params = ModelParams::new(raw.model.chi, raw.model.j.unwrap_or(1.0))?;

    let run = raw.run;
    let representation = match run.representation.as_deref() {
        None => Representation::default(),
        Some(s) => Representation::parse(s)
            .ok_or_else(|| invalid(format!("unknown representation `{s}`")))?,
    };
    let scheme = match run.scheme.as_deref() {
        None => PpScheme::default(),
        Some(s) => PpScheme::parse(s).ok_or_else(|| invalid(format!("unknown scheme `{s}`")))?,
    };
    let seed = match run.seed {
        None => 0,
        Some(Seed::Int(i)) => u64::try_from(i).map_err(|_| invalid("seed must be non-negative"))?,
        Some(Seed::Text(s)) => s
            .trim()
            .parse::<u64>()
            .map_err(|_| invalid(format!("seed `{s}` is not a 64-bit unsigned integer")))?,
    };
    let measure_times = raw.measure.times;
    let t_final = run.t_final.unwrap_or_else(|| {
        measure_times
            .iter()
            .copied()
            .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t))))
            .unwrap_or(DEFAULT_T_FINAL)
    });

    let mut scenario = Scenario::new(params.chi, wells, t_final);
    scenario.params = params;
    scenario.representation = representation;
    scenario.dt = run.dt.unwrap_or(Scenario::DEFAULT_DT);
    scenario.n_traj = run.n_traj.unwrap_or(DEFAULT_N_TRAJ);
    scenario.seed = seed;
    scenario.record_every = run.record_every.unwrap_or(1);
    scenario.scheme = scheme;
    scenario.guard_factor = run.guard_factor.unwrap_or(Scenario::DEFAULT_GUARD_FACTOR);
    scenario.measure_times = measure_times;
    scenario.bin_width = raw.measure.bin_width.unwrap_or(1.0);
    scenario.measure_well = raw.measure.well.unwrap_or(2);
    scenario.validate()?;
    Ok(scenario)
}

/// Writes a scenario back in the file format; `parse_scenario` inverts it.
pub fn serialize_scenario(scenario: &Scenario) -> Result<String, ConfigError> {
    let seed = match i64::try_from(scenario.seed) {
        Ok(i) => Seed::Int(i),
        Err(_) => Seed::Text(scenario.seed.to_string()),
    };
    let raw = RawScenario {
        model: RawModel {
            chi: scenario.params.chi,
            j: Some(scenario.params.j_tunnel),
        },
        wells: scenario.wells.iter().map(state_to_raw).collect(),
        run: RawRun {
            representation: Some(scenario.representation.as_str().to_string()),
            t_final: Some(scenario.t_final),
            dt: Some(scenario.dt),
            n_traj: Some(scenario.n_traj),
            seed: Some(seed),
            record_every: Some(scenario.record_every),
            scheme: Some(scenario.scheme.as_str().to_string()),
            guard_factor: Some(scenario.guard_factor),
        },
        measure: RawMeasure {
            times: scenario.measure_times.clone(),
            bin_width: Some(scenario.bin_width),
            well: Some(scenario.measure_well),
        },
    };
    Ok(toml::to_string(&raw)?)
}
