//! Built-in scenario sets for every figure and table.
//!
//! Each preset names the scenarios it runs and the distribution pairs it
//! compares. Trajectory counts in the embedded files are full-size; a scale
//! factor shrinks them for desk runs.

use std::fs;
use std::path::Path;

use trimer_core::Scenario;

use crate::commands::{compare_distributions, run_scenario, CommandError, SimulationOutput};
use crate::config::parse_scenario;
use crate::csv_io::{write_summary, SummaryRow};

pub const DEFAULT_SCALE: f64 = 0.1;
pub const SUMMARY_FILE: &str = "summary.csv";

macro_rules! scenarios {
    ($($name:literal),* $(,)?) => {
        /// Embedded scenario files, by name.
        pub const SCENARIOS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../../scenarios/", $name, ".toml")))),*
        ];
    };
}

scenarios!(
    "fig1_fock",
    "fig1_coherent",
    "fig1_squeezed",
    "fig2_fock",
    "fig2_coherent",
    "fig2_squeezed",
    "fig3_fock",
    "fig3_coherent",
    "fig3_squeezed",
    "fig4_coherent_phase",
    "table_chi1e-2_fock",
    "table_chi1e-2_coherent",
    "table_chi1e-2_squeezed",
);

/// Two scenarios whose measure-time distributions are compared, with the
/// published B and D for the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub label: &'static str,
    pub first: &'static str,
    pub second: &'static str,
    pub b_reference: f64,
    pub d_reference: f64,
}

const fn pair(
    label: &'static str,
    first: &'static str,
    second: &'static str,
    b_reference: f64,
    d_reference: f64,
) -> Pair {
    Pair {
        label,
        first,
        second,
        b_reference,
        d_reference,
    }
}

const PAIRS_CHI_1E2: [Pair; 3] = [
    pair(
        "F-C chi=1e-2",
        "table_chi1e-2_fock",
        "table_chi1e-2_coherent",
        0.531,
        0.633,
    ),
    pair(
        "F-S chi=1e-2",
        "table_chi1e-2_fock",
        "table_chi1e-2_squeezed",
        0.484,
        0.726,
    ),
    pair(
        "C-S chi=1e-2",
        "table_chi1e-2_coherent",
        "table_chi1e-2_squeezed",
        0.947,
        0.055,
    ),
];
const PAIRS_CHI_1E3: [Pair; 3] = [
    pair("F-C chi=1e-3", "fig2_fock", "fig2_coherent", 0.403, 0.909),
    pair("F-S chi=1e-3", "fig2_fock", "fig2_squeezed", 0.364, 1.01),
    pair(
        "C-S chi=1e-3",
        "fig2_coherent",
        "fig2_squeezed",
        0.942,
        0.060,
    ),
];
const PAIRS_CHI_1E4: [Pair; 3] = [
    pair("F-C chi=1e-4", "fig3_fock", "fig3_coherent", 0.287, 1.25),
    pair("F-S chi=1e-4", "fig3_fock", "fig3_squeezed", 0.259, 1.35),
    pair(
        "C-S chi=1e-4",
        "fig3_coherent",
        "fig3_squeezed",
        0.939,
        0.063,
    ),
];
const TABLE_PAIRS: [Pair; 9] = [
    PAIRS_CHI_1E2[0],
    PAIRS_CHI_1E3[0],
    PAIRS_CHI_1E4[0],
    PAIRS_CHI_1E2[1],
    PAIRS_CHI_1E3[1],
    PAIRS_CHI_1E4[1],
    PAIRS_CHI_1E2[2],
    PAIRS_CHI_1E3[2],
    PAIRS_CHI_1E4[2],
];
const TABLE_SCENARIOS: [&str; 9] = [
    "table_chi1e-2_fock",
    "table_chi1e-2_coherent",
    "table_chi1e-2_squeezed",
    "fig2_fock",
    "fig2_coherent",
    "fig2_squeezed",
    "fig3_fock",
    "fig3_coherent",
    "fig3_squeezed",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub scenarios: &'static [&'static str],
    pub pairs: &'static [Pair],
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        description: "N2(Jt), positive-P, Fock/coherent/squeezed, N=1000, chi=1e-4",
        scenarios: &["fig1_fock", "fig1_coherent", "fig1_squeezed"],
        pairs: &[],
    },
    Preset {
        name: "fig2",
        description: "P(N2) at Jt=1.11, N=100, chi=1e-3",
        scenarios: &["fig2_fock", "fig2_coherent", "fig2_squeezed"],
        pairs: &PAIRS_CHI_1E3,
    },
    Preset {
        name: "fig3",
        description: "P(N2) at Jt=1.11, N=1000, chi=1e-4",
        scenarios: &["fig3_fock", "fig3_coherent", "fig3_squeezed"],
        pairs: &PAIRS_CHI_1E4,
    },
    Preset {
        name: "fig4",
        description: "P(N2) for Fock states and coherent states with a pi/2 phase difference",
        scenarios: &["fig2_fock", "fig4_coherent_phase"],
        pairs: &[pair(
            "F-phi chi=1e-3",
            "fig2_fock",
            "fig4_coherent_phase",
            0.407,
            0.899,
        )],
    },
    Preset {
        name: "table_b",
        description: "Bhattacharyya coefficients for all three (chi, N) pairs",
        scenarios: &TABLE_SCENARIOS,
        pairs: &TABLE_PAIRS,
    },
    Preset {
        name: "table_d",
        description: "Bhattacharyya distances for all three (chi, N) pairs",
        scenarios: &TABLE_SCENARIOS,
        pairs: &TABLE_PAIRS,
    },
];

pub fn find_preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

pub fn scenario_text(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parses an embedded scenario; panics on an unknown name or a broken file,
/// both of which are covered by tests.
pub fn embedded_scenario(name: &str) -> Scenario {
    let text = scenario_text(name).unwrap_or_else(|| panic!("no embedded scenario `{name}`"));
    parse_scenario(text).unwrap_or_else(|e| panic!("embedded scenario `{name}`: {e}"))
}

pub fn scaled_n_traj(base: u64, scale: f64) -> u64 {
    ((base as f64 * scale).round() as u64).max(2)
}

impl Preset {
    pub fn scenario(&self, name: &str, scale: f64) -> Scenario {
        let mut s = embedded_scenario(name);
        s.n_traj = scaled_n_traj(s.n_traj, scale);
        s
    }

    /// Every file `reproduce` writes, relative to the output directory.
    pub fn manifest(&self) -> Vec<String> {
        let mut files = Vec::new();
        for name in self.scenarios {
            let s = embedded_scenario(name);
            for f in SimulationOutput::file_names(&s) {
                files.push(format!("{name}/{f}"));
            }
        }
        if !self.pairs.is_empty() {
            files.push(SUMMARY_FILE.to_string());
        }
        files
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub outputs: Vec<(&'static str, SimulationOutput)>,
    pub summary: Vec<SummaryRow>,
}

impl Reproduction {
    pub fn output(&self, name: &str) -> Option<&SimulationOutput> {
        self.outputs
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, o)| o)
    }
}

/// Runs every scenario of `preset`, writes the manifest files under `out_dir`
/// and the summary table when the preset compares distributions.
pub fn reproduce(
    preset: &Preset,
    out_dir: &Path,
    scale: f64,
    threads: usize,
    mut progress: impl FnMut(&str, &SimulationOutput),
) -> Result<Reproduction, CommandError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CommandError::Usage(format!(
            "scale must be positive, got {scale}"
        )));
    }
    fs::create_dir_all(out_dir)
        .map_err(|e| CommandError::Runtime(format!("{}: {e}", out_dir.display())))?;
    let mut outputs = Vec::new();
    for &name in preset.scenarios {
        let out = run_scenario(&preset.scenario(name, scale), threads)?;
        out.write(&out_dir.join(name))?;
        progress(name, &out);
        outputs.push((name, out));
    }
    let mut repro = Reproduction {
        outputs,
        summary: Vec::new(),
    };
    for pair in preset.pairs {
        let (a, b) = match (repro.output(pair.first), repro.output(pair.second)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(CommandError::Runtime(format!(
                    "pair {} refers to a scenario outside the preset",
                    pair.label
                )))
            }
        };
        let c = compare_distributions(pair.label, &a.distributions[0], &b.distributions[0])?;
        repro.summary.push(SummaryRow {
            pair_label: c.pair_label,
            b: c.b,
            b_err: c.b_err,
            d: c.d,
            b_reference: pair.b_reference,
            d_reference: pair.d_reference,
            n_traj: a.completed.min(b.completed),
        });
    }
    if !preset.pairs.is_empty() {
        write_summary(&out_dir.join(SUMMARY_FILE), &repro.summary)
            .map_err(|e| CommandError::Runtime(e.to_string()))?;
    }
    Ok(repro)
}
