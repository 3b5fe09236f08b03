//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{PI, SQRT_2};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use trimer::commands::{run_scenario, SimulationOutput};
use trimer::presets::{embedded_scenario, find_preset, reproduce, Reproduction, DEFAULT_SCALE};
use trimer::runner::default_threads;
use trimer_core::{
    bhattacharyya_coefficient, bootstrap_coefficient_error, classical_energy, sample_positive_p,
    sample_wigner, wigner_step, Complex64, ModelParams, NumberDistribution, Representation,
    RngStream, Scenario, SqueezeConvention, StateSpec, WignerField,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn detail(msg: impl AsRef<str>) {
    println!("    {}", msg.as_ref());
}

fn threads() -> usize {
    default_threads().unwrap_or(1)
}

fn outer(spec: StateSpec) -> [StateSpec; 3] {
    [spec, StateSpec::Vacuum, spec]
}

fn fock(n: u64) -> StateSpec {
    StateSpec::Fock { n }
}

fn coherent(n: f64) -> StateSpec {
    StateSpec::Coherent { n, phase: 0.0 }
}

fn squeezed(n: f64) -> StateSpec {
    StateSpec::Squeezed {
        n,
        phase: 0.0,
        r: 0.5,
        convention: SqueezeConvention::Exp2R,
    }
}

fn run(s: &Scenario) -> SimulationOutput {
    run_scenario(s, threads()).unwrap_or_else(|e| panic!("run failed: {e}"))
}

/// Mean and standard error of N2 at record index `k`.
fn n2(out: &SimulationOutput, k: usize) -> (f64, f64) {
    out.moments.wells[1][k]
}

fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// 1. Linear dynamics against the closed-form transfer curve.
fn linear_oracle() -> Outcome {
    let n = 1000.0;
    let mut s = Scenario::new(0.0, outer(coherent(n)), 2.0);
    s.n_traj = 10_000;
    s.seed = 1;
    let out = run(&s);
    let mut worst = 0.0f64;
    let mut peak = (0.0, f64::MIN);
    for (k, &t) in out.moments.times.iter().enumerate() {
        let (mean, err) = n2(&out, k);
        let exact = 2.0 * n * (SQRT_2 * t).sin().powi(2);
        worst = worst.max((mean - exact).abs() / err.max(1e-300));
        if mean > peak.1 {
            peak = (t, mean);
        }
    }
    let t_peak = PI / (2.0 * SQRT_2);
    let msg = format!(
        "max |N2 - 2N sin^2(sqrt2 t)| = {worst:.2} stderr over {} times; argmax Jt = {:.4} (exact {t_peak:.4})",
        out.moments.times.len(),
        peak.0
    );
    if worst <= 3.0 && (peak.0 - t_peak).abs() <= s.dt + 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 2. Mean transfer for Fock states, N=100, chi=1e-3.
fn fock_mean_transfer() -> Outcome {
    let mut s = Scenario::new(1e-3, outer(fock(100)), 1.11);
    s.n_traj = 100_000;
    s.seed = 2;
    let out = run(&s);
    let (mean, err) = n2(&out, out.moments.index_of(1.11));
    let msg = format!("N2(1.11) = {mean:.3} +/- {err:.3} (target 100, 1e5 trajectories)");
    if (mean - 100.0).abs() <= 3.0 * err {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn coefficient_at_width2(a: &NumberDistribution, b: &NumberDistribution) -> f64 {
    let pairs = |d: &NumberDistribution| {
        let merged = d.counts.chunks(2).map(|c| c.iter().sum()).collect();
        NumberDistribution::from_counts(2.0, merged, d.clamped).expect("non-empty counts")
    };
    bhattacharyya_coefficient(&pairs(a), &pairs(b)).expect("equal widths")
}

/// 3. Both tables at desk scale.
fn table_reproduction() -> Outcome {
    let preset = find_preset("table_b").expect("table_b preset");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let repro: Reproduction = reproduce(preset, dir.path(), DEFAULT_SCALE, threads(), |_, _| {})
        .map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    for (row, pair) in repro.summary.iter().zip(preset.pairs) {
        let b_ok = (row.b - row.b_reference).abs() <= 0.03;
        let d_ok = (row.d - row.d_reference).abs() <= 0.08;
        let exact = (row.d + row.b.ln()).abs() <= 1e-12;
        let (a, b) = (
            repro.output(pair.first).expect("ran"),
            repro.output(pair.second).expect("ran"),
        );
        let b2 = coefficient_at_width2(&a.distributions[0], &b.distributions[0]);
        detail(format!(
            "{:<14} B = {:.4} +/- {:.4} (ref {:.3})  D = {:.4} (ref {:.3})  B at width 2 = {:.4}",
            row.pair_label, row.b, row.b_err, row.b_reference, row.d, row.d_reference, b2
        ));
        if !(b_ok && d_ok && exact) {
            failures.push(row.pair_label.clone());
        }
    }
    let n = repro.summary.first().map_or(0, |r| r.n_traj);
    if failures.is_empty() && repro.summary.len() == 9 {
        Ok(format!(
            "9 coefficients within 0.03, distances within 0.08, {n} trajectories per state"
        ))
    } else {
        Err(format!("out of tolerance: {}", failures.join(", ")))
    }
}

/// 4. Fock versus coherent states with a pi/2 phase difference.
fn phase_mimicry() -> Outcome {
    let preset = find_preset("fig4").expect("fig4 preset");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let repro = reproduce(preset, dir.path(), DEFAULT_SCALE, threads(), |_, _| {})
        .map_err(|e| e.to_string())?;
    let f = repro.output("fig2_fock").expect("ran");
    let p = repro.output("fig4_coherent_phase").expect("ran");
    let (mf, ef) = n2(f, f.moments.index_of(1.11));
    let (mp, ep) = n2(p, p.moments.index_of(1.11));
    let row = &repro.summary[0];
    let msg = format!(
        "N2(1.11): Fock {mf:.3} +/- {ef:.3}, phase {mp:.3} +/- {ep:.3}; B = {:.4} (ref 0.407), D = {:.4} (ref 0.899)",
        row.b, row.d
    );
    if (mf - mp).abs() <= 3.0 * combined(ef, ep)
        && (row.b - 0.407).abs() <= 0.03
        && (row.d - 0.899).abs() <= 0.08
    {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 5. A pi phase difference blocks transfer.
fn pi_phase_blocking() -> Outcome {
    let wells = [
        coherent(100.0),
        StateSpec::Vacuum,
        StateSpec::Coherent {
            n: 100.0,
            phase: PI,
        },
    ];
    let mut s = Scenario::new(0.0, wells, 2.0);
    s.n_traj = 10_000;
    s.seed = 5;
    let out = run(&s);
    let max = out.moments.wells[1]
        .iter()
        .map(|m| m.0)
        .fold(f64::MIN, f64::max);
    let msg = format!("max mean N2 over Jt <= 2 is {max:.4}");
    if max < 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 6. Positive-P and truncated Wigner agree on the mean transfer.
fn representation_cross_check() -> Outcome {
    let cases: [(f64, u64); 3] = [(1e-2, 20), (1e-3, 100), (1e-4, 1000)];
    let mut failures = Vec::new();
    let mut fig1_peaks = Vec::new();
    for (i, &(chi, n)) in cases.iter().enumerate() {
        for (j, (label, spec)) in [
            ("fock", fock(n)),
            ("coherent", coherent(n as f64)),
            ("squeezed", squeezed(n as f64)),
        ]
        .into_iter()
        .enumerate()
        {
            let mut s = Scenario::new(chi, outer(spec), 1.2);
            s.n_traj = 10_000;
            s.record_every = 10;
            s.seed = 600 + (3 * i + j) as u64;
            let w = run(&s);
            s.representation = Representation::PositiveP;
            let p = run(&s);
            let mut worst = 0.0f64;
            for k in 0..w.moments.times.len() {
                let ((mw, ew), (mp, ep)) = (n2(&w, k), n2(&p, k));
                let c = combined(ew, ep);
                if c > 0.0 {
                    worst = worst.max((mw - mp).abs() / c);
                }
            }
            let ok = worst <= 3.0 && p.is_reliable() && p.discard_fraction() < 1e-3;
            detail(format!(
                "chi={chi:e} N={n} {label:<8} max |W - P| = {worst:.2} combined stderr, {} discarded",
                p.discarded
            ));
            if !ok {
                failures.push(format!("chi={chi:e} {label}"));
            }
            if chi == 1e-4 {
                fig1_peaks.push((label, n2(&p, p.moments.index_of(1.11))));
            }
        }
    }
    let (f, c, s) = (fig1_peaks[0].1, fig1_peaks[1].1, fig1_peaks[2].1);
    let below = |other: (f64, f64)| f.0 + 3.0 * combined(f.1, other.1) < other.0;
    detail(format!(
        "positive-P N2(1.11), N=1000: fock {:.2} +/- {:.2}, coherent {:.2} +/- {:.2}, squeezed {:.2} +/- {:.2}",
        f.0, f.1, c.0, c.1, s.0, s.1
    ));
    if !(below(c) && below(s)) {
        failures.push("Fock peak not below coherent/squeezed".into());
    }
    if failures.is_empty() {
        Ok("9 cases agree within 3 combined stderr for Jt <= 1.2; Fock peak lowest".into())
    } else {
        Err(failures.join("; "))
    }
}

struct Stat {
    sum: f64,
    sum_sq: f64,
    n: f64,
}

impl Stat {
    fn of(xs: impl Iterator<Item = f64>) -> Self {
        let mut s = Stat {
            sum: 0.0,
            sum_sq: 0.0,
            n: 0.0,
        };
        for x in xs {
            s.sum += x;
            s.sum_sq += x * x;
            s.n += 1.0;
        }
        s
    }

    fn check(&self, expected: f64) -> (f64, f64, bool) {
        let mean = self.sum / self.n;
        let var = (self.sum_sq / self.n - mean * mean).max(0.0) * self.n / (self.n - 1.0);
        let err = (var / self.n).sqrt();
        let ok = (mean - expected).abs() <= 5.0 * err + 1e-12 * expected.abs().max(1.0);
        (mean, err, ok)
    }
}

/// 7. Sampled moments at 1e6 draws.
fn sampler_moments() -> Outcome {
    const DRAWS: u64 = 1_000_000;
    let mut checks: Vec<(String, Stat, f64)> = Vec::new();
    let wigner = |spec: StateSpec, seed: u64| -> Vec<Complex64> {
        (0..DRAWS)
            .map(|i| sample_wigner(&spec, &mut RngStream::new(seed, i)))
            .collect()
    };
    let pp = |spec: StateSpec, seed: u64| -> Vec<(Complex64, Complex64)> {
        (0..DRAWS)
            .map(|i| sample_positive_p(&spec, &mut RngStream::new(seed, i)))
            .collect()
    };
    let n = 100.0;

    let v = wigner(StateSpec::Vacuum, 70);
    checks.push((
        "W vacuum |a|^2".into(),
        Stat::of(v.iter().map(|z| z.norm_sqr())),
        0.5,
    ));
    let c = wigner(coherent(n), 71);
    checks.push((
        "W coherent Re a".into(),
        Stat::of(c.iter().map(|z| z.re)),
        n.sqrt(),
    ));
    checks.push((
        "W coherent |a|^2".into(),
        Stat::of(c.iter().map(|z| z.norm_sqr())),
        n + 0.5,
    ));
    let f = wigner(fock(100), 72);
    checks.push((
        "W fock |a|^2".into(),
        Stat::of(f.iter().map(|z| z.norm_sqr())),
        n + 0.5,
    ));
    checks.push(("W fock Re a".into(), Stat::of(f.iter().map(|z| z.re)), 0.0));
    for (k, conv) in [SqueezeConvention::ExpR, SqueezeConvention::Exp2R]
        .into_iter()
        .enumerate()
    {
        let q = conv.log_variance(0.5);
        let spec = StateSpec::Squeezed {
            n,
            phase: 0.0,
            r: 0.5,
            convention: conv,
        };
        let s = wigner(spec, 73 + k as u64);
        let tag = conv.as_str();
        checks.push((
            format!("W squeezed {tag} Re a"),
            Stat::of(s.iter().map(|z| z.re)),
            n.sqrt(),
        ));
        checks.push((
            format!("W squeezed {tag} |a|^2"),
            Stat::of(s.iter().map(|z| z.norm_sqr())),
            n + q.cosh() / 2.0,
        ));
        checks.push((
            format!("W squeezed {tag} a^2"),
            Stat::of(s.iter().map(|z| (z * z).re)),
            n - q.sinh() / 2.0,
        ));
        let p = pp(spec, 75 + k as u64);
        checks.push((
            format!("P squeezed {tag} a+a"),
            Stat::of(p.iter().map(|(a, b)| (a * b).re)),
            n + (q.cosh() - 1.0) / 2.0,
        ));
        checks.push((
            format!("P squeezed {tag} a^2"),
            Stat::of(p.iter().map(|(a, _)| (a * a).re)),
            n - q.sinh() / 2.0,
        ));
    }
    for m in [5u64, 100] {
        let p = pp(fock(m), 80 + m);
        let mf = m as f64;
        for (k, exact) in [
            (1, mf),
            (2, mf * (mf - 1.0)),
            (3, mf * (mf - 1.0) * (mf - 2.0)),
        ] {
            checks.push((
                format!("P fock {m} factorial moment {k}"),
                Stat::of(p.iter().map(|(a, b)| (a.powi(k) * b.powi(k)).re)),
                exact,
            ));
        }
    }
    let p = pp(coherent(n), 90);
    checks.push((
        "P coherent a+^2 a^2".into(),
        Stat::of(p.iter().map(|(a, b)| (a * a * b * b).re)),
        n * n,
    ));

    let mut failures = Vec::new();
    for (name, stat, expected) in &checks {
        let (mean, err, ok) = stat.check(*expected);
        if !ok {
            detail(format!("{name}: {mean} +/- {err}, expected {expected}"));
            failures.push(name.clone());
        }
    }
    if failures.is_empty() {
        Ok(format!(
            "{} moments within 5 stderr at 1e6 draws",
            checks.len()
        ))
    } else {
        Err(format!("failed: {}", failures.join(", ")))
    }
}

/// 8. Per-trajectory conservation and step-size convergence.
fn conservation_and_convergence() -> Outcome {
    let mut failures = Vec::new();

    let mut worst_n = 0.0f64;
    let mut worst_e = 0.0f64;
    for (chi, n) in [(1e-2, 20u64), (1e-3, 100), (1e-4, 1000)] {
        let params = ModelParams::new(chi, 1.0).expect("valid");
        for (j, spec) in [fock(n), coherent(n as f64), squeezed(n as f64)]
            .iter()
            .enumerate()
        {
            for i in 0..20u64 {
                let mut rng = RngStream::new(800 + j as u64, i);
                let alpha = [
                    sample_wigner(spec, &mut rng),
                    sample_wigner(&StateSpec::Vacuum, &mut rng),
                    sample_wigner(spec, &mut rng),
                ];
                let mut field = WignerField::new(alpha);
                let (n0, e0) = (field.total_number(), classical_energy(&field, &params));
                for _ in 0..2000 {
                    field = wigner_step(&field, &params, 1e-3);
                    worst_n = worst_n.max((field.total_number() - n0).abs() / n0);
                    worst_e = worst_e
                        .max((classical_energy(&field, &params) - e0).abs() / e0.abs().max(1.0));
                }
            }
        }
    }
    detail(format!(
        "max relative drift over Jt=2, dt=1e-3: number {worst_n:.2e}, energy {worst_e:.2e}"
    ));
    if worst_n >= 1e-6 || worst_e >= 1e-6 {
        failures.push("conservation".to_string());
    }

    // Same seed, halved step: Wigner trajectories share their initial draws.
    let names = [
        "table_chi1e-2_fock",
        "table_chi1e-2_coherent",
        "table_chi1e-2_squeezed",
        "fig2_fock",
        "fig2_coherent",
        "fig2_squeezed",
        "fig3_fock",
        "fig3_coherent",
        "fig3_squeezed",
        "fig4_coherent_phase",
    ];
    let mut coarse = Vec::new();
    let mut fine = Vec::new();
    for name in names {
        let mut s = embedded_scenario(name);
        s.n_traj = 200_000;
        let a = run(&s);
        s.dt /= 2.0;
        let b = run(&s);
        let k = (a.moments.index_of(1.11), b.moments.index_of(1.11));
        let ((ma, ea), (mb, _)) = (n2(&a, k.0), n2(&b, k.1));
        detail(format!(
            "{name:<24} N2(1.11) shift {:.2e} (stderr {ea:.2e})",
            (ma - mb).abs()
        ));
        if (ma - mb).abs() >= ea {
            failures.push(format!("{name} mean"));
        }
        coarse.push((name, a.distributions[0].clone()));
        fine.push(b.distributions[0].clone());
    }
    let find = |name: &str| names.iter().position(|n| *n == name).expect("listed");
    for pair in find_preset("table_b")
        .expect("preset")
        .pairs
        .iter()
        .chain(find_preset("fig4").expect("preset").pairs)
    {
        let (i, j) = (find(pair.first), find(pair.second));
        let ba = bhattacharyya_coefficient(&coarse[i].1, &coarse[j].1).expect("widths");
        let bb = bhattacharyya_coefficient(&fine[i], &fine[j]).expect("widths");
        let err = bootstrap_coefficient_error(&coarse[i].1, &coarse[j].1, 200, 0).expect("widths");
        detail(format!(
            "{:<14} B shift {:.2e} (bootstrap error {err:.2e})",
            pair.label,
            (ba - bb).abs()
        ));
        if (ba - bb).abs() >= err {
            failures.push(format!("{} B", pair.label));
        }
    }

    // Positive-P: halving dt redraws the noise, so compare statistically.
    for name in ["fig1_fock", "fig1_coherent", "fig1_squeezed"] {
        let mut s = embedded_scenario(name);
        s.n_traj = 2000;
        s.t_final = 1.2;
        let a = run(&s);
        s.dt /= 2.0;
        s.record_every *= 2;
        let b = run(&s);
        let mut worst = 0.0f64;
        for k in 0..a.moments.times.len() {
            let ((ma, ea), (mb, eb)) = (n2(&a, k), n2(&b, k));
            let c = combined(ea, eb);
            if c > 0.0 {
                worst = worst.max((ma - mb).abs() / c);
            }
        }
        detail(format!(
            "{name:<24} positive-P max shift {worst:.2} combined stderr"
        ));
        if worst > 3.0 {
            failures.push(format!("{name} positive-P"));
        }
    }

    if failures.is_empty() {
        Ok("drift below 1e-6; halving dt moves every observable by less than its statistical error".into())
    } else {
        Err(failures.join("; "))
    }
}

/// 9. Output files do not depend on the worker count.
fn thread_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checked = 0;
    for (name, n_traj) in [("table_chi1e-2_squeezed", 5000u64), ("fig1_fock", 1100)] {
        let mut s = embedded_scenario(name);
        s.n_traj = n_traj;
        if s.representation == Representation::PositiveP {
            s.t_final = 1.0;
        }
        let mut reference: Option<Vec<Vec<u8>>> = None;
        for threads in [1, 2, 4] {
            let out = run_scenario(&s, threads).map_err(|e| e.to_string())?;
            let sub = dir.path().join(format!("{name}_{threads}"));
            let paths = out.write(&sub).map_err(|e| e.to_string())?;
            let bytes: Vec<Vec<u8>> = paths
                .iter()
                .map(|p| fs::read(p).expect("written"))
                .collect();
            match &reference {
                None => reference = Some(bytes),
                Some(r) if *r == bytes => checked += bytes.len(),
                Some(_) => return Err(format!("{name}: files differ with {threads} threads")),
            }
        }
    }
    Ok(format!(
        "{checked} files byte-identical across 1, 2 and 4 threads"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("linear transfer matches closed form", linear_oracle),
        ("Fock mean transfer N=100, chi=1e-3", fock_mean_transfer),
        ("Bhattacharyya tables at scale 0.1", table_reproduction),
        ("Fock vs pi/2 phase coherent states", phase_mimicry),
        ("pi phase difference blocks tunnelling", pi_phase_blocking),
        ("positive-P vs truncated Wigner", representation_cross_check),
        ("sampler moments", sampler_moments),
        (
            "conservation and dt convergence",
            conservation_and_convergence,
        ),
        ("thread-count determinism", thread_determinism),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {id} {name}: {msg} [{secs:.1} s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id} {name}: {msg} [{secs:.1} s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
