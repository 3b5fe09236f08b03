use trimer_core::{
    bin_distribution, moment_series, run_ensemble, Representation, RngStream, Scenario, StateSpec,
};

fn outer(spec: StateSpec) -> [StateSpec; 3] {
    [spec, StateSpec::Vacuum, spec]
}

#[test]
fn mirror_symmetric_start_stays_symmetric_on_average() {
    let mut s = Scenario::new(1e-3, outer(StateSpec::Fock { n: 100 }), 2.0);
    s.dt = 1e-2;
    s.n_traj = 4000;
    s.seed = 3;
    let r = run_ensemble(&s).unwrap();
    let m = moment_series(&r).unwrap();
    for k in 0..m.times.len() {
        let (a, b) = (m.at(1, k), m.at(3, k));
        let tol = 5.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt() + 1e-9;
        assert!(
            (a.mean - b.mean).abs() <= tol,
            "t={}: {} vs {}",
            m.times[k],
            a.mean,
            b.mean
        );
    }
}

#[test]
fn wigner_total_number_is_conserved_per_trajectory() {
    let mut s = Scenario::new(
        1e-2,
        outer(StateSpec::Coherent {
            n: 20.0,
            phase: 0.0,
        }),
        2.0,
    );
    s.n_traj = 200;
    s.seed = 8;
    let r = run_ensemble(&s).unwrap();
    let first = r.totals[0];
    for t in &r.totals {
        assert!((t.mean - first.mean).abs() < 1e-6 * first.mean);
        assert!((t.variance() - first.variance()).abs() < 1e-5 * first.variance().max(1.0));
    }
}

#[test]
fn positive_p_mean_number_is_conserved() {
    let mut s = Scenario::new(1e-3, outer(StateSpec::Fock { n: 100 }), 1.2);
    s.representation = Representation::PositiveP;
    s.n_traj = 2000;
    s.seed = 17;
    s.record_every = 100;
    let r = run_ensemble(&s).unwrap();
    assert!(r.is_reliable());
    for t in &r.totals {
        assert!(
            (t.mean - 200.0).abs() <= 5.0 * t.stderr() + 1e-9,
            "{}",
            t.mean
        );
    }
}

#[test]
fn linear_positive_p_coherent_follows_closed_form() {
    let n = 1000.0;
    let mut s = Scenario::new(0.0, outer(StateSpec::Coherent { n, phase: 0.0 }), 2.0);
    s.representation = Representation::PositiveP;
    s.n_traj = 3;
    s.record_every = 50;
    let r = run_ensemble(&s).unwrap();
    let m = moment_series(&r).unwrap();
    for (k, &t) in m.times.iter().enumerate() {
        let exact = 2.0 * n * (2f64.sqrt() * t).sin().powi(2);
        assert!((m.at(2, k).mean - exact).abs() < 1e-6 * n, "t={t}");
    }
}

#[test]
fn pi_phase_difference_suppresses_tunnelling() {
    let wells = [
        StateSpec::Coherent {
            n: 100.0,
            phase: 0.0,
        },
        StateSpec::Vacuum,
        StateSpec::Coherent {
            n: 100.0,
            phase: std::f64::consts::PI,
        },
    ];
    let mut s = Scenario::new(0.0, wells, 2.0);
    s.dt = 1e-2;
    s.n_traj = 2000;
    let m = moment_series(&run_ensemble(&s).unwrap()).unwrap();
    assert!(m.wells[1].iter().all(|x| x.mean < 1.0));
}

#[test]
fn serial_runs_repeat_exactly_and_seeds_matter() {
    let mut s = Scenario::new(1e-3, outer(StateSpec::Fock { n: 30 }), 0.5);
    s.representation = Representation::PositiveP;
    s.n_traj = 700;
    s.measure_times = vec![0.5];
    let a = run_ensemble(&s).unwrap();
    assert_eq!(a, run_ensemble(&s).unwrap());
    s.seed = 1;
    assert_ne!(a, run_ensemble(&s).unwrap());
}

#[test]
fn gaussian_samples_bin_to_their_moments() {
    let mut rng = RngStream::new(42, 0);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| 100.0 + 10.0 * rng.normal())
        .collect();
    let d = bin_distribution(&xs, 1.0).unwrap();
    assert!((d.mean() - 100.0).abs() < 0.03, "{}", d.mean());
    assert!((d.std_dev() - 10.0).abs() < 0.03, "{}", d.std_dev());
    assert_eq!(d.sample_count, 1_000_000);
}

#[test]
fn measure_snapshot_matches_recorded_mean() {
    let mut s = Scenario::new(1e-3, outer(StateSpec::Fock { n: 100 }), 1.11);
    s.dt = 1e-2;
    s.n_traj = 3000;
    s.measure_times = vec![1.11];
    let r = run_ensemble(&s).unwrap();
    let samples = r.samples(0, 2);
    let direct = samples.iter().sum::<f64>() / samples.len() as f64;
    let k = r.record_index(1.11);
    assert!((r.moments[k][1].mean - direct).abs() < 1e-9 * direct);
}
