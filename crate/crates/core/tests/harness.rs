use std::path::Path;

use chronoclock::harness::{run_experiment, ExperimentConfig, Tau};
use chronoclock::observables::compare;
use chronoclock::Error;

fn config(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"))).unwrap()
}

#[test]
fn decoupled_pointer_is_initial_clock_density() {
    let out = run_experiment(&config("decoupled")).unwrap();
    let c = out.report.comparison.as_ref().unwrap();
    assert!(c.l2_relative <= 1e-6);
    assert!(out.report.all_pass());
}

#[test]
fn doubling_tau_leaves_weak_pointer_unchanged() {
    let mut cfg = config("arrival_weak");
    let grid = cfg.grid.as_mut().unwrap();
    grid.particle.x_min = -180.0;
    grid.particle.x_max = 140.0;
    grid.particle.n = 8192;
    cfg.prediction.readout = Some(chronoclock::harness::ReadoutKind::Exited);
    let base = run_experiment(&cfg).unwrap();
    let tau = base.report.tau.unwrap();
    let longer = run_experiment(&ExperimentConfig { tau: Tau::Fixed(2.0 * tau), ..cfg }).unwrap();
    let a = base.distribution("pointer").unwrap();
    let b = longer.distribution("pointer").unwrap();
    assert!(compare(a, b).unwrap().l2_relative < 1e-6);
}

#[test]
fn guards_and_exit_criterion() {
    let mut cfg = config("arrival_strong");
    cfg.lambda = 0.5;
    assert!(matches!(run_experiment(&cfg), Err(Error::Regime(_))));
    let mut cfg = config("dwell_weak");
    cfg.region = chronoclock::lattice::Region::Interval { half_width: 2.0 };
    assert!(matches!(run_experiment(&cfg), Err(Error::Regime(_))));
    // Too short a run leaves the packet in the region.
    let cfg = ExperimentConfig { tau: Tau::Fixed(3.0), ..config("arrival_weak") };
    assert!(matches!(run_experiment(&cfg), Err(Error::RegionExit { .. })));
}
