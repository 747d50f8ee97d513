use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{auto_tau, check_regime, ExperimentConfig, ExperimentKind, ReadoutKind, Tau, TimeMapKind};
use crate::clocks::{resolution_overlap, resolution_time, wkb_eigenstate, ClockModel, ClockSpec};
use crate::dynamics::{evolve_composite, pointer_distribution, CompositeOptions, CompositeState, ExitPolicy, Readout};
use crate::error::{Error, Result};
use crate::lattice::{gaussian_state, Grid, Region, WaveFunction};
use crate::observables::{
    compare, dwell_semiclassical, dwell_time_lattice, strong_arrival_prediction, weak_arrival_prediction,
    weak_dwell_prediction, ArrivalSeries, Distribution, Lattice, TimeMap, SUPPORT_FRACTION,
};
use crate::pdx::{pdx_check, CheckRow, CheckSettings};

/// Largest allowed deviation of `int Pi(y) dy` from one.
pub const UNITARITY_LIMIT: f64 = 1e-6;
/// Allowed channel norm drift per 10^4 steps.
pub const DRIFT_LIMIT: f64 = 1e-10;
/// Tolerance of the Gaussian resolution law.
pub const RESOLUTION_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CoarseRow {
    pub t1: f64,
    pub t2: f64,
    pub p_sim: f64,
    pub p_pred: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ComparisonReport {
    pub l2_relative: f64,
    pub sup_relative: f64,
    pub mass_simulated: f64,
    pub mass_predicted: f64,
    /// Pointer intervals labelled by `t = y / lambda`.
    pub coarse_grained_table: Vec<CoarseRow>,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub lambda: f64,
    pub tau: Option<f64>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub channels: Option<usize>,
    pub diagnostics: BTreeMap<String, f64>,
    pub comparison: Option<ComparisonReport>,
    pub checks: Vec<CheckRow>,
    pub pass: BTreeMap<String, bool>,
}

impl RunReport {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: cfg.experiment,
            seed: cfg.seed,
            lambda: cfg.lambda,
            tau: None,
            dt: None,
            steps: None,
            channels: None,
            diagnostics: BTreeMap::new(),
            comparison: None,
            checks: Vec::new(),
            pass: BTreeMap::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.pass.values().all(|p| *p)
    }
}

/// Everything a run produces; nothing is written until [`RunOutput::write`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    /// `(stem, distribution)`, written as `<stem>.csv` plus `<stem>.json`.
    pub distributions: Vec<(String, Distribution)>,
    /// `(file name, CSV text)`.
    pub tables: Vec<(String, String)>,
}

impl RunOutput {
    pub fn distribution(&self, stem: &str) -> Option<&Distribution> {
        self.distributions.iter().find(|(s, _)| s == stem).map(|(_, d)| d)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (stem, d) in &self.distributions {
            d.write(dir, stem)?;
        }
        for (name, text) in &self.tables {
            std::fs::write(dir.join(name), text)?;
        }
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&self.report)? + "\n")?;
        Ok(())
    }
}

/// Composite particle + clock run shared by the simulation experiments.
pub struct Simulation {
    pub psi0: WaveFunction,
    pub clock: ClockModel,
    pub state: CompositeState,
    pub tau: f64,
}

fn resolve_tau(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.tau {
        Tau::Fixed(t) if t > 0.0 => Ok(t),
        Tau::Fixed(t) => Err(Error::Config(format!("tau must be positive, got {t}"))),
        Tau::Keyword(_) => auto_tau(cfg.particle()?, &cfg.region, cfg.exit_margin),
    }
}

/// Validate the config, build the initial state and clock, and evolve every channel.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Simulation> {
    let particle = cfg.particle()?;
    let (grid, clock_grid) = cfg.grids()?;
    let clock = ClockModel::build(cfg.clock()?, clock_grid)?;
    let eps0 = cfg.clock()?.nominal_energy().unwrap_or_else(|| clock.mean_energy());
    check_regime(cfg.experiment, particle, cfg.lambda, eps0, &cfg.region)?;
    let psi0 = gaussian_state(&grid, particle.x0, particle.p0, particle.sigma)?;
    let tau = resolve_tau(cfg)?;
    let exit = if cfg.experiment == ExperimentKind::ArrivalStrong { ExitPolicy::Warn } else { ExitPolicy::Fatal };
    let opts = CompositeOptions { execution: cfg.execution, exit };
    let state = evolve_composite(&psi0, &clock, cfg.lambda, cfg.region, particle.mass, tau, cfg.dt, opts)?;
    Ok(Simulation { psi0, clock, state, tau })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.experiment {
        ExperimentKind::PdxCheck => run_pdx(cfg),
        ExperimentKind::ResolutionScan => run_scan(cfg),
        _ => run_simulation(cfg),
    }
}

fn run_simulation(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let particle = *cfg.particle()?;
    let sim = simulate(cfg)?;
    let mode = cfg.execution;
    let m = particle.mass;
    let mut report = RunReport::new(cfg);
    report.tau = Some(sim.tau);
    report.dt = Some(sim.tau / sim.state.steps as f64);
    report.steps = Some(sim.state.steps);
    report.channels = Some(sim.state.channels.len());

    let all = pointer_distribution(&sim.state, Readout::All, mode)?;
    let drift = sim.state.max_norm_drift();
    let drift_limit = DRIFT_LIMIT * (sim.state.steps as f64 / 1e4).max(1.0);
    let d = &mut report.diagnostics;
    d.insert("pointer_mass".into(), all.mass());
    d.insert("max_norm_drift".into(), drift);
    d.insert("surviving_probability".into(), sim.state.surviving_probability());
    d.insert("captured_mass".into(), sim.clock.captured_mass());
    d.insert("resolution_time".into(), resolution_time(&sim.clock, cfg.lambda)?.value());
    report.pass.insert("unitarity".into(), (all.mass() - 1.0).abs() <= UNITARITY_LIMIT);
    report.pass.insert("norm_drift".into(), drift <= drift_limit);

    let times = Lattice::spanning(0.0, sim.tau, cfg.prediction.samples)?;
    let series = ArrivalSeries::free(&sim.psi0, m, times, mode)?;
    report.diagnostics.insert("current_mass".into(), series.current_mass());
    report.diagnostics.insert("min_current".into(), series.min_current());
    let mut distributions = Vec::new();

    let (readout, predicted, threshold) = match cfg.experiment {
        ExperimentKind::ArrivalWeak => {
            (ReadoutKind::All, weak_arrival_prediction(&series, &sim.clock, cfg.lambda, mode)?, 0.05)
        }
        ExperimentKind::ArrivalStrong => {
            let mean_p = sim.psi0.momentum_moments().0;
            let map = match cfg.prediction.time_map {
                TimeMapKind::Linear => TimeMap::Linear { lambda: cfg.lambda },
                TimeMapKind::HamiltonJacobi => {
                    TimeMap::HamiltonJacobi { wkb: wkb_eigenstate(&sim.clock, sim.clock.mean_energy())?, lambda: cfg.lambda }
                }
            };
            let pointer = Lattice::from_grid(sim.clock.grid());
            let pred = strong_arrival_prediction(&series, mean_p, &map, &pointer)?;
            let reflected = sim.state.surviving_probability();
            report.pass.insert("reflection".into(), reflected > 0.5);
            distributions.push(("kinetic".to_string(), series.kinetic_distribution()?));
            (ReadoutKind::Exited, pred, 0.10)
        }
        ExperimentKind::DwellWeak => {
            let half_width = match cfg.region {
                Region::Interval { half_width } => half_width,
                Region::HalfLinePositive => return Err(Error::Config("dwell_weak needs an interval region".into())),
            };
            let pred = weak_dwell_prediction(&sim.psi0, &sim.clock, cfg.lambda, half_width, m, mode)?;
            let dwell_times = dwell_time_lattice(&sim.psi0, half_width, m, cfg.prediction.samples)?;
            distributions.push(("dwell_time".to_string(), dwell_semiclassical(&sim.psi0, half_width, m, &dwell_times)?));
            (ReadoutKind::All, pred, 0.05)
        }
        ExperimentKind::PdxCheck | ExperimentKind::ResolutionScan => unreachable!("dispatched earlier"),
    };
    let readout = match cfg.prediction.readout.unwrap_or(readout) {
        ReadoutKind::All => Readout::All,
        ReadoutKind::Exited => Readout::Exited,
    };
    let simulated = if readout == Readout::All { all } else { pointer_distribution(&sim.state, readout, mode)? };
    let simulated = simulated.normalized()?;
    let threshold = cfg.prediction.threshold.unwrap_or(threshold);
    let cmp = compare(&simulated, &predicted)?;
    let table = coarse_table(&simulated, &predicted, cfg.lambda, cfg.prediction.intervals)?;
    report.pass.insert("l2".into(), cmp.l2_relative <= threshold);
    report.comparison = Some(ComparisonReport {
        l2_relative: cmp.l2_relative,
        sup_relative: cmp.sup_relative,
        mass_simulated: cmp.mass_simulated,
        mass_predicted: cmp.mass_predicted,
        coarse_grained_table: table,
        threshold,
    });
    distributions.insert(0, ("current".to_string(), series.current_distribution()?));
    distributions.insert(0, ("predicted".to_string(), predicted));
    distributions.insert(0, ("pointer".to_string(), simulated));
    Ok(RunOutput { report, distributions, tables: Vec::new() })
}

/// Equal pointer intervals over the simulated support, with both probabilities.
pub fn coarse_table(sim: &Distribution, pred: &Distribution, lambda: f64, intervals: usize) -> Result<Vec<CoarseRow>> {
    let peak = sim.peak();
    let ys = sim.coordinates();
    let inside: Vec<usize> = (0..ys.len()).filter(|&i| sim.density()[i] > SUPPORT_FRACTION * peak).collect();
    let (Some(&a), Some(&b)) = (inside.first(), inside.last()) else {
        return Err(Error::NoMass(sim.mass()));
    };
    if intervals == 0 || a == b {
        return Ok(Vec::new());
    }
    let (ya, yb) = (ys[a], ys[b]);
    let h = (yb - ya) / intervals as f64;
    let scale = if lambda != 0.0 { 1.0 / lambda } else { 1.0 };
    (0..intervals)
        .map(|i| {
            let y1 = ya + i as f64 * h;
            let y2 = if i + 1 == intervals { yb } else { y1 + h };
            Ok(CoarseRow { t1: y1 * scale, t2: y2 * scale, p_sim: sim.coarse_grain(y1, y2)?, p_pred: pred.coarse_grain(y1, y2)? })
        })
        .collect()
}

fn run_pdx(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let settings = CheckSettings { seed: cfg.seed, execution: cfg.execution, ..CheckSettings::default() };
    let rows = pdx_check(&settings)?;
    let mut report = RunReport::new(cfg);
    for r in &rows {
        report.pass.insert(r.name.clone(), r.pass);
    }
    let mut csv = String::from("check,value,tolerance,pass\n");
    for r in &rows {
        writeln!(csv, "{},{:.6e},{:.3e},{}", r.name, r.value, r.tolerance, r.pass).expect("string write");
    }
    report.checks = rows;
    Ok(RunOutput { report, distributions: Vec::new(), tables: vec![("pdx_check.csv".into(), csv)] })
}

/// Clock grid for the resolution scan: `L sigma_eps = 24` keeps the periodic images of the
/// overlap below the tolerance over `lambda sigma_eps delta_t <= 10`.
pub fn scan_clock(sigma_eps: f64, eps0: f64) -> Result<ClockModel> {
    let half = 12.0 / sigma_eps;
    ClockModel::build(&ClockSpec::LinearMomentum { eps0, sigma_eps, y0: 0.0 }, Grid::new(-half, half, 256)?)
}

fn run_scan(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let scan = cfg.scan()?;
    if !(scan.lambda > 0.0) || !(scan.sigma_eps > 0.0) || scan.points < 2 {
        return Err(Error::Config("scan needs lambda > 0, sigma_eps > 0 and at least two points".into()));
    }
    let clock = scan_clock(scan.sigma_eps, scan.eps0)?;
    let t_max = scan.span / (scan.lambda * scan.sigma_eps);
    let mut csv = String::from("delta_t,overlap_abs,gaussian_law\n");
    let mut worst = 0.0f64;
    for i in 0..scan.points {
        let dt = t_max * i as f64 / (scan.points - 1) as f64;
        let o = resolution_overlap(&clock, scan.lambda, dt).norm();
        let s = scan.lambda * scan.sigma_eps * dt;
        let law = (-s * s / 2.0).exp();
        worst = worst.max((o - law).abs());
        writeln!(csv, "{dt:.17e},{o:.17e},{law:.17e}").expect("string write");
    }
    let mut report = RunReport::new(cfg);
    report.lambda = scan.lambda;
    report.diagnostics.insert("max_deviation".into(), worst);
    report.diagnostics.insert("resolution_time".into(), resolution_time(&clock, scan.lambda)?.value());
    report.pass.insert("gaussian_law".into(), worst <= RESOLUTION_LIMIT);
    Ok(RunOutput { report, distributions: Vec::new(), tables: vec![("resolution.csv".into(), csv)] })
}

/// `overlay.dat`: pointer coordinate, simulated and predicted densities as whitespace
/// columns, plus `current.dat` when a current series exists.
pub fn plot_data(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let sim = Distribution::read(dir, "pointer")?;
    let pred = Distribution::read(dir, "predicted")?.resampled(sim.lattice())?;
    let mut text = String::from("# y simulated predicted\n");
    for ((y, a), b) in sim.coordinates().iter().zip(sim.density()).zip(pred.density()) {
        writeln!(text, "{y:.10e} {a:.10e} {b:.10e}").expect("string write");
    }
    let path = dir.join("overlay.dat");
    std::fs::write(&path, text)?;
    written.push(path);
    if dir.join("current.json").exists() {
        let j = Distribution::read(dir, "current")?;
        let mut text = String::from("# t current\n");
        for (t, v) in j.coordinates().iter().zip(j.density()) {
            writeln!(text, "{t:.10e} {v:.10e}").expect("string write");
        }
        let path = dir.join("current.dat");
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}
