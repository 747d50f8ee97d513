use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use chronoclock::clocks::{resolution_overlap, ClockModel, ClockSpec};
use chronoclock::dynamics::{evolve_composite, pointer_distribution, CompositeOptions, ExitPolicy, Readout};
use chronoclock::exec::Execution;
use chronoclock::harness::{run_experiment, scan_clock, ExperimentConfig, RunOutput, DRIFT_LIMIT, UNITARITY_LIMIT};
use chronoclock::lattice::{gaussian_state, Grid, Region, WaveFunction};
use chronoclock::observables::{
    dwell_semiclassical, smear, ArrivalSeries, Axis, Distribution, Lattice, ResponseKernel,
};

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn config(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"));
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(cfg: &ExperimentConfig) -> Result<RunOutput, String> {
    run_experiment(cfg).map_err(|e| e.to_string())
}

fn l2(o: &RunOutput) -> f64 {
    o.report.comparison.as_ref().map(|c| c.l2_relative).unwrap_or(f64::INFINITY)
}

fn a1(runs: &[(&str, &RunOutput)]) -> Outcome {
    let mut pass = true;
    let mut detail = String::new();
    for (name, o) in runs {
        let mass = o.report.diagnostics["pointer_mass"];
        let drift = o.report.diagnostics["max_norm_drift"];
        let steps = o.report.steps.unwrap_or(0) as f64;
        let ok = (mass - 1.0).abs() <= UNITARITY_LIMIT && drift <= DRIFT_LIMIT * (steps / 1e4).max(1.0);
        pass &= ok;
        detail += &format!("{name}: |mass-1|={:.1e} drift={drift:.1e} over {steps} steps; ", (mass - 1.0).abs());
    }
    Outcome { id: "A1", pass, detail }
}

fn a2(weak: &RunOutput) -> Outcome {
    let mut half = config("arrival_weak");
    half.lambda = 0.1;
    half.clock = Some(ClockSpec::LinearMomentum { eps0: 1.0, sigma_eps: 0.4, y0: 0.0 });
    match run(&half) {
        Ok(h) => {
            let (a, b) = (l2(weak), l2(&h));
            Outcome { id: "A2", pass: a <= 0.05 && b < a, detail: format!("l2={a:.3e} (<= 0.05), halved coupling l2={b:.3e}") }
        }
        Err(e) => Outcome { id: "A2", pass: false, detail: e },
    }
}

fn a3(strong: &RunOutput) -> Outcome {
    let r = strong.report.diagnostics["surviving_probability"];
    let e = l2(strong);
    Outcome { id: "A3", pass: e <= 0.10 && r > 0.5, detail: format!("l2={e:.3e} (<= 0.10), reflected={r:.3} (> 0.5)") }
}

fn a4(dwell: &RunOutput) -> Outcome {
    let e = l2(dwell);
    Outcome { id: "A4", pass: e <= 0.05, detail: format!("l2={e:.3e} (<= 0.05)") }
}

/// Two linear clocks with resolution times 0.02 and 0.08 applied to the same current.
fn a5() -> Outcome {
    let grid = Grid::new(-60.0, 60.0, 4096).unwrap();
    let psi = gaussian_state(&grid, 15.0, -3.0, 2.0).unwrap();
    let times = Lattice::spanning(0.0, 12.5, 2501).unwrap();
    let series = ArrivalSeries::free(&psi, 1.0, times, Execution::Parallel).unwrap();
    let ideal = series.current_distribution().unwrap();
    let lambda = 1.0;
    let output = Lattice::spanning(-1.0, 13.5, 5801).unwrap();
    let smeared: Vec<Distribution> = [50.0, 12.5]
        .iter()
        .map(|&sigma_eps: &f64| {
            let half = 12.0 / sigma_eps;
            let clock = ClockModel::build(&ClockSpec::LinearMomentum { eps0: 0.0, sigma_eps, y0: 0.0 }, Grid::new(-half, half, 256).unwrap()).unwrap();
            let phi = Distribution::new(Axis::PointerY, Lattice::from_grid(clock.grid()), clock.initial_state().density()).unwrap();
            let kernel = ResponseKernel::from_fn(times, output, Axis::PointerY, |y, t| phi.value_at(y - lambda * t));
            smear(&ideal, &kernel).unwrap()
        })
        .collect();
    let coarse = 1.0 / (lambda * 12.5);
    let width = 10.0 * coarse;
    let mut worst = 0.0f64;
    let mut rows = 0;
    let mut t1 = 1.0;
    while t1 + width <= 11.0 {
        let p: Vec<f64> = smeared.iter().map(|d| d.coarse_grain(lambda * t1, lambda * (t1 + width)).unwrap()).collect();
        worst = worst.max((p[0] - p[1]).abs());
        rows += 1;
        t1 += width / 2.0;
    }
    Outcome { id: "A5", pass: worst <= 0.02, detail: format!("max |dp|={worst:.3e} over {rows} intervals of width {width} (<= 0.02)") }
}

fn a6() -> Outcome {
    let mut worst = 0.0f64;
    for (lambda, sigma_eps) in [(0.5, 0.1), (2.0, 0.3), (1.0, 1.0)] {
        let clock = scan_clock(sigma_eps, 1.0).unwrap();
        for i in 0..=400 {
            let s = 10.0 * i as f64 / 400.0;
            let dt = s / (lambda * sigma_eps);
            worst = worst.max((resolution_overlap(&clock, lambda, dt).norm() - (-s * s / 2.0).exp()).abs());
        }
    }
    Outcome { id: "A6", pass: worst <= 1e-8, detail: format!("max deviation {worst:.2e} (<= 1e-8)") }
}

fn a7() -> Outcome {
    match run(&config("pdx_check")) {
        Ok(o) => {
            let get = |n: &str| o.report.checks.iter().find(|r| r.name == n).map(|r| r.value).unwrap_or(f64::NAN);
            let identity = get("pdx_identity_v0");
            let semi: Vec<f64> = ["5", "10", "20"].iter().map(|r| get(&format!("semiclassical_error_e_over_v_{r}"))).collect();
            let deriv = get("image_derivative_relation");
            let pass = identity <= 1e-2 && semi[0] > semi[1] && semi[1] > semi[2] && semi[2] <= 0.03 && deriv <= 1e-8;
            let all = o.report.all_pass();
            Outcome {
                id: "A7",
                pass,
                detail: format!(
                    "identity={identity:.2e} semiclassical={:.3}/{:.3}/{:.3} derivative={deriv:.1e} (battery {})",
                    semi[0],
                    semi[1],
                    semi[2],
                    if all { "all pass" } else { "has failures" }
                ),
            }
        }
        Err(e) => Outcome { id: "A7", pass: false, detail: e },
    }
}

fn a8() -> Outcome {
    let (p0, sigma, half_width, m) = (-4.0, 6.0, 5.0, 1.0);
    let grid = Grid::new(-60.0, 60.0, 4096).unwrap();
    let psi = gaussian_state(&grid, 15.0, p0, sigma).unwrap();
    let sigma_p = 1.0 / (2.0 * sigma);
    let normal = Normal::new(p0, sigma_p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let c = 2.0 * m * half_width;
    let samples: Vec<f64> = (0..1_000_000).map(|_| c / f64::abs(normal.sample(&mut rng))).collect();
    let (lo, hi) = (c / (p0.abs() + 4.0 * sigma_p), c / (p0.abs() - 4.0 * sigma_p));
    let bins = 36;
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for t in &samples {
        if *t >= lo && *t < hi {
            counts[((t - lo) / w) as usize] += 1;
        }
    }
    let lattice = Lattice::spanning(lo, hi, 36 * 200 + 1).unwrap();
    let pred = dwell_semiclassical(&psi, half_width, m, &lattice).unwrap();
    let hist: Vec<f64> = counts.iter().map(|&k| k as f64 / samples.len() as f64 / w).collect();
    let binned: Vec<f64> = (0..bins).map(|i| pred.coarse_grain(lo + i as f64 * w, lo + (i + 1) as f64 * w).unwrap() / w).collect();
    let peak = binned.iter().cloned().fold(0.0, f64::max);
    let sup = hist.iter().zip(&binned).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
    Outcome { id: "A8", pass: sup <= 0.01, detail: format!("binned sup-norm {sup:.2e} relative to peak over {bins} bins (<= 0.01)") }
}

/// Slow and fast packets timed to reach the origin together.
fn backflow_state(grid: &Grid) -> WaveFunction {
    let slow = gaussian_state(grid, 10.0, -1.0, 3.0).unwrap();
    let fast = gaussian_state(grid, 40.0, -4.0, 3.0).unwrap();
    slow.superpose(&fast.scaled(Complex64::new(0.5, 0.0))).unwrap().normalized().unwrap()
}

fn a9() -> Outcome {
    let grid = Grid::new(-180.0, 80.0, 4096).unwrap();
    let psi = backflow_state(&grid);
    let series = ArrivalSeries::free(&psi, 1.0, Lattice::spanning(0.0, 30.0, 3001).unwrap(), Execution::Parallel).unwrap();
    let j_min = series.min_current();
    let k_min = series.kinetic.iter().cloned().fold(f64::INFINITY, f64::min);
    let clock = ClockModel::build(&ClockSpec::LinearMomentum { eps0: 0.1, sigma_eps: 0.2, y0: 0.0 }, Grid::new(-32.0, 32.0, 256).unwrap()).unwrap();
    let opts = CompositeOptions { execution: Execution::Parallel, exit: ExitPolicy::Warn };
    let pi_min = evolve_composite(&psi, &clock, 0.05, Region::HalfLinePositive, 1.0, 30.0, 0.005, opts)
        .and_then(|s| pointer_distribution(&s, Readout::All, Execution::Parallel))
        .map(|d| d.density().iter().cloned().fold(f64::INFINITY, f64::min));
    match pi_min {
        Ok(pi_min) => Outcome {
            id: "A9",
            pass: j_min < 0.0 && k_min >= 0.0 && pi_min >= 0.0,
            detail: format!("min J={j_min:.3e} (< 0), min KED={k_min:.1e}, min Pi={pi_min:.1e}"),
        },
        Err(e) => Outcome { id: "A9", pass: false, detail: e.to_string() },
    }
}

fn a10() -> Outcome {
    let base = std::env::temp_dir().join(format!("chronoclock-a10-{}", std::process::id()));
    let cfg = config("arrival_weak");
    let dirs: Vec<PathBuf> = (0..2).map(|i| base.join(format!("run{i}"))).collect();
    for d in &dirs {
        if let Err(e) = run(&cfg).and_then(|o| o.write(d).map_err(|e| e.to_string())) {
            return Outcome { id: "A10", pass: false, detail: e };
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(&dirs[0]).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let identical = names.iter().all(|n| std::fs::read(dirs[0].join(n)).ok() == std::fs::read(dirs[1].join(n)).ok());
    let _ = std::fs::remove_dir_all(&base);
    Outcome { id: "A10", pass: identical && !names.is_empty(), detail: format!("{} files compared byte for byte", names.len()) }
}

fn main() {
    let start = Instant::now();
    let weak = run(&config("arrival_weak")).expect("weak run");
    let strong = run(&config("arrival_strong")).expect("strong run");
    let dwell = run(&config("dwell_weak")).expect("dwell run");
    let outcomes = vec![
        a1(&[("weak", &weak), ("strong", &strong), ("dwell", &dwell)]),
        a2(&weak),
        a3(&strong),
        a4(&dwell),
        a5(),
        a6(),
        a7(),
        a8(),
        a9(),
        a10(),
    ];
    for o in &outcomes {
        println!("{} {} {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance finished in {:.0} s", start.elapsed().as_secs_f64());
    if outcomes.iter().any(|o| !o.pass) {
        std::process::exit(1);
    }
}
