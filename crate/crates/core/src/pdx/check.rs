use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::crossing::{grid_reference, pdx_first_crossing, relative_l2, CrossingTable, PostCrossing};
use super::propagators::{
    free_propagator, restricted_derivative_at_origin, restricted_propagator_image, GaussianPacket,
};
use super::scattering::{
    scattering_integral, scattering_integral_oracle, step_resolvent_integral, strong_coupling_wall_integral,
    wall_integral_oracle,
};
use crate::error::Result;
use crate::exec::{map_ordered, Execution};
use crate::lattice::Grid;
use crate::quadrature::{extrapolate_to_zero, CompositeGauss};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Inputs of the PDX battery. The defaults reproduce the step-crossing benchmark.
#[derive(Debug, Clone)]
pub struct CheckSettings {
    pub mass: f64,
    pub grid: Grid,
    pub dt: f64,
    pub tau: f64,
    pub source_x: f64,
    pub source_p: f64,
    pub source_sigma: f64,
    /// Step heights as fractions `E / V` of the source kinetic energy.
    pub energy_ratios: Vec<f64>,
    pub endpoints: Vec<f64>,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            mass: 1.0,
            grid: Grid::new(-40.0, 40.0, 2048).expect("valid grid"),
            dt: 8e-5,
            tau: 4.0,
            source_x: 6.0,
            source_p: -3.0,
            source_sigma: 1.0,
            energy_ratios: vec![5.0, 10.0, 20.0],
            endpoints: (0..53).map(|i| -14.0 + 0.25 * i as f64).collect(),
            seed: 7,
            execution: Execution::default(),
        }
    }
}

impl CheckSettings {
    /// Regularization width at the crossing point, four lattice spacings.
    pub fn sigma(&self) -> f64 {
        4.0 * self.grid.dx()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value.is_finite() && value <= tolerance }
    }

    pub fn write_csv(rows: &[CheckRow], path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "check,value,tolerance,pass")?;
        for r in rows {
            writeln!(f, "{},{:.6e},{:.3e},{}", r.name, r.value, r.tolerance, r.pass)?;
        }
        Ok(())
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Run the propagator identities, the crossing benchmark and the scattering integrals.
pub fn pdx_check(s: &CheckSettings) -> Result<Vec<CheckRow>> {
    let m = s.mass;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let triples: Vec<(f64, f64, f64)> =
        (0..5).map(|_| (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0), rng.gen_range(0.3..5.0))).collect();
    let mut rows = Vec::new();

    let mut modulus = 0.0f64;
    let mut schrodinger = 0.0f64;
    for &(x1, x0, t) in &triples {
        let g = free_propagator(x1, t, x0, m)?;
        modulus = modulus.max((g.norm() / (m / (2.0 * std::f64::consts::PI * t)).sqrt() - 1.0).abs());
        let h = 1e-4;
        let dt = (free_propagator(x1, t + h, x0, m)? - free_propagator(x1, t - h, x0, m)?) / (2.0 * h);
        let dxx = (free_propagator(x1 + h, t, x0, m)? - 2.0 * g + free_propagator(x1 - h, t, x0, m)?) / (h * h);
        schrodinger = schrodinger.max((I * dt + dxx / (2.0 * m)).norm() / (dxx / (2.0 * m)).norm());
    }
    rows.push(CheckRow::new("free_modulus", modulus, 1e-12));
    rows.push(CheckRow::new("free_schrodinger_residual", schrodinger, 1e-5));

    let mut composition = 0.0f64;
    for &(x1, x0, t) in triples.iter().take(3) {
        composition = composition.max(composition_error(x1, x0, 0.4 * t, 0.6 * t, m)?);
    }
    rows.push(CheckRow::new("free_composition", composition, 1e-6));

    let mut node = 0.0f64;
    let mut derivative = 0.0f64;
    for &(_, x0, t) in &triples {
        let x0 = x0.abs() + 0.5;
        let v = 0.7;
        node = node.max(restricted_propagator_image(1e-12, t, x0, v, m)?.norm());
        let h = 1e-4;
        let fd = (restricted_propagator_image(h, t, x0, v, m)? - restricted_propagator_image(2.0 * h, t, x0, v, m)? * 0.125)
            / (0.75 * h);
        derivative = derivative.max(rel(fd, restricted_derivative_at_origin(t, x0, v, m)?));
    }
    rows.push(CheckRow::new("image_dirichlet_node", node, 1e-10));
    rows.push(CheckRow::new("image_derivative_relation", derivative, 1e-8));

    // Without a step the decomposition reproduces free evolution of the smeared source.
    let sigma = s.sigma();
    let mut identity = 0.0f64;
    for &(x1, x0, t) in &triples {
        let src = GaussianPacket::wave_packet(x0.abs() + 3.0, -2.5, 1.0);
        let x1 = -(x1.abs() + 1.0);
        let pdx = pdx_first_crossing(x1, &src, t + 1.0, 0.0, m, PostCrossing::Free { sigma })?;
        let (exact, _) = src.evolve(x1, Complex64::new(t + 1.0, -sigma * sigma * m), m);
        // Compare against the packet scale so endpoints in the tails only count absolutely.
        identity = identity.max((pdx - exact).norm() / src.amplitude.norm());
    }
    rows.push(CheckRow::new("pdx_identity_v0", identity, 1e-2));

    let source = GaussianPacket::wave_packet(s.source_x, s.source_p, s.source_sigma);
    let energy = s.source_p * s.source_p / (2.0 * m);
    let runs = map_ordered(&s.energy_ratios, s.execution, |&ratio| -> Result<(f64, f64)> {
        let v = energy / ratio;
        let table = CrossingTable::step_potential(&s.grid, &s.endpoints, v, m, sigma, s.tau, s.dt)?;
        let xs = table.endpoints().to_vec();
        let reference = grid_reference(&s.grid, &source, s.tau, v, m, sigma, s.dt, &xs)?;
        let mut semi = Vec::with_capacity(xs.len());
        let mut exact = Vec::with_capacity(xs.len());
        for (i, &x) in xs.iter().enumerate() {
            semi.push(pdx_first_crossing(x, &source, s.tau, v, m, PostCrossing::Free { sigma })?);
            exact.push(pdx_first_crossing(x, &source, table.duration(), v, m, PostCrossing::Tabulated { table: &table, index: i })?);
        }
        Ok((relative_l2(&semi, &reference), relative_l2(&exact, &reference)))
    });
    let runs: Vec<(f64, f64)> = runs.into_iter().collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| s.energy_ratios[a].total_cmp(&s.energy_ratios[b]));
    for &i in &order {
        let ratio = s.energy_ratios[i];
        let tol = if ratio >= 20.0 { 0.03 } else { 0.1 };
        rows.push(CheckRow::new(format!("semiclassical_error_e_over_v_{ratio}"), runs[i].0, tol));
        rows.push(CheckRow::new(format!("exact_error_e_over_v_{ratio}"), runs[i].1, 0.02));
    }
    let monotone = order.windows(2).all(|w| runs[w[1]].0 < runs[w[0]].0);
    rows.push(CheckRow::new("semiclassical_error_decreasing", if monotone { 0.0 } else { 1.0 }, 0.0));

    let mut scattering = 0.0f64;
    for (x, e) in [(2.0, 4.5), (-1.5, 1.0), (5.0, 0.5)] {
        scattering = scattering.max(rel(scattering_integral_oracle(x, e, m)?, scattering_integral(x, e, m)?));
    }
    rows.push(CheckRow::new("scattering_integral", scattering, 1e-3));

    let mut wall = 0.0f64;
    let mut leading = 0.0f64;
    for (x, e, v) in [(-1.0, 1.0, 100.0), (-0.5, 0.2, 50.0), (-2.0, 1.0, 400.0)] {
        let exact = step_resolvent_integral(x, e, v, m)?;
        wall = wall.max(rel(wall_integral_oracle(x, e, v, m)?, exact));
        leading = leading.max(rel(strong_coupling_wall_integral(x, e, v, m)?, exact) / (e / v).sqrt());
    }
    rows.push(CheckRow::new("wall_integral_exact", wall, 1e-3));
    rows.push(CheckRow::new("wall_integral_leading_order_over_sqrt_e_over_v", leading, 2.0));
    Ok(rows)
}

/// `int dz g(x1, t2 | z) g(z, t1 | x0)` with Gaussian damping around the stationary point,
/// extrapolated to zero damping, compared with `g(x1, t1 + t2 | x0)`.
fn composition_error(x1: f64, x0: f64, t1: f64, t2: f64, m: f64) -> Result<f64> {
    let a = 0.5 * m * (1.0 / t1 + 1.0 / t2);
    let zc = (x1 * t1 + x0 * t2) / (t1 + t2);
    let rule = CompositeGauss::new(16);
    let nodes = [0.08, 0.04, 0.02, 0.01, 0.005];
    let mut values = Vec::new();
    for d in nodes {
        let delta = d * a;
        let half = 8.0 / delta.sqrt();
        let panels = (2.0 * a * half * half).ceil() as usize;
        let v = rule.integrate_complex(zc - half, zc + half, panels, |z| {
            let g2 = free_propagator(x1, t2, z, m).expect("positive time");
            let g1 = free_propagator(z, t1, x0, m).expect("positive time");
            g2 * g1 * (-delta * (z - zc) * (z - zc)).exp()
        });
        values.push(v);
    }
    Ok(rel(extrapolate_to_zero(&nodes, &values), free_propagator(x1, t1 + t2, x0, m)?))
}

