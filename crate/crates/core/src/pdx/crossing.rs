use num_complex::Complex64;

use super::propagators::GaussianPacket;
use crate::dynamics::{evolve_step_potential, propagate, StepPotentialSpec};
use crate::error::{Error, Result};
use crate::lattice::{Grid, Region};
use crate::quadrature::CompositeGauss;

const I: Complex64 = Complex64::new(0.0, 1.0);
const MAX_PANELS: usize = 1 << 16;
const QUAD_TOLERANCE: f64 = 1e-10;

/// `G(x_to, s | 0, 0)` under `H0 + V theta(x)` for a Gaussian-regularized source at the
/// crossing point, recorded at every step of a grid evolution.
#[derive(Debug, Clone)]
pub struct CrossingTable {
    x_to: Vec<f64>,
    ds: f64,
    /// `values[i][j] = G(x_to[i], j ds)`.
    values: Vec<Vec<Complex64>>,
}

impl CrossingTable {
    /// Evolve `delta_sigma(x)` from the origin for `tau` and record it at the lattice points
    /// nearest each requested endpoint.
    pub fn step_potential(
        grid: &Grid,
        x_to: &[f64],
        v: f64,
        m: f64,
        sigma: f64,
        tau: f64,
        dt: f64,
    ) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        let idx: Vec<usize> = x_to
            .iter()
            .map(|&x| grid.nearest_index(x).ok_or(Error::OutsideGrid(x)))
            .collect::<Result<_>>()?;
        let steps = (tau / dt).ceil() as usize;
        let ds = tau / steps as f64;
        let psi0 = GaussianPacket::point_source(0.0, sigma).sample(grid);
        let spec = StepPotentialSpec { v, region: Region::HalfLinePositive, mass: m };
        let mut values: Vec<Vec<Complex64>> = idx
            .iter()
            .map(|&j| {
                let mut col = Vec::with_capacity(steps + 1);
                col.push(psi0.amplitudes()[j]);
                col
            })
            .collect();
        // The regularized source is not a state: its fast tail reaches the box edge, but
        // only the band of the crossing source survives the time integral.
        propagate(&psi0, &spec, ds, steps, 1, |_, buf| {
            for (col, &j) in values.iter_mut().zip(&idx) {
                col.push(buf[j]);
            }
            Ok(())
        })?;
        Ok(Self { x_to: idx.iter().map(|&j| grid.x(j)).collect(), ds, values })
    }

    /// Lattice endpoints actually recorded.
    pub fn endpoints(&self) -> &[f64] {
        &self.x_to
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn duration(&self) -> f64 {
        self.ds * (self.values[0].len() - 1) as f64
    }

    pub fn column(&self, i: usize) -> &[Complex64] {
        &self.values[i]
    }
}

/// Propagator used after the crossing.
#[derive(Debug, Clone, Copy)]
pub enum PostCrossing<'a> {
    /// Free propagator smeared to width `sigma` (semiclassical).
    Free { sigma: f64 },
    /// Grid-evolved propagator, column `index` of the table.
    Tabulated { table: &'a CrossingTable, index: usize },
}

/// Crossing source `2 d_x psi_free(0, t) e^{-iVt}` from the image construction.
pub fn crossing_source(source: &GaussianPacket, t: f64, v: f64, m: f64) -> Complex64 {
    let (_, d) = source.evolve(0.0, Complex64::new(t, 0.0), m);
    2.0 * d * Complex64::from_polar(1.0, -v * t)
}

/// First-crossing decomposition
/// `psi(x_to, tau) = (i / 2m) int_0^tau dt G(x_to, tau - t | 0) 2 d_x psi_free(0, t) e^{-iVt}`
/// for a source in `x > 0` under `H0 + V theta(x)` and an endpoint in `x < 0`.
pub fn pdx_first_crossing(
    x_to: f64,
    source: &GaussianPacket,
    tau: f64,
    v: f64,
    m: f64,
    post: PostCrossing<'_>,
) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let pref = I / (2.0 * m);
    match post {
        PostCrossing::Free { sigma } => {
            let sink = GaussianPacket::point_source(0.0, sigma);
            let f = |t: f64| {
                let (g, _) = sink.evolve(x_to, Complex64::new(tau - t, 0.0), m);
                g * crossing_source(source, t, v, m)
            };
            Ok(pref * adaptive(0.0, tau, f)?)
        }
        PostCrossing::Tabulated { table, index } => {
            let col = table.values.get(index).ok_or_else(|| {
                Error::InvalidParameter(format!("table has no endpoint {index}"))
            })?;
            let n = (tau / table.ds).round() as usize;
            if (n as f64 * table.ds - tau).abs() > 1e-9 * tau || n >= col.len() {
                return Err(Error::GridMismatch(format!(
                    "tau {tau} is not a multiple of the table step {} within its duration {}",
                    table.ds,
                    table.duration()
                )));
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..=n {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                sum += col[n - j] * crossing_source(source, j as f64 * table.ds, v, m) * w;
            }
            Ok(pref * sum * table.ds)
        }
    }
}

fn adaptive(a: f64, b: f64, f: impl Fn(f64) -> Complex64) -> Result<Complex64> {
    let rule = CompositeGauss::new(16);
    let mut panels = 16;
    let mut prev = rule.integrate_complex(a, b, panels, &f);
    while panels < MAX_PANELS {
        panels *= 2;
        let next = rule.integrate_complex(a, b, panels, &f);
        if (next - prev).norm() <= QUAD_TOLERANCE * next.norm().max(prev.norm()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature { estimate: prev.norm(), tolerance: QUAD_TOLERANCE })
}

/// Grid reference: evolve `source` under `H0 + V theta(x)` and smear the result with the
/// same Gaussian used at the crossing point.
#[allow(clippy::too_many_arguments)]
pub fn grid_reference(
    grid: &Grid,
    source: &GaussianPacket,
    tau: f64,
    v: f64,
    m: f64,
    sigma: f64,
    dt: f64,
    x_to: &[f64],
) -> Result<Vec<Complex64>> {
    let spec = StepPotentialSpec { v, region: Region::HalfLinePositive, mass: m };
    let steps = (tau / dt).ceil() as usize;
    let ev = evolve_step_potential(&source.sample(grid), &spec, tau / steps as f64, steps, steps)?;
    let mut p = ev.final_state().to_momentum();
    let g = *p.grid();
    for (k, a) in p.amplitudes_mut().iter_mut().enumerate() {
        *a *= (-g.momentum(k).powi(2) * sigma * sigma / 2.0).exp();
    }
    x_to.iter().map(|&x| p.interpolate(x).map(|(v, _)| v)).collect()
}

/// Relative L2 distance `||a - b|| / ||b||` over paired samples.
pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
