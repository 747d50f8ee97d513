use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{fft_plans, Region, Representation, WaveFunction};

/// Largest phase any single split factor may rotate per step.
pub const MAX_STEP_PHASE: f64 = 0.1;
/// Outer fraction of the box, on each side, watched for wrap-around.
pub const EDGE_FRACTION: f64 = 0.05;
pub const EDGE_LIMIT: f64 = 1e-4;

/// `H = p^2 / 2m + V chi(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPotentialSpec {
    pub v: f64,
    pub region: Region,
    pub mass: f64,
}

impl StepPotentialSpec {
    pub fn free(mass: f64) -> Self {
        Self { v: 0.0, region: Region::HalfLinePositive, mass }
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    /// Snapshot times, `times[i] = i * stride * dt`, always ending at the final step.
    pub times: Vec<f64>,
    pub snapshots: Vec<WaveFunction>,
    pub norm_drift: f64,
}

impl Evolution {
    pub fn final_state(&self) -> &WaveFunction {
        self.snapshots.last().expect("at least the initial snapshot")
    }
}

/// Largest lattice momentum carrying non-negligible weight (|psi~|^2 above 1e-12 of its peak).
pub fn momentum_extent(psi: &WaveFunction) -> f64 {
    let m = psi.to_momentum();
    let dens = m.density();
    let peak = dens.iter().cloned().fold(0.0, f64::max);
    let grid = *psi.grid();
    dens.iter()
        .enumerate()
        .filter(|(_, &d)| d > 1e-12 * peak)
        .map(|(k, _)| grid.momentum(k).abs())
        .fold(0.0, f64::max)
}

/// Phase rotated per step by the stiffest split factor.
///
/// The kinetic scale uses the momentum a state can reach after crossing the step,
/// `p_eff^2 = p_state^2 + 2 m |V|`.
pub fn step_phase(psi: &WaveFunction, spec: &StepPotentialSpec, dt: f64) -> f64 {
    let p = momentum_extent(psi);
    let p_eff2 = p * p + 2.0 * spec.mass * spec.v.abs();
    dt * spec.v.abs().max(p_eff2 / (2.0 * spec.mass))
}

fn validate(psi: &WaveFunction, spec: &StepPotentialSpec, dt: f64) -> Result<()> {
    if !(spec.mass > 0.0) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {}", spec.mass)));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let phase = step_phase(psi, spec, dt);
    if phase > MAX_STEP_PHASE {
        return Err(Error::Stability { scale: phase / dt, phase, limit: MAX_STEP_PHASE });
    }
    Ok(())
}

fn check_edges(psi: &WaveFunction) -> Result<()> {
    let prob = psi.edge_probability(EDGE_FRACTION)?;
    if prob > EDGE_LIMIT {
        return Err(Error::EdgeProbability { prob, limit: EDGE_LIMIT });
    }
    Ok(())
}

/// Strang-split propagation `e^{-iV chi dt/2} e^{-i p^2 dt/2m} e^{-iV chi dt/2}`.
///
/// Snapshots are taken every `stride` steps (and at the last step). The edge probability
/// is checked at every snapshot.
pub fn evolve_step_potential(
    psi0: &WaveFunction,
    spec: &StepPotentialSpec,
    dt: f64,
    n_steps: usize,
    stride: usize,
) -> Result<Evolution> {
    let psi0 = psi0.to_position();
    let grid = *psi0.grid();
    let norm0 = psi0.norm();
    let mut times = vec![0.0];
    let mut snapshots = vec![psi0.clone()];
    propagate(&psi0, spec, dt, n_steps, stride, |step, buf| {
        let snap = WaveFunction::new(grid, buf.to_vec(), Representation::Position)?;
        check_edges(&snap)?;
        times.push(step as f64 * dt);
        snapshots.push(snap);
        Ok(())
    })?;
    let norm_drift = (snapshots.last().map(|s| s.norm()).unwrap_or(norm0) - norm0).abs();
    Ok(Evolution { times, snapshots, norm_drift })
}

/// Same propagation as [`evolve_step_potential`], handing the position amplitudes to
/// `visit(step, amps)` every `stride` steps and at the last step instead of storing them.
/// The caller is responsible for edge checks after the initial state.
pub fn propagate(
    psi0: &WaveFunction,
    spec: &StepPotentialSpec,
    dt: f64,
    n_steps: usize,
    stride: usize,
    mut visit: impl FnMut(usize, &[Complex64]) -> Result<()>,
) -> Result<()> {
    let psi0 = psi0.to_position();
    validate(&psi0, spec, dt)?;
    check_edges(&psi0)?;
    let stride = stride.max(1);
    let grid = *psi0.grid();
    let n = grid.len();
    let plans = fft_plans(n);
    let mut scratch = plans.scratch();

    let dx = grid.dx();
    let half: Vec<Complex64> = grid
        .points()
        .map(|x| Complex64::from_polar(1.0, -0.5 * spec.v * spec.region.chi(x, dx) * dt))
        .collect();
    let full: Vec<Complex64> = half.iter().map(|h| h * h).collect();
    let inv_n = 1.0 / n as f64;
    let kinetic: Vec<Complex64> = (0..n)
        .map(|k| {
            let p = grid.momentum(k);
            Complex64::from_polar(inv_n, -p * p * dt / (2.0 * spec.mass))
        })
        .collect();

    let mut buf = psi0.amplitudes().to_vec();
    let mut pending_half = true;
    for step in 1..=n_steps {
        if pending_half {
            mul_assign(&mut buf, &half);
        }
        plans.forward.process_with_scratch(&mut buf, &mut scratch);
        mul_assign(&mut buf, &kinetic);
        plans.inverse.process_with_scratch(&mut buf, &mut scratch);
        if step % stride == 0 || step == n_steps {
            mul_assign(&mut buf, &half);
            pending_half = true;
            visit(step, &buf)?;
        } else {
            mul_assign(&mut buf, &full);
            pending_half = false;
        }
    }
    Ok(())
}

fn mul_assign(buf: &mut [Complex64], factors: &[Complex64]) {
    buf.iter_mut().zip(factors).for_each(|(a, f)| *a *= f);
}

/// Exact free evolution by a momentum-space phase.
pub fn evolve_free(psi: &WaveFunction, mass: f64, t: f64) -> WaveFunction {
    free_in_momentum(&psi.to_momentum(), mass, t).to_position()
}

/// Free evolution of a momentum-representation state, result kept in momentum space.
pub fn free_in_momentum(psi_p: &WaveFunction, mass: f64, t: f64) -> WaveFunction {
    debug_assert_eq!(psi_p.representation(), Representation::Momentum);
    let grid = *psi_p.grid();
    let amps = psi_p
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let p = grid.momentum(k);
            a * Complex64::from_polar(1.0, -p * p * t / (2.0 * mass))
        })
        .collect();
    WaveFunction::new(grid, amps, Representation::Momentum).expect("same grid")
}
