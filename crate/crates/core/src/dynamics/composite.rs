use num_complex::Complex64;

use super::split_operator::{evolve_step_potential, StepPotentialSpec};
use crate::clocks::{ClockModel, TRUNCATION_LIMIT};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, map_range, Execution};
use crate::lattice::{probability_in_region, Grid, Region, WaveFunction};
use crate::observables::{Axis, Distribution, Lattice};

/// Largest probability any channel may keep inside the region at the final time.
pub const EXIT_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitPolicy {
    Fatal,
    /// Log and continue; used when reflection keeps probability in the region.
    Warn,
}

#[derive(Debug, Clone, Copy)]
pub struct CompositeOptions {
    pub execution: Execution,
    pub exit: ExitPolicy,
}

impl Default for CompositeOptions {
    fn default() -> Self {
        Self { execution: Execution::default(), exit: ExitPolicy::Fatal }
    }
}

/// One clock-energy channel: the particle evolved under `H_0 + lambda eps chi(x)`.
#[derive(Debug, Clone)]
pub struct Channel {
    pub epsilon: f64,
    pub weight: Complex64,
    /// `<y_j|eps>` on the clock grid.
    pub clock_state: Vec<Complex64>,
    pub psi: WaveFunction,
    pub norm_drift: f64,
    /// Probability left inside the region at the final time.
    pub remaining: f64,
}

#[derive(Debug, Clone)]
pub struct CompositeState {
    pub channels: Vec<Channel>,
    pub clock_grid: Grid,
    pub elapsed: f64,
    pub steps: usize,
    pub region: Region,
}

impl CompositeState {
    pub fn weight_mass(&self) -> f64 {
        self.channels.iter().map(|c| c.weight.norm_sqr()).sum()
    }

    /// Total probability still in the region, `sum |c_eps|^2 P_eps`.
    pub fn surviving_probability(&self) -> f64 {
        self.channels.iter().map(|c| c.weight.norm_sqr() * c.remaining).sum::<f64>() / self.weight_mass()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.channels.iter().map(|c| c.norm_drift).fold(0.0, f64::max)
    }
}

/// Evolve every retained clock channel independently for time `tau`.
///
/// The step count is `ceil(tau / dt)`, so the step actually used never exceeds `dt`.
#[allow(clippy::too_many_arguments)]
pub fn evolve_composite(
    psi0: &WaveFunction,
    clock: &ClockModel,
    lambda: f64,
    region: Region,
    mass: f64,
    tau: f64,
    dt: f64,
    options: CompositeOptions,
) -> Result<CompositeState> {
    if 1.0 - clock.captured_mass() > TRUNCATION_LIMIT {
        return Err(Error::Truncation { kept: clock.captured_mass() });
    }
    if !(tau > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("need tau > 0 and dt > 0 (tau {tau}, dt {dt})")));
    }
    let steps = (tau / dt).ceil() as usize;
    let dt = tau / steps as f64;
    let psi0 = psi0.to_position();
    let results = map_ordered(clock.levels(), options.execution, |level| -> Result<Channel> {
        let spec = StepPotentialSpec { v: lambda * level.epsilon, region, mass };
        let ev = evolve_step_potential(&psi0, &spec, dt, steps, steps)?;
        let psi = ev.final_state().clone();
        let remaining = probability_in_region(&psi, &region)?;
        Ok(Channel {
            epsilon: level.epsilon,
            weight: level.weight,
            clock_state: level.state.clone(),
            psi,
            norm_drift: ev.norm_drift,
            remaining,
        })
    });
    let channels = results.into_iter().collect::<Result<Vec<_>>>()?;
    let worst = channels.iter().map(|c| c.remaining).fold(0.0, f64::max);
    if worst > EXIT_LIMIT {
        match options.exit {
            ExitPolicy::Fatal => return Err(Error::RegionExit { prob: worst, limit: EXIT_LIMIT }),
            ExitPolicy::Warn => log::warn!(
                "channel probability {worst:.3e} remains inside the region at tau = {tau}; reading out anyway"
            ),
        }
    }
    Ok(CompositeState { channels, clock_grid: *clock.grid(), elapsed: tau, steps, region })
}

/// Which particle positions contribute to the pointer readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    All,
    /// Only the part of the particle that has left the region (`1 - chi(x)` weighting).
    Exited,
}

/// `Pi(y) = int dx w(x) |sum_eps <eps|phi_0> <y|eps> psi_eps(x)|^2`.
pub fn pointer_distribution(state: &CompositeState, readout: Readout, mode: Execution) -> Result<Distribution> {
    let first = state
        .channels
        .first()
        .ok_or_else(|| Error::InvalidParameter("composite state has no channels".into()))?;
    let grid = *first.psi.grid();
    let ny = state.clock_grid.len();
    for c in &state.channels {
        if *c.psi.grid() != grid || c.clock_state.len() != ny {
            return Err(Error::GridMismatch("channels live on different grids".into()));
        }
    }
    let dx = grid.dx();
    let nk = state.channels.len();
    // Rows of c_eps psi_eps(x) for the points that can contribute.
    let mut rows: Vec<(f64, Vec<Complex64>)> = Vec::new();
    for (j, x) in grid.points().enumerate() {
        let w = match readout {
            Readout::All => 1.0,
            Readout::Exited => 1.0 - state.region.chi(x, dx),
        };
        if w == 0.0 {
            continue;
        }
        let row: Vec<Complex64> = state.channels.iter().map(|c| c.weight * c.psi.amplitudes()[j]).collect();
        if row.iter().all(|a| a.norm_sqr() < 1e-300) {
            continue;
        }
        rows.push((w * dx, row));
    }
    let columns: Vec<Vec<Complex64>> =
        (0..ny).map(|j| state.channels.iter().map(|c| c.clock_state[j]).collect()).collect();
    let density = map_range(ny, mode, |j| {
        let u = &columns[j];
        let mut acc = 0.0;
        for (w, row) in &rows {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..nk {
                s += row[k] * u[k];
            }
            acc += w * s.norm_sqr();
        }
        acc
    });
    Distribution::new(Axis::PointerY, Lattice::from_grid(&state.clock_grid), density)
}
