use super::{Axis, Distribution, Lattice};
use crate::clocks::ClockModel;
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::lattice::WaveFunction;

/// Largest momentum mass tolerated below the low-momentum floor.
pub const LOW_MOMENTUM_LIMIT: f64 = 1e-8;
/// Floor as a fraction of the rms momentum.
const FLOOR_FRACTION: f64 = 0.1;
/// Momentum samples below this fraction of the peak density are dropped.
const SUPPORT_CUT: f64 = 1e-16;

struct MomentumSupport {
    /// `(p_k, |psi~(p_k)|^2 dp)` for the retained lattice momenta.
    samples: Vec<(f64, f64)>,
    p_floor: f64,
}

fn momentum_support(psi0: &WaveFunction) -> Result<MomentumSupport> {
    let m = psi0.to_momentum();
    let grid = *psi0.grid();
    let dp = grid.dp();
    let dens = m.density();
    let peak = dens.iter().cloned().fold(0.0, f64::max);
    let total: f64 = dens.iter().sum::<f64>() * dp;
    let second: f64 = dens.iter().enumerate().map(|(k, d)| grid.momentum(k).powi(2) * d).sum::<f64>() * dp / total;
    let p_floor = FLOOR_FRACTION * second.sqrt();
    let low: f64 = dens
        .iter()
        .enumerate()
        .filter(|(k, _)| grid.momentum(*k).abs() < p_floor)
        .map(|(_, d)| d * dp)
        .sum::<f64>()
        / total;
    if low > LOW_MOMENTUM_LIMIT {
        return Err(Error::LowMomentumMass { mass: low, p_floor, limit: LOW_MOMENTUM_LIMIT });
    }
    let samples = dens
        .iter()
        .enumerate()
        .filter(|(k, d)| **d > SUPPORT_CUT * peak && grid.momentum(*k).abs() >= p_floor)
        .map(|(k, d)| (grid.momentum(k), d * dp))
        .collect();
    Ok(MomentumSupport { samples, p_floor })
}

/// Time lattice covering `t = 2 m L / |p|` over the momentum support of `psi0`.
pub fn dwell_time_lattice(psi0: &WaveFunction, half_width: f64, m: f64, len: usize) -> Result<Lattice> {
    let sup = momentum_support(psi0)?;
    let (lo, hi) = sup
        .samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (p, _)| (lo.min(p.abs()), hi.max(p.abs())));
    if !(hi > 0.0) {
        return Err(Error::NoMass(0.0));
    }
    let lo = lo.max(sup.p_floor);
    let c = 2.0 * m * half_width;
    Lattice::spanning(c / hi, c / lo, len)
}

/// `Pi(t) = (2mL/t^2)(|psi~(2mL/t)|^2 + |psi~(-2mL/t)|^2)`, the semiclassical dwell-time density.
pub fn dwell_semiclassical(psi0: &WaveFunction, half_width: f64, m: f64, times: &Lattice) -> Result<Distribution> {
    momentum_support(psi0)?;
    if !(times.origin > 0.0) {
        return Err(Error::InvalidParameter("dwell times must be positive".into()));
    }
    let psi = psi0.to_position();
    let c = 2.0 * m * half_width;
    let density = times
        .coordinates()
        .into_iter()
        .map(|t| {
            let p = c / t;
            let a = psi.momentum_amplitude_at(p)?.norm_sqr();
            let b = psi.momentum_amplitude_at(-p)?.norm_sqr();
            Ok(c / (t * t) * (a + b))
        })
        .collect::<Result<Vec<_>>>()?;
    Distribution::new(Axis::TimeT, *times, density)
}

/// `Pi(y) = int dp |psi~_0(p)|^2 |Phi(y, 2Lm/|p|)|^2` on the clock grid, normalized.
pub fn weak_dwell_prediction(
    psi0: &WaveFunction,
    clock: &ClockModel,
    lambda: f64,
    half_width: f64,
    m: f64,
    mode: Execution,
) -> Result<Distribution> {
    let sup = momentum_support(psi0)?;
    let c = 2.0 * m * half_width;
    let rows = map_range(sup.samples.len(), mode, |i| {
        let (p, w) = sup.samples[i];
        let mut d = clock.response(lambda, c / p.abs()).density();
        d.iter_mut().for_each(|v| *v *= w);
        d
    });
    let mut density = vec![0.0; clock.grid().len()];
    for row in &rows {
        density.iter_mut().zip(row).for_each(|(a, b)| *a += b);
    }
    Distribution::new(Axis::PointerY, Lattice::from_grid(clock.grid()), density)?.normalized()
}
