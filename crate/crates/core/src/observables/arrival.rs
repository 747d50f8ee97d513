use super::density::origin_observables;
use super::{Axis, Distribution, Lattice};
use crate::clocks::{hj_time_map, ClockModel, WkbEigenstate};
use crate::dynamics::free_in_momentum;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, map_range, Execution};
use crate::lattice::WaveFunction;

/// Minimum share of `int J dt` a prediction window must contain.
pub const WINDOW_MASS: f64 = 0.999;
/// Allowed deviation from unit mass of the normalized kinetic-energy density.
pub const STRONG_MASS_TOLERANCE: f64 = 0.02;

/// Current and kinetic-energy density at the origin on a uniform time lattice.
#[derive(Debug, Clone)]
pub struct ArrivalSeries {
    pub times: Lattice,
    pub current: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub mass: f64,
}

impl ArrivalSeries {
    /// From snapshots taken at `t0 + i dt`.
    pub fn from_snapshots(snapshots: &[WaveFunction], t0: f64, dt: f64, mass: f64, mode: Execution) -> Result<Self> {
        let times = Lattice::new(t0, dt, snapshots.len())?;
        let values = map_ordered(snapshots, mode, |s| origin_observables(s, mass));
        Self::collect(times, values, mass)
    }

    /// Exact free evolution of `psi0` sampled on `times`.
    pub fn free(psi0: &WaveFunction, mass: f64, times: Lattice, mode: Execution) -> Result<Self> {
        let psi_p = psi0.to_momentum();
        let values = map_range(times.len, mode, |i| origin_observables(&free_in_momentum(&psi_p, mass, times.coordinate(i)), mass));
        Self::collect(times, values, mass)
    }

    fn collect(times: Lattice, values: Vec<Result<(f64, f64)>>, mass: f64) -> Result<Self> {
        let (current, kinetic) = values.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
        Ok(Self { times, current, kinetic, mass })
    }

    /// `J(t)`, signed.
    pub fn current_distribution(&self) -> Result<Distribution> {
        Distribution::quasi(Axis::TimeT, self.times, self.current.clone())
    }

    pub fn kinetic_distribution(&self) -> Result<Distribution> {
        Distribution::new(Axis::TimeT, self.times, self.kinetic.clone())
    }

    /// `int J dt` over the window.
    pub fn current_mass(&self) -> f64 {
        crate::quadrature::trapezoid(&self.current, self.times.step)
    }

    pub fn min_current(&self) -> f64 {
        self.current.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// `Pi_N(t) = |(p psi_t)(0)|^2 / (m |<p>|)`.
pub fn normalized_strong_arrival(series: &ArrivalSeries, mean_p: f64) -> Result<Distribution> {
    if mean_p.abs() < 1e-12 {
        return Err(Error::ZeroMomentum(mean_p));
    }
    let s = 1.0 / (series.mass * mean_p.abs());
    let d = Distribution::new(Axis::TimeT, series.times, series.kinetic.iter().map(|k| k * s).collect())?;
    let m = d.mass();
    if (m - 1.0).abs() > STRONG_MASS_TOLERANCE {
        return Err(Error::WindowDeficit { mass: m });
    }
    Ok(d)
}

/// `Pi(y) = int dt |Phi(y, t)|^2 J(t)` on the clock grid, normalized.
pub fn weak_arrival_prediction(series: &ArrivalSeries, clock: &ClockModel, lambda: f64, mode: Execution) -> Result<Distribution> {
    let window = series.current_mass();
    if window < WINDOW_MASS {
        return Err(Error::WindowDeficit { mass: window });
    }
    let times = series.times.coordinates();
    let kernel = clock.response_densities(lambda, &times, mode);
    let w = series.times.weights();
    let ny = clock.grid().len();
    let mut density = vec![0.0; ny];
    for ((row, wi), j) in kernel.iter().zip(&w).zip(&series.current) {
        let c = wi * j;
        density.iter_mut().zip(row).for_each(|(d, r)| *d += c * r);
    }
    let lattice = Lattice::from_grid(clock.grid());
    let dist = if density.iter().any(|d| *d < 0.0) {
        Distribution::quasi(Axis::PointerY, lattice, density)?
    } else {
        Distribution::new(Axis::PointerY, lattice, density)?
    };
    dist.normalized()
}

/// Pointer-to-time map used by the strong-coupling prediction.
#[derive(Debug, Clone)]
pub enum TimeMap {
    /// `t = y / lambda`, exact for `H_c = p_y`.
    Linear { lambda: f64 },
    /// `t = (1/lambda) dS/d eps` at the clock's mean energy.
    HamiltonJacobi { wkb: WkbEigenstate, lambda: f64 },
}

impl TimeMap {
    /// `(t(y), dt/dy)`, or `None` where the map is undefined.
    pub fn eval(&self, y: f64, h: f64) -> Option<(f64, f64)> {
        match self {
            TimeMap::Linear { lambda } => Some((y / lambda, 1.0 / lambda)),
            TimeMap::HamiltonJacobi { wkb, lambda } => {
                let t = hj_time_map(wkb, *lambda, y).ok()?;
                let tp = hj_time_map(wkb, *lambda, y + h).ok()?;
                let tm = hj_time_map(wkb, *lambda, y - h).ok()?;
                Some((t, (tp - tm) / (2.0 * h)))
            }
        }
    }
}

/// Pullback of [`normalized_strong_arrival`] onto the pointer lattice, normalized.
pub fn strong_arrival_prediction(series: &ArrivalSeries, mean_p: f64, map: &TimeMap, pointer: &Lattice) -> Result<Distribution> {
    let pi_t = normalized_strong_arrival(series, mean_p)?;
    let h = 1e-3 * pointer.step;
    let density = pointer
        .coordinates()
        .into_iter()
        .map(|y| match map.eval(y, h) {
            Some((t, jac)) => pi_t.value_at(t) * jac.abs(),
            None => 0.0,
        })
        .collect();
    Distribution::new(Axis::PointerY, *pointer, density)?.normalized()
}
