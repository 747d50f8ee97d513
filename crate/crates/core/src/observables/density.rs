use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::{Representation, WaveFunction};

fn origin_values(psi: &WaveFunction) -> Result<(Complex64, Complex64)> {
    match psi.representation() {
        Representation::Momentum => psi.interpolate(0.0),
        Representation::Position => psi.to_momentum().interpolate(0.0),
    }
}

/// `J = (i/2m)(psi* psi' - psi'* psi)` at `x = 0`, by band-limited interpolation.
/// Positive for flux towards negative `x`.
pub fn current_at_origin(psi: &WaveFunction, m: f64) -> Result<f64> {
    let (v, d) = origin_values(psi)?;
    Ok(-(v.conj() * d).im / m)
}

/// `|(p psi)(0)|^2 = <psi| p delta(x) p |psi>`.
pub fn kinetic_energy_density_at_origin(psi: &WaveFunction) -> Result<f64> {
    let (_, d) = origin_values(psi)?;
    Ok(d.norm_sqr())
}

/// Current and kinetic-energy density together, sharing one interpolation.
pub(crate) fn origin_observables(psi: &WaveFunction, m: f64) -> Result<(f64, f64)> {
    let (v, d) = origin_values(psi)?;
    Ok((-(v.conj() * d).im / m, d.norm_sqr()))
}
