use serde::Serialize;

use super::Distribution;
use crate::error::Result;

/// Union-support cut, relative to each density's own peak.
pub const SUPPORT_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub l2_relative: f64,
    pub sup_relative: f64,
    pub mass_simulated: f64,
    pub mass_predicted: f64,
}

/// Compare a prediction with a simulated distribution on the simulation's lattice.
///
/// The prediction is linearly resampled. Both norms run over the points where either
/// density exceeds [`SUPPORT_FRACTION`] of its peak.
pub fn compare(simulated: &Distribution, predicted: &Distribution) -> Result<Comparison> {
    let pred = predicted.resampled(simulated.lattice())?;
    let s = simulated.density();
    let p = pred.density();
    let ps = simulated.peak().abs();
    let pp = pred.peak().abs();
    let (mut num, mut den, mut sup) = (0.0f64, 0.0f64, 0.0f64);
    for (a, b) in s.iter().zip(p) {
        if a.abs() > SUPPORT_FRACTION * ps || b.abs() > SUPPORT_FRACTION * pp {
            num += (a - b).powi(2);
            den += a * a;
            sup = sup.max((a - b).abs());
        }
    }
    Ok(Comparison {
        l2_relative: if den > 0.0 { (num / den).sqrt() } else { f64::INFINITY },
        sup_relative: if ps > 0.0 { sup / ps } else { f64::INFINITY },
        mass_simulated: simulated.raw_mass(),
        mass_predicted: predicted.raw_mass(),
    })
}
