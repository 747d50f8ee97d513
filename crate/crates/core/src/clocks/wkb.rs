use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::model::{ClockKind, ClockModel};
use crate::error::{Error, Result};
use crate::quadrature::CompositeGauss;

/// `U(y) = sum_k c_k y^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Phase {
    /// `S = eps y`, exact for `H_c = p_y`.
    Linear,
    Action { mu: f64, potential: Polynomial },
}

/// `<y|eps> ~ C(y, eps) exp(i S(y, eps))` on the classically allowed interval containing `y = 0`.
#[derive(Debug, Clone)]
pub struct WkbEigenstate {
    epsilon: f64,
    phase: Phase,
    /// Allowed interval; infinite ends are open (no turning point within the clock grid).
    lower: f64,
    upper: f64,
    /// `C^2 = amp_scale (2 mu (eps - U))^{-1/2}`.
    amp_scale: f64,
    gauss: CompositeGauss,
}

const GAUSS_ORDER: usize = 24;
const PANEL_WIDTH: f64 = 0.5;

fn bisect(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
        if (b - a).abs() < 1e-15 * (1.0 + b.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Build the WKB eigenstate of `clock` at energy `epsilon`. The action is measured from the
/// reference point `y = 0`, which must be classically allowed.
pub fn wkb_eigenstate(clock: &ClockModel, epsilon: f64) -> Result<WkbEigenstate> {
    let (mu, potential) = match clock.kind() {
        ClockKind::LinearMomentum => {
            return Ok(WkbEigenstate {
                epsilon,
                phase: Phase::Linear,
                lower: f64::NEG_INFINITY,
                upper: f64::INFINITY,
                amp_scale: 1.0 / (2.0 * PI),
                gauss: CompositeGauss::new(GAUSS_ORDER),
            })
        }
        ClockKind::FreeParticle { mu } => (*mu, Polynomial::zero()),
        ClockKind::PotentialWell { mu, potential } => (*mu, potential.clone()),
    };
    let grid = clock.grid();
    WkbEigenstate::new(mu, potential, epsilon, grid.x_min(), grid.x_max())
}

impl WkbEigenstate {
    /// Semiclassical eigenstate of `p^2 / 2 mu + U` searched for turning points within `[y_min, y_max]`.
    pub fn new(mu: f64, potential: Polynomial, epsilon: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let excess = |y: f64| epsilon - potential.eval(y);
        let n_scan = 4096;
        let h = (y_max - y_min) / n_scan as f64;
        let u_min = (0..=n_scan).map(|i| potential.eval(y_min + i as f64 * h)).fold(f64::INFINITY, f64::min);
        if epsilon <= u_min {
            return Err(Error::BelowPotential(epsilon));
        }
        if excess(0.0) <= 0.0 {
            return Err(Error::Forbidden(0.0));
        }
        let scan = |dir: f64, limit: f64| {
            let steps = ((limit.abs() / h).ceil() as usize).max(1);
            let step = limit.abs() / steps as f64;
            let mut prev = 0.0;
            for i in 1..=steps {
                let y = dir * step * i as f64;
                if excess(y) <= 0.0 {
                    return bisect(prev, y, excess);
                }
                prev = y;
            }
            dir * f64::INFINITY
        };
        let lower = scan(-1.0, y_min.min(0.0));
        let upper = scan(1.0, y_max.max(0.0));
        let gauss = CompositeGauss::new(GAUSS_ORDER);
        let amp_scale = if lower.is_finite() && upper.is_finite() {
            // int dy / p over the allowed interval, with y = mid - half cos(theta) removing
            // the inverse square-root endpoint singularities.
            let (mid, half) = (0.5 * (upper + lower), 0.5 * (upper - lower));
            let total = gauss.integrate(0.0, PI, 16, |th| {
                let y = mid - half * th.cos();
                let k = (2.0 * mu * excess(y)).max(0.0).sqrt();
                if k > 0.0 {
                    half * th.sin() / k
                } else {
                    // Limit at a simple turning point: sin(theta) / p stays finite.
                    0.0
                }
            });
            1.0 / total
        } else {
            // Energy normalization, <eps|eps'> = delta(eps - eps').
            mu / (2.0 * PI)
        };
        Ok(Self { epsilon, phase: Phase::Action { mu, potential }, lower, upper, amp_scale, gauss })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn turning_points(&self) -> Vec<f64> {
        [self.lower, self.upper].into_iter().filter(|y| y.is_finite()).collect()
    }

    fn local_momentum(&self, y: f64, eps: f64) -> f64 {
        match &self.phase {
            Phase::Linear => eps,
            Phase::Action { mu, potential } => (2.0 * mu * (eps - potential.eval(y))).max(0.0).sqrt(),
        }
    }

    fn check(&self, y: f64) -> Result<()> {
        if !(y > self.lower && y < self.upper) {
            return Err(Error::Forbidden(y));
        }
        Ok(())
    }

    fn action_at(&self, y: f64, eps: f64) -> f64 {
        match &self.phase {
            Phase::Linear => eps * y,
            Phase::Action { potential, .. } if potential.coefficients().iter().all(|c| *c == 0.0) => {
                self.local_momentum(0.0, eps) * y
            }
            Phase::Action { .. } => {
                let panels = ((y.abs() / PANEL_WIDTH).ceil() as usize).max(1);
                self.gauss.integrate(0.0, y, panels, |s| self.local_momentum(s, eps))
            }
        }
    }

    /// `S(y, eps) = int_0^y sqrt(2 mu (eps - U)) dy'`.
    pub fn action(&self, y: f64) -> Result<f64> {
        self.check(y)?;
        Ok(self.action_at(y, self.epsilon))
    }

    /// `C(y, eps)`.
    pub fn amplitude(&self, y: f64) -> Result<f64> {
        self.check(y)?;
        let c2 = match &self.phase {
            Phase::Linear => self.amp_scale,
            Phase::Action { .. } => self.amp_scale / self.local_momentum(y, self.epsilon),
        };
        Ok(c2.sqrt())
    }

    /// Standing-wave density `2 C^2 cos^2(S(y) - S(y_L) - pi/4)` of a bound level; for open
    /// motion, `C^2`.
    pub fn density(&self, y: f64) -> Result<f64> {
        let c = self.amplitude(y)?;
        if !self.lower.is_finite() || !self.upper.is_finite() {
            return Ok(c * c);
        }
        let s = self.action(y)? - self.action_from_lower_turning_point();
        Ok(2.0 * c * c * (s - PI / 4.0).cos().powi(2))
    }

    /// `S(y_L)`, with `y = y_L + u^2` smoothing the square-root endpoint.
    fn action_from_lower_turning_point(&self) -> f64 {
        let span = -self.lower;
        let root = span.sqrt();
        -self.gauss.integrate(0.0, root, 16, |u| 2.0 * u * self.local_momentum(self.lower + u * u, self.epsilon))
    }

    /// `dS/d eps` by central difference with the relative step `1e-4 eps`.
    pub fn d_action_d_energy(&self, y: f64) -> Result<f64> {
        self.check(y)?;
        let d = 1e-4 * self.epsilon.abs();
        if !(d > f64::EPSILON * self.epsilon.abs().max(1.0) * 16.0) {
            return Err(Error::StepUnderflow(y));
        }
        if let Phase::Action { mu, potential } = &self.phase {
            if 2.0 * mu * (self.epsilon - d - potential.eval(y)) <= 0.0 {
                return Err(Error::StepUnderflow(y));
            }
        }
        Ok((self.action_at(y, self.epsilon + d) - self.action_at(y, self.epsilon - d)) / (2.0 * d))
    }
}

/// Pointer-to-time map `t = (1/lambda) dS/d eps`.
pub fn hj_time_map(wkb: &WkbEigenstate, lambda: f64, y: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::InvalidParameter("lambda must be nonzero".into()));
    }
    Ok(wkb.d_action_d_energy(y)? / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clocks::{sinc_dvr_eigensystem, ClockSpec};
    use crate::lattice::Grid;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn harmonic(eps: f64) -> WkbEigenstate {
        WkbEigenstate::new(1.0, Polynomial::new(vec![0.0, 0.0, 0.5]), eps, -12.0, 12.0).unwrap()
    }

    #[test]
    fn free_action_is_linear() {
        let w = WkbEigenstate::new(2.0, Polynomial::zero(), 3.0, -10.0, 10.0).unwrap();
        let k = (2.0f64 * 2.0 * 3.0).sqrt();
        assert_relative_eq!(w.action(4.2).unwrap(), k * 4.2, max_relative = 1e-14);
        assert_relative_eq!(w.amplitude(1.0).unwrap(), w.amplitude(-7.0).unwrap(), max_relative = 1e-14);
        assert!(w.turning_points().is_empty());
        let t = hj_time_map(&w, 0.5, 4.2).unwrap();
        assert_relative_eq!(t, (4.2 / 0.5) * (2.0f64 / (2.0 * 3.0)).sqrt(), max_relative = 1e-7);
    }

    #[test]
    fn linear_clock_phase_and_time_map() {
        let grid = Grid::new(-32.0, 32.0, 256).unwrap();
        let c = ClockModel::build(&ClockSpec::LinearMomentum { eps0: 2.0, sigma_eps: 0.5, y0: 0.0 }, grid).unwrap();
        let w = wkb_eigenstate(&c, 2.0).unwrap();
        assert_eq!(w.action(3.0).unwrap(), 6.0);
        assert_relative_eq!(hj_time_map(&w, 0.25, 3.0).unwrap(), 12.0, max_relative = 1e-10);
    }

    #[test]
    fn harmonic_time_map_matches_closed_form() {
        let eps = 20.0;
        let w = harmonic(eps);
        let tp = w.turning_points();
        assert_eq!(tp.len(), 2);
        assert_relative_eq!(tp[1], (2.0 * eps).sqrt(), max_relative = 1e-12);
        for y in [-4.0, -1.0, 0.5, 2.0, 5.0] {
            let exact = (y / (2.0 * eps).sqrt()).asin();
            let t = hj_time_map(&w, 1.0, y).unwrap();
            assert_relative_eq!(t, exact, max_relative = 1e-4);
        }
        assert!(matches!(w.action(7.0), Err(Error::Forbidden(_))));
        assert!(matches!(
            WkbEigenstate::new(1.0, Polynomial::new(vec![1.0, 0.0, 0.5]), 0.5, -5.0, 5.0),
            Err(Error::BelowPotential(_))
        ));
    }

    #[test]
    fn harmonic_densities_approach_exact_levels() {
        let g = Grid::new(-14.0, 14.0, 512).unwrap();
        let levels = sinc_dvr_eigensystem(&g, 1.0, |y| 0.5 * y * y);
        let mut errors = Vec::new();
        for n in [10usize, 20, 40] {
            let (eps, v) = &levels[n];
            let w = harmonic(*eps);
            let yt = w.turning_points()[1];
            let (mut num, mut den) = (0.0, 0.0);
            for (j, y) in g.points().enumerate() {
                if y.abs() > 0.8 * yt {
                    continue;
                }
                let exact = v[j] * v[j];
                let d = w.density(y).unwrap() - exact;
                num += d * d;
                den += exact * exact;
            }
            errors.push((num / den).sqrt());
        }
        assert!(errors[2] < errors[1] && errors[1] < errors[0], "{errors:?}");
        assert!(errors[0] < 0.05, "{errors:?}");
    }

    #[test]
    fn bound_amplitude_is_normalized() {
        let w = harmonic(10.5);
        let tp = w.turning_points();
        let g = CompositeGauss::new(24);
        let (a, b) = (tp[0], tp[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let total = g.integrate(1e-9, PI - 1e-9, 32, |th| {
            let y = mid - half * th.cos();
            w.amplitude(y).map(|c| c * c * half * th.sin()).unwrap_or(0.0)
        });
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
    }
}
