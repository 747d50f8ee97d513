use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Grid, WaveFunction};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Branch used everywhere for `sqrt(i)`.
pub fn sqrt_i() -> Complex64 {
    Complex64::from_polar(1.0, PI / 4.0)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("propagation time must be positive, got {tau}")));
    }
    Ok(())
}

/// `g_f(x_to, tau | x_from, 0) = (m / 2 pi i tau)^{1/2} exp(i m (x_to - x_from)^2 / 2 tau)`.
pub fn free_propagator(x_to: f64, tau: f64, x_from: f64, m: f64) -> Result<Complex64> {
    check_tau(tau)?;
    let d = x_to - x_from;
    Ok((m / (2.0 * PI * tau)).sqrt() / sqrt_i() * Complex64::from_polar(1.0, m * d * d / (2.0 * tau)))
}

/// `d g_f / d x_to`.
pub fn free_propagator_dx(x_to: f64, tau: f64, x_from: f64, m: f64) -> Result<Complex64> {
    Ok(free_propagator(x_to, tau, x_from, m)? * I * (m * (x_to - x_from) / tau))
}

/// Dirichlet (image) propagator in `x > 0` under the constant potential `V`, phase `e^{-iV tau}`.
pub fn restricted_propagator_image(x_to: f64, tau: f64, x_from: f64, v: f64, m: f64) -> Result<Complex64> {
    check_tau(tau)?;
    if x_to <= 0.0 || x_from <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = free_propagator(x_to, tau, x_from, m)? - free_propagator(-x_to, tau, x_from, m)?;
    Ok(g * Complex64::from_polar(1.0, -v * tau))
}

/// `d g_r / dx` at `x = 0^+`, which equals `2 d g_f / dx |_0 e^{-iV tau}`.
pub fn restricted_derivative_at_origin(tau: f64, x_from: f64, v: f64, m: f64) -> Result<Complex64> {
    if x_from <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(2.0 * free_propagator_dx(0.0, tau, x_from, m)? * Complex64::from_polar(1.0, -v * tau))
}

/// `A exp(-alpha (x - c)^2 + i k (x - c))`, with closed-form free evolution.
///
/// Evolution to a complex time `t - i s^2 m` equals evolution to `t` followed by Gaussian
/// smearing of width `s`, so regularized propagators come out of the same formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub alpha: f64,
    pub k: f64,
    pub amplitude: Complex64,
}

impl GaussianPacket {
    /// Unit-integral Gaussian of standard deviation `sigma` standing in for `delta(x - x0)`.
    pub fn point_source(x0: f64, sigma: f64) -> Self {
        Self {
            center: x0,
            alpha: 1.0 / (2.0 * sigma * sigma),
            k: 0.0,
            amplitude: Complex64::new(1.0 / ((2.0 * PI).sqrt() * sigma), 0.0),
        }
    }

    /// Normalized state `exp(-(x - x0)^2 / 4 sigma^2 + i p0 (x - x0))`.
    pub fn wave_packet(x0: f64, p0: f64, sigma: f64) -> Self {
        Self {
            center: x0,
            alpha: 1.0 / (4.0 * sigma * sigma),
            k: p0,
            amplitude: Complex64::new((2.0 * PI * sigma * sigma).powf(-0.25), 0.0),
        }
    }

    /// Width of the position density.
    pub fn sigma(&self) -> f64 {
        (1.0 / (4.0 * self.alpha)).sqrt()
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let d = x - self.center;
        self.amplitude * (Complex64::new(-self.alpha * d * d, self.k * d)).exp()
    }

    /// Free evolution to (possibly complex) time `t`, with its `x` derivative.
    pub fn evolve(&self, x: f64, t: Complex64, m: f64) -> (Complex64, Complex64) {
        let d = x - self.center;
        let den = 1.0 + 2.0 * I * self.alpha * t / m;
        let expo = (Complex64::new(-self.alpha * d * d, self.k * d) - I * self.k * self.k * t / (2.0 * m)) / den;
        let v = self.amplitude / den.sqrt() * expo.exp();
        let dv = v * (Complex64::new(-2.0 * self.alpha * d, self.k)) / den;
        (v, dv)
    }

    pub fn sample(&self, grid: &Grid) -> WaveFunction {
        WaveFunction::from_fn(*grid, |x| self.value(x))
    }
}
