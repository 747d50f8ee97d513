use std::f64::consts::PI;

use num_complex::Complex64;

use super::propagators::sqrt_i;
use crate::error::{Error, Result};
use crate::quadrature::{extrapolate_to_zero, CompositeGauss};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Damping rates in units of the characteristic time, extrapolated to zero.
const DAMPING: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
const DAMPED_LENGTH: f64 = 40.0;

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// `int_0^inf ds <x| e^{-i H0 s} p |0> e^{iEs} = m sgn(x) e^{i |x| sqrt(2mE)}`, with the
/// value `m` returned at `x = 0`.
pub fn scattering_integral(x: f64, e: f64, m: f64) -> Result<Complex64> {
    positive("energy", e)?;
    positive("mass", m)?;
    let k = (2.0 * m * e).sqrt();
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    Ok(Complex64::from_polar(m * sign, k * x.abs()))
}

/// Direct quadrature of the defining `s` integral with `e^{-eta s}` damping, extrapolated
/// to `eta = 0`. The short-time part is integrated in `u = 1/s`, where the integrand
/// oscillates with a bounded rate.
pub fn scattering_integral_oracle(x: f64, e: f64, m: f64) -> Result<Complex64> {
    positive("energy", e)?;
    positive("mass", m)?;
    if x == 0.0 {
        return Err(Error::InvalidParameter("the oracle needs x != 0".into()));
    }
    let k = (2.0 * m * e).sqrt();
    let tc = (1.0 / e).max(m * x.abs() / k);
    let a = m * x * x / 2.0;
    let pref = (m / (2.0 * PI)).sqrt() / sqrt_i() * (m * x);
    let rule = CompositeGauss::new(16);
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for d in DAMPING {
        let eta = d / tc;
        let long = {
            let end = tc + DAMPED_LENGTH / eta;
            let omega = e + a / (tc * tc);
            let panels = ((end - tc) * omega / 2.0).ceil() as usize;
            rule.integrate_complex(tc, end, panels, |s| {
                pref * s.powf(-1.5) * Complex64::from_polar((-eta * s).exp(), a / s + e * s)
            })
        };
        let short = {
            let u1 = 1.0 / tc;
            let eta_u = eta * tc * tc;
            let end = u1 + DAMPED_LENGTH / eta_u;
            let omega = a.max(e * tc * tc);
            let panels = ((end - u1) * omega / 2.0).ceil() as usize;
            rule.integrate_complex(u1, end, panels, |u| {
                pref * u.powf(-0.5) * Complex64::from_polar((-eta_u * (u - u1)).exp(), a * u + e / u)
            })
        };
        nodes.push(d);
        values.push(long + short);
    }
    Ok(extrapolate_to_zero(&nodes, &values))
}

/// Closed form `sqrt(2m / V) e^{-i x sqrt(2m (E + V))}` for the transform of the
/// propagator under `H0 - V theta(-x)` at `x < 0`, leading order in `E / V`.
pub fn strong_coupling_wall_integral(x: f64, e: f64, v: f64, m: f64) -> Result<Complex64> {
    positive("energy", e)?;
    positive("wall strength", v)?;
    positive("mass", m)?;
    let q = (2.0 * m * (e + v)).sqrt();
    Ok(Complex64::from_polar((2.0 * m / v).sqrt(), -q * x))
}

/// Exact `int_0^inf dt <x| e^{-i (H0 - V theta(-x)) t} |0> e^{iEt}`:
/// `2m / (k + q) e^{-iqx}` for `x < 0` and `2m / (k + q) e^{ikx}` for `x >= 0`.
pub fn step_resolvent_integral(x: f64, e: f64, v: f64, m: f64) -> Result<Complex64> {
    positive("energy", e)?;
    positive("mass", m)?;
    if e + v <= 0.0 {
        return Err(Error::BelowPotential(e));
    }
    let k = (2.0 * m * e).sqrt();
    let q = (2.0 * m * (e + v)).sqrt();
    let phase = if x < 0.0 { -q * x } else { k * x };
    Ok(Complex64::from_polar(2.0 * m / (k + q), phase))
}

/// Damped transform `int_0^inf dt e^{-eta t} <x|e^{-iHt}|0> e^{iEt} = i G(x, 0; E + i eta)`
/// evaluated by integrating the Green's function ODE through the step, extrapolated to
/// `eta = 0`. Requires `x < 0`.
pub fn wall_integral_oracle(x: f64, e: f64, v: f64, m: f64) -> Result<Complex64> {
    positive("energy", e)?;
    positive("mass", m)?;
    if x >= 0.0 {
        return Err(Error::InvalidParameter(format!("the wall oracle needs x < 0, got {x}")));
    }
    if e + v <= 0.0 {
        return Err(Error::BelowPotential(e));
    }
    let q_real = (2.0 * m * (e + v)).sqrt();
    let tc = (1.0 / e).max(m * x.abs() / q_real);
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for d in DAMPING {
        let z = Complex64::new(e, d / tc);
        let k = (2.0 * m * z).sqrt();
        let q = (2.0 * m * (z + v)).sqrt();
        // Outgoing solution on the right, started inside the homogeneous region.
        let start = 1.0;
        let mut state = [(I * k * start).exp(), I * k * (I * k * start).exp()];
        state = rk4(state, start, 0.0, |_| -2.0 * m * z, q_real.max(k.norm()));
        let u_r0 = state[0];
        state = rk4(state, 0.0, x, |_| -2.0 * m * (z + v), q_real);
        let ul = (-I * q * x).exp();
        let dul = -I * q * ul;
        let w = ul * state[1] - dul * state[0];
        let g = 2.0 * m * ul * u_r0 / w;
        nodes.push(d);
        values.push(I * g);
    }
    Ok(extrapolate_to_zero(&nodes, &values))
}

/// Integrate `psi'' = c(x) psi` from `a` to `b`.
fn rk4(mut y: [Complex64; 2], a: f64, b: f64, c: impl Fn(f64) -> Complex64, rate: f64) -> [Complex64; 2] {
    let n = (((b - a).abs() * rate) / 0.002).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let f = |x: f64, y: [Complex64; 2]| [y[1], c(x) * y[0]];
    for i in 0..n {
        let x = a + i as f64 * h;
        let k1 = f(x, y);
        let k2 = f(x + h / 2.0, [y[0] + k1[0] * (h / 2.0), y[1] + k1[1] * (h / 2.0)]);
        let k3 = f(x + h / 2.0, [y[0] + k2[0] * (h / 2.0), y[1] + k2[1] * (h / 2.0)]);
        let k4 = f(x + h, [y[0] + k3[0] * h, y[1] + k3[1] * h]);
        for j in 0..2 {
            y[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
    }
    y
}
