use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fft_plans, Grid, Region};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Position,
    Momentum,
}

/// Complex amplitudes on a [`Grid`].
///
/// In the momentum representation the amplitudes are samples of the continuum
/// transform `(2 pi)^{-1/2} \int psi(x) e^{-ipx} dx` at the lattice momenta (DFT order),
/// so that `sum |psi(x_j)|^2 dx = sum |psi~(p_k)|^2 dp` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    amps: Vec<Complex64>,
    rep: Representation,
}

impl WaveFunction {
    pub fn new(grid: Grid, amps: Vec<Complex64>, rep: Representation) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a {}-point grid",
                amps.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amps, rep })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let amps = grid.points().map(f).collect();
        Self { grid, amps, rep: Representation::Position }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    fn measure(&self) -> f64 {
        match self.rep {
            Representation::Position => self.grid.dx(),
            Representation::Momentum => self.grid.dp(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.measure()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NoMass(n));
        }
        let s = 1.0 / n.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(self)
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.amps.iter_mut().for_each(|a| *a *= factor);
        self
    }

    /// `self + other` on a common grid and representation.
    pub fn superpose(&self, other: &WaveFunction) -> Result<Self> {
        self.check_compatible(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, amps, rep: self.rep })
    }

    fn check_compatible(&self, other: &WaveFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("states live on different grids".into()));
        }
        if self.rep != other.rep {
            return Err(Error::GridMismatch("states are in different representations".into()));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        self.check_compatible(other)?;
        let s: Complex64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.measure())
    }

    pub fn to_momentum(&self) -> WaveFunction {
        match self.rep {
            Representation::Momentum => self.clone(),
            Representation::Position => transform(self),
        }
    }

    pub fn to_position(&self) -> WaveFunction {
        match self.rep {
            Representation::Position => self.clone(),
            Representation::Momentum => transform(self),
        }
    }

    fn require_position(&self) -> Result<()> {
        if self.rep != Representation::Position {
            return Err(Error::Representation { expected: "position" });
        }
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn mean_position(&self) -> Result<f64> {
        self.require_position()?;
        let dx = self.grid.dx();
        Ok(self
            .grid
            .points()
            .zip(&self.amps)
            .map(|(x, a)| x * a.norm_sqr())
            .sum::<f64>()
            * dx)
    }

    /// `<p>` and `<p^2> - <p>^2` from the momentum lattice.
    pub fn momentum_moments(&self) -> (f64, f64) {
        let m = self.to_momentum();
        let dp = self.grid.dp();
        let norm = m.norm();
        let mut mean = 0.0;
        let mut second = 0.0;
        for (k, a) in m.amps.iter().enumerate() {
            let p = self.grid.momentum(k);
            let w = a.norm_sqr() * dp;
            mean += p * w;
            second += p * p * w;
        }
        mean /= norm;
        second /= norm;
        (mean, second - mean * mean)
    }

    /// Probability within the outer `fraction` of the box on each side.
    pub fn edge_probability(&self, fraction: f64) -> Result<f64> {
        self.require_position()?;
        let band = self.grid.edge_band(fraction);
        let n = self.grid.len();
        let s: f64 = self.amps[..band]
            .iter()
            .chain(&self.amps[n - band..])
            .map(|a| a.norm_sqr())
            .sum();
        Ok(s * self.grid.dx())
    }

    /// Band-limited (trigonometric) interpolation of `psi` and `d psi/dx` at `x`.
    ///
    /// The state must be in the momentum representation; use [`WaveFunction::to_momentum`]
    /// once and call this repeatedly. The Nyquist bin is split symmetrically so the
    /// interpolant is real for real data and passes through every lattice sample.
    pub fn interpolate(&self, x: f64) -> Result<(Complex64, Complex64)> {
        if self.rep != Representation::Momentum {
            return Err(Error::Representation { expected: "momentum" });
        }
        if !(x >= self.grid.x_min() && x <= self.grid.x_max()) {
            return Err(Error::OutsideGrid(x));
        }
        let n = self.grid.len();
        let pref = self.grid.dp() / (2.0 * PI).sqrt();
        let x_min = self.grid.x_min();
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for (k, a) in self.amps.iter().enumerate() {
            let p = self.grid.momentum(k);
            if k == n / 2 {
                let arg = p * (x - x_min);
                let base = a * Complex64::from_polar(1.0, p * x_min);
                value += base * arg.cos();
                deriv += base * (-p * arg.sin());
            } else {
                let e = Complex64::from_polar(1.0, p * x);
                value += a * e;
                deriv += a * e * Complex64::new(0.0, p);
            }
        }
        Ok((value * pref, deriv * pref))
    }

    /// Continuum transform `(2 pi)^{-1/2} sum_j psi(x_j) e^{-i p x_j} dx` at an arbitrary
    /// momentum.
    pub fn momentum_amplitude_at(&self, p: f64) -> Result<Complex64> {
        self.require_position()?;
        let dx = self.grid.dx();
        let step = Complex64::from_polar(1.0, -p * dx);
        let mut phase = Complex64::from_polar(1.0, -p * self.grid.x_min());
        let mut s = Complex64::new(0.0, 0.0);
        for (j, a) in self.amps.iter().enumerate() {
            s += a * phase;
            phase *= step;
            if j % 64 == 63 {
                phase = Complex64::from_polar(1.0, -p * self.grid.x(j + 1));
            }
        }
        Ok(s * dx / (2.0 * PI).sqrt())
    }

    /// Write `x, Re psi, Im psi` rows (position representation).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.require_position()?;
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "x,re,im")?;
        for (x, a) in self.grid.points().zip(&self.amps) {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", x, a.re, a.im)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Unitary change of representation, position <-> momentum.
pub fn transform(psi: &WaveFunction) -> WaveFunction {
    let grid = psi.grid;
    let n = grid.len();
    let plans = fft_plans(n);
    let mut buf = psi.amps.clone();
    let x_min = grid.x_min();
    match psi.rep {
        Representation::Position => {
            plans.forward.process(&mut buf);
            let s = grid.dx() / (2.0 * PI).sqrt();
            for (k, a) in buf.iter_mut().enumerate() {
                *a *= Complex64::from_polar(s, -grid.momentum(k) * x_min);
            }
            WaveFunction { grid, amps: buf, rep: Representation::Momentum }
        }
        Representation::Momentum => {
            for (k, a) in buf.iter_mut().enumerate() {
                *a *= Complex64::from_polar(1.0, grid.momentum(k) * x_min);
            }
            plans.inverse.process(&mut buf);
            let s = (2.0 * PI).sqrt() / (grid.dx() * n as f64);
            buf.iter_mut().for_each(|a| *a *= s);
            WaveFunction { grid, amps: buf, rep: Representation::Position }
        }
    }
}

/// Normalized Gaussian packet `exp(-(x - x0)^2 / 4 sigma^2 + i p0 x)`.
///
/// Position density has standard deviation `sigma`, momentum density `1 / (2 sigma)`.
pub fn gaussian_state(grid: &Grid, x0: f64, p0: f64, sigma: f64) -> Result<WaveFunction> {
    if !grid.contains(x0) {
        return Err(Error::OutsideGrid(x0));
    }
    if !(sigma >= 3.0 * grid.dx()) {
        return Err(Error::Unresolvable(format!(
            "sigma = {sigma} is below 3 dx = {}",
            3.0 * grid.dx()
        )));
    }
    let sigma_p = 1.0 / (2.0 * sigma);
    if p0.abs() + 8.0 * sigma_p >= grid.p_max() {
        return Err(Error::Unresolvable(format!(
            "momentum support |p0| + 8 sigma_p = {} exceeds the lattice limit {}",
            p0.abs() + 8.0 * sigma_p,
            grid.p_max()
        )));
    }
    let density = |x: f64| {
        (-(x - x0).powi(2) / (2.0 * sigma * sigma)).exp() / ((2.0 * PI).sqrt() * sigma)
    };
    let edge = density(grid.x_min()).max(density(grid.x_max()));
    if edge > 1e-10 {
        return Err(Error::TailClipped(edge));
    }
    WaveFunction::from_fn(*grid, |x| {
        Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), p0 * x)
    })
    .normalized()
}

/// `sum chi(x_j) |psi(x_j)|^2 dx`.
pub fn probability_in_region(psi: &WaveFunction, region: &Region) -> Result<f64> {
    psi.require_position()?;
    let dx = psi.grid.dx();
    Ok(psi
        .grid
        .points()
        .zip(&psi.amps)
        .map(|(x, a)| region.chi(x, dx) * a.norm_sqr())
        .sum::<f64>()
        * dx)
}
