use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::quadrature::trapezoid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    PointerY,
    TimeT,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::PointerY => "y",
            Axis::TimeT => "t",
        }
    }
}

/// Uniform sample points `origin + i * step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub origin: f64,
    pub step: f64,
    pub len: usize,
}

impl Lattice {
    pub fn new(origin: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || len < 2 || !origin.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lattice needs step > 0 and at least two points (step {step}, len {len})"
            )));
        }
        Ok(Self { origin, step, len })
    }

    /// `len` points from `start` to `end` inclusive.
    pub fn spanning(start: f64, end: f64, len: usize) -> Result<Self> {
        Self::new(start, (end - start) / (len.max(2) - 1) as f64, len)
    }

    pub fn from_grid(grid: &Grid) -> Self {
        Self { origin: grid.x_min(), step: grid.dx(), len: grid.len() }
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.coordinate(self.len - 1)
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.coordinate(i)).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![self.step; self.len];
        w[0] *= 0.5;
        w[self.len - 1] *= 0.5;
        w
    }
}

/// Sampled density over a pointer or time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    axis: Axis,
    lattice: Lattice,
    density: Vec<f64>,
    quasi: bool,
    raw_mass: f64,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    axis: Axis,
    coordinate: &'a str,
    mass: f64,
    raw_mass: f64,
    quasi: bool,
    lattice: Lattice,
}

impl Distribution {
    /// Nonnegative density. Rounding-level negatives (above `-1e-14` of the peak) are clamped.
    pub fn new(axis: Axis, lattice: Lattice, mut density: Vec<f64>) -> Result<Self> {
        check_len(&lattice, &density)?;
        let peak = density.iter().cloned().fold(0.0, f64::max);
        for d in density.iter_mut() {
            if !d.is_finite() {
                return Err(Error::InvalidParameter("density is not finite".into()));
            }
            if *d < 0.0 {
                if *d < -1e-14 * peak {
                    return Err(Error::InvalidParameter(format!("negative density {d:e} in a measured distribution")));
                }
                *d = 0.0;
            }
        }
        let raw_mass = trapezoid(&density, lattice.step);
        Ok(Self { axis, lattice, density, quasi: false, raw_mass })
    }

    /// Signed density such as the current.
    pub fn quasi(axis: Axis, lattice: Lattice, density: Vec<f64>) -> Result<Self> {
        check_len(&lattice, &density)?;
        let raw_mass = trapezoid(&density, lattice.step);
        Ok(Self { axis, lattice, density, quasi: true, raw_mass })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn is_quasi(&self) -> bool {
        self.quasi
    }

    pub fn coordinates(&self) -> Vec<f64> {
        self.lattice.coordinates()
    }

    /// Trapezoid integral of the samples.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.density, self.lattice.step)
    }

    /// Mass before the most recent normalization (equal to `mass` otherwise).
    pub fn raw_mass(&self) -> f64 {
        self.raw_mass
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let m = self.mass();
        if !(m.abs() > 1e-300) || !m.is_finite() {
            return Err(Error::NoMass(m));
        }
        self.density.iter_mut().for_each(|d| *d /= m);
        self.raw_mass = m;
        Ok(self)
    }

    /// Piecewise-linear interpolant, zero outside the lattice.
    pub fn value_at(&self, x: f64) -> f64 {
        let u = (x - self.lattice.origin) / self.lattice.step;
        if !(u >= 0.0) || u > (self.lattice.len - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(self.lattice.len - 2);
        let f = u - i as f64;
        self.density[i] * (1.0 - f) + self.density[i + 1] * f
    }

    pub fn resampled(&self, lattice: &Lattice) -> Result<Self> {
        let density = lattice.coordinates().into_iter().map(|x| self.value_at(x)).collect();
        let r = if self.quasi {
            Self::quasi(self.axis, *lattice, density)?
        } else {
            Self::new(self.axis, *lattice, density)?
        };
        Ok(r)
    }

    /// `int_{t1}^{t2}` of the piecewise-linear interpolant; reduces to the trapezoid rule on
    /// lattice-aligned intervals and is exactly additive.
    pub fn coarse_grain(&self, t1: f64, t2: f64) -> Result<f64> {
        let (lo, hi) = (self.lattice.origin, self.lattice.end());
        let tol = 1e-12 * self.lattice.step;
        if !(t1 < t2) || t1 < lo - tol || t2 > hi + tol {
            return Err(Error::Interval { t1, t2 });
        }
        Ok(self.primitive(t2.min(hi)) - self.primitive(t1.max(lo)))
    }

    /// `int_{origin}^{x}` of the interpolant.
    fn primitive(&self, x: f64) -> f64 {
        let h = self.lattice.step;
        let u = ((x - self.lattice.origin) / h).max(0.0);
        let i = (u.floor() as usize).min(self.lattice.len - 1);
        let full: f64 = (0..i).map(|k| 0.5 * h * (self.density[k] + self.density[k + 1])).sum();
        if i == self.lattice.len - 1 {
            return full;
        }
        let f = u - i as f64;
        let (a, b) = (self.density[i], self.density[i + 1]);
        full + h * (a * f + 0.5 * (b - a) * f * f)
    }

    /// Two-column CSV: coordinate, density.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{},density", self.axis.label())?;
        for (x, d) in self.lattice.coordinates().iter().zip(&self.density) {
            writeln!(out, "{x:.17e},{d:.17e}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON metadata written next to the CSV.
    pub fn sidecar_json(&self) -> Result<String> {
        let s = Sidecar {
            axis: self.axis,
            coordinate: self.axis.label(),
            mass: self.mass(),
            raw_mass: self.raw_mass,
            quasi: self.quasi,
            lattice: self.lattice,
        };
        Ok(serde_json::to_string_pretty(&s)?)
    }

    /// Reads back a pair written by [`Distribution::write`].
    pub fn read(dir: &Path, stem: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Meta {
            axis: Axis,
            quasi: bool,
            lattice: Lattice,
        }
        let meta: Meta = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
        let text = std::fs::read_to_string(dir.join(format!("{stem}.csv")))?;
        let density = text
            .lines()
            .skip(1)
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split(',')
                    .nth(1)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("malformed row in {stem}.csv: {l}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if meta.quasi {
            Self::quasi(meta.axis, meta.lattice, density)
        } else {
            Self::new(meta.axis, meta.lattice, density)
        }
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        self.write_csv(&dir.join(format!("{stem}.csv")))?;
        std::fs::write(dir.join(format!("{stem}.json")), self.sidecar_json()? + "\n")?;
        Ok(())
    }
}

fn check_len(lattice: &Lattice, density: &[f64]) -> Result<()> {
    if lattice.len != density.len() {
        return Err(Error::GridMismatch(format!("{} samples for a {}-point lattice", density.len(), lattice.len)));
    }
    Ok(())
}
