use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic lattice `x_j = x_min + j dx`, `j = 0..n`, with its dual momentum
/// lattice in standard DFT ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::GridExtent { x_min, x_max });
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extent(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.extent() / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Momentum lattice spacing `2 pi / (x_max - x_min)`.
    pub fn dp(&self) -> f64 {
        2.0 * PI / self.extent()
    }

    /// Momentum of DFT bin `k`; spans `[-pi/dx, pi/dx)`.
    pub fn momentum(&self, k: usize) -> f64 {
        let k = k as i64;
        let n = self.n as i64;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 * self.dp()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.momentum(k)).collect()
    }

    pub fn p_max(&self) -> f64 {
        PI / self.dx()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x < self.x_max
    }

    /// Index of the lattice point nearest to `x`.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let j = ((x - self.x_min) / self.dx()).round() as usize;
        Some(j.min(self.n - 1))
    }

    /// Sum over the outer `fraction` of the box on each side.
    pub(crate) fn edge_band(&self, fraction: f64) -> usize {
        ((self.n as f64 * fraction).ceil() as usize).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_grid_arithmetic() {
        let g = Grid::new(-10.0, 10.0, 4).unwrap();
        assert_eq!(g.dx(), 5.0);
        assert_relative_eq!(g.dp(), 2.0 * PI / 20.0);
        assert_eq!(g.momenta(), vec![0.0, g.dp(), -2.0 * g.dp(), -g.dp()]);
        let g = Grid::new(-100.0, 100.0, 2048).unwrap();
        assert_relative_eq!(g.dx(), 0.09765625);
    }

    #[test]
    fn rejects_bad_sizes_and_extents() {
        assert!(matches!(Grid::new(0.0, 1.0, 3), Err(Error::GridSize(3))));
        assert!(matches!(Grid::new(0.0, 1.0, 1), Err(Error::GridSize(1))));
        assert!(matches!(Grid::new(1.0, 1.0, 8), Err(Error::GridExtent { .. })));
        assert!(Grid::new(2.0, 1.0, 8).is_err());
    }

    #[test]
    fn momentum_lattice_spans_nyquist_interval() {
        let g = Grid::new(-3.0, 5.0, 64).unwrap();
        let p = g.momenta();
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(lo, -g.p_max(), epsilon = 1e-12);
        assert_relative_eq!(hi, g.p_max() - g.dp(), epsilon = 1e-12);
    }

    #[test]
    fn nearest_index_round_trips() {
        let g = Grid::new(-1.0, 1.0, 16).unwrap();
        for j in 0..16 {
            assert_eq!(g.nearest_index(g.x(j)), Some(j));
        }
        assert_eq!(g.nearest_index(1.5), None);
    }
}
