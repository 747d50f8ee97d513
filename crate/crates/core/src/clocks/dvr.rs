use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

use crate::lattice::Grid;

/// Eigenpairs of `p^2 / 2 mu + U(y)` in the sinc discrete-variable representation on the
/// grid points, ascending in energy. Eigenvectors are grid-normalized (`sum v^2 dy = 1`)
/// and signed positive at the point nearest `y = 0` (or at the first appreciable value
/// to its right when that point is a node).
pub fn sinc_dvr_eigensystem(grid: &Grid, mu: f64, potential: impl Fn(f64) -> f64) -> Vec<(f64, Vec<f64>)> {
    let n = grid.len();
    let dy = grid.dx();
    let scale = 1.0 / (mu * dy * dy);
    let h = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            scale * PI * PI / 6.0 + potential(grid.x(i))
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            scale * sign / (d * d)
        }
    });
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let reference = grid.nearest_index(0.0).unwrap_or(n / 2);
    let inv = 1.0 / dy.sqrt();
    order
        .into_iter()
        .map(|c| {
            let col = eig.eigenvectors.column(c);
            let peak = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let sign = col
                .iter()
                .skip(reference)
                .find(|v| v.abs() > 1e-6 * peak)
                .map(|v| v.signum())
                .unwrap_or(1.0);
            (eig.eigenvalues[c], col.iter().map(|v| sign * v * inv).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn harmonic_levels_and_orthonormality() {
        let g = Grid::new(-12.0, 12.0, 256).unwrap();
        let levels = sinc_dvr_eigensystem(&g, 1.0, |y| 0.5 * y * y);
        for (n, (e, _)) in levels.iter().take(10).enumerate() {
            assert_abs_diff_eq!(*e, n as f64 + 0.5, epsilon = 1e-9);
        }
        let dy = g.dx();
        for a in 0..5 {
            for b in 0..5 {
                let s: f64 = levels[a].1.iter().zip(&levels[b].1).map(|(x, y)| x * y).sum::<f64>() * dy;
                assert_abs_diff_eq!(s, if a == b { 1.0 } else { 0.0 }, epsilon = 1e-10);
            }
        }
        let iref = g.nearest_index(0.0).unwrap();
        assert!(levels[0].1[iref] > 0.0);
        // Odd state: node at the reference, positive just to the right.
        assert!(levels[1].1[iref + 1] > 0.0);
    }
}
