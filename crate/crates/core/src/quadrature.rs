//! Quadrature helpers shared by the oracles and the predictions.

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

/// Composite Gauss–Legendre rule of fixed order, usable for complex integrands.
#[derive(Debug, Clone)]
pub struct CompositeGauss {
    pairs: Vec<(f64, f64)>,
}

impl CompositeGauss {
    pub fn new(order: usize) -> Self {
        let rule = GaussLegendre::new(order.max(2)).expect("order >= 2");
        Self { pairs: rule.as_node_weight_pairs().to_vec() }
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// Nodes and weights on `[a, b]` split into `panels` equal pieces.
    pub fn nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.pairs.len());
        for i in 0..panels {
            let lo = a + i as f64 * h;
            let mid = lo + 0.5 * h;
            for &(x, w) in &self.pairs {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
        out
    }

    pub fn integrate(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes(a, b, panels).into_iter().map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> Complex64,
    ) -> Complex64 {
        self.nodes(a, b, panels).into_iter().map(|(x, w)| f(x) * w).sum()
    }
}

/// Trapezoid rule over uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// Polynomial extrapolation of `values[i] = f(nodes[i])` to `f(0)` (Neville's scheme).
pub fn extrapolate_to_zero(nodes: &[f64], values: &[Complex64]) -> Complex64 {
    assert_eq!(nodes.len(), values.len());
    assert!(!nodes.is_empty());
    let mut p = values.to_vec();
    let n = nodes.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (nodes[i], nodes[i + level]);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}
