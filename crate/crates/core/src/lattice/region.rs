use serde::{Deserialize, Serialize};

/// Characteristic function of the region where the clock runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// `chi(x) = theta(x)`, the arrival problem.
    HalfLinePositive,
    /// `chi(x) = theta(x + L) theta(L - x)`, the dwell problem.
    Interval { half_width: f64 },
}

impl Region {
    /// Evaluate `chi` at a lattice point. Points within `1e-9 dx` of an edge get the
    /// midpoint value 1/2.
    pub fn chi(&self, x: f64, dx: f64) -> f64 {
        let tol = 1e-9 * dx;
        let side = |d: f64| {
            if d.abs() <= tol {
                0.5
            } else if d > 0.0 {
                1.0
            } else {
                0.0
            }
        };
        match *self {
            Region::HalfLinePositive => side(x),
            Region::Interval { half_width } => {
                let a = side(x + half_width);
                let b = side(half_width - x);
                a.min(b)
            }
        }
    }

    /// Coordinate of the edge a left-moving particle leaves through.
    pub fn exit_edge(&self) -> f64 {
        match *self {
            Region::HalfLinePositive => 0.0,
            Region::Interval { half_width } => -half_width,
        }
    }
}
