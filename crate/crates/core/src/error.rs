use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 2")]
    GridSize(usize),
    #[error("degenerate grid extent [{x_min}, {x_max}]")]
    GridExtent { x_min: f64, x_max: f64 },
    #[error("wave packet not resolvable: {0}")]
    Unresolvable(String),
    #[error("wave packet tail clipped at grid edge: edge amplitude {0:e}")]
    TailClipped(f64),
    #[error("operation requires the {expected} representation")]
    Representation { expected: &'static str },
    #[error("grids do not match: {0}")]
    GridMismatch(String),
    #[error("point x = {0} lies outside the grid")]
    OutsideGrid(f64),
    #[error("time step violates the phase-per-step bound: dt * {scale:.3e} = {phase:.3e} > {limit}")]
    Stability { scale: f64, phase: f64, limit: f64 },
    #[error("probability {prob:.3e} near the box edges exceeds {limit:e}")]
    EdgeProbability { prob: f64, limit: f64 },
    #[error("clock truncation keeps only {kept:.12} of the initial clock state")]
    Truncation { kept: f64 },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("mean momentum {0:e} too close to zero")]
    ZeroMomentum(f64),
    #[error("momentum mass {mass:.3e} below |p| < {p_floor} exceeds {limit:e}")]
    LowMomentumMass { mass: f64, p_floor: f64, limit: f64 },
    #[error("time window captures only {mass:.6} of the arrival current")]
    WindowDeficit { mass: f64 },
    #[error("distribution mass {0:e} too small to normalize")]
    NoMass(f64),
    #[error("interval [{t1}, {t2}] is reversed or outside the lattice")]
    Interval { t1: f64, t2: f64 },
    #[error("energy {0} lies below the potential minimum")]
    BelowPotential(f64),
    #[error("point y = {0} lies in the classically forbidden region")]
    Forbidden(f64),
    #[error("finite-difference step underflow at y = {0}")]
    StepUnderflow(f64),
    #[error("probability {prob:.3e} still inside the region at the final time (limit {limit:e})")]
    RegionExit { prob: f64, limit: f64 },
    #[error("regime guard failed: {0}")]
    Regime(String),
    #[error("quadrature did not converge: estimate {estimate:e}, tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
