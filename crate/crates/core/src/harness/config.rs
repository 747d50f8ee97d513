use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clocks::ClockSpec;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::{Grid, Region};

/// Weak regime: `lambda eps0 <= WEAK_RATIO E`.
pub const WEAK_RATIO: f64 = 0.05;
/// Strong regime: `lambda eps0 >= STRONG_RATIO E`.
pub const STRONG_RATIO: f64 = 50.0;
/// Dwell regime: `|p0| L >= DWELL_ACTION`.
pub const DWELL_ACTION: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ArrivalWeak,
    ArrivalStrong,
    DwellWeak,
    PdxCheck,
    ResolutionScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tau {
    Fixed(f64),
    Keyword(AutoKeyword),
}

impl Default for Tau {
    fn default() -> Self {
        Tau::Keyword(AutoKeyword::Auto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    #[serde(default = "one")]
    pub mass: f64,
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
}

impl ParticleSpec {
    pub fn energy(&self) -> f64 {
        self.p0 * self.p0 / (2.0 * self.mass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl AxisSpec {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.x_min, self.x_max, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub particle: AxisSpec,
    pub clock: AxisSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeMapKind {
    #[default]
    Linear,
    HamiltonJacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutKind {
    All,
    Exited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionSection {
    /// Time samples of the current / kinetic-energy series.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub time_map: TimeMapKind,
    /// Defaults to `all` for weak experiments and `exited` for the strong one.
    #[serde(default)]
    pub readout: Option<ReadoutKind>,
    /// Rows of the coarse-grained table.
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    /// Pass threshold on the relative L2 distance; defaults per experiment.
    #[serde(default)]
    pub threshold: Option<f64>,
}

impl Default for PredictionSection {
    fn default() -> Self {
        Self { samples: default_samples(), time_map: TimeMapKind::Linear, readout: None, intervals: default_intervals(), threshold: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub lambda: f64,
    pub sigma_eps: f64,
    #[serde(default = "one")]
    pub eps0: f64,
    /// Largest `lambda sigma_eps delta_t` in the scan.
    #[serde(default = "default_span")]
    pub span: f64,
    #[serde(default = "default_scan_points")]
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub tau: Tau,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Distance beyond the exit edge the packet centre must reach under `tau = "auto"`.
    #[serde(default = "default_margin")]
    pub exit_margin: f64,
    #[serde(default)]
    pub execution: Execution,
    pub particle: Option<ParticleSpec>,
    #[serde(default = "default_region")]
    pub region: Region,
    pub grid: Option<GridSection>,
    pub clock: Option<ClockSpec>,
    #[serde(default)]
    pub prediction: PredictionSection,
    pub scan: Option<ScanSection>,
}

fn one() -> f64 {
    1.0
}
fn default_samples() -> usize {
    2001
}
fn default_intervals() -> usize {
    12
}
fn default_span() -> f64 {
    10.0
}
fn default_scan_points() -> usize {
    201
}
fn default_dt() -> f64 {
    0.005
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_margin() -> f64 {
    10.0
}
fn default_region() -> Region {
    Region::HalfLinePositive
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn particle(&self) -> Result<&ParticleSpec> {
        self.particle.as_ref().ok_or_else(|| Error::Config("missing [particle] section".into()))
    }

    pub fn grids(&self) -> Result<(Grid, Grid)> {
        let g = self.grid.as_ref().ok_or_else(|| Error::Config("missing [grid.particle] / [grid.clock]".into()))?;
        Ok((g.particle.grid()?, g.clock.grid()?))
    }

    pub fn clock(&self) -> Result<&ClockSpec> {
        self.clock.as_ref().ok_or_else(|| Error::Config("missing [clock] section".into()))
    }

    pub fn scan(&self) -> Result<&ScanSection> {
        self.scan.as_ref().ok_or_else(|| Error::Config("missing [scan] section".into()))
    }
}

/// `tau = (x0 - exit edge + margin) / (|p0| / m) * 1.5`.
pub fn auto_tau(particle: &ParticleSpec, region: &Region, margin: f64) -> Result<f64> {
    if particle.p0 == 0.0 {
        return Err(Error::ZeroMomentum(particle.p0));
    }
    if particle.p0 > 0.0 {
        return Err(Error::Config("the particle must move toward the exit edge (p0 < 0)".into()));
    }
    let distance = particle.x0 - region.exit_edge() + margin;
    if !(distance > 0.0) {
        return Err(Error::Config(format!("the packet already sits {} past the exit margin", -distance)));
    }
    Ok(distance / (particle.p0.abs() / particle.mass) * 1.5)
}

/// Refuse configs outside the regime the experiment's prediction is derived for.
pub fn check_regime(kind: ExperimentKind, particle: &ParticleSpec, lambda: f64, clock_energy: f64, region: &Region) -> Result<()> {
    let e = particle.energy();
    let coupling = (lambda * clock_energy).abs();
    match kind {
        ExperimentKind::ArrivalWeak | ExperimentKind::DwellWeak if coupling > WEAK_RATIO * e => {
            return Err(Error::Regime(format!(
                "weak coupling needs lambda*eps0 <= {WEAK_RATIO}*E, got {coupling} > {}",
                WEAK_RATIO * e
            )));
        }
        ExperimentKind::ArrivalStrong if coupling < STRONG_RATIO * e => {
            return Err(Error::Regime(format!(
                "strong coupling needs lambda*eps0 >= {STRONG_RATIO}*E, got {coupling} < {}",
                STRONG_RATIO * e
            )));
        }
        _ => {}
    }
    match (kind, region) {
        (ExperimentKind::DwellWeak, Region::Interval { half_width }) => {
            if particle.p0.abs() * half_width < DWELL_ACTION {
                return Err(Error::Regime(format!(
                    "dwell prediction needs |p0| L >= {DWELL_ACTION}, got {}",
                    particle.p0.abs() * half_width
                )));
            }
        }
        (ExperimentKind::DwellWeak, _) => return Err(Error::Config("dwell_weak needs an interval region".into())),
        (ExperimentKind::ArrivalWeak | ExperimentKind::ArrivalStrong, Region::Interval { .. }) => {
            return Err(Error::Config("arrival experiments use region kind half_line_positive".into()))
        }
        _ => {}
    }
    Ok(())
}
