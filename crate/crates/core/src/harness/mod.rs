//! Config-driven experiments, comparison reports and their serialized artifacts.

mod config;
mod run;

pub use config::{
    auto_tau, check_regime, AutoKeyword, AxisSpec, ExperimentConfig, ExperimentKind, GridSection, ParticleSpec,
    PredictionSection, ReadoutKind, ScanSection, Tau, TimeMapKind, DWELL_ACTION, STRONG_RATIO, WEAK_RATIO,
};
pub use run::{
    coarse_table, plot_data, run_experiment, scan_clock, simulate, CoarseRow, ComparisonReport, RunOutput, RunReport,
    Simulation, DRIFT_LIMIT, RESOLUTION_LIMIT, UNITARITY_LIMIT,
};
