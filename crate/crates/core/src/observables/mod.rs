//! Arrival and dwell distributions: ideal, smeared, and the regime predictions.

mod arrival;
mod compare;
mod density;
mod distribution;
mod dwell;
mod smear;

pub use arrival::{
    normalized_strong_arrival, strong_arrival_prediction, weak_arrival_prediction, ArrivalSeries, TimeMap,
    STRONG_MASS_TOLERANCE, WINDOW_MASS,
};
pub use compare::{compare, Comparison, SUPPORT_FRACTION};
pub use density::{current_at_origin, kinetic_energy_density_at_origin};
pub use distribution::{Axis, Distribution, Lattice};
pub use dwell::{dwell_semiclassical, dwell_time_lattice, weak_dwell_prediction, LOW_MOMENTUM_LIMIT};
pub use smear::{smear, ResponseKernel};
