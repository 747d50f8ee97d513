//! Idealised clocks: eigensystems, the response `Phi(y, t)`, resolution, and the
//! semiclassical pointer-to-time map.

mod dvr;
mod model;
mod wkb;

pub use dvr::sinc_dvr_eigensystem;
pub use model::{
    resolution_overlap, resolution_time, ClockKind, ClockLevel, ClockModel, ClockSpec,
    ResolutionTime, TRUNCATION_LIMIT,
};
pub use wkb::{hj_time_map, wkb_eigenstate, Polynomial, WkbEigenstate};
