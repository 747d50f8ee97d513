//! Path decomposition: first-crossing factorization, closed-form propagators and the
//! scattering integrals they lead to.

mod check;
mod crossing;
mod propagators;
mod scattering;

pub use check::{pdx_check, CheckRow, CheckSettings};
pub use crossing::{crossing_source, grid_reference, pdx_first_crossing, relative_l2, CrossingTable, PostCrossing};
pub use propagators::{
    free_propagator, free_propagator_dx, restricted_derivative_at_origin, restricted_propagator_image, sqrt_i,
    GaussianPacket,
};
pub use scattering::{
    scattering_integral, scattering_integral_oracle, step_resolvent_integral, strong_coupling_wall_integral,
    wall_integral_oracle,
};
