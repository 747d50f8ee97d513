//! Particle propagation under a step potential and composite particle+clock evolution.

mod composite;
mod split_operator;

pub use composite::{evolve_composite, pointer_distribution, Channel, CompositeOptions, CompositeState, ExitPolicy, Readout, EXIT_LIMIT};
pub use split_operator::{
    evolve_free, evolve_step_potential, free_in_momentum, momentum_extent, propagate, step_phase, Evolution,
    StepPotentialSpec, EDGE_FRACTION, EDGE_LIMIT, MAX_STEP_PHASE,
};
