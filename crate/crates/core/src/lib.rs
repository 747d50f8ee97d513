pub mod clocks;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod harness;
pub mod lattice;
pub mod observables;
pub mod pdx;
pub mod quadrature;

pub use error::{Error, Result};
