//! Uniform 1D lattices, wavefunctions on them and the spectral machinery shared by
//! every propagation routine.

mod fourier;
mod grid;
mod region;
mod wavefunction;

pub use fourier::{fft_plans, FftPair};
pub use grid::Grid;
pub use region::Region;
pub use wavefunction::{gaussian_state, probability_in_region, transform, Representation, WaveFunction};
