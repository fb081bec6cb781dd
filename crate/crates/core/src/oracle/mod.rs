//! Brute-force checks of the closed forms.
//!
//! * [`monte_carlo`]: averages the classical phase over thermally sampled
//!   bath trajectories.
//! * [`fock`]: propagates a single bath mode conditioned on each branch
//!   position in a truncated number basis.
//! * [`fit`]: least-squares short-time expansion of an entropy series.

pub mod fit;
pub mod fock;
pub mod monte_carlo;

pub use fit::{series_short_time_fit, short_time_fit, QuadraticFit};
pub use fock::{fock_quantum_factor, fock_quantum_factor_thermal, FockConfig};
pub use monte_carlo::{mc_classical_factor, McEstimate};
