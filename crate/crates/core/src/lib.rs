//! Quantum and classical decoherence dynamics of a system coupled to a
//! harmonic bath through `sum_j C_j f(Q) q_j`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod error;
pub mod model;
pub mod oracle;
pub mod rates;
pub mod scenario;
pub mod states;
pub mod strongdec;
pub mod sum;

pub use bath::{BathMode, BathPhasePoint, BathSpec};
pub use error::{Error, Result};
pub use model::{CouplingFunction, ModelConfig, Side, Temperature};
pub use rates::RatePair;
pub use strongdec::{DecoherenceFactor, DecoherenceSeries};
pub use states::{
    build_density_matrix, inverse_wigner, wigner_transform, DensityMatrixGrid, GaussianPacket,
    GridSpec, SuperpositionState, WignerGrid,
};
