//! Randomized block Newton steps with coordinate blocks drawn from a
//! determinantal point process, the matching convergence-rate formulas, and
//! enumeration oracles for checking them on small problems.
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`).
//! The aliases below fix the scalar for the common case.

pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod problems;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type SymMatrix64 = linalg::SymMatrix<f64>;
pub type Spectrum64 = linalg::Spectrum<f64>;
pub type SamplerSpec64 = samplers::SamplerSpec<f64>;
pub type PreparedSampler64 = samplers::PreparedSampler<f64>;
pub type QuadraticProblem64 = problems::QuadraticProblem<f64>;
pub type DecayModel64 = spectral::DecayModel<f64>;

pub type Matrix32 = linalg::Matrix<f32>;
pub type SymMatrix32 = linalg::SymMatrix<f32>;
pub type Spectrum32 = linalg::Spectrum<f32>;
pub type SamplerSpec32 = samplers::SamplerSpec<f32>;
pub type PreparedSampler32 = samplers::PreparedSampler<f32>;
pub type QuadraticProblem32 = problems::QuadraticProblem<f32>;
pub type DecayModel32 = spectral::DecayModel<f32>;
