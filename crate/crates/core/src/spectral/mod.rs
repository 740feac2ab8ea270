//! Rate theory as executable formulas: the size-indexed recurrence, speedup
//! factors, iteration and effort models for parametric spectra, and the ESO
//! vector.

mod decay;
mod eso;
mod rates;

pub use decay::{
    exp_decay_curve, exp_size_remainder, poly_asymptotic_effort, poly_decay_curve,
    size_effort_curve, sparse_jump_factor, sparse_spectrum_sigma, tail_effort_curve, DecayModel,
    EffortCurve, EffortModel, EffortPoint,
};
pub use eso::{eso_vector, eso_vector_spectral};
pub use rates::{
    alpha_tail, iterations_to_accuracy, se_kernel_gamma, sigma_at_size, sigma_recurrence_check,
    speedup_exact, speedup_lower_bound, speedup_valid_bound, IterationEstimate, RecurrenceReport,
    TailConvention,
};
