//! The randomized Newton method `x ← x − (M_S)^+ ∇f(x)` over sampled
//! coordinate blocks, its Hessian-metric variant, and the rate constants.

mod checks;
mod problem;
mod rates;
mod run;
mod step;

pub use checks::{check_smoothness, check_strong_convexity, SpotCheck, SPOT_CHECK_REL_TOL};
pub use problem::Problem;
pub use rates::{
    rate_spectrum, sigma_brute_force, sigma_closed_form, sigma_from_atoms, sigma_hat_at,
    sublinear_gap_bound, theta_brute_force, theta_dpp,
};
pub use run::{run_rnm, MetricVariant, RunOptions, RunTrace, TraceRecord, DIVERGENCE_FACTOR};
pub use step::{rnm_relative_step, rnm_relative_step_detailed, rnm_step, rnm_step_detailed, Step};
