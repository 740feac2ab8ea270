//! Block samplings `Ŝ` over coordinate subsets, the determinantal summary
//! statistics, and enumeration oracles.

mod dpp;
mod leverage;
pub mod oracle;
mod spec;
mod uniform;

pub use dpp::{
    alpha_for_expected_size, dpp_expected_size, dpp_normalization_logdet,
    dpp_normalization_logdet_spectrum, dpp_sample,
};
pub use leverage::{
    iid_weighted_sample, leverage_sample, leverage_scores_from_spectrum, poisson_sample,
    ridge_leverage_scores,
};
pub use oracle::{brute_force_expected_msub, brute_force_expected_pinv, Atom};
pub use spec::{tau_nice_atoms, PreparedSampler, SamplerSpec, TAU_NICE_MAX_ATOMS};
pub use uniform::{tau_list_sample, tau_nice_sample};
