//! Problem generators whose over-approximation metric is known exactly.

mod data;
mod kernel;
mod logistic;
mod quadratic;
mod synth;

pub use data::{
    gaussian_data, gaussian_mixture_data, gaussian_mixture_labeled, DataSet, ResponseModel,
};
pub use kernel::{gram_matrix, KernelSpec, MaternOrder};
pub use logistic::{logistic_loss_direct, logistic_problem, LogisticOptions, LogisticProblem};
pub use quadratic::{dual_krr_from_gram, dual_krr_problem, primal_ridge_problem, QuadraticProblem};
pub use synth::{haar_orthogonal, synth_spectrum_matrix};
