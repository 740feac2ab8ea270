//! The rate constants `σ(Ŝ)` and `θ(Ŝ)`, in closed form for determinantal
//! sampling and by enumeration for any sampling with finitely many atoms.

use crate::error::{Error, Result};
use crate::linalg::{sandwich, sym_eig, Spectrum, SymMatrix};
use crate::samplers::oracle::{expected_placed_pinv, Atom};
use crate::samplers::{PreparedSampler, SamplerSpec};
use crate::scalar::Real;

use super::problem::Problem;

fn require_strongly_convex<T: Real>(spec: &Spectrum<T>) -> Result<T> {
    let ld = spec.lambda_min();
    if ld > T::zero() {
        Ok(ld)
    } else {
        Err(Error::NotStronglyConvex {
            min_eigenvalue: ld.to_f64_lossy(),
        })
    }
}

/// `σ = κ λ_d/(λ_d + α)` for `DPP(M/α)`.
pub fn sigma_closed_form<T: Real>(spec: &Spectrum<T>, alpha: T, kappa: T) -> Result<T> {
    let ld = require_strongly_convex(spec)?;
    Ok(kappa * ld / (ld + alpha))
}

/// `θ = λ_1/(λ_1 + α)` for `DPP(M/α)`.
pub fn theta_dpp<T: Real>(spec: &Spectrum<T>, alpha: T) -> T {
    let l1 = spec.lambda_max();
    l1 / (l1 + alpha)
}

/// Spectrum of `M^{1/2} E[(M_Ŝ)^+] M^{1/2}` over the given atoms.
pub fn rate_spectrum<T: Real>(m: &SymMatrix<T>, atoms: &[Atom<T>]) -> Result<Spectrum<T>> {
    let m_spec = sym_eig(m)?;
    let e = expected_placed_pinv(m, atoms)?;
    sym_eig(&sandwich(&m_spec, &e)?)
}

/// `κ λ_min(M^{1/2} E[(M_Ŝ)^+] M^{1/2})` over explicit atoms.
pub fn sigma_from_atoms<T: Real>(m: &SymMatrix<T>, atoms: &[Atom<T>], kappa: T) -> Result<T> {
    Ok(kappa * rate_spectrum(m, atoms)?.lambda_min())
}

/// `σ(Ŝ)` with the expectation computed exactly over every atom of the
/// sampling. `M` must be positive definite.
pub fn sigma_brute_force<T: Real>(m: &SymMatrix<T>, sampler: &SamplerSpec<T>, kappa: T) -> Result<T> {
    let spec = sym_eig(m)?;
    require_strongly_convex(&spec)?;
    let prepared = PreparedSampler::with_spectrum(sampler.clone(), m, Some(spec))?;
    sigma_from_atoms(m, &prepared.atoms()?, kappa)
}

/// `λ_max(M^{1/2} E[(M_Ŝ)^+] M^{1/2})` by enumeration.
pub fn theta_brute_force<T: Real>(m: &SymMatrix<T>, sampler: &SamplerSpec<T>) -> Result<T> {
    let prepared = PreparedSampler::new(sampler.clone(), m)?;
    Ok(rate_spectrum(m, &prepared.atoms()?)?.lambda_max())
}

/// `σ̂(Ŝ, x) = λ_min(E[H^{1/2} (H_Ŝ)^+ H^{1/2}])` with `H = H(x)` and the
/// sampling built on `H(x)`. Evaluated at the given `x` only.
pub fn sigma_hat_at<T: Real, P: Problem<T> + ?Sized>(
    p: &P,
    x: &[T],
    sampler: &SamplerSpec<T>,
) -> Result<T> {
    let h = p
        .hessian(x)
        .ok_or_else(|| Error::UnsupportedVariant("problem has no Hessian oracle".into()))?;
    let prepared = PreparedSampler::new(sampler.clone(), &h)?;
    Ok(rate_spectrum(&h, &prepared.atoms()?)?.lambda_min())
}

/// `2D/(σ k)`: gap guarantee after `k` steps for convex objectives, with
/// `D` the level-set diameter in the `M` geometry.
pub fn sublinear_gap_bound<T: Real>(sigma: T, diameter: T, k: usize) -> Result<T> {
    if !(sigma > T::zero() && sigma <= T::one()) || diameter < T::zero() || k == 0 {
        return Err(Error::ContractViolation(format!(
            "need sigma in (0,1], D >= 0, k >= 1; got sigma={sigma}, D={diameter}, k={k}"
        )));
    }
    Ok(T::lit(2.0) * diameter / (sigma * T::from_usize_lossy(k)))
}
