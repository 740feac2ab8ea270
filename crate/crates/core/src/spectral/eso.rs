use crate::error::{Error, Result};
use crate::linalg::{sym_eig, SymMatrix};
use crate::samplers::ridge_leverage_scores;
use crate::scalar::Real;

/// ESO vector for `DPP(M/α)`: `v_i = M_ii / p_i` with `p` the α-ridge
/// leverage scores, so `Diag(p ∘ v) = Diag(M)`.
///
/// `E[M_Ŝ] ⪯ Diag(M)` does not hold in general: for strongly correlated
/// `M` and small `α` the block is almost always full and `E[M_Ŝ] ≈ M`.
/// [`eso_vector_spectral`] always dominates.
///
/// Returns `(v, p)`.
pub fn eso_vector<T: Real>(m: &SymMatrix<T>, alpha: T) -> Result<(Vec<T>, Vec<T>)> {
    let p = ridge_leverage_scores(m, alpha)?;
    if let Some(i) = p.iter().position(|&pi| !(pi > T::zero())) {
        return Err(Error::ContractViolation(format!(
            "leverage score {i} is zero; the ESO vector is undefined"
        )));
    }
    let v = m.diag().iter().zip(&p).map(|(&mii, &pi)| mii / pi).collect();
    Ok((v, p))
}

/// `v_i = λ_max(M)`. Since `P = E[1_Ŝ 1_Ŝᵀ]` is p.s.d. and
/// `M ⪯ λ_max I`, the Schur product theorem gives
/// `E[M_Ŝ] = P ∘ M ⪯ λ_max Diag(p)`.
///
/// Returns `(v, p)`.
pub fn eso_vector_spectral<T: Real>(m: &SymMatrix<T>, alpha: T) -> Result<(Vec<T>, Vec<T>)> {
    let p = ridge_leverage_scores(m, alpha)?;
    let top = sym_eig(m)?.lambda_max();
    Ok((vec![top; m.dim()], p))
}
