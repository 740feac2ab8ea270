use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, pinv, principal_submatrix, CoordSubset, SymMatrix};
use crate::scalar::Real;

use super::problem::Problem;

/// A block update and the number of directions of `M_SS` that the
/// pseudoinverse had to discard.
#[derive(Debug, Clone, PartialEq)]
pub struct Step<T> {
    pub x: Vec<T>,
    pub null_directions: usize,
}

impl<T: Real> Step<T> {
    pub fn is_singular(&self) -> bool {
        self.null_directions > 0
    }
}

/// Solves `block · u = g` on the subset, preferring Cholesky and falling
/// back to the pseudoinverse when the block is numerically singular.
fn block_solve<T: Real>(block: &SymMatrix<T>, g: &[T]) -> Result<(Vec<T>, usize)> {
    if let Some(l) = cholesky(block.as_matrix()) {
        let diag: Vec<T> = (0..block.dim()).map(|i| l[(i, i)] * l[(i, i)]).collect();
        let max = diag.iter().copied().fold(T::zero(), T::max);
        let min = diag.iter().copied().fold(T::infinity(), T::min);
        if min > T::lit(crate::linalg::PINV_REL_CUTOFF) * max {
            return Ok((cholesky_solve(&l, g), 0));
        }
    }
    let (inv, dropped) = pinv(block)?;
    Ok((inv.matvec(g)?, dropped))
}

fn block_update<T: Real>(
    x: &[T],
    s: &CoordSubset,
    g_s: &[T],
    block: &SymMatrix<T>,
    step_scale: T,
) -> Result<Step<T>> {
    let (u, null_directions) = block_solve(block, g_s)?;
    let mut out = x.to_vec();
    for (&i, ui) in s.indices().iter().zip(u) {
        out[i] -= step_scale * ui;
    }
    Ok(Step {
        x: out,
        null_directions,
    })
}

fn check_dims<T: Real, P: Problem<T> + ?Sized>(p: &P, x: &[T], s: &CoordSubset) -> Result<()> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: x.len(),
        });
    }
    if s.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: s.dim(),
        });
    }
    Ok(())
}

/// `x - (M_S)^+ ∇f(x)`, touching only the coordinates in `S` and reading
/// only `∇_S f(x)`.
pub fn rnm_step_detailed<T: Real, P: Problem<T> + ?Sized>(
    p: &P,
    x: &[T],
    s: &CoordSubset,
) -> Result<Step<T>> {
    check_dims(p, x, s)?;
    if s.is_empty() {
        return Ok(Step {
            x: x.to_vec(),
            null_directions: 0,
        });
    }
    let g_s = p.partial_gradient(x, s);
    let block = principal_submatrix(p.metric(), s)?;
    block_update(x, s, &g_s, &block, T::one())
}

pub fn rnm_step<T: Real, P: Problem<T> + ?Sized>(p: &P, x: &[T], s: &CoordSubset) -> Result<Vec<T>> {
    rnm_step_detailed(p, x, s).map(|st| st.x)
}

/// `x - (1/L̃) (H(x)_S)^+ ∇f(x)` with the Hessian evaluated at `x`.
pub fn rnm_relative_step_detailed<T: Real, P: Problem<T> + ?Sized>(
    p: &P,
    x: &[T],
    s: &CoordSubset,
) -> Result<Step<T>> {
    check_dims(p, x, s)?;
    let l_rel = p.rel_smoothness().ok_or_else(|| {
        Error::UnsupportedVariant("variable-metric step needs a relative smoothness constant".into())
    })?;
    if s.is_empty() {
        return Ok(Step {
            x: x.to_vec(),
            null_directions: 0,
        });
    }
    let h = p
        .hessian(x)
        .ok_or_else(|| Error::UnsupportedVariant("problem has no Hessian oracle".into()))?;
    let g_s = p.partial_gradient(x, s);
    let block = principal_submatrix(&h, s)?;
    block_update(x, s, &g_s, &block, T::one() / l_rel)
}

pub fn rnm_relative_step<T: Real, P: Problem<T> + ?Sized>(
    p: &P,
    x: &[T],
    s: &CoordSubset,
) -> Result<Vec<T>> {
    rnm_relative_step_detailed(p, x, s).map(|st| st.x)
}
