//! Dense symmetric-matrix primitives.
//!
//! Indices are 0-based throughout. For a subset `S`, `M_SS` is the principal
//! submatrix on `S` and the *placed* matrix `M_S` is `M_SS` embedded back
//! into a `d × d` matrix of zeros.

mod dense;
mod eigen;
pub mod io;
mod subset;
mod sym;

pub use dense::{cholesky, cholesky_solve, dot, norm2, Matrix};
pub use subset::CoordSubset;
pub use sym::{sym_eig, Definiteness, Spectrum, SymMatrix, PSD_REL_TOL, SYMMETRY_REL_TOL};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative eigenvalue cutoff used by every pseudoinverse in the crate.
pub const PINV_REL_CUTOFF: f64 = 1e-12;

fn check_subset<T: Real>(m: &SymMatrix<T>, s: &CoordSubset) -> Result<()> {
    if s.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: s.dim(),
        });
    }
    if let Some(&last) = s.indices().last() {
        if last >= m.dim() {
            return Err(Error::ContractViolation(format!(
                "subset index {last} out of range for dimension {}",
                m.dim()
            )));
        }
    }
    Ok(())
}

/// `M_SS`: rows and columns of `M` restricted to `S`. `S = ∅` gives 0×0.
pub fn principal_submatrix<T: Real>(m: &SymMatrix<T>, s: &CoordSubset) -> Result<SymMatrix<T>> {
    check_subset(m, s)?;
    let idx = s.indices();
    let k = idx.len();
    let sub = Matrix::from_fn(k, k, |a, b| m.get(idx[a], idx[b]));
    Ok(SymMatrix::symmetrize(sub))
}

/// Moore–Penrose pseudoinverse of a symmetric matrix via its spectrum,
/// discarding eigenvalues at or below `1e-12 · λ_max`.
///
/// Returns the pseudoinverse and the number of discarded directions.
pub fn pinv<T: Real>(m: &SymMatrix<T>) -> Result<(SymMatrix<T>, usize)> {
    if m.dim() == 0 {
        return Ok((SymMatrix::zeros(0), 0));
    }
    let spec = sym_eig(m)?;
    let cut = T::lit(PINV_REL_CUTOFF) * spec.lambda_max().abs();
    let dropped = spec.eigenvalues().iter().filter(|&&l| l.abs() <= cut).count();
    let inv = spec.apply(|l| if l.abs() > cut { T::one() / l } else { T::zero() });
    Ok((inv, dropped))
}

/// Embeds a `|S| × |S|` block at rows/columns `S` of a `d × d` zero matrix.
pub fn place<T: Real>(block: &SymMatrix<T>, s: &CoordSubset) -> Result<SymMatrix<T>> {
    if block.dim() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: block.dim(),
        });
    }
    let d = s.dim();
    let idx = s.indices();
    let mut out = Matrix::zeros(d, d);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            out[(i, j)] = block.get(a, b);
        }
    }
    Ok(SymMatrix::symmetrize(out))
}

/// `(M_S)^+`: pseudoinverse of `M_SS` placed back at rows/columns `S`.
pub fn placed_pinv<T: Real>(m: &SymMatrix<T>, s: &CoordSubset) -> Result<SymMatrix<T>> {
    let sub = principal_submatrix(m, s)?;
    let (inv, _) = pinv(&sub)?;
    place(&inv, s)
}

/// `A ⪯ B` in the Loewner order, i.e. `λ_min(B - A) ≥ -tol`.
pub fn psd_order_leq<T: Real>(a: &SymMatrix<T>, b: &SymMatrix<T>, tol: T) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.dim() == 0 {
        return Ok(true);
    }
    let diff = b.sub(a)?;
    Ok(sym_eig(&diff)?.lambda_min() >= -tol)
}

/// `M^{1/2} A M^{1/2}` for p.s.d. `M` given through its spectrum.
pub fn sandwich<T: Real>(m_spec: &Spectrum<T>, a: &SymMatrix<T>) -> Result<SymMatrix<T>> {
    let root = m_spec.sqrt();
    let left = root.as_matrix().matmul(a.as_matrix())?;
    Ok(SymMatrix::symmetrize(left.matmul(root.as_matrix())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> SymMatrix<f64> {
        SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()
    }

    fn close(a: &SymMatrix<f64>, b: &[Vec<f64>], tol: f64) {
        let b = Matrix::<f64>::from_rows(b).unwrap();
        let err = a.as_matrix().sub(&b).unwrap().max_abs();
        assert!(err <= tol, "max error {err:e}");
    }

    #[test]
    fn principal_submatrix_examples() {
        let m = m2();
        let s0 = CoordSubset::new(2, vec![0]).unwrap();
        close(&principal_submatrix(&m, &s0).unwrap(), &[vec![2.0]], 0.0);
        let full = CoordSubset::full(2);
        assert_eq!(principal_submatrix(&m, &full).unwrap(), m);
        let e = principal_submatrix(&m, &CoordSubset::empty(2)).unwrap();
        assert_eq!(e.dim(), 0);
    }

    #[test]
    fn principal_submatrix_rejects_bad_subset() {
        let m = m2();
        let wrong_dim = CoordSubset::new(3, vec![2]).unwrap();
        assert!(principal_submatrix(&m, &wrong_dim).is_err());
    }

    #[test]
    fn placed_pinv_examples() {
        let m = m2();
        let s0 = CoordSubset::new(2, vec![0]).unwrap();
        close(
            &placed_pinv(&m, &s0).unwrap(),
            &[vec![0.5, 0.0], vec![0.0, 0.0]],
            1e-15,
        );
        let third = 1.0 / 3.0;
        close(
            &placed_pinv(&m, &CoordSubset::full(2)).unwrap(),
            &[vec![2.0 * third, -third], vec![-third, 2.0 * third]],
            1e-14,
        );
        let id = SymMatrix::<f64>::identity(3);
        let s1 = CoordSubset::new(3, vec![1]).unwrap();
        close(
            &placed_pinv(&id, &s1).unwrap(),
            &[
                vec![0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0],
            ],
            1e-15,
        );
        let zero = placed_pinv(&m, &CoordSubset::empty(2)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn pinv_of_rank_deficient_block() {
        let m = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let (p, dropped) = pinv(&m).unwrap();
        assert_eq!(dropped, 1);
        close(&p, &[vec![0.25, 0.25], vec![0.25, 0.25]], 1e-15);
    }

    #[test]
    fn sym_eig_examples() {
        let spec = sym_eig(&m2()).unwrap();
        assert!((spec.eigenvalues()[0] - 3.0).abs() < 1e-14);
        assert!((spec.eigenvalues()[1] - 1.0).abs() < 1e-14);

        let spec = sym_eig(&SymMatrix::<f64>::identity(4)).unwrap();
        assert_eq!(spec.eigenvalues(), &[1.0; 4]);

        let spec = sym_eig(&SymMatrix::<f64>::diagonal(&[5.0, 2.0])).unwrap();
        assert_eq!(spec.eigenvalues(), &[5.0, 2.0]);
        let v = spec.eigenvectors();
        assert_eq!(v[(0, 0)].abs(), 1.0);
        assert_eq!(v[(1, 1)].abs(), 1.0);
        assert_eq!(v[(1, 0)], 0.0);
    }

    #[test]
    fn psd_order_examples() {
        let z = SymMatrix::<f64>::zeros(2);
        let i = SymMatrix::<f64>::identity(2);
        assert!(psd_order_leq(&z, &i, 0.0).unwrap());
        assert!(!psd_order_leq(&i, &z, 0.0).unwrap());
        // E[M_S] under DPP(M) for M=[[2,1],[1,2]] against Diag(p∘v) = diag(M).
        let a = SymMatrix::from_rows(&[vec![10.0 / 8.0, 3.0 / 8.0], vec![3.0 / 8.0, 10.0 / 8.0]])
            .unwrap();
        let b = SymMatrix::diagonal(&[2.0, 2.0]);
        assert!(psd_order_leq(&a, &b, 0.0).unwrap());
        assert!(psd_order_leq(&a, &SymMatrix::zeros(3), 0.0).is_err());
    }

    #[test]
    fn asymmetric_input_rejected() {
        let err = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5 + 1e-3, 1.0]]);
        assert!(matches!(err, Err(Error::ContractViolation(_))));
    }

    #[test]
    fn definiteness_is_classified() {
        assert_eq!(
            m2().definiteness().unwrap(),
            Definiteness::PositiveDefinite
        );
        let psd = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(
            psd.definiteness().unwrap(),
            Definiteness::PositiveSemidefinite
        );
        let ind = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(ind.definiteness().unwrap(), Definiteness::Indefinite);
        assert!(matches!(ind.require_psd(), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn works_in_single_precision() {
        let m = SymMatrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let spec = sym_eig(&m).unwrap();
        assert!((spec.eigenvalues()[0] - 3.0).abs() < 1e-5);
        let p = placed_pinv(&m, &CoordSubset::full(2)).unwrap();
        assert!((p.get(0, 0) - 2.0 / 3.0).abs() < 1e-5);
    }
}
