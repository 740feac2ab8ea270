use std::sync::OnceLock;

use super::dense::Matrix;
use super::eigen::symmetric_eigen;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative tolerance below which an eigenvalue counts as zero when
/// classifying definiteness.
pub const PSD_REL_TOL: f64 = 1e-10;

/// Absolute-plus-relative tolerance used when checking `|a_ij - a_ji|`.
pub const SYMMETRY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

impl Definiteness {
    pub fn is_psd(self) -> bool {
        !matches!(self, Definiteness::Indefinite)
    }
}

/// Dense real symmetric matrix.
///
/// Entries are stored exactly symmetric. The definiteness classification is
/// computed at most once and cached.
#[derive(Debug)]
pub struct SymMatrix<T> {
    inner: Matrix<T>,
    evidence: OnceLock<Definiteness>,
}

impl<T: Clone> Clone for SymMatrix<T> {
    fn clone(&self) -> Self {
        let evidence = OnceLock::new();
        if let Some(&d) = self.evidence.get() {
            let _ = evidence.set(d);
        }
        Self {
            inner: self.inner.clone(),
            evidence,
        }
    }
}

impl<T: PartialEq> PartialEq for SymMatrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

fn symmetry_tolerance<T: Real>(max_abs: T) -> T {
    let rel = T::lit(SYMMETRY_REL_TOL).max(T::epsilon() * T::lit(8.0));
    rel * (T::one() + max_abs)
}

impl<T: Real> SymMatrix<T> {
    /// Checks symmetry within `1e-12 · (1 + max|a|)` and stores the exact
    /// symmetric part.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if !m.is_finite() {
            return Err(Error::ContractViolation("matrix has non-finite entries".into()));
        }
        let tol = symmetry_tolerance(m.max_abs());
        let n = m.rows();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if worst > tol {
            return Err(Error::ContractViolation(format!(
                "matrix is not symmetric (max asymmetry {worst:e} > {tol:e})"
            )));
        }
        Ok(Self::symmetrize(m))
    }

    /// Stores `(A + Aᵀ)/2` without checking; for results that are symmetric
    /// up to rounding by construction.
    pub(crate) fn symmetrize(mut m: Matrix<T>) -> Self {
        let n = m.rows();
        let half = T::lit(0.5);
        for i in 0..n {
            for j in 0..i {
                let avg = (m[(i, j)] + m[(j, i)]) * half;
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        Self {
            inner: m,
            evidence: OnceLock::new(),
        }
    }

    pub(crate) fn with_evidence(self, d: Definiteness) -> Self {
        let _ = self.evidence.set(d);
        self
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn zeros(n: usize) -> Self {
        Self::symmetrize(Matrix::zeros(n, n)).with_evidence(if n == 0 {
            Definiteness::PositiveDefinite
        } else {
            Definiteness::PositiveSemidefinite
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::symmetrize(Matrix::identity(n)).with_evidence(Definiteness::PositiveDefinite)
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        Self::symmetrize(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.inner[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.inner
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        self.inner.matvec(x)
    }

    /// `xᵀ M x`.
    pub fn quadratic_form(&self, x: &[T]) -> Result<T> {
        let mx = self.matvec(x)?;
        Ok(super::dense::dot(x, &mx))
    }

    /// `M + shift · I`.
    pub fn shifted(&self, shift: T) -> Self {
        let mut m = self.inner.clone();
        for i in 0..self.dim() {
            m[(i, i)] += shift;
        }
        Self::symmetrize(m)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::symmetrize(self.inner.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::symmetrize(self.inner.add(&other.inner)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::symmetrize(self.inner.sub(&other.inner)?))
    }

    pub fn max_abs(&self) -> T {
        self.inner.max_abs()
    }

    pub fn frobenius_norm(&self) -> T {
        self.inner.frobenius_norm()
    }

    pub fn diag(&self) -> Vec<T> {
        self.inner.diagonal()
    }

    /// Definiteness from the spectrum, cached after the first call.
    pub fn definiteness(&self) -> Result<Definiteness> {
        if let Some(&d) = self.evidence.get() {
            return Ok(d);
        }
        let spec = sym_eig(self)?;
        let d = classify(spec.lambda_max(), spec.lambda_min());
        let _ = self.evidence.set(d);
        Ok(d)
    }

    pub fn require_psd(&self) -> Result<()> {
        match self.definiteness()? {
            Definiteness::Indefinite => Err(Error::NotPsd {
                min_eigenvalue: sym_eig(self)?.lambda_min().to_f64_lossy(),
            }),
            _ => Ok(()),
        }
    }
}

fn classify<T: Real>(lmax: T, lmin: T) -> Definiteness {
    let tol = T::lit(PSD_REL_TOL) * lmax.abs().max(lmin.abs());
    if lmin > tol {
        Definiteness::PositiveDefinite
    } else if lmin >= -tol {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Eigenvalues in decreasing order with orthonormal eigenvectors stored as
/// the columns of `eigenvectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    eigenvalues: Vec<T>,
    eigenvectors: Matrix<T>,
}

impl<T: Real> Spectrum<T> {
    /// Spectrum of a diagonal matrix with the given (decreasing) eigenvalues.
    pub fn from_eigenvalues(eigenvalues: Vec<T>) -> Result<Self> {
        if eigenvalues.windows(2).any(|w| !(w[0] >= w[1])) {
            return Err(Error::ContractViolation(
                "eigenvalues must be finite and in decreasing order".into(),
            ));
        }
        let n = eigenvalues.len();
        Ok(Self {
            eigenvalues,
            eigenvectors: Matrix::identity(n),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Matrix<T> {
        &self.eigenvectors
    }

    /// Largest eigenvalue; zero for the empty spectrum.
    pub fn lambda_max(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    /// Smallest eigenvalue; zero for the empty spectrum.
    pub fn lambda_min(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    /// `V f(Λ) Vᵀ`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> SymMatrix<T> {
        let n = self.dim();
        let fl: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = T::zero();
                for k in 0..n {
                    s += v[(i, k)] * fl[k] * v[(j, k)];
                }
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        SymMatrix::symmetrize(m)
    }

    pub fn reconstruct(&self) -> SymMatrix<T> {
        self.apply(|l| l)
    }

    /// Principal square root, clamping tiny negative eigenvalues to zero.
    pub fn sqrt(&self) -> SymMatrix<T> {
        self.apply(|l| l.max(T::zero()).sqrt())
    }

    /// Sum of eigenvalues over 0-based positions `from..`.
    pub fn tail_sum(&self, from: usize) -> T {
        self.eigenvalues.iter().skip(from).copied().sum()
    }

    /// Number of eigenvalues above `1e-12 · λ_max`.
    pub fn numerical_rank(&self) -> usize {
        let cut = T::lit(1e-12) * self.lambda_max().abs();
        self.eigenvalues.iter().filter(|&&l| l > cut).count()
    }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted decreasing.
pub fn sym_eig<T: Real>(m: &SymMatrix<T>) -> Result<Spectrum<T>> {
    let (vals, vecs) = symmetric_eigen(m.as_matrix())?;
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<T> = order.iter().map(|&k| vals[k]).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    if !eigenvalues.iter().all(|v| v.is_finite()) {
        return Err(Error::NumericalFailure {
            what: "symmetric eigensolver produced non-finite values",
            residual: f64::NAN,
        });
    }
    if let (Some(&hi), Some(&lo)) = (eigenvalues.first(), eigenvalues.last()) {
        let _ = m.evidence.set(classify(hi, lo));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}
