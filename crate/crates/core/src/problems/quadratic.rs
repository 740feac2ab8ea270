use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, dot, CoordSubset, Matrix, SymMatrix};
use crate::optimizer::Problem;
use crate::scalar::Real;

use super::data::DataSet;
use super::kernel::{gram_matrix, KernelSpec};

/// `f(x) = ½ xᵀAx − bᵀx + c` with `A` positive definite. The metric is `A`
/// itself, so `κ = 1` and the over-approximation is tight.
#[derive(Debug, Clone)]
pub struct QuadraticProblem<T> {
    a: SymMatrix<T>,
    b: Vec<T>,
    c: T,
    x_star: Vec<T>,
    f_star: T,
}

impl<T: Real> QuadraticProblem<T> {
    /// Solves `A x* = b` once so that gaps are exact.
    pub fn new(a: SymMatrix<T>, b: Vec<T>, c: T) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.len(),
            });
        }
        let l = cholesky(a.as_matrix()).ok_or_else(|| Error::NotStronglyConvex {
            min_eigenvalue: crate::linalg::sym_eig(&a)
                .map(|s| s.lambda_min().to_f64_lossy())
                .unwrap_or(f64::NAN),
        })?;
        let x_star = cholesky_solve(&l, &b);
        let f_star = c - T::lit(0.5) * dot(&b, &x_star);
        Ok(Self {
            a,
            b,
            c,
            x_star,
            f_star,
        })
    }

    /// The quadratic with minimizer `x_star`: `b = A x_star`, `c = 0`.
    pub fn with_minimizer(a: SymMatrix<T>, x_star: &[T]) -> Result<Self> {
        let b = a.matvec(x_star)?;
        Self::new(a, b, T::zero())
    }

    pub fn minimizer(&self) -> &[T] {
        &self.x_star
    }

    pub fn linear_term(&self) -> &[T] {
        &self.b
    }

    pub fn constant(&self) -> T {
        self.c
    }
}

impl<T: Real> Problem<T> for QuadraticProblem<T> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn objective(&self, x: &[T]) -> T {
        let ax = self.a.matvec(x).expect("dimension");
        T::lit(0.5) * dot(x, &ax) - dot(&self.b, x) + self.c
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = self.a.matvec(x).expect("dimension");
        g.iter_mut().zip(&self.b).for_each(|(gi, &bi)| *gi -= bi);
        g
    }

    fn partial_gradient(&self, x: &[T], s: &CoordSubset) -> Vec<T> {
        let m = self.a.as_matrix();
        s.iter().map(|i| dot(m.row(i), x) - self.b[i]).collect()
    }

    fn metric(&self) -> &SymMatrix<T> {
        &self.a
    }

    fn kappa(&self) -> T {
        T::one()
    }

    fn optimum_value(&self) -> Option<T> {
        Some(self.f_star)
    }

    /// `½ (x − x*)ᵀ A (x − x*)`, free of the cancellation in `f(x) − f*`.
    fn gap(&self, x: &[T]) -> T {
        let e: Vec<T> = x.iter().zip(&self.x_star).map(|(&a, &b)| a - b).collect();
        T::lit(0.5) * self.a.quadratic_form(&e).expect("dimension")
    }

    fn hessian(&self, _x: &[T]) -> Option<SymMatrix<T>> {
        Some(self.a.clone())
    }

    fn rel_smoothness(&self) -> Option<T> {
        Some(T::one())
    }
}

/// Dual kernel ridge regression
/// `g(α) = (1/2n) αᵀKα + (λ/2) Σ_i (α_i² + 2 α_i y_i)`,
/// i.e. a quadratic with `M = K/n + λI` and linear term `λy`.
pub fn dual_krr_problem<T: Real>(
    kernel: &KernelSpec<T>,
    data: &DataSet<T>,
    lambda: T,
) -> Result<QuadraticProblem<T>> {
    let k = gram_matrix(kernel, data)?;
    dual_krr_from_gram(&k, data.responses(), lambda)
}

/// [`dual_krr_problem`] for a precomputed Gram matrix.
pub fn dual_krr_from_gram<T: Real>(k: &SymMatrix<T>, y: &[T], lambda: T) -> Result<QuadraticProblem<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::ContractViolation(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let n = T::from_usize_lossy(k.dim());
    let m = k.scaled(T::one() / n).shifted(lambda);
    let b = y.iter().map(|&v| -lambda * v).collect();
    QuadraticProblem::new(m, b, T::zero())
}

/// Primal ridge regression `f(x) = ½‖Ax − y‖² + (λ/2)‖x‖²`, un-averaged so
/// that the metric is exactly `AᵀA + λI`.
pub fn primal_ridge_problem<T: Real>(data: &DataSet<T>, lambda: T) -> Result<QuadraticProblem<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::ContractViolation(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let a: &Matrix<T> = data.points();
    let y = data.responses();
    let m = SymMatrix::new(a.gram_columns())?.shifted(lambda);
    let b = a.transpose().matvec(y)?;
    let c = T::lit(0.5) * dot(y, y);
    QuadraticProblem::new(m, b, c)
}
