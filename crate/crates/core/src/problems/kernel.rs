use crate::error::{contract, Result};
use crate::linalg::{dot, Matrix, SymMatrix};
use crate::scalar::Real;

use super::data::DataSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaternOrder {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl MaternOrder {
    pub fn value(self) -> f64 {
        match self {
            Self::Half => 0.5,
            Self::ThreeHalves => 1.5,
            Self::FiveHalves => 2.5,
        }
    }

    pub fn from_value(s: f64) -> Option<Self> {
        [Self::Half, Self::ThreeHalves, Self::FiveHalves]
            .into_iter()
            .find(|o| o.value() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec<T> {
    /// `k(x, y) = xᵀy`.
    Linear,
    /// `k(x, y) = exp(−‖x−y‖²/(2l²))`.
    SquaredExponential { lengthscale: T },
    /// Half-integer Matérn with `r = ‖x−y‖`, scale `ρ` and amplitude `C₂`:
    ///
    /// * `1/2`: `C₂ exp(−r/ρ)`
    /// * `3/2`: `C₂ (1 + √3 r/ρ) exp(−√3 r/ρ)`
    /// * `5/2`: `C₂ (1 + √5 r/ρ + 5r²/(3ρ²)) exp(−√5 r/ρ)`
    Matern {
        order: MaternOrder,
        scale: T,
        amplitude: T,
    },
}

impl<T: Real> KernelSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Linear => Ok(()),
            Self::SquaredExponential { lengthscale } => contract(*lengthscale > T::zero(), || {
                format!("lengthscale must be positive, got {lengthscale}")
            }),
            Self::Matern {
                scale, amplitude, ..
            } => contract(*scale > T::zero() && *amplitude > T::zero(), || {
                format!("Matern scale and amplitude must be positive, got {scale}, {amplitude}")
            }),
        }
    }

    pub fn eval(&self, x: &[T], y: &[T]) -> T {
        let sq_dist = || -> T { x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum() };
        match self {
            Self::Linear => dot(x, y),
            Self::SquaredExponential { lengthscale } => {
                (-sq_dist() / (T::lit(2.0) * *lengthscale * *lengthscale)).exp()
            }
            Self::Matern {
                order,
                scale,
                amplitude,
            } => {
                let r = sq_dist().sqrt() / *scale;
                let shape = match order {
                    MaternOrder::Half => (-r).exp(),
                    MaternOrder::ThreeHalves => {
                        let t = T::lit(3f64.sqrt()) * r;
                        (T::one() + t) * (-t).exp()
                    }
                    MaternOrder::FiveHalves => {
                        let t = T::lit(5f64.sqrt()) * r;
                        (T::one() + t + t * t / T::lit(3.0)) * (-t).exp()
                    }
                };
                *amplitude * shape
            }
        }
    }
}

/// `K_ij = k(a_i, a_j)` over the rows of the data matrix.
pub fn gram_matrix<T: Real>(kernel: &KernelSpec<T>, data: &DataSet<T>) -> Result<SymMatrix<T>> {
    kernel.validate()?;
    let pts = data.points();
    let n = pts.rows();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.eval(pts.row(i), pts.row(j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    SymMatrix::new(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(rows: &[Vec<f64>]) -> DataSet<f64> {
        DataSet::new(Matrix::from_rows(rows).unwrap(), vec![0.0; rows.len()]).unwrap()
    }

    #[test]
    fn se_diagonal_and_duplicates() {
        let k = KernelSpec::SquaredExponential { lengthscale: 1.0 };
        let g = gram_matrix(&k, &data(&[vec![0.0], vec![0.0]])).unwrap();
        assert_eq!(g.as_matrix().as_slice(), &[1.0; 4]);
        let g = gram_matrix(&k, &data(&[vec![0.3, -1.0], vec![2.0, 0.5]])).unwrap();
        assert_eq!(g.get(0, 0), 1.0);
        assert!((g.get(0, 1) - (-(1.7f64 * 1.7 + 1.5 * 1.5) / 2.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn linear_kernel_is_aat() {
        let rows = vec![vec![1.0, 2.0], vec![-0.5, 3.0], vec![0.0, 1.0]];
        let a = Matrix::from_rows(&rows).unwrap();
        let g = gram_matrix(&KernelSpec::Linear, &data(&rows)).unwrap();
        let aat = a.matmul(&a.transpose()).unwrap();
        assert!(g.as_matrix().sub(&aat).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn matern_closed_forms() {
        let x = [0.0, 0.0];
        let y = [3.0, 4.0];
        let r: f64 = 5.0 / 2.0;
        let k = |order| KernelSpec::Matern {
            order,
            scale: 2.0,
            amplitude: 1.5,
        };
        assert!((k(MaternOrder::Half).eval(&x, &y) - 1.5 * (-r).exp()).abs() < 1e-15);
        let t = 3f64.sqrt() * r;
        assert!((k(MaternOrder::ThreeHalves).eval(&x, &y) - 1.5 * (1.0 + t) * (-t).exp()).abs() < 1e-15);
        let t = 5f64.sqrt() * r;
        let expect = 1.5 * (1.0 + t + t * t / 3.0) * (-t).exp();
        assert!((k(MaternOrder::FiveHalves).eval(&x, &y) - expect).abs() < 1e-15);
        assert_eq!(k(MaternOrder::FiveHalves).eval(&x, &x), 1.5);
        assert_eq!(MaternOrder::from_value(1.5), Some(MaternOrder::ThreeHalves));
        assert_eq!(MaternOrder::from_value(1.0), None);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        let k = KernelSpec::SquaredExponential { lengthscale: 0.0 };
        assert!(gram_matrix(&k, &data(&[vec![1.0]])).is_err());
    }
}
