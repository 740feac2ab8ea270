use crate::error::{contract, Result};
use crate::linalg::{dot, sandwich, sym_eig, CoordSubset, Matrix, SymMatrix};
use crate::optimizer::Problem;
use crate::scalar::Real;

use super::data::DataSet;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogisticOptions<T> {
    /// Added to the metric `¼AᵀA` only; the objective is unchanged.
    pub metric_ridge: T,
    /// Strong convexity constant relative to the metric. `None` uses the
    /// local value at the origin, `λ_min(M^{-1/2} H(0) M^{-1/2})`.
    pub kappa: Option<T>,
    pub rel_smoothness: Option<T>,
}

/// `f(x) = Σ_i log(1 + exp(−y_i a_iᵀx))` with labels in `{−1, +1}` and
/// metric `¼AᵀA + ridge·I`.
#[derive(Debug, Clone)]
pub struct LogisticProblem<T> {
    a: Matrix<T>,
    y: Vec<T>,
    metric: SymMatrix<T>,
    metric_ridge: T,
    kappa: T,
    rel_smoothness: Option<T>,
}

fn softplus<T: Real>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

fn logistic<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

pub fn logistic_problem<T: Real>(data: &DataSet<T>, options: LogisticOptions<T>) -> Result<LogisticProblem<T>> {
    let y = data.responses().to_vec();
    contract(y.iter().all(|&v| v == T::one() || v == -T::one()), || {
        "logistic responses must be -1 or +1".into()
    })?;
    contract(options.metric_ridge >= T::zero(), || "metric ridge must be nonnegative".into())?;
    let a = data.points().clone();
    let metric = SymMatrix::new(a.gram_columns().scale(T::lit(0.25)))?.shifted(options.metric_ridge);
    let mut p = LogisticProblem {
        a,
        y,
        metric,
        metric_ridge: options.metric_ridge,
        kappa: T::one(),
        rel_smoothness: options.rel_smoothness,
    };
    p.kappa = match options.kappa {
        Some(k) => k,
        None => p.local_kappa(&vec![T::zero(); p.dim()])?,
    };
    Ok(p)
}

impl<T: Real> LogisticProblem<T> {
    pub fn metric_ridge(&self) -> T {
        self.metric_ridge
    }

    /// `λ_min(M^{-1/2} H(x) M^{-1/2})`; zero when `M` is singular.
    pub fn local_kappa(&self, x: &[T]) -> Result<T> {
        let spec = sym_eig(&self.metric)?;
        if !(spec.lambda_min() > T::zero()) {
            return Ok(T::zero());
        }
        let inv_spec = sym_eig(&spec.apply(|l| T::one() / l))?;
        let h = self.hessian(x).expect("logistic Hessian");
        Ok(sym_eig(&sandwich(&inv_spec, &h)?)?.lambda_min())
    }

    fn margins(&self, x: &[T]) -> Vec<T> {
        let ax = self.a.matvec(x).expect("dimension");
        ax.iter().zip(&self.y).map(|(&v, &y)| y * v).collect()
    }
}

impl<T: Real> Problem<T> for LogisticProblem<T> {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn objective(&self, x: &[T]) -> T {
        self.margins(x).into_iter().map(|z| softplus(-z)).sum()
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        self.partial_gradient(x, &CoordSubset::full(self.dim()))
    }

    fn partial_gradient(&self, x: &[T], s: &CoordSubset) -> Vec<T> {
        let w: Vec<T> = self
            .margins(x)
            .iter()
            .zip(&self.y)
            .map(|(&z, &y)| -y * logistic(-z))
            .collect();
        s.iter()
            .map(|j| (0..self.a.rows()).map(|i| w[i] * self.a[(i, j)]).sum())
            .collect()
    }

    fn metric(&self) -> &SymMatrix<T> {
        &self.metric
    }

    fn kappa(&self) -> T {
        self.kappa
    }

    /// `Σ_i s_i(1 − s_i) a_i a_iᵀ` with `s_i = σ(a_iᵀx)`.
    fn hessian(&self, x: &[T]) -> Option<SymMatrix<T>> {
        let ax = self.a.matvec(x).ok()?;
        let d = self.dim();
        let mut h = Matrix::zeros(d, d);
        for (i, &z) in ax.iter().enumerate() {
            let s = logistic(z);
            let w = s * (T::one() - s);
            let row = self.a.row(i);
            for p in 0..d {
                for q in 0..=p {
                    h[(p, q)] += w * row[p] * row[q];
                }
            }
        }
        for p in 0..d {
            for q in 0..p {
                h[(q, p)] = h[(p, q)];
            }
        }
        SymMatrix::new(h).ok()
    }

    fn rel_smoothness(&self) -> Option<T> {
        self.rel_smoothness
    }
}

/// `Σ_i log(1 + exp(−y_i a_iᵀx))` evaluated directly, for cross-checks.
pub fn logistic_loss_direct<T: Real>(data: &DataSet<T>, x: &[T]) -> T {
    (0..data.len())
        .map(|i| {
            let z = data.responses()[i] * dot(data.points().row(i), x);
            (T::one() + (-z).exp()).ln()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{check_smoothness, rnm_relative_step};
    use crate::rng::RngStream;

    fn two_points() -> DataSet<f64> {
        let pts = Matrix::from_rows(&[vec![1.0, 0.5], vec![-0.3, 2.0]]).unwrap();
        DataSet::new(pts, vec![1.0, -1.0]).unwrap()
    }

    #[test]
    fn value_and_gradient_at_origin() {
        let data = two_points();
        let p = logistic_problem(&data, LogisticOptions::default()).unwrap();
        let zero = [0.0, 0.0];
        assert!((p.objective(&zero) - 2.0 * 2f64.ln()).abs() < 1e-15);
        let g = p.gradient(&zero);
        // −½ Σ y_i a_i
        let expect = [-0.5 * (1.0 + 0.3), -0.5 * (0.5 - 2.0)];
        assert!((g[0] - expect[0]).abs() < 1e-15 && (g[1] - expect[1]).abs() < 1e-15);
        let x = [0.3, -0.7];
        assert!((p.objective(&x) - logistic_loss_direct(&data, &x)).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = logistic_problem(&two_points(), LogisticOptions::default()).unwrap();
        let x = [0.4, -1.1];
        let g = p.gradient(&x);
        let h = 1e-6;
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fd = (p.objective(&xp) - p.objective(&xm)) / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn smoothness_spot_check() {
        let mut rng = RngStream::new(5, 0);
        let pts = Matrix::from_fn(30, 4, |_, _| rng.normal());
        let y = (0..30).map(|i| if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
        let data = DataSet::new(pts, y).unwrap();
        let p = logistic_problem(&data, LogisticOptions::default()).unwrap();
        assert!(check_smoothness(&p, 100, 1.0, &mut rng).passed());
        assert!(p.kappa() > 0.0 && p.kappa() <= 1.0 + 1e-12);
    }

    #[test]
    fn relative_step_decreases_objective() {
        let opts = LogisticOptions {
            metric_ridge: 0.0,
            kappa: None,
            rel_smoothness: Some(2.0),
        };
        let p = logistic_problem(&two_points(), opts).unwrap();
        let x = [0.0, 0.0];
        let next = rnm_relative_step(&p, &x, &CoordSubset::full(2)).unwrap();
        assert!(p.objective(&next) < p.objective(&x));
        assert_eq!(rnm_relative_step(&p, &x, &CoordSubset::empty(2)).unwrap(), x.to_vec());
    }

    #[test]
    fn rejects_bad_labels() {
        let pts = Matrix::<f64>::identity(2);
        let data = DataSet::new(pts, vec![1.0, 0.0]).unwrap();
        assert!(logistic_problem(&data, LogisticOptions::default()).is_err());
    }
}
