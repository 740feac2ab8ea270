use crate::error::{contract, Result};
use crate::linalg::{dot, Matrix, SymMatrix};
use crate::rng::RngStream;
use crate::scalar::Real;

/// Haar-distributed orthogonal matrix: Gram–Schmidt on a Gaussian matrix,
/// which is QR with a positive diagonal in `R`.
pub fn haar_orthogonal<T: Real>(d: usize, rng: &mut RngStream) -> Matrix<T> {
    loop {
        let mut cols: Vec<Vec<T>> = (0..d)
            .map(|_| (0..d).map(|_| rng.normal_as::<T>()).collect())
            .collect();
        let mut ok = true;
        for a in 0..d {
            for _pass in 0..2 {
                for b in 0..a {
                    let proj = dot(&cols[b], &cols[a]);
                    let prev = cols[b].clone();
                    cols[a].iter_mut().zip(&prev).for_each(|(x, &y)| *x -= proj * y);
                }
            }
            let n = dot(&cols[a], &cols[a]).sqrt();
            if !(n > T::lit(1e-8)) {
                ok = false;
                break;
            }
            cols[a].iter_mut().for_each(|x| *x /= n);
        }
        if ok {
            return Matrix::from_fn(d, d, |i, j| cols[j][i]);
        }
    }
}

/// `M = Q diag(λ) Qᵀ` with `Q` Haar-random.
pub fn synth_spectrum_matrix<T: Real>(lambdas: &[T], rng: &mut RngStream) -> Result<SymMatrix<T>> {
    contract(!lambdas.is_empty(), || "need at least one eigenvalue".into())?;
    contract(lambdas.iter().all(|l| l.is_finite() && *l >= T::zero()), || {
        "eigenvalues must be finite and nonnegative".into()
    })?;
    let d = lambdas.len();
    let q = haar_orthogonal::<T>(d, rng);
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v: T = (0..d).map(|k| q[(i, k)] * lambdas[k] * q[(j, k)]).sum();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eig;

    fn recovered(l: &[f64], seed: u64) -> f64 {
        let m = synth_spectrum_matrix(l, &mut RngStream::new(seed, 0)).unwrap();
        let spec = sym_eig(&m).unwrap();
        let mut sorted = l.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        spec.eigenvalues()
            .iter()
            .zip(&sorted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_spectrum_gives_identity() {
        let m = synth_spectrum_matrix(&[1.0; 3], &mut RngStream::new(1, 0)).unwrap();
        let err = m.as_matrix().sub(&Matrix::identity(3)).unwrap().max_abs();
        assert!(err < 1e-14);
    }

    #[test]
    fn spectra_round_trip() {
        assert!(recovered(&[4.0, 4.0, 1.0, 1.0], 2) < 1e-8);
        let exp: Vec<f64> = (1..=30).map(|i| 0.5f64.powi(i)).collect();
        assert!(recovered(&exp, 3) < 1e-8);
    }

    #[test]
    fn haar_is_orthogonal() {
        let q = haar_orthogonal::<f64>(12, &mut RngStream::new(4, 0));
        let qtq = q.transpose().matmul(&q).unwrap();
        assert!(qtq.sub(&Matrix::identity(12)).unwrap().max_abs() < 1e-13);
    }
}
