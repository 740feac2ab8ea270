//! Determinantal sampling `DPP(M/α)`: `P(S) ∝ det((M/α)_SS)`.

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, CoordSubset, Spectrum, SymMatrix};
use crate::rng::RngStream;
use crate::scalar::Real;

const MAX_RESAMPLES: usize = 10;
const BISECTION_ITERS: usize = 200;
const SIZE_TOL: f64 = 1e-9;

fn require_psd_spectrum<T: Real>(spec: &Spectrum<T>) -> Result<()> {
    let tol = T::lit(crate::linalg::PSD_REL_TOL) * spec.lambda_max().abs();
    let lmin = spec.lambda_min();
    if lmin < -tol {
        return Err(Error::NotPsd {
            min_eigenvalue: lmin.to_f64_lossy(),
        });
    }
    Ok(())
}

fn require_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::ContractViolation(format!(
            "alpha must be positive and finite, got {alpha}"
        )))
    }
}

/// `log det(I + M/α) = Σ log(1 + λ_i/α)`.
pub fn dpp_normalization_logdet<T: Real>(m: &SymMatrix<T>, alpha: T) -> Result<T> {
    require_alpha(alpha)?;
    let spec = sym_eig(m)?;
    dpp_normalization_logdet_spectrum(&spec, alpha)
}

pub fn dpp_normalization_logdet_spectrum<T: Real>(spec: &Spectrum<T>, alpha: T) -> Result<T> {
    require_alpha(alpha)?;
    require_psd_spectrum(spec)?;
    Ok(spec
        .eigenvalues()
        .iter()
        .map(|&l| (l.max(T::zero()) / alpha).ln_1p())
        .sum())
}

/// `E|S| = Tr(M(αI + M)^{-1}) = Σ λ_i/(λ_i + α)`.
pub fn dpp_expected_size<T: Real>(spec: &Spectrum<T>, alpha: T) -> T {
    spec.eigenvalues()
        .iter()
        .map(|&l| {
            let l = l.max(T::zero());
            l / (l + alpha)
        })
        .sum()
}

/// Inverts `α ↦ E|S|` by bisection on `log α`.
///
/// Feasible targets are `0 < k < rank(M)`. Stops once the expected size is
/// within `1e-9` of `k`.
pub fn alpha_for_expected_size<T: Real>(spec: &Spectrum<T>, k: T) -> Result<T> {
    let d = spec.dim();
    let rank = spec.numerical_rank();
    if !(k > T::zero() && k < T::from_usize_lossy(rank)) {
        return Err(Error::InfeasibleSize {
            requested: k.to_f64_lossy(),
            upper: rank as f64,
        });
    }
    let l1 = spec.lambda_max();
    let l_small = spec.eigenvalues()[rank - 1];
    let df = T::from_usize_lossy(d);
    let sixty = T::lit(60.0);
    let mut lo = (l_small * k / (df - k)).ln() - sixty;
    let mut hi = (l1 * df / k).ln() + sixty;
    let tol = T::lit(SIZE_TOL).max(T::epsilon() * df * T::lit(16.0));

    let mut best = (T::infinity(), (lo + hi) * T::lit(0.5));
    for _ in 0..BISECTION_ITERS {
        let mid = (lo + hi) * T::lit(0.5);
        let size = dpp_expected_size(spec, mid.exp());
        let err = size - k;
        if err.abs() < best.0 {
            best = (err.abs(), mid);
        }
        if err.abs() <= tol {
            break;
        }
        // Expected size decreases as α grows.
        if err > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.1.exp())
}

/// Exact DPP draw by the spectral algorithm: select eigenvectors
/// independently with probability `λ_i/(λ_i+α)`, then sample one coordinate
/// per selected eigenvector from the projection DPP they span.
pub fn dpp_sample<T: Real>(spec: &Spectrum<T>, alpha: T, rng: &mut RngStream) -> Result<CoordSubset> {
    require_alpha(alpha)?;
    let d = spec.dim();
    for _ in 0..=MAX_RESAMPLES {
        let marked: Vec<usize> = spec
            .eigenvalues()
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| {
                let l = l.max(T::zero());
                let p = (l / (l + alpha)).to_f64_lossy();
                rng.bernoulli(p).then_some(i)
            })
            .collect();
        if let Some(sel) = sample_projection(spec, &marked, rng) {
            return CoordSubset::from_unsorted(d, sel);
        }
    }
    Err(Error::NumericalFailure {
        what: "projection DPP elimination broke down repeatedly",
        residual: 0.0,
    })
}

/// Samples from the projection DPP spanned by the chosen eigenvectors;
/// `None` on numerical breakdown.
fn sample_projection<T: Real>(
    spec: &Spectrum<T>,
    marked: &[usize],
    rng: &mut RngStream,
) -> Option<Vec<usize>> {
    let d = spec.dim();
    let vecs = spec.eigenvectors();
    let mut cols: Vec<Vec<T>> = marked.iter().map(|&k| vecs.column(k)).collect();
    let mut selected = Vec::with_capacity(cols.len());
    let floor = T::lit(1e-12);

    while !cols.is_empty() {
        let weights: Vec<T> = (0..d)
            .map(|j| cols.iter().map(|c| c[j] * c[j]).sum())
            .collect();
        let total: T = weights.iter().copied().sum();
        if !(total > floor) {
            return None;
        }
        let target = rng.uniform_as::<T>() * total;
        let mut acc = T::zero();
        let mut j = d - 1;
        for (i, &w) in weights.iter().enumerate() {
            acc += w;
            if target < acc && w > T::zero() {
                j = i;
                break;
            }
        }
        if weights[j] <= T::zero() {
            j = weights
                .iter()
                .enumerate()
                .rev()
                .find(|(_, &w)| w > T::zero())
                .map(|(i, _)| i)?;
        }
        selected.push(j);

        let pivot_idx = cols
            .iter()
            .enumerate()
            .max_by(|a, b| {
                a.1[j]
                    .abs()
                    .partial_cmp(&b.1[j].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i)?;
        let pivot = cols.swap_remove(pivot_idx);
        let pj = pivot[j];
        if pj == T::zero() {
            return None;
        }
        for c in cols.iter_mut() {
            let f = c[j] / pj;
            for (ci, &pi) in c.iter_mut().zip(&pivot) {
                *ci -= f * pi;
            }
            c[j] = T::zero();
        }
        orthonormalize(&mut cols)?;
    }
    Some(selected)
}

/// Modified Gram–Schmidt in place.
fn orthonormalize<T: Real>(cols: &mut [Vec<T>]) -> Option<()> {
    for a in 0..cols.len() {
        for b in 0..a {
            let (head, tail) = cols.split_at_mut(a);
            let prev = &head[b];
            let cur = &mut tail[0];
            let proj = crate::linalg::dot(prev, cur);
            for (x, &y) in cur.iter_mut().zip(prev) {
                *x -= proj * y;
            }
        }
        let n = crate::linalg::norm2(&cols[a]);
        if !(n > T::lit(1e-10)) {
            return None;
        }
        for x in cols[a].iter_mut() {
            *x /= n;
        }
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(l: &[f64]) -> Spectrum<f64> {
        Spectrum::from_eigenvalues(l.to_vec()).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let id = SymMatrix::<f64>::identity(2);
        assert!((dpp_normalization_logdet(&id, 1.0).unwrap() - 4f64.ln()).abs() < 1e-15);
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!((dpp_normalization_logdet(&m, 1.0).unwrap() - 8f64.ln()).abs() < 1e-14);
        assert!(dpp_normalization_logdet(&m, 1e300).unwrap().abs() < 1e-290);
        let ind = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            dpp_normalization_logdet(&ind, 1.0),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn expected_size_examples() {
        assert!((dpp_expected_size(&spec(&[1.0, 1.0]), 1.0) - 1.0).abs() < 1e-15);
        assert!((dpp_expected_size(&spec(&[3.0, 1.0]), 1.0) - 1.25).abs() < 1e-15);
        assert!((dpp_expected_size(&spec(&[4.0, 4.0, 1.0, 1.0]), 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_inversion_examples() {
        let a = alpha_for_expected_size(&spec(&[1.0, 1.0]), 1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-8);
        let a = alpha_for_expected_size(&spec(&[4.0, 4.0, 1.0, 1.0]), 2.0).unwrap();
        assert!((a - 2.0).abs() < 1e-8);
        // Tail-sum choice of alpha keeps the expected size below k.
        let s = spec(&[3.0, 1.0]);
        assert!(dpp_expected_size(&s, 1.0) < 2.0);
    }

    #[test]
    fn alpha_inversion_rejects_infeasible() {
        let s = spec(&[2.0, 1.0, 0.0]);
        assert!(matches!(
            alpha_for_expected_size(&s, 2.0),
            Err(Error::InfeasibleSize { .. })
        ));
        assert!(alpha_for_expected_size(&s, 0.0).is_err());
        assert!(alpha_for_expected_size(&s, 1.5).is_ok());
    }

    #[test]
    fn sample_distribution_on_one_by_one() {
        let s = spec(&[1.0]);
        let mut rng = RngStream::new(11, 0);
        let n = 20_000;
        let hits = (0..n)
            .filter(|_| !dpp_sample(&s, 1.0, &mut rng).unwrap().is_empty())
            .count();
        let p = hits as f64 / n as f64;
        let se = (0.25 / n as f64).sqrt();
        assert!((p - 0.5).abs() < 4.0 * se, "p = {p}");
    }
}
