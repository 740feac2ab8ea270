use crate::error::Result;
use crate::linalg::{sym_eig, CoordSubset, Spectrum, SymMatrix};
use crate::rng::RngStream;
use crate::scalar::Real;

/// α-ridge leverage scores, the diagonal of `M(αI + M)^{-1}`, which are also
/// the inclusion marginals of `DPP(M/α)`.
pub fn ridge_leverage_scores<T: Real>(m: &SymMatrix<T>, alpha: T) -> Result<Vec<T>> {
    let spec = sym_eig(m)?;
    Ok(leverage_scores_from_spectrum(&spec, alpha))
}

/// `Σ_k V_ik² λ_k/(λ_k + α)` for each row `i`.
pub fn leverage_scores_from_spectrum<T: Real>(spec: &Spectrum<T>, alpha: T) -> Vec<T> {
    let d = spec.dim();
    let v = spec.eigenvectors();
    let shrink: Vec<T> = spec
        .eigenvalues()
        .iter()
        .map(|&l| {
            let l = l.max(T::zero());
            l / (l + alpha)
        })
        .collect();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|k| v[(i, k)] * v[(i, k)] * shrink[k])
                .sum::<T>()
                .min(T::one())
                .max(T::zero())
        })
        .collect()
}

/// Independent inclusion of every coordinate with its own probability.
pub fn poisson_sample<T: Real>(probs: &[T], rng: &mut RngStream) -> CoordSubset {
    let d = probs.len();
    let idx = probs
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| rng.bernoulli(p.to_f64_lossy()).then_some(i))
        .collect();
    CoordSubset::new(d, idx).expect("indices generated in order")
}

/// Poisson sampling with the α-ridge leverage scores as marginals: matches
/// the DPP marginals but ignores its negative correlations.
pub fn leverage_sample<T: Real>(m: &SymMatrix<T>, alpha: T, rng: &mut RngStream) -> Result<CoordSubset> {
    let scores = ridge_leverage_scores(m, alpha)?;
    Ok(poisson_sample(&scores, rng))
}

/// `draws` indices i.i.d. proportional to `weights`, deduplicated.
pub fn iid_weighted_sample<T: Real>(weights: &[T], draws: usize, rng: &mut RngStream) -> CoordSubset {
    let d = weights.len();
    let total: f64 = weights.iter().map(|w| w.to_f64_lossy()).sum();
    let mut idx = Vec::with_capacity(draws);
    if total > 0.0 {
        for _ in 0..draws {
            let target = rng.uniform() * total;
            let mut acc = 0.0;
            let mut pick = d - 1;
            for (i, w) in weights.iter().enumerate() {
                acc += w.to_f64_lossy();
                if target < acc {
                    pick = i;
                    break;
                }
            }
            idx.push(pick);
        }
    }
    CoordSubset::from_unsorted(d, idx).expect("indices in range")
}
