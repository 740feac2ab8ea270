//! Rate quantities indexed by block size.
//!
//! Sizes `k` are 1-based here, as in the tail sums they name. Two tail
//! conventions are in use for the regularizer attached to size `k`:
//!
//! * [`TailConvention::Inclusive`]: `α(k) = Σ_{i ≥ k} λ_i`
//! * [`TailConvention::Exclusive`]: `α(k) = Σ_{i > k} λ_i`
//!
//! Under the inclusive convention `E|S| < k` at `α(k)`, and `σ(d) = 1/2`.
//! Under the exclusive one `α(d) = 0`, which is the full Newton step.

use crate::error::{contract, Error, Result};
use crate::linalg::Spectrum;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailConvention {
    #[default]
    Inclusive,
    Exclusive,
}

impl TailConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::Inclusive => "inclusive",
            Self::Exclusive => "exclusive",
        }
    }
}

pub(crate) fn lambda_d<T: Real>(spec: &Spectrum<T>) -> Result<T> {
    let ld = spec.lambda_min();
    if ld > T::zero() {
        Ok(ld)
    } else {
        Err(Error::NotStronglyConvex {
            min_eigenvalue: ld.to_f64_lossy(),
        })
    }
}

/// `α(k)` for 1-based `k`. Valid sizes are `1..=d` for the inclusive
/// convention and `0..=d` for the exclusive one.
pub fn alpha_tail<T: Real>(spec: &Spectrum<T>, k: usize, conv: TailConvention) -> Result<T> {
    let d = spec.dim();
    let from = match conv {
        TailConvention::Inclusive => {
            contract((1..=d).contains(&k), || format!("k must lie in [1, {d}], got {k}"))?;
            k - 1
        }
        TailConvention::Exclusive => {
            contract(k <= d, || format!("k must lie in [0, {d}], got {k}"))?;
            k
        }
    };
    Ok(spec.tail_sum(from))
}

/// `σ(k) = λ_d/(λ_d + α(k))` (with `κ = 1`).
pub fn sigma_at_size<T: Real>(spec: &Spectrum<T>, k: usize, conv: TailConvention) -> Result<T> {
    let ld = lambda_d(spec)?;
    Ok(ld / (ld + alpha_tail(spec, k, conv)?))
}

/// `σ(k)` for `k = 1..=d` under the inclusive convention, and the largest
/// deviation from `σ(k) = σ(k+1)/(1 + (λ_k/λ_d) σ(k+1))` over `k < d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport<T> {
    pub sigmas: Vec<(usize, T)>,
    pub max_residual: T,
}

pub fn sigma_recurrence_check<T: Real>(spec: &Spectrum<T>) -> Result<RecurrenceReport<T>> {
    let ld = lambda_d(spec)?;
    let d = spec.dim();
    let lam = spec.eigenvalues();
    let sigmas = (1..=d)
        .map(|k| sigma_at_size(spec, k, TailConvention::Inclusive).map(|s| (k, s)))
        .collect::<Result<Vec<_>>>()?;
    let mut max_residual = T::zero();
    for k in 1..d {
        let next = sigmas[k].1;
        let predicted = next / (T::one() + lam[k - 1] / ld * next);
        max_residual = max_residual.max((sigmas[k - 1].1 - predicted).abs());
    }
    Ok(RecurrenceReport {
        sigmas,
        max_residual,
    })
}

fn check_tau<T: Real>(spec: &Spectrum<T>, tau: usize) -> Result<()> {
    let d = spec.dim();
    contract((1..=d).contains(&tau), || format!("tau must lie in [1, {d}], got {tau}"))
}

fn head_ratio<T: Real>(spec: &Spectrum<T>, tau: usize) -> Result<T> {
    check_tau(spec, tau)?;
    let ld = lambda_d(spec)?;
    Ok(spec.eigenvalues()[..tau - 1].iter().map(|&l| l / ld).sum())
}

/// `1 + Σ_{j<τ} λ_j/λ_d`, the speedup factor claimed for going from size 1
/// to size `τ`. This is not a valid lower bound on `σ(τ)/σ(1)` in general;
/// see [`speedup_exact`] and [`speedup_valid_bound`].
pub fn speedup_lower_bound<T: Real>(spec: &Spectrum<T>, tau: usize) -> Result<T> {
    Ok(T::one() + head_ratio(spec, tau)?)
}

/// `σ(τ)/σ(1)` under the given convention.
pub fn speedup_exact<T: Real>(spec: &Spectrum<T>, tau: usize, conv: TailConvention) -> Result<T> {
    check_tau(spec, tau)?;
    Ok(sigma_at_size(spec, tau, conv)? / sigma_at_size(spec, 1, conv)?)
}

/// `1 + σ(1) Σ_{j<τ} λ_j/λ_d`, which lower-bounds `σ(τ)/σ(1)` under the
/// inclusive convention: unrolling the recurrence gives
/// `σ(τ)/σ(1) = 1/(1 − σ(1) a) ≥ 1 + σ(1) a` with `a = Σ_{j<τ} λ_j/λ_d`.
pub fn speedup_valid_bound<T: Real>(spec: &Spectrum<T>, tau: usize) -> Result<T> {
    let a = head_ratio(spec, tau)?;
    let s1 = sigma_at_size(spec, 1, TailConvention::Inclusive)?;
    Ok(T::one() + s1 * a)
}

/// Iterations `(log ε − log ε₀)/log(1 − σ)` needed to shrink the gap from
/// `ε₀` to `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationEstimate<T> {
    pub iterations: T,
    /// Set when `σ ≥ 1` and the count was replaced by a single Newton step.
    pub single_step: bool,
}

impl<T: Real> IterationEstimate<T> {
    pub fn count(&self) -> T {
        self.iterations.ceil()
    }
}

pub fn iterations_to_accuracy<T: Real>(sigma: T, eps0: T, eps: T) -> Result<IterationEstimate<T>> {
    contract(sigma > T::zero(), || format!("sigma must be positive, got {sigma}"))?;
    contract(eps > T::zero() && eps <= eps0, || {
        format!("need 0 < eps <= eps0, got eps={eps}, eps0={eps0}")
    })?;
    if sigma >= T::one() {
        return Ok(IterationEstimate {
            iterations: T::one(),
            single_step: true,
        });
    }
    let rate = (-sigma).ln_1p();
    let iterations = if eps == eps0 {
        T::zero()
    } else if rate == T::zero() {
        T::infinity()
    } else {
        let t = (eps.ln() - eps0.ln()) / rate;
        if t.is_finite() {
            t
        } else {
            T::infinity()
        }
    };
    Ok(IterationEstimate {
        iterations,
        single_step: false,
    })
}

/// Decay factor of the squared-exponential kernel spectrum for inputs
/// `x ~ N(0, η²)` and lengthscale `l`:
/// `γ = 2η²/(l² + 2η² + √(l² + 2η²))`.
pub fn se_kernel_gamma<T: Real>(eta: T, l: T) -> Result<T> {
    contract(eta > T::zero() && l > T::zero(), || {
        format!("eta and l must be positive, got {eta}, {l}")
    })?;
    let two_eta2 = T::lit(2.0) * eta * eta;
    let base = l * l + two_eta2;
    Ok(two_eta2 / (base + base.sqrt()))
}
