use std::io::Write;

use crate::error::{contract, Error, Result};
use crate::linalg::Spectrum;
use crate::optimizer::sigma_closed_form;
use crate::samplers::{alpha_for_expected_size, dpp_expected_size};
use crate::scalar::Real;

use super::rates::{alpha_tail, iterations_to_accuracy, lambda_d, TailConvention};

/// Parametric eigenvalue profiles, indexed `i = 1..=d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayModel<T> {
    /// `λ_i = Cγ^i + Cλ`.
    Exponential { c: T, gamma: T, lambda: T },
    /// `λ_i = C i^{−s} + Cλ`.
    Polynomial { c: T, s: T, lambda: T },
    /// `s` eigenvalues equal to `μ`, the remaining `d − s` equal to `λ`.
    Sparse { s: usize, mu: T, lambda: T },
}

impl<T: Real> DecayModel<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::Polynomial { .. } => "polynomial",
            Self::Sparse { .. } => "sparse",
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        contract(d >= 1, || "dimension must be positive".into())?;
        match *self {
            Self::Exponential { c, gamma, lambda } => contract(
                c > T::zero() && gamma > T::zero() && gamma < T::one() && lambda >= T::zero(),
                || format!("need C > 0, 0 < gamma < 1, lambda >= 0; got {c}, {gamma}, {lambda}"),
            ),
            Self::Polynomial { c, s, lambda } => contract(
                c > T::zero() && s > T::one() && lambda >= T::zero(),
                || format!("need C > 0, s > 1, lambda >= 0; got {c}, {s}, {lambda}"),
            ),
            Self::Sparse { s, mu, lambda } => contract(
                s >= 1 && s <= d && lambda > T::zero() && mu > lambda,
                || format!("need 1 <= s <= d and mu > lambda > 0; got s={s}, mu={mu}, lambda={lambda}"),
            ),
        }
    }

    /// `λ_1 ≥ … ≥ λ_d`.
    pub fn eigenvalues(&self, d: usize) -> Result<Vec<T>> {
        self.validate(d)?;
        Ok((1..=d)
            .map(|i| match *self {
                Self::Exponential { c, gamma, lambda } => c * gamma.powi(i as i32) + c * lambda,
                Self::Polynomial { c, s, lambda } => {
                    c * T::from_usize_lossy(i).powf(-s) + c * lambda
                }
                Self::Sparse { s, mu, lambda } => {
                    if i <= s {
                        mu
                    } else {
                        lambda
                    }
                }
            })
            .collect())
    }

    pub fn spectrum(&self, d: usize) -> Result<Spectrum<T>> {
        Spectrum::from_eigenvalues(self.eigenvalues(d)?)
    }

    /// The size scale `q` at which the signal meets the floor `λ`:
    /// `log λ/log γ` or `λ^{−1/s}`. Infinite when `λ = 0`.
    pub fn q(&self) -> Option<T> {
        match *self {
            Self::Exponential { gamma, lambda, .. } => Some(if lambda > T::zero() {
                lambda.ln() / gamma.ln()
            } else {
                T::infinity()
            }),
            Self::Polynomial { s, lambda, .. } => Some(if lambda > T::zero() {
                lambda.powf(-T::one() / s)
            } else {
                T::infinity()
            }),
            Self::Sparse { .. } => None,
        }
    }
}

/// Accuracy target and cost model for effort curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffortModel<T> {
    pub eps0: T,
    pub eps: T,
    /// Fixed cost per iteration added to `E|S|³`.
    pub overhead: T,
    pub kappa: T,
}

impl<T: Real> Default for EffortModel<T> {
    fn default() -> Self {
        Self {
            eps0: T::one(),
            eps: T::lit(1e-6),
            overhead: T::zero(),
            kappa: T::one(),
        }
    }
}

impl<T: Real> EffortModel<T> {
    /// `(E|S|³ + c₀) · T` with real-valued `T`.
    pub fn effort(&self, expected_size: T, iterations: T) -> T {
        (expected_size.powi(3) + self.overhead) * iterations
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffortPoint<T> {
    /// Grid parameter: `p` for decay models, the target size otherwise.
    pub p: T,
    pub alpha: T,
    pub expected_size: T,
    /// Analytic upper bound on `E|S|` when the model has one.
    pub size_bound: Option<T>,
    pub sigma: T,
    pub iterations: T,
    pub effort: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffortCurve<T> {
    pub model: String,
    pub d: usize,
    pub q_raw: Option<T>,
    pub q_rounded: Option<usize>,
    pub points: Vec<EffortPoint<T>>,
}

impl<T: Real> EffortCurve<T> {
    /// Grid point of least effort.
    pub fn argmin(&self) -> Option<&EffortPoint<T>> {
        self.points
            .iter()
            .filter(|p| !p.effort.is_nan())
            .min_by(|a, b| a.effort.partial_cmp(&b.effort).expect("not NaN"))
    }

    /// Whether effort both falls and rises somewhere along the grid.
    pub fn is_monotone(&self) -> bool {
        let e: Vec<T> = self.points.iter().map(|p| p.effort).collect();
        e.windows(2).all(|w| w[0] <= w[1]) || e.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# model: {}", self.model)?;
        writeln!(w, "# d: {}", self.d)?;
        if let (Some(q), Some(qr)) = (self.q_raw, self.q_rounded) {
            writeln!(w, "# q_raw: {q:e}")?;
            writeln!(w, "# q_rounded: {qr}")?;
        }
        if let Some(best) = self.argmin() {
            writeln!(w, "# argmin_p: {:e}", best.p)?;
            writeln!(w, "# argmin_expected_size: {:e}", best.expected_size)?;
        }
        writeln!(w, "p,alpha,expected_size,sigma,T,effort")?;
        for p in &self.points {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                p.p, p.alpha, p.expected_size, p.sigma, p.iterations, p.effort
            )?;
        }
        Ok(())
    }
}

fn check_grid(d: usize, grid: &[usize]) -> Result<()> {
    contract(!grid.is_empty(), || "grid must not be empty".into())?;
    contract(grid.windows(2).all(|w| w[0] < w[1]), || {
        "grid must be strictly increasing".into()
    })?;
    contract(grid.iter().all(|&p| (1..=d).contains(&p)), || {
        format!("grid points must lie in [1, {d}]")
    })
}

fn point<T: Real>(
    spec: &Spectrum<T>,
    p: T,
    alpha: T,
    size_bound: Option<T>,
    effort: &EffortModel<T>,
) -> Result<EffortPoint<T>> {
    let expected_size = dpp_expected_size(spec, alpha);
    let sigma = sigma_closed_form(spec, alpha, effort.kappa)?;
    let iterations = iterations_to_accuracy(sigma, effort.eps0, effort.eps)?.iterations;
    Ok(EffortPoint {
        p,
        alpha,
        expected_size,
        size_bound,
        sigma,
        iterations,
        effort: effort.effort(expected_size, iterations),
    })
}

fn round_q<T: Real>(q: Option<T>) -> Option<usize> {
    q.filter(|q| q.is_finite()).and_then(|q| q.round().to_usize())
}

/// `R_d(p, q) = Σ_{i=1}^{d−p} (γ^i + γ^{q−p})/(γ^i + γ^{q−p} + 1)`.
pub fn exp_size_remainder<T: Real>(gamma: T, d: usize, p: usize, q: T) -> T {
    let shift = if q.is_finite() {
        gamma.powf(q - T::from_usize_lossy(p))
    } else {
        T::zero()
    };
    (1..=d.saturating_sub(p))
        .map(|i| {
            let t = gamma.powi(i as i32) + shift;
            t / (t + T::one())
        })
        .sum()
}

/// Effort along `α(p) = Cγ^p` for the exponential model, with the exact
/// expected size and the bound `p + R_d(p, q)`.
pub fn exp_decay_curve<T: Real>(
    model: &DecayModel<T>,
    d: usize,
    grid: &[usize],
    effort: &EffortModel<T>,
) -> Result<EffortCurve<T>> {
    let DecayModel::Exponential { c, gamma, .. } = *model else {
        return Err(Error::UnsupportedVariant(format!(
            "exp_decay_curve needs the exponential model, got {}",
            model.name()
        )));
    };
    check_grid(d, grid)?;
    let spec = model.spectrum(d)?;
    let q = model.q().expect("exponential model has q");
    let points = grid
        .iter()
        .map(|&p| {
            let alpha = c * gamma.powi(p as i32);
            let bound = T::from_usize_lossy(p) + exp_size_remainder(gamma, d, p, q);
            point(&spec, T::from_usize_lossy(p), alpha, Some(bound), effort)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EffortCurve {
        model: "exponential".into(),
        d,
        q_raw: Some(q),
        q_rounded: round_q(Some(q)),
        points,
    })
}

/// `p³ d^s q^s/(p^s (q^s + d^s))`, the small-`p` effort scaling for
/// polynomial decay.
pub fn poly_asymptotic_effort<T: Real>(p: T, d: T, q: T, s: T) -> T {
    let ds = d.powf(s);
    let ratio = if q.is_finite() {
        let qs = q.powf(s);
        ds * qs / (qs + ds)
    } else {
        ds
    };
    p.powi(3) * ratio / p.powf(s)
}

/// Effort along `α(p) = Cp^{−s}` for the polynomial model. `size_bound`
/// carries the asymptotic effort factor.
pub fn poly_decay_curve<T: Real>(
    model: &DecayModel<T>,
    d: usize,
    grid: &[usize],
    effort: &EffortModel<T>,
) -> Result<EffortCurve<T>> {
    let DecayModel::Polynomial { c, s, .. } = *model else {
        return Err(Error::UnsupportedVariant(format!(
            "poly_decay_curve needs the polynomial model, got {}",
            model.name()
        )));
    };
    check_grid(d, grid)?;
    let spec = model.spectrum(d)?;
    let q = model.q().expect("polynomial model has q");
    let df = T::from_usize_lossy(d);
    let points = grid
        .iter()
        .map(|&p| {
            let pf = T::from_usize_lossy(p);
            let alpha = c * pf.powf(-s);
            let asym = poly_asymptotic_effort(pf, df, q, s);
            point(&spec, pf, alpha, Some(asym), effort)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EffortCurve {
        model: "polynomial".into(),
        d,
        q_raw: Some(q),
        q_rounded: round_q(Some(q)),
        points,
    })
}

/// Effort along the tail regularizers `α(k)` for `k` in `grid`.
pub fn tail_effort_curve<T: Real>(
    spec: &Spectrum<T>,
    grid: &[usize],
    conv: TailConvention,
    effort: &EffortModel<T>,
) -> Result<EffortCurve<T>> {
    let points = grid
        .iter()
        .map(|&k| {
            let alpha = alpha_tail(spec, k, conv)?;
            point(spec, T::from_usize_lossy(k), alpha, None, effort)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EffortCurve {
        model: format!("tail-{}", conv.name()),
        d: spec.dim(),
        q_raw: None,
        q_rounded: None,
        points,
    })
}

/// Effort at matched expected sizes: `α` is solved from each target.
pub fn size_effort_curve<T: Real>(
    spec: &Spectrum<T>,
    targets: &[T],
    effort: &EffortModel<T>,
) -> Result<EffortCurve<T>> {
    let points = targets
        .iter()
        .map(|&k| {
            let alpha = alpha_for_expected_size(spec, k)?;
            point(spec, k, alpha, None, effort)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EffortCurve {
        model: "target-size".into(),
        d: spec.dim(),
        q_raw: None,
        q_rounded: None,
        points,
    })
}

fn sparse_parts<T: Real>(model: &DecayModel<T>, d: usize) -> Result<(usize, T, T)> {
    let DecayModel::Sparse { s, mu, lambda } = *model else {
        return Err(Error::UnsupportedVariant(format!(
            "sparse spectrum functions need the sparse model, got {}",
            model.name()
        )));
    };
    model.validate(d)?;
    Ok((s, mu, lambda))
}

/// `σ(k)` for `s` copies of `μ` followed by `d − s` copies of `λ`.
pub fn sparse_spectrum_sigma<T: Real>(
    model: &DecayModel<T>,
    d: usize,
    k: usize,
    conv: TailConvention,
) -> Result<T> {
    sparse_parts(model, d)?;
    let spec = model.spectrum(d)?;
    let ld = lambda_d(&spec)?;
    Ok(ld / (ld + alpha_tail(&spec, k, conv)?))
}

/// Ratio of `σ` across the size at which the last `μ` leaves the tail sum:
/// `σ(s+1)/σ(s)` (inclusive) or `σ(s)/σ(s−1)` (exclusive). Both equal
/// `1 + μ/((d − s + 1)λ)`.
pub fn sparse_jump_factor<T: Real>(model: &DecayModel<T>, d: usize, conv: TailConvention) -> Result<T> {
    let (s, _, _) = sparse_parts(model, d)?;
    let (lo, hi) = match conv {
        TailConvention::Inclusive => (s, s + 1),
        TailConvention::Exclusive => (s - 1, s),
    };
    contract(hi <= d, || "jump lies beyond the last size".into())?;
    Ok(sparse_spectrum_sigma(model, d, hi, conv)? / sparse_spectrum_sigma(model, d, lo, conv)?)
}
