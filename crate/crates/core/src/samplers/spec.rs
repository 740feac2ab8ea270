use std::fmt;

use crate::error::{contract, Error, Result};
use crate::linalg::{sym_eig, CoordSubset, Spectrum, SymMatrix};
use crate::rng::RngStream;
use crate::scalar::Real;

use super::dpp::{dpp_expected_size, dpp_sample};
use super::leverage::{iid_weighted_sample, leverage_scores_from_spectrum, poisson_sample};
use super::oracle::{dpp_atoms, poisson_atoms, Atom};
use super::uniform::{tau_list_sample, tau_nice_sample};

/// Largest number of atoms a τ-nice sampling may have before enumeration is refused.
pub const TAU_NICE_MAX_ATOMS: u128 = 1_000_000;

const EXPLICIT_SUM_TOL: f64 = 1e-12;

/// Description of a block sampling `Ŝ`.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerSpec<T> {
    /// `DPP(M/α)`.
    Dpp { alpha: T },
    /// `draws == 1`: each coordinate independently with its α-ridge leverage
    /// score. `draws > 1`: that many i.i.d. indices proportional to the
    /// scores, duplicates merged.
    RidgeLeverage { alpha: T, draws: usize },
    TauNice { tau: usize },
    TauList { tau: usize },
    Explicit { atoms: Vec<CoordSubset>, probs: Vec<T> },
}

impl<T: Real> SamplerSpec<T> {
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            Self::Dpp { alpha } | Self::RidgeLeverage { alpha, .. } => {
                contract(*alpha > T::zero() && alpha.is_finite(), || {
                    format!("alpha must be positive and finite, got {alpha}")
                })?;
                if let Self::RidgeLeverage { draws, .. } = self {
                    contract(*draws >= 1, || "draws must be at least 1".into())?;
                }
                Ok(())
            }
            Self::TauNice { tau } | Self::TauList { tau } => {
                contract((1..=d).contains(tau), || {
                    format!("tau must lie in [1, {d}], got {tau}")
                })
            }
            Self::Explicit { atoms, probs } => {
                contract(!atoms.is_empty(), || "explicit sampler needs atoms".into())?;
                contract(atoms.len() == probs.len(), || {
                    format!("{} atoms but {} probabilities", atoms.len(), probs.len())
                })?;
                for a in atoms {
                    if a.dim() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: a.dim(),
                        });
                    }
                }
                contract(probs.iter().all(|&p| p >= T::zero() && p.is_finite()), || {
                    "probabilities must be finite and nonnegative".into()
                })?;
                let total: f64 = probs.iter().map(|p| p.to_f64_lossy()).sum();
                contract((total - 1.0).abs() <= EXPLICIT_SUM_TOL, || {
                    format!("probabilities sum to {total}, not 1")
                })?;
                let mut sorted: Vec<&CoordSubset> = atoms.iter().collect();
                sorted.sort();
                contract(sorted.windows(2).all(|w| w[0] != w[1]), || {
                    "explicit atoms must be pairwise distinct".into()
                })
            }
        }
    }

    /// Whether the sampling needs the spectrum of `M`.
    fn needs_spectrum(&self) -> bool {
        matches!(self, Self::Dpp { .. } | Self::RidgeLeverage { .. })
    }
}

impl<T: Real> fmt::Display for SamplerSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dpp { alpha } => write!(f, "dpp(alpha={alpha:e})"),
            Self::RidgeLeverage { alpha, draws } => {
                write!(f, "leverage(alpha={alpha:e},draws={draws})")
            }
            Self::TauNice { tau } => write!(f, "tau_nice(tau={tau})"),
            Self::TauList { tau } => write!(f, "tau_list(tau={tau})"),
            Self::Explicit { atoms, .. } => write!(f, "explicit(atoms={})", atoms.len()),
        }
    }
}

/// A sampler bound to a metric: spectrum and leverage scores are computed
/// once and reused for every draw.
#[derive(Debug, Clone)]
pub struct PreparedSampler<T> {
    spec: SamplerSpec<T>,
    dim: usize,
    spectrum: Option<Spectrum<T>>,
    scores: Option<Vec<T>>,
    metric: SymMatrix<T>,
}

impl<T: Real> PreparedSampler<T> {
    pub fn new(spec: SamplerSpec<T>, m: &SymMatrix<T>) -> Result<Self> {
        let spectrum = if spec.needs_spectrum() {
            Some(sym_eig(m)?)
        } else {
            None
        };
        Self::with_spectrum(spec, m, spectrum)
    }

    /// Like [`PreparedSampler::new`] but reuses a spectrum of `m` already at hand.
    pub fn with_spectrum(
        spec: SamplerSpec<T>,
        m: &SymMatrix<T>,
        spectrum: Option<Spectrum<T>>,
    ) -> Result<Self> {
        let d = m.dim();
        spec.validate(d)?;
        if let Some(s) = &spectrum {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.dim(),
                });
            }
        }
        let spectrum = match (spec.needs_spectrum(), spectrum) {
            (true, None) => Some(sym_eig(m)?),
            (_, s) => s,
        };
        if spec.needs_spectrum() {
            m.require_psd()?;
        }
        let scores = match &spec {
            SamplerSpec::Dpp { alpha } | SamplerSpec::RidgeLeverage { alpha, .. } => Some(
                leverage_scores_from_spectrum(spectrum.as_ref().expect("computed above"), *alpha),
            ),
            _ => None,
        };
        Ok(Self {
            spec,
            dim: d,
            spectrum,
            scores,
            metric: m.clone(),
        })
    }

    pub fn spec(&self) -> &SamplerSpec<T> {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn draw(&self, rng: &mut RngStream) -> Result<CoordSubset> {
        let d = self.dim;
        match &self.spec {
            SamplerSpec::Dpp { alpha } => dpp_sample(self.spectrum(), *alpha, rng),
            SamplerSpec::RidgeLeverage { draws: 1, .. } => Ok(poisson_sample(self.scores(), rng)),
            SamplerSpec::RidgeLeverage { draws, .. } => {
                Ok(iid_weighted_sample(self.scores(), *draws, rng))
            }
            SamplerSpec::TauNice { tau } => tau_nice_sample(d, *tau, rng),
            SamplerSpec::TauList { tau } => tau_list_sample(d, *tau, rng),
            SamplerSpec::Explicit { atoms, probs } => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (a, p) in atoms.iter().zip(probs) {
                    acc += p.to_f64_lossy();
                    if u < acc {
                        return Ok(a.clone());
                    }
                }
                // Rounding left the cumulative sum just short of 1.
                let last = probs
                    .iter()
                    .rposition(|&p| p > T::zero())
                    .expect("validated probabilities sum to 1");
                Ok(atoms[last].clone())
            }
        }
    }

    /// Inclusion probabilities `P(i ∈ Ŝ)`.
    pub fn marginals(&self) -> Vec<T> {
        let d = self.dim;
        let df = T::from_usize_lossy(d);
        match &self.spec {
            SamplerSpec::Dpp { .. } | SamplerSpec::RidgeLeverage { draws: 1, .. } => {
                self.scores().to_vec()
            }
            SamplerSpec::RidgeLeverage { draws, .. } => {
                let total: T = self.scores().iter().copied().sum();
                let m = *draws as i32;
                self.scores()
                    .iter()
                    .map(|&s| {
                        let q = if total > T::zero() { s / total } else { T::zero() };
                        T::one() - (T::one() - q).powi(m)
                    })
                    .collect()
            }
            SamplerSpec::TauNice { tau } => vec![T::from_usize_lossy(*tau) / df; d],
            SamplerSpec::TauList { tau } => {
                let windows = d - tau + 1;
                (0..d)
                    .map(|i| {
                        let lo = i.saturating_sub(tau - 1);
                        let hi = i.min(d - tau);
                        T::from_usize_lossy(hi + 1 - lo) / T::from_usize_lossy(windows)
                    })
                    .collect()
            }
            SamplerSpec::Explicit { atoms, probs } => {
                let mut p = vec![T::zero(); d];
                for (a, &w) in atoms.iter().zip(probs) {
                    for i in a.iter() {
                        p[i] += w;
                    }
                }
                p
            }
        }
    }

    pub fn expected_size(&self) -> T {
        match &self.spec {
            SamplerSpec::Dpp { alpha } => dpp_expected_size(self.spectrum(), *alpha),
            SamplerSpec::TauNice { tau } | SamplerSpec::TauList { tau } => {
                T::from_usize_lossy(*tau)
            }
            _ => self.marginals().into_iter().sum(),
        }
    }

    /// A sampling is proper when every coordinate has positive inclusion probability.
    pub fn is_proper(&self) -> bool {
        self.marginals().iter().all(|&p| p > T::zero())
    }

    pub fn require_proper(&self) -> Result<()> {
        contract(self.is_proper(), || {
            format!("sampler {} is not proper: some coordinate is never sampled", self.spec)
        })
    }

    /// Every outcome with its probability, for exact expectations.
    pub fn atoms(&self) -> Result<Vec<Atom<T>>> {
        let d = self.dim;
        match &self.spec {
            SamplerSpec::Dpp { alpha } => dpp_atoms(&self.metric, *alpha),
            SamplerSpec::RidgeLeverage { draws: 1, .. } => poisson_atoms(self.scores()),
            SamplerSpec::RidgeLeverage { .. } => Err(Error::UnsupportedVariant(
                "enumeration of multi-draw leverage sampling".into(),
            )),
            SamplerSpec::TauNice { tau } => tau_nice_atoms(d, *tau),
            SamplerSpec::TauList { tau } => {
                let n = d - tau + 1;
                let p = T::one() / T::from_usize_lossy(n);
                (0..n)
                    .map(|j| {
                        Ok(Atom {
                            subset: CoordSubset::new(d, (j..j + tau).collect())?,
                            prob: p,
                        })
                    })
                    .collect()
            }
            SamplerSpec::Explicit { atoms, probs } => Ok(atoms
                .iter()
                .zip(probs)
                .map(|(a, &p)| Atom {
                    subset: a.clone(),
                    prob: p,
                })
                .collect()),
        }
    }

    fn spectrum(&self) -> &Spectrum<T> {
        self.spectrum.as_ref().expect("spectrum prepared for this variant")
    }

    fn scores(&self) -> &[T] {
        self.scores.as_deref().expect("scores prepared for this variant")
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// All `C(d, τ)` subsets of size `τ`, each with probability `1/C(d, τ)`.
pub fn tau_nice_atoms<T: Real>(d: usize, tau: usize) -> Result<Vec<Atom<T>>> {
    contract((1..=d).contains(&tau), || format!("tau must lie in [1, {d}], got {tau}"))?;
    let count = binomial(d, tau);
    if count > TAU_NICE_MAX_ATOMS {
        return Err(Error::EnumerationTooLarge {
            dim: d,
            limit: TAU_NICE_MAX_ATOMS as usize,
        });
    }
    let p = T::one() / T::lit(count as f64);
    let mut out = Vec::with_capacity(count as usize);
    let mut idx: Vec<usize> = (0..tau).collect();
    loop {
        out.push(Atom {
            subset: CoordSubset::new(d, idx.clone())?,
            prob: p,
        });
        // Advance to the next combination in lexicographic order.
        let Some(pos) = (0..tau).rev().find(|&i| idx[i] < d - tau + i) else {
            break;
        };
        idx[pos] += 1;
        for i in pos + 1..tau {
            idx[i] = idx[i - 1] + 1;
        }
    }
    Ok(out)
}
