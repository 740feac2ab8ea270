//! Enumeration-based identity checks at small dimension with fixed seeds.

use std::collections::BTreeMap;
use std::path::Path;

use rnm_core::linalg::io::read_matrix;
use rnm_core::linalg::{
    placed_pinv, psd_order_leq, sym_eig, CoordSubset, Matrix, Spectrum, SymMatrix, SYMMETRY_REL_TOL,
};
use rnm_core::optimizer::{sigma_brute_force, sigma_closed_form, theta_brute_force, theta_dpp};
use rnm_core::problems::synth_spectrum_matrix;
use rnm_core::rng::RngStream;
use rnm_core::samplers::oracle::enumerate_normalization;
use rnm_core::samplers::{
    alpha_for_expected_size, brute_force_expected_msub, brute_force_expected_pinv,
    dpp_expected_size, dpp_normalization_logdet, SamplerSpec,
};
use rnm_core::spectral::{eso_vector, eso_vector_spectral, sigma_recurrence_check};

use crate::error::{BenchError, Result};

pub const VERIFY_SEED: u64 = 20_190_417;
pub const ALPHAS: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Non-gating checks are reported but do not affect the exit code.
    pub gating: bool,
    pub detail: String,
}

impl Check {
    fn leq(name: &str, residual: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            gating: true,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let status = match (self.passed, self.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INFO-FAIL",
        };
        format!(
            "{status} {} residual={:.3e} tol={:.1e} {}",
            self.name, self.residual, self.tolerance, self.detail
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.gating && !c.passed).map(|c| c.name.as_str()).collect()
    }
}

pub fn random_pd(d: usize, rng: &mut RngStream) -> Result<SymMatrix<f64>> {
    let l: Vec<f64> = (0..d).map(|_| 0.1 + 5.0 * rng.uniform()).collect();
    Ok(synth_spectrum_matrix(&l, rng)?)
}

fn random_psd_deficient(d: usize, rng: &mut RngStream) -> Result<SymMatrix<f64>> {
    let rank = 1 + rng.below(d - 1);
    let l: Vec<f64> = (0..d).map(|i| if i < rank { 0.1 + 5.0 * rng.uniform() } else { 0.0 }).collect();
    Ok(synth_spectrum_matrix(&l, rng)?)
}

fn inverse_shift(m: &SymMatrix<f64>, alpha: f64) -> Result<SymMatrix<f64>> {
    Ok(SymMatrix::new(m.shifted(alpha).as_matrix().inverse()?)?)
}

fn random_subset(d: usize, size: usize, rng: &mut RngStream) -> CoordSubset {
    let mut idx: Vec<usize> = (0..d).collect();
    for i in 0..size {
        let j = i + rng.below(d - i);
        idx.swap(i, j);
    }
    idx.truncate(size);
    CoordSubset::from_unsorted(d, idx).expect("indices in range")
}

/// Random explicit sampling on `d` coordinates with expected size exactly
/// `tau`: a mixture of size pairs `(a, b)` with `a ≤ tau ≤ b`, each pair
/// weighted so its mean is `tau`.
pub fn random_explicit(d: usize, tau: usize, rng: &mut RngStream) -> SamplerSpec<f64> {
    let mut mass: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let pairs = 1 + rng.below(4);
    let mut weights: Vec<f64> = (0..pairs).map(|_| 0.05 + rng.uniform()).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    for w in weights {
        let a = rng.below(tau + 1);
        let b = tau + rng.below(d - tau + 1);
        let (pa, pb) = if a == b {
            (1.0, 0.0)
        } else {
            ((b - tau) as f64 / (b - a) as f64, (tau - a) as f64 / (b - a) as f64)
        };
        for (size, p) in [(a, pa), (b, pb)] {
            if p > 0.0 {
                let s = random_subset(d, size, rng);
                *mass.entry(s.indices().to_vec()).or_insert(0.0) += w * p;
            }
        }
    }
    let (atoms, probs) = mass
        .into_iter()
        .map(|(idx, p)| (CoordSubset::new(d, idx).expect("sorted unique"), p))
        .unzip();
    SamplerSpec::Explicit { atoms, probs }
}

/// `‖E[(M_Ŝ)^+] − (αI + M)^{-1}‖_F` over `count` random p.d. matrices with
/// `d` cycling through `1..=8` and `α` through [`ALPHAS`].
pub fn expectation_identity_residual(count: usize, rng: &mut RngStream) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let m = random_pd(1 + i % 8, rng)?;
        for alpha in ALPHAS {
            let r = brute_force_expected_pinv(&m, alpha)?.sub(&inverse_shift(&m, alpha)?)?.frobenius_norm();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

pub fn normalization_residual(count: usize, max_d: usize, rng: &mut RngStream) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let m = random_pd(1 + i % max_d, rng)?;
        for alpha in ALPHAS {
            let z = enumerate_normalization(&m, alpha)?;
            let exact = dpp_normalization_logdet(&m, alpha)?.exp();
            worst = worst.max((z - exact).abs() / exact);
        }
    }
    Ok(worst)
}

/// Largest `E|S| − k` at `α = Σ_{j ≥ k} λ_j` over random decreasing spectra;
/// negative when every case is strictly below `k`.
pub fn tail_size_margin(count: usize, max_d: usize, rng: &mut RngStream) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..count {
        let d = 1 + rng.below(max_d);
        let mut l: Vec<f64> = (0..d).map(|_| (2.0 * rng.normal()).exp()).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        let spec = Spectrum::from_eigenvalues(l.clone())?;
        for k in 1..=d {
            let alpha: f64 = l[k - 1..].iter().sum();
            worst = worst.max(dpp_expected_size(&spec, alpha) - k as f64);
        }
    }
    Ok(worst)
}

pub fn sigma_identity_residual(count: usize, rng: &mut RngStream) -> Result<(f64, f64)> {
    let (mut s, mut t): (f64, f64) = (0.0, 0.0);
    for i in 0..count {
        let m = random_pd(1 + i % 8, rng)?;
        let spec = sym_eig(&m)?;
        let kappa = 0.1 + 0.9 * rng.uniform();
        for alpha in ALPHAS {
            let sampler = SamplerSpec::Dpp { alpha };
            s = s.max((sigma_brute_force(&m, &sampler, kappa)? - sigma_closed_form(&spec, alpha, kappa)?).abs());
            t = t.max((theta_brute_force(&m, &sampler)? - theta_dpp(&spec, alpha)).abs());
        }
    }
    Ok((s, t))
}

pub fn recurrence_residual(count: usize, max_d: usize, rng: &mut RngStream) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let d = 1 + rng.below(max_d);
        let mut l: Vec<f64> = (0..d).map(|_| (2.0 * rng.normal()).exp()).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        worst = worst.max(sigma_recurrence_check(&Spectrum::from_eigenvalues(l)?)?.max_residual);
    }
    Ok(worst)
}

/// ESO results over random p.d. matrices: identity residual
/// `max |p_i v_i − M_ii| / M_ii`, worst domination violation
/// `max(0, −λ_min(D(p∘v) − E[M_Ŝ]))` for the leverage-based vector, the
/// number of violating cases, and the same violation for the spectral vector.
pub struct EsoResult {
    pub identity: f64,
    pub violation: f64,
    pub violating_cases: usize,
    pub cases: usize,
    pub spectral_violation: f64,
}

fn domination_violation(e: &SymMatrix<f64>, v: &[f64], p: &[f64]) -> Result<f64> {
    let pv: Vec<f64> = p.iter().zip(v).map(|(a, b)| a * b).collect();
    let gap = SymMatrix::diagonal(&pv).sub(e)?;
    Ok((-sym_eig(&gap)?.lambda_min()).max(0.0))
}

pub fn eso_check(count: usize, rng: &mut RngStream) -> Result<EsoResult> {
    let mut r = EsoResult { identity: 0.0, violation: 0.0, violating_cases: 0, cases: 0, spectral_violation: 0.0 };
    for i in 0..count {
        let m = random_pd(1 + i % 8, rng)?;
        let diag = m.diag();
        for alpha in ALPHAS {
            let e = brute_force_expected_msub(&m, alpha)?;
            let (v, p) = eso_vector(&m, alpha)?;
            for j in 0..m.dim() {
                r.identity = r.identity.max((p[j] * v[j] - diag[j]).abs() / diag[j]);
            }
            let viol = domination_violation(&e, &v, &p)?;
            if viol > 1e-9 {
                r.violating_cases += 1;
            }
            r.violation = r.violation.max(viol);
            let (v, p) = eso_vector_spectral(&m, alpha)?;
            r.spectral_violation = r.spectral_violation.max(domination_violation(&e, &v, &p)?);
            r.cases += 1;
        }
    }
    Ok(r)
}

/// `σ_DPP`, `E|S|` and `σ` of the {full, ∅} half/half sampler on the
/// spectrum (4, 4, 1, 1) at `α = 2`.
pub fn counter_example() -> Result<(f64, f64, f64)> {
    let spec = Spectrum::from_eigenvalues(vec![4.0, 4.0, 1.0, 1.0])?;
    let m = spec.reconstruct();
    let dpp = sigma_brute_force(&m, &SamplerSpec::Dpp { alpha: 2.0 }, 1.0)?;
    let half = SamplerSpec::Explicit {
        atoms: vec![CoordSubset::full(4), CoordSubset::empty(4)],
        probs: vec![0.5, 0.5],
    };
    let size = rnm_core::samplers::oracle::atoms_expected_size(
        &rnm_core::samplers::oracle::dpp_atoms(&m, 2.0)?,
    );
    Ok((dpp, size, sigma_brute_force(&m, &half, 1.0)?))
}

/// Largest `σ(explicit) − σ(τ-nice)` over `count` random explicit samplers
/// of matched expected size on random diagonal metrics with `d ≤ max_d`.
pub fn uniform_optimality_margin(count: usize, max_d: usize, rng: &mut RngStream) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..count {
        let d = 2 + rng.below(max_d - 1);
        let diag: Vec<f64> = (0..d).map(|_| 0.1 + 5.0 * rng.uniform()).collect();
        let m = SymMatrix::diagonal(&diag);
        let tau = 1 + rng.below(d);
        let nice = sigma_brute_force(&m, &SamplerSpec::TauNice { tau }, 1.0)?;
        let other = sigma_brute_force(&m, &random_explicit(d, tau, rng), 1.0)?;
        worst = worst.max(other - nice);
    }
    Ok(worst)
}

fn symmetry_residual(m: &Matrix<f64>) -> f64 {
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    m.sub(&m.transpose()).map_or(f64::INFINITY, |d| d.max_abs() / scale)
}

/// Checks a user matrix: symmetry, then the expectation identity and
/// normalization at each `α` when it is symmetric, p.s.d. and small.
fn matrix_checks(path: &Path) -> Result<Vec<Check>> {
    let f = std::fs::File::open(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
    let raw: Matrix<f64> = read_matrix(std::io::BufReader::new(f))?;
    let sym = symmetry_residual(&raw);
    let name = path.display();
    let mut out = vec![Check::leq("matrix_symmetry", sym, SYMMETRY_REL_TOL, format!("file={name}"))];
    if sym > SYMMETRY_REL_TOL {
        return Ok(out);
    }
    let m = SymMatrix::new(raw)?;
    let psd = m.require_psd();
    out.push(Check {
        name: "matrix_psd".into(),
        residual: (-sym_eig(&m)?.lambda_min()).max(0.0),
        tolerance: 0.0,
        passed: psd.is_ok(),
        gating: true,
        detail: format!("file={name}"),
    });
    if psd.is_err() || m.dim() > 8 {
        return Ok(out);
    }
    let (mut id, mut norm): (f64, f64) = (0.0, 0.0);
    for alpha in ALPHAS {
        let e = brute_force_expected_pinv(&m, alpha)?;
        if sym_eig(&m)?.lambda_min() > 0.0 {
            id = id.max(e.sub(&inverse_shift(&m, alpha)?)?.frobenius_norm());
        } else if !psd_order_leq(&e, &inverse_shift(&m, alpha)?, 1e-9)? {
            id = f64::INFINITY;
        }
        let z = enumerate_normalization(&m, alpha)?;
        let exact = dpp_normalization_logdet(&m, alpha)?.exp();
        norm = norm.max((z - exact).abs() / exact);
    }
    out.push(Check::leq("matrix_expectation_identity", id, 1e-9, format!("file={name}")));
    out.push(Check::leq("matrix_normalization", norm, 1e-10, format!("file={name}")));
    Ok(out)
}

pub fn cmd_verify(matrix: Option<&Path>) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let rng = RngStream::new(VERIFY_SEED, 0);
    let sub = |tag| rng.substream(tag);

    if let Some(path) = matrix {
        checks.extend(matrix_checks(path)?);
    }

    let r = expectation_identity_residual(20, &mut sub(1))?;
    checks.push(Check::leq("expectation_identity", r, 1e-9, "matrices=20 d=1..8".into()));

    let mut g = sub(2);
    let mut relax: f64 = 0.0;
    for i in 0..20 {
        let m = random_psd_deficient(2 + i % 7, &mut g)?;
        for alpha in ALPHAS {
            let e = brute_force_expected_pinv(&m, alpha)?;
            let gap = inverse_shift(&m, alpha)?.sub(&e)?;
            relax = relax.max((-sym_eig(&gap)?.lambda_min()).max(0.0));
        }
    }
    checks.push(Check::leq("expectation_psd_relaxation", relax, 1e-9, "rank-deficient matrices=20".into()));

    let r = normalization_residual(20, 8, &mut sub(3))?;
    checks.push(Check::leq("normalization", r, 1e-10, "matrices=20 d=1..8".into()));

    let margin = tail_size_margin(50, 8, &mut sub(4))?;
    checks.push(Check {
        name: "tail_alpha_size_below_k".into(),
        residual: margin,
        tolerance: 0.0,
        passed: margin < 0.0,
        gating: true,
        detail: "max(E|S| - k) must be negative".into(),
    });

    let mut g = sub(5);
    let mut inv: f64 = 0.0;
    for i in 0..20 {
        let spec = sym_eig(&random_pd(2 + i % 7, &mut g)?)?;
        let k = (0.05 + 0.9 * g.uniform()) * spec.dim() as f64;
        let alpha = alpha_for_expected_size(&spec, k)?;
        inv = inv.max((dpp_expected_size(&spec, alpha) - k).abs());
    }
    checks.push(Check::leq("alpha_inversion", inv, 1e-9, "spectra=20".into()));

    let mut g = sub(6);
    let mut mp: f64 = 0.0;
    for i in 0..20 {
        let d = 1 + i % 8;
        let m = random_pd(d, &mut g)?;
        let idx: Vec<usize> = (0..d).filter(|_| g.bernoulli(0.5)).collect();
        let s = CoordSubset::new(d, idx)?;
        let p = placed_pinv(&m, &s)?;
        let pmp = p.as_matrix().matmul(m.as_matrix())?.matmul(p.as_matrix())?;
        mp = mp.max(pmp.sub(p.as_matrix())?.max_abs());
    }
    checks.push(Check::leq("moore_penrose", mp, 1e-10, "blocks=20".into()));

    let (s, t) = sigma_identity_residual(20, &mut sub(7))?;
    checks.push(Check::leq("sigma_closed_form", s, 1e-9, "matrices=20".into()));
    checks.push(Check::leq("theta_closed_form", t, 1e-9, "matrices=20".into()));

    let r = recurrence_residual(50, 64, &mut sub(8))?;
    checks.push(Check::leq("size_recurrence", r, 1e-12, "spectra=50 d<=64".into()));

    let eso = eso_check(20, &mut sub(9))?;
    checks.push(Check::leq("eso_identity", eso.identity, 1e-12, "p_i v_i = M_ii".into()));
    checks.push(Check::leq(
        "eso_spectral_domination",
        eso.spectral_violation,
        1e-9,
        "v_i = lambda_max(M)".into(),
    ));
    checks.push(Check {
        name: "eso_leverage_domination".into(),
        residual: eso.violation,
        tolerance: 1e-9,
        passed: eso.violation <= 1e-9,
        gating: false,
        detail: format!(
            "v_i = M_ii/p_i violates E[M_S] <= D(p o v) in {}/{} cases; not an identity",
            eso.violating_cases, eso.cases
        ),
    });

    let (dpp, size, half) = counter_example()?;
    let r = (dpp - 1.0 / 3.0).abs().max((size - 2.0).abs()).max((half - 0.5).abs());
    checks.push(Check::leq("half_sampler_counter_example", r, 1e-12, format!("sigma_dpp={dpp:.6} sigma_half={half:.6}")));

    let margin = uniform_optimality_margin(100, 6, &mut sub(10))?;
    checks.push(Check::leq("uniform_optimal_on_diagonal", margin, 1e-12, "explicit samplers=100".into()));

    Ok(VerifyReport { checks })
}
