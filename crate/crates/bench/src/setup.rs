//! Problems, samplers and decay models built from config sections.

use std::path::Path;

use rnm_core::linalg::io::read_sym_matrix;
use rnm_core::linalg::{sym_eig, CoordSubset, Spectrum, SymMatrix};
use rnm_core::optimizer::Problem;
use rnm_core::problems::{
    dual_krr_problem, gaussian_data, gaussian_mixture_data, logistic_problem, primal_ridge_problem,
    synth_spectrum_matrix, DataSet, KernelSpec, LogisticOptions, MaternOrder, QuadraticProblem,
    ResponseModel,
};
use rnm_core::rng::RngStream;
use rnm_core::samplers::{alpha_for_expected_size, SamplerSpec};
use rnm_core::spectral::{DecayModel, TailConvention};

use crate::config::Section;
use crate::error::{BenchError, Result};

/// Stream id reserved for problem generation.
pub const PROBLEM_STREAM: u64 = u64::MAX;

pub struct BuiltProblem {
    pub problem: Box<dyn Problem<f64>>,
    pub x0: Vec<f64>,
    /// Spectrum of the metric.
    pub spectrum: Spectrum<f64>,
    pub description: String,
}

impl BuiltProblem {
    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn metric(&self) -> &SymMatrix<f64> {
        self.problem.metric()
    }
}

fn parse_rows(section: &Section, key: &str) -> Result<SymMatrix<f64>> {
    let text = section.require_str(key)?;
    let rows = text
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| section.error(key, format!("invalid matrix '{text}'")))?;
    Ok(SymMatrix::from_rows(&rows)?)
}

pub fn read_matrix_file(path: &Path) -> Result<SymMatrix<f64>> {
    let f = std::fs::File::open(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
    Ok(read_sym_matrix(std::io::BufReader::new(f))?)
}

fn response_model(s: &Section) -> Result<ResponseModel> {
    let noise = s.get_or("noise", 1.0)?;
    match s.get_str("response").unwrap_or("sine") {
        "sine" => Ok(ResponseModel::SineFirstCoordinate { noise }),
        "linear" => Ok(ResponseModel::Linear { noise }),
        other => Err(s.error("response", format!("response must be sine or linear, got '{other}'"))),
    }
}

fn dataset(s: &Section, rng: &mut RngStream) -> Result<DataSet<f64>> {
    let n = s.require("n")?;
    let m = s.require("features")?;
    let model = response_model(s)?;
    let clusters: usize = s.get_or("clusters", 0)?;
    Ok(if clusters > 0 {
        gaussian_mixture_data(n, m, clusters, s.get_or("separation", 1.0)?, model, rng)?
    } else {
        gaussian_data(n, m, s.get_or("eta", 1.0)?, model, rng)?
    })
}

fn kernel(s: &Section) -> Result<KernelSpec<f64>> {
    let k = match s.get_str("kernel").unwrap_or("se") {
        "linear" => KernelSpec::Linear,
        "se" => KernelSpec::SquaredExponential {
            lengthscale: s.get_or("lengthscale", 1.0)?,
        },
        "matern" => {
            let nu: f64 = s.get_or("order", 1.5)?;
            let order = MaternOrder::from_value(nu)
                .ok_or_else(|| s.error("order", "matern order must be 0.5, 1.5 or 2.5"))?;
            KernelSpec::Matern {
                order,
                scale: s.get_or("scale", 1.0)?,
                amplitude: s.get_or("amplitude", 1.0)?,
            }
        }
        other => return Err(s.error("kernel", format!("unknown kernel '{other}'"))),
    };
    k.validate()?;
    Ok(k)
}

/// Decay model from `kind` and its parameters (shared by `[problem]` and
/// `[model]` sections).
pub fn decay_model(s: &Section, kind_key: &str) -> Result<DecayModel<f64>> {
    let kind = s.require_str(kind_key)?;
    let m = match kind {
        "exponential" => DecayModel::Exponential {
            c: s.get_or("c", 1.0)?,
            gamma: s.require("gamma")?,
            lambda: s.get_or("lambda", 0.0)?,
        },
        "polynomial" => DecayModel::Polynomial {
            c: s.get_or("c", 1.0)?,
            s: s.require("s")?,
            lambda: s.get_or("lambda", 0.0)?,
        },
        "sparse" => DecayModel::Sparse {
            s: s.require("s")?,
            mu: s.get_or("mu", 1.0)?,
            lambda: s.require("lambda")?,
        },
        other => return Err(s.error(kind_key, format!("unknown decay model '{other}'"))),
    };
    Ok(m)
}

/// Eigenvalues for a `[problem]` or `[model]` section: an explicit
/// `eigenvalues` list, a `flat` spectrum, or a decay model.
pub fn eigenvalues(s: &Section, kind_key: &str) -> Result<Vec<f64>> {
    if let Some(l) = s.get_list::<f64>("eigenvalues")? {
        return Ok(l);
    }
    let d: usize = s.require("d")?;
    if s.get_str(kind_key) == Some("flat") {
        return Ok(vec![s.get_or("value", 1.0)?; d]);
    }
    Ok(decay_model(s, kind_key)?.eigenvalues(d)?)
}

const PROBLEM_KEYS: &[&str] = &[
    "kind", "matrix", "matrix_file", "b", "x_star", "x0", "eigenvalues", "decay", "d", "c",
    "gamma", "lambda", "s", "mu", "value", "n", "features", "clusters", "separation", "eta",
    "noise", "response", "kernel", "lengthscale", "order", "scale", "amplitude", "metric_ridge",
    "kappa", "rel_smoothness",
];

/// Quadratic with metric `m`: minimizer from `x_star`, `b`, or random.
fn quadratic(s: &Section, m: SymMatrix<f64>, rng: &mut RngStream) -> Result<QuadraticProblem<f64>> {
    let d = m.dim();
    if let Some(b) = s.get_list::<f64>("b")? {
        if b.len() != d {
            return Err(s.error("b", format!("b needs {d} entries")));
        }
        return Ok(QuadraticProblem::new(m, b, 0.0)?);
    }
    let xs = match s.get_list::<f64>("x_star")? {
        Some(x) if x.len() == d => x,
        Some(_) => return Err(s.error("x_star", format!("x_star needs {d} entries"))),
        None => (0..d).map(|_| rng.normal()).collect(),
    };
    Ok(QuadraticProblem::with_minimizer(m, &xs)?)
}

pub fn build_problem(s: &Section, seed: u64) -> Result<BuiltProblem> {
    s.check_keys(PROBLEM_KEYS)?;
    let mut rng = RngStream::new(seed, PROBLEM_STREAM);
    let kind = s.require_str("kind")?;
    let problem: Box<dyn Problem<f64>> = match kind {
        "quadratic" => {
            let m = match s.get_str("matrix_file") {
                Some(path) => read_matrix_file(Path::new(path))?,
                None => parse_rows(s, "matrix")?,
            };
            Box::new(quadratic(s, m, &mut rng)?)
        }
        "synthetic" => {
            let l = eigenvalues(s, "decay")?;
            let m = synth_spectrum_matrix(&l, &mut rng)?;
            Box::new(quadratic(s, m, &mut rng)?)
        }
        "krr" => {
            let data = dataset(s, &mut rng)?;
            Box::new(dual_krr_problem(&kernel(s)?, &data, s.require("lambda")?)?)
        }
        "ridge" => {
            let data = dataset(s, &mut rng)?;
            Box::new(primal_ridge_problem(&data, s.require("lambda")?)?)
        }
        "logistic" => {
            let data = dataset(s, &mut rng)?;
            let y: Vec<f64> = data
                .responses()
                .iter()
                .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let data = DataSet::new(data.points().clone(), y)?;
            let opts = LogisticOptions {
                metric_ridge: s.get_or("metric_ridge", 0.0)?,
                kappa: s.get("kappa")?,
                rel_smoothness: s.get("rel_smoothness")?,
            };
            Box::new(logistic_problem(&data, opts)?)
        }
        other => return Err(s.error("kind", format!("unknown problem kind '{other}'"))),
    };
    let d = problem.dim();
    let x0 = match s.get_list::<f64>("x0")? {
        Some(x) if x.len() == d => x,
        Some(_) => return Err(s.error("x0", format!("x0 needs {d} entries"))),
        None => vec![0.0; d],
    };
    let spectrum = sym_eig(problem.metric())?;
    Ok(BuiltProblem {
        problem,
        x0,
        spectrum,
        description: format!("{kind} d={d}"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerEntry {
    pub id: String,
    pub spec: SamplerSpec<f64>,
    /// Requested expected size, when the sampler was given one.
    pub target_size: Option<f64>,
}

fn parse_atoms(s: &Section, d: usize) -> Result<Vec<CoordSubset>> {
    let text = s.require_str("atoms")?;
    text.split(';')
        .map(|a| {
            let idx = a
                .split_whitespace()
                .map(|v| v.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| s.error("atoms", format!("invalid atom '{a}'")))?;
            Ok(CoordSubset::from_unsorted(d, idx)?)
        })
        .collect()
}

/// Sampler from a `[sampler <id>]` section. DPP and leverage samplers take
/// `alpha` or a target expected `size`; uniform ones take `tau` (or an
/// integral `size`); `explicit` takes `atoms` (`;`-separated, indices
/// space-separated, empty atom allowed) and `probs`.
pub fn build_sampler(s: &Section, spectrum: &Spectrum<f64>) -> Result<SamplerEntry> {
    s.check_keys(&["kind", "alpha", "size", "tau", "draws", "atoms", "probs"])?;
    let id = s.id.clone().expect("sampler sections carry an id");
    let d = spectrum.dim();
    let size: Option<f64> = s.get("size")?;
    let kind = s.require_str("kind")?;
    let alpha = || -> Result<f64> {
        match (s.get::<f64>("alpha")?, size) {
            (Some(_), Some(_)) => Err(s.error("size", "give either alpha or size, not both")),
            (Some(a), None) => Ok(a),
            (None, Some(k)) => Ok(alpha_for_expected_size(spectrum, k)?),
            (None, None) => Err(s.error("kind", format!("[sampler {id}] needs alpha or size"))),
        }
    };
    let tau = || -> Result<usize> {
        match (s.get::<usize>("tau")?, size) {
            (Some(_), Some(_)) => Err(s.error("size", "give either tau or size, not both")),
            (Some(t), None) => Ok(t),
            (None, Some(k)) if k.fract() == 0.0 && k >= 1.0 => Ok(k as usize),
            (None, Some(_)) => Err(s.error("size", "uniform samplers need an integral size")),
            (None, None) => Err(s.error("kind", format!("[sampler {id}] needs tau or size"))),
        }
    };
    let spec = match kind {
        "dpp" => SamplerSpec::Dpp { alpha: alpha()? },
        "leverage" => SamplerSpec::RidgeLeverage {
            alpha: alpha()?,
            draws: s.get_or("draws", 1)?,
        },
        "tau_nice" => SamplerSpec::TauNice { tau: tau()? },
        "tau_list" => SamplerSpec::TauList { tau: tau()? },
        "explicit" => SamplerSpec::Explicit {
            atoms: parse_atoms(s, d)?,
            probs: s
                .get_list("probs")?
                .ok_or_else(|| s.error("kind", "explicit sampler needs probs"))?,
        },
        other => return Err(s.error("kind", format!("unknown sampler kind '{other}'"))),
    };
    spec.validate(d)?;
    Ok(SamplerEntry {
        id,
        spec,
        target_size: size,
    })
}

pub fn tail_convention(s: &Section) -> Result<TailConvention> {
    match s.get_str("convention").unwrap_or("inclusive") {
        "inclusive" => Ok(TailConvention::Inclusive),
        "exclusive" => Ok(TailConvention::Exclusive),
        other => Err(s.error("convention", format!("unknown convention '{other}'"))),
    }
}
