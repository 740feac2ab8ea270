use std::io::{BufWriter, Write};
use std::path::Path;

use rnm_core::linalg::Spectrum;
use rnm_core::spectral::{
    exp_decay_curve, poly_decay_curve, size_effort_curve, tail_effort_curve, EffortCurve,
    EffortModel,
};

use crate::config::{RawConfig, Section};
use crate::error::{BenchError, Result};
use crate::output::{create_file, fmt_opt};
use crate::setup::{decay_model, eigenvalues, tail_convention};

#[derive(Debug, Clone)]
pub struct Prediction {
    pub id: String,
    pub curve: EffortCurve<f64>,
}

impl Prediction {
    /// `(p, expected size, effort)` at the least-effort grid point.
    pub fn argmin(&self) -> Option<(f64, f64, f64)> {
        self.curve.argmin().map(|p| (p.p, p.expected_size, p.effort))
    }
}

const MODEL_KEYS: &[&str] = &[
    "kind", "d", "c", "gamma", "lambda", "s", "mu", "value", "eigenvalues", "grid", "targets",
    "convention", "eps", "eps0", "overhead", "kappa",
];

fn effort_model(s: &Section) -> Result<EffortModel<f64>> {
    let e = EffortModel {
        eps0: s.get_or("eps0", 1.0)?,
        eps: s.get_or("eps", 1e-6)?,
        overhead: s.get_or("overhead", 0.0)?,
        kappa: s.get_or("kappa", 1.0)?,
    };
    Ok(e)
}

/// Effort curve for one `[model <id>]` section.
///
/// `exponential` and `polynomial` sweep `α(p) = C·base(p)` over `grid`.
/// `sparse`, `flat` and `list` sweep the tail regularizers `α(k)` over
/// `grid` (with `convention`), or matched expected sizes when `targets` is
/// given.
pub fn predict_model(s: &Section) -> Result<Prediction> {
    s.check_keys(MODEL_KEYS)?;
    let id = s.id.clone().expect("model sections carry an id");
    let effort = effort_model(s)?;
    let kind = s.require_str("kind")?;
    let curve = match kind {
        "exponential" | "polynomial" => {
            let d: usize = s.require("d")?;
            let grid = s.get_grid("grid")?.unwrap_or_else(|| (1..=d).collect());
            let model = decay_model(s, "kind")?;
            if kind == "exponential" {
                exp_decay_curve(&model, d, &grid, &effort)?
            } else {
                poly_decay_curve(&model, d, &grid, &effort)?
            }
        }
        "sparse" | "flat" | "list" => {
            let spec = Spectrum::from_eigenvalues({
                let mut l = eigenvalues(s, "kind")?;
                l.sort_by(|a, b| b.total_cmp(a));
                l
            })?;
            match s.get_list::<f64>("targets")? {
                Some(t) => size_effort_curve(&spec, &t, &effort)?,
                None => {
                    let grid = s.get_grid("grid")?.unwrap_or_else(|| (1..=spec.dim()).collect());
                    tail_effort_curve(&spec, &grid, tail_convention(s)?, &effort)?
                }
            }
        }
        other => return Err(s.error("kind", format!("unknown model kind '{other}'"))),
    };
    Ok(Prediction { id, curve })
}

/// Writes `curves/<id>.csv` per model and `curves/summary.csv`.
pub fn cmd_predict(cfg: &RawConfig, out: &Path) -> Result<Vec<Prediction>> {
    let preds: Vec<Prediction> = cfg.sections_named("model").map(predict_model).collect::<Result<_>>()?;
    if preds.is_empty() {
        return Err(BenchError::Config { line: 0, message: "no [model <id>] sections".into() });
    }
    let dir = out.join("curves");
    for p in &preds {
        let mut w = BufWriter::new(create_file(&dir.join(format!("{}.csv", p.id)))?);
        p.curve.write_csv(&mut w)?;
        w.flush()?;
    }
    let mut w = BufWriter::new(create_file(&dir.join("summary.csv"))?);
    writeln!(w, "model,kind,d,q_raw,q_rounded,argmin_p,argmin_expected_size,argmin_effort,monotone")?;
    for p in &preds {
        let (ap, asz, ae) = p.argmin().map_or((None, None, None), |(a, b, c)| (Some(a), Some(b), Some(c)));
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            p.id,
            p.curve.model,
            p.curve.d,
            fmt_opt(p.curve.q_raw),
            p.curve.q_rounded.map_or(String::new(), |q| q.to_string()),
            fmt_opt(ap),
            fmt_opt(asz),
            fmt_opt(ae),
            p.curve.is_monotone(),
        )?;
    }
    w.flush()?;
    Ok(preds)
}
