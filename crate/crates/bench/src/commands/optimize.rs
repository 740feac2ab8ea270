use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use rnm_core::optimizer::{
    run_rnm, sigma_brute_force, sigma_closed_form, MetricVariant, RunOptions, RunTrace,
};
use rnm_core::rng::RngStream;
use rnm_core::samplers::{PreparedSampler, SamplerSpec};

use crate::config::{ExperimentSettings, RawConfig};
use crate::error::{BenchError, Result};
use crate::output::{create_file, fmt_opt};
use crate::setup::{build_problem, build_sampler, BuiltProblem, SamplerEntry};

/// Mean gaps below this fraction of the initial gap are treated as
/// round-off when fitting the empirical rate.
pub const RATE_FLOOR: f64 = 1e-20;

/// Largest dimension at which predicted rates are computed by enumeration
/// for samplers without a closed form.
pub const ENUMERATION_DIM: usize = 12;

/// Stream id of repetition `rep` of sampler number `index`.
pub fn run_stream(index: usize, rep: usize) -> u64 {
    ((index as u64) << 32) | rep as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub sampler: String,
    pub spec: String,
    pub expected_size: f64,
    pub realized_size: f64,
    /// Geometric mean per-step ratio over the tail half of the averaged curve.
    pub empirical_rate: f64,
    /// `1 − σ` when available.
    pub predicted_rate: Option<f64>,
    /// First iteration at which the averaged gap reaches `ε · gap₀`.
    pub iterations_to_target: Option<usize>,
    /// Mean cumulative cost `Σ (|S|³ + c₀)` at that iteration.
    pub effort_to_target: Option<f64>,
    pub wall_ns: f64,
    pub completed: usize,
    pub diverged: usize,
}

#[derive(Debug, Clone)]
pub struct MeanCurve {
    pub gaps: Vec<f64>,
    pub costs: Vec<f64>,
}

impl MeanCurve {
    pub fn from_traces(traces: &[&RunTrace]) -> Option<Self> {
        let len = traces.iter().map(|t| t.records.len()).min()?;
        let n = traces.len() as f64;
        let avg = |f: &dyn Fn(&RunTrace, usize) -> f64| -> Vec<f64> {
            (0..len).map(|k| traces.iter().map(|t| f(t, k)).sum::<f64>() / n).collect()
        };
        Some(Self {
            gaps: avg(&|t, k| t.records[k].gap),
            costs: avg(&|t, k| t.records[k].cum_cost),
        })
    }

    /// Geometric mean ratio `(g_K / g_{K/2})^{1/(K − K/2)}` where `K` is the
    /// last index whose gap is above `RATE_FLOOR · g_0`.
    pub fn tail_rate(&self) -> f64 {
        let g0 = self.gaps[0];
        if !(g0 > 0.0) {
            return f64::NAN;
        }
        let last = self
            .gaps
            .iter()
            .rposition(|&g| g > RATE_FLOOR * g0)
            .unwrap_or(0);
        let first = last / 2;
        if last == first {
            return f64::NAN;
        }
        (self.gaps[last] / self.gaps[first]).powf(1.0 / (last - first) as f64)
    }

    pub fn first_below(&self, rel: f64) -> Option<usize> {
        let g0 = self.gaps[0];
        self.gaps.iter().position(|&g| g <= rel * g0)
    }
}

fn predicted_rate(p: &BuiltProblem, spec: &SamplerSpec<f64>, variable: bool) -> Option<f64> {
    if variable {
        return None;
    }
    let kappa = p.problem.kappa();
    let sigma = match spec {
        SamplerSpec::Dpp { alpha } => sigma_closed_form(&p.spectrum, *alpha, kappa).ok()?,
        _ if p.dim() <= ENUMERATION_DIM => sigma_brute_force(p.metric(), spec, kappa).ok()?,
        _ => return None,
    };
    Some(1.0 - sigma)
}

pub struct OptimizeOutcome {
    pub rows: Vec<SummaryRow>,
    pub problem: String,
}

struct Job {
    sampler: usize,
    rep: usize,
}

pub fn cmd_optimize(cfg: &RawConfig, settings: &ExperimentSettings, out: &Path) -> Result<OptimizeOutcome> {
    let problem_section = cfg
        .section("problem")
        .ok_or_else(|| BenchError::Config { line: 0, message: "missing [problem] section".into() })?;
    let built = build_problem(problem_section, settings.seed)?;
    let entries: Vec<SamplerEntry> = cfg
        .sections_named("sampler")
        .map(|s| build_sampler(s, &built.spectrum))
        .collect::<Result<_>>()?;
    if entries.is_empty() {
        return Err(BenchError::Config { line: 0, message: "no [sampler <id>] sections".into() });
    }
    let samplers: Vec<PreparedSampler<f64>> = entries
        .iter()
        .map(|e| PreparedSampler::with_spectrum(e.spec.clone(), built.metric(), Some(built.spectrum.clone())))
        .collect::<rnm_core::Result<_>>()?;
    for s in &samplers {
        s.require_proper()?;
    }
    let options = RunOptions {
        variant: if settings.variable_metric { MetricVariant::Variable } else { MetricVariant::Fixed },
        overhead: settings.overhead,
        target_gap: None,
    };
    let jobs: Vec<Job> = (0..entries.len())
        .flat_map(|sampler| (0..settings.reps).map(move |rep| Job { sampler, rep }))
        .collect();
    let results: Vec<rnm_core::Result<RunTrace>> = jobs
        .par_iter()
        .map(|j| {
            let mut rng = RngStream::new(settings.seed, run_stream(j.sampler, j.rep));
            run_rnm(built.problem.as_ref(), &samplers[j.sampler], &built.x0, settings.iterations, &mut rng, &options)
        })
        .collect();

    for dir in ["traces", "timings", "mean"] {
        fs::create_dir_all(out.join(dir))?;
    }
    let mut rows = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        let runs: Vec<(usize, &rnm_core::Result<RunTrace>)> = jobs
            .iter()
            .zip(&results)
            .filter(|(j, _)| j.sampler == i)
            .map(|(j, r)| (j.rep, r))
            .collect();
        let mut ok: Vec<&RunTrace> = Vec::new();
        let mut diverged = 0;
        for (rep, r) in runs {
            match r {
                Ok(t) => {
                    let mut w = BufWriter::new(create_file(&out.join("traces").join(format!("{}_{rep}.csv", entry.id)))?);
                    t.write_csv(&mut w)?;
                    w.flush()?;
                    let mut w = BufWriter::new(create_file(&out.join("timings").join(format!("{}_{rep}.csv", entry.id)))?);
                    t.write_csv_with_timing(&mut w)?;
                    w.flush()?;
                    ok.push(t);
                }
                Err(rnm_core::Error::Divergence { .. }) => diverged += 1,
                Err(e) => return Err(e.clone().into()),
            }
        }
        let prepared = &samplers[i];
        let mut row = SummaryRow {
            sampler: entry.id.clone(),
            spec: entry.spec.to_string(),
            expected_size: prepared.expected_size(),
            realized_size: f64::NAN,
            empirical_rate: f64::NAN,
            predicted_rate: predicted_rate(&built, &entry.spec, settings.variable_metric),
            iterations_to_target: None,
            effort_to_target: None,
            wall_ns: f64::NAN,
            completed: ok.len(),
            diverged,
        };
        if let Some(curve) = MeanCurve::from_traces(&ok) {
            row.realized_size = ok.iter().map(|t| t.mean_block_size()).sum::<f64>() / ok.len() as f64;
            row.empirical_rate = curve.tail_rate();
            row.wall_ns = ok
                .iter()
                .map(|t| t.records.iter().map(|r| r.ns as f64).sum::<f64>())
                .sum::<f64>()
                / ok.len() as f64;
            if let Some(eps) = settings.target {
                row.iterations_to_target = curve.first_below(eps);
                row.effort_to_target = row.iterations_to_target.map(|k| curve.costs[k]);
            }
            let mut w = BufWriter::new(create_file(&out.join("mean").join(format!("{}.csv", entry.id)))?);
            writeln!(w, "# sampler: {}", entry.spec)?;
            writeln!(w, "# runs: {}", ok.len())?;
            writeln!(w, "k,mean_gap,mean_cum_cost")?;
            for (k, (g, c)) in curve.gaps.iter().zip(&curve.costs).enumerate() {
                writeln!(w, "{k},{g:e},{c:e}")?;
            }
            w.flush()?;
        }
        rows.push(row);
    }
    write_summary(&out.join("summary.csv"), &built.description, settings, &rows)?;
    Ok(OptimizeOutcome { rows, problem: built.description })
}

fn write_summary(path: &Path, problem: &str, settings: &ExperimentSettings, rows: &[SummaryRow]) -> Result<()> {
    let mut w = BufWriter::new(create_file(path)?);
    writeln!(w, "# problem: {problem}")?;
    writeln!(w, "# seed: {}", settings.seed)?;
    writeln!(w, "# iterations: {}", settings.iterations)?;
    writeln!(w, "# reps: {}", settings.reps)?;
    writeln!(w, "# target: {}", fmt_opt(settings.target))?;
    writeln!(w, "# rate: geometric mean ratio over the tail half of the averaged gap curve, gaps below {RATE_FLOOR:e} x gap0 excluded")?;
    writeln!(w, "sampler,spec,expected_size,realized_size,empirical_rate,predicted_rate,iterations_to_target,effort_to_target,wall_ns,completed,diverged")?;
    for r in rows {
        writeln!(
            w,
            "{},\"{}\",{:e},{:e},{:e},{},{},{},{:e},{},{}",
            r.sampler,
            r.spec,
            r.expected_size,
            r.realized_size,
            r.empirical_rate,
            fmt_opt(r.predicted_rate),
            r.iterations_to_target.map_or(String::new(), |k| k.to_string()),
            fmt_opt(r.effort_to_target),
            r.wall_ns,
            r.completed,
            r.diverged,
        )?;
    }
    w.flush()?;
    Ok(())
}
