use std::io::{BufWriter, Write};
use std::path::Path;

use rnm_core::rng::RngStream;
use rnm_core::samplers::PreparedSampler;

use crate::commands::optimize::run_stream;
use crate::config::{ExperimentSettings, RawConfig};
use crate::error::{BenchError, Result};
use crate::output::create_file;
use crate::setup::{build_problem, build_sampler};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub sampler: String,
    pub draws: usize,
    pub frequencies: Vec<f64>,
    pub marginals: Vec<f64>,
    pub mean_size: f64,
    pub size_std_error: f64,
    pub expected_size: f64,
}

impl SampleReport {
    /// Largest `|freq − p| / se` over coordinates with `0 < p < 1`.
    pub fn max_marginal_z(&self) -> f64 {
        let n = self.draws as f64;
        self.frequencies
            .iter()
            .zip(&self.marginals)
            .filter(|(_, &p)| p > 0.0 && p < 1.0)
            .map(|(&f, &p)| (f - p).abs() / (p * (1.0 - p) / n).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn size_z(&self) -> f64 {
        if self.size_std_error > 0.0 {
            (self.mean_size - self.expected_size).abs() / self.size_std_error
        } else if self.mean_size == self.expected_size {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Draws `settings.draws` blocks from each sampler and writes
/// `samples/<id>_marginals.csv` and `samples/<id>_sizes.csv`.
pub fn cmd_sample(cfg: &RawConfig, settings: &ExperimentSettings, out: &Path) -> Result<Vec<SampleReport>> {
    let section = cfg
        .section("problem")
        .ok_or_else(|| BenchError::Config { line: 0, message: "missing [problem] section".into() })?;
    let built = build_problem(section, settings.seed)?;
    let d = built.dim();
    let mut reports = Vec::new();
    for (i, s) in cfg.sections_named("sampler").enumerate() {
        let entry = build_sampler(s, &built.spectrum)?;
        let sampler = PreparedSampler::with_spectrum(entry.spec.clone(), built.metric(), Some(built.spectrum.clone()))?;
        let mut rng = RngStream::new(settings.seed, run_stream(i, 0));
        let n = settings.draws;
        let mut counts = vec![0usize; d];
        let mut hist = vec![0usize; d + 1];
        for _ in 0..n {
            let set = sampler.draw(&mut rng)?;
            set.iter().for_each(|j| counts[j] += 1);
            hist[set.len()] += 1;
        }
        let nf = n as f64;
        let mean = hist.iter().enumerate().map(|(k, &c)| (k * c) as f64).sum::<f64>() / nf;
        let var = if n > 1 {
            hist.iter().enumerate().map(|(k, &c)| c as f64 * (k as f64 - mean).powi(2)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        let report = SampleReport {
            sampler: entry.id.clone(),
            draws: n,
            frequencies: counts.iter().map(|&c| c as f64 / nf).collect(),
            marginals: sampler.marginals(),
            mean_size: mean,
            size_std_error: (var / nf).sqrt(),
            expected_size: sampler.expected_size(),
        };

        let dir = out.join("samples");
        let mut w = BufWriter::new(create_file(&dir.join(format!("{}_marginals.csv", entry.id)))?);
        writeln!(w, "# sampler: {}", entry.spec)?;
        writeln!(w, "# draws: {n}")?;
        writeln!(w, "# seed: {}", settings.seed)?;
        writeln!(w, "# indices are 0-based")?;
        writeln!(w, "index,frequency,marginal,std_error")?;
        for j in 0..d {
            let p = report.marginals[j];
            writeln!(w, "{j},{:e},{:e},{:e}", report.frequencies[j], p, (p * (1.0 - p) / nf).sqrt())?;
        }
        w.flush()?;
        let mut w = BufWriter::new(create_file(&dir.join(format!("{}_sizes.csv", entry.id)))?);
        writeln!(w, "# sampler: {}", entry.spec)?;
        writeln!(w, "# draws: {n}")?;
        writeln!(w, "# mean_size: {:e}", report.mean_size)?;
        writeln!(w, "# std_error: {:e}", report.size_std_error)?;
        writeln!(w, "# expected_size: {:e}", report.expected_size)?;
        writeln!(w, "size,count,frequency")?;
        for (k, &c) in hist.iter().enumerate() {
            writeln!(w, "{k},{c},{:e}", c as f64 / nf)?;
        }
        w.flush()?;
        reports.push(report);
    }
    if reports.is_empty() {
        return Err(BenchError::Config { line: 0, message: "no [sampler <id>] sections".into() });
    }
    Ok(reports)
}
