use std::io::Write;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::PreparedSampler;
use crate::scalar::Real;

use super::problem::Problem;
use super::step::{rnm_relative_step_detailed, rnm_step_detailed};

/// Runs are stopped once the gap exceeds this multiple of the initial gap.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricVariant {
    /// Fixed over-approximation metric `M`.
    #[default]
    Fixed,
    /// Hessian `H(x_k)` recomputed every iteration, step scaled by `1/L̃`.
    Variable,
}

impl MetricVariant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fixed => "fixed",
            Self::Variable => "variable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub variant: MetricVariant,
    /// Fixed cost added per iteration on top of `|S|³`.
    pub overhead: f64,
    /// Stop early once the gap drops to this value or below.
    pub target_gap: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            variant: MetricVariant::Fixed,
            overhead: 0.0,
            target_gap: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub gap: f64,
    pub block_size: usize,
    pub cum_cost: f64,
    pub ns: u64,
}

/// Per-iteration record of one run. Record `k` describes the state after `k`
/// steps; record 0 is the starting point with zero cost.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub sampler: String,
    pub seed: u64,
    pub stream_id: u64,
    pub dim: usize,
    pub variant: MetricVariant,
    pub overhead: f64,
    pub records: Vec<TraceRecord>,
    /// Steps whose block was singular and went through the pseudoinverse.
    pub singular_steps: usize,
    pub final_x: Vec<f64>,
}

impl RunTrace {
    pub fn gaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gap).collect()
    }

    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    pub fn total_cost(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cum_cost)
    }

    /// First record whose gap is at or below `target`.
    pub fn first_below(&self, target: f64) -> Option<&TraceRecord> {
        self.records.iter().find(|r| r.gap <= target)
    }

    pub fn mean_block_size(&self) -> f64 {
        let steps = &self.records[1.min(self.records.len())..];
        if steps.is_empty() {
            return 0.0;
        }
        steps.iter().map(|r| r.block_size as f64).sum::<f64>() / steps.len() as f64
    }

    fn write_header<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# sampler: {}", self.sampler)?;
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# stream_id: {}", self.stream_id)?;
        writeln!(w, "# d: {}", self.dim)?;
        writeln!(w, "# variant: {}", self.variant.name())?;
        writeln!(w, "# overhead: {:e}", self.overhead)?;
        writeln!(w, "# indices: 0-based")?;
        Ok(())
    }

    /// Deterministic columns only: `k,gap,block_size,cum_cost`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        self.write_header(w)?;
        writeln!(w, "k,gap,block_size,cum_cost")?;
        for r in &self.records {
            writeln!(w, "{},{:e},{},{:e}", r.k, r.gap, r.block_size, r.cum_cost)?;
        }
        Ok(())
    }

    /// All columns including wall-clock: `k,gap,block_size,cum_cost,ns`.
    pub fn write_csv_with_timing<W: Write>(&self, w: &mut W) -> Result<()> {
        self.write_header(w)?;
        writeln!(w, "k,gap,block_size,cum_cost,ns")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{:e},{},{:e},{}",
                r.k, r.gap, r.block_size, r.cum_cost, r.ns
            )?;
        }
        Ok(())
    }
}

/// Runs the randomized Newton method for `iters` steps, drawing a fresh
/// block from `sampler` each step.
///
/// Fails with [`Error::Divergence`] when the objective stops being finite
/// or the gap grows beyond `1e12` times its initial value.
pub fn run_rnm<T: Real, P: Problem<T> + ?Sized>(
    p: &P,
    sampler: &PreparedSampler<T>,
    x0: &[T],
    iters: usize,
    rng: &mut RngStream,
    options: &RunOptions,
) -> Result<RunTrace> {
    if iters == 0 {
        return Err(Error::ContractViolation("iters must be at least 1".into()));
    }
    if x0.len() != p.dim() || sampler.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: if x0.len() != p.dim() { x0.len() } else { sampler.dim() },
        });
    }
    sampler.require_proper()?;
    if options.variant == MetricVariant::Variable && p.rel_smoothness().is_none() {
        return Err(Error::UnsupportedVariant(
            "variable-metric run needs a relative smoothness constant".into(),
        ));
    }

    let seed = rng.seed();
    let stream_id = rng.stream_id();
    let mut x = x0.to_vec();
    let gap0 = p.gap(&x).to_f64_lossy();
    if !gap0.is_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    let limit = DIVERGENCE_FACTOR * gap0.abs().max(f64::MIN_POSITIVE);
    let mut records = Vec::with_capacity(iters + 1);
    records.push(TraceRecord {
        k: 0,
        gap: gap0,
        block_size: 0,
        cum_cost: 0.0,
        ns: 0,
    });
    let mut cost = 0.0;
    let mut singular_steps = 0;
    let clock = Instant::now();

    for k in 1..=iters {
        let s = sampler.draw(rng)?;
        let step = match options.variant {
            MetricVariant::Fixed => rnm_step_detailed(p, &x, &s)?,
            MetricVariant::Variable => rnm_relative_step_detailed(p, &x, &s)?,
        };
        if step.is_singular() {
            singular_steps += 1;
        }
        x = step.x;
        let b = s.len() as f64;
        cost += b * b * b + options.overhead;
        let gap = p.gap(&x).to_f64_lossy();
        if !gap.is_finite() || gap > limit {
            return Err(Error::Divergence { iteration: k });
        }
        records.push(TraceRecord {
            k,
            gap,
            block_size: s.len(),
            cum_cost: cost,
            ns: clock.elapsed().as_nanos() as u64,
        });
        if options.target_gap.is_some_and(|t| gap <= t) {
            break;
        }
    }

    Ok(RunTrace {
        sampler: sampler.spec().to_string(),
        seed,
        stream_id,
        dim: p.dim(),
        variant: options.variant,
        overhead: options.overhead,
        records,
        singular_steps,
        final_x: x.iter().map(|v| v.to_f64_lossy()).collect(),
    })
}
