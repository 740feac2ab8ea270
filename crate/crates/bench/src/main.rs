use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rnm_bench::commands::{cmd_optimize, cmd_predict, cmd_sample, cmd_verify};
use rnm_bench::config::{check_ids, ExperimentSettings, Overrides, RawConfig};
use rnm_bench::Result;

#[derive(Parser)]
#[command(name = "rnm-bench", version, about = "Randomized Newton experiments with determinantal block sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed, overriding `[experiment] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Repetitions per sampler, overriding `[experiment] reps`.
    #[arg(long, global = true)]
    reps: Option<usize>,

    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Draw blocks and compare frequencies with exact marginals and sizes.
    Sample,
    /// Run every sampler on the configured problem and write traces.
    Optimize,
    /// Evaluate effort curves for the configured decay models.
    Predict,
    /// Run the enumeration oracle suite.
    Verify {
        /// Also check this matrix (CSV) for symmetry and the identities.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
}

fn load(cli: &Cli) -> Result<RawConfig> {
    let path = cli.config.as_ref().ok_or_else(|| rnm_bench::BenchError::Config {
        line: 0,
        message: "--config is required for this command".into(),
    })?;
    let cfg = RawConfig::read(path)?;
    check_ids(&cfg)?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    let ov = Overrides { seed: cli.seed, reps: cli.reps };
    let say = |s: String| {
        if !cli.quiet {
            println!("{s}");
        }
    };
    match &cli.command {
        Command::Sample => {
            let cfg = load(cli)?;
            let settings = ExperimentSettings::from_config(&cfg, ov)?;
            for r in cmd_sample(&cfg, &settings, &cli.out)? {
                say(format!(
                    "{}: draws={} mean_size={:.4} expected={:.4} size_z={:.2} max_marginal_z={:.2}",
                    r.sampler, r.draws, r.mean_size, r.expected_size, r.size_z(), r.max_marginal_z()
                ));
            }
            Ok(true)
        }
        Command::Optimize => {
            let cfg = load(cli)?;
            let settings = ExperimentSettings::from_config(&cfg, ov)?;
            let outcome = cmd_optimize(&cfg, &settings, &cli.out)?;
            say(format!("problem: {}", outcome.problem));
            for r in &outcome.rows {
                let flag = if r.diverged > 0 { format!(" DIVERGED={}", r.diverged) } else { String::new() };
                say(format!(
                    "{}: size={:.3} rate={:.4} predicted={} iters_to_target={} effort_to_target={}{flag}",
                    r.sampler,
                    r.realized_size,
                    r.empirical_rate,
                    r.predicted_rate.map_or("-".into(), |p| format!("{p:.4}")),
                    r.iterations_to_target.map_or("-".into(), |k| k.to_string()),
                    r.effort_to_target.map_or("-".into(), |e| format!("{e:.4e}")),
                ));
            }
            say(format!("wrote {}", cli.out.join("summary.csv").display()));
            Ok(true)
        }
        Command::Predict => {
            let cfg = load(cli)?;
            for p in cmd_predict(&cfg, &cli.out)? {
                let q = p.curve.q_raw.map_or("-".into(), |q| format!("{q:.3}"));
                match p.argmin() {
                    Some((at, size, effort)) => say(format!(
                        "{}: argmin p={at} expected_size={size:.3} effort={effort:.4e} q={q} monotone={}",
                        p.id,
                        p.curve.is_monotone()
                    )),
                    None => say(format!("{}: no finite effort on the grid", p.id)),
                }
            }
            Ok(true)
        }
        Command::Verify { matrix } => {
            let report = cmd_verify(matrix.as_deref())?;
            for c in &report.checks {
                if !cli.quiet || (c.gating && !c.passed) {
                    println!("{}", c.line());
                }
            }
            if !report.passed() {
                eprintln!("failed: {}", report.failures().join(", "));
            }
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
