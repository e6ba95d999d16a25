//! Command-line front end of the sweep runner.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use super::{emit_csv, run_sweep, run_sweep_with_workers, write_csv, ExperimentConfig, Method};
use crate::error::{param_err, Error, Result};
use crate::solver::{ExtractionMode, Init, Penalty, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Joint,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Zero,
    Pinv,
}

/// Monte Carlo support-recovery sweep over measurements M and sensors P.
///
/// Grids accept `start:stop:step` (inclusive), `start:stop`, a single value
/// or a comma-separated list.
#[derive(Debug, Parser)]
#[command(name = "sweep", version)]
pub struct SweepArgs {
    /// Signal dimension N.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of nonzero rows K.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Measurements per sensor.
    #[arg(long, default_value = "10:100:10")]
    pub m: String,
    /// Sensor counts.
    #[arg(long, default_value = "1:30")]
    pub p: String,
    #[arg(long, default_value_t = 1e-4)]
    pub sigma_v_sq: f64,
    /// Variance of the measurement matrix entries.
    #[arg(long, default_value_t = 0.004)]
    pub phi_variance: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "joint")]
    pub method: MethodArg,
    /// Absolute target penalty; overrides --lambda-ratio.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Target penalty as a fraction of the smallest penalty that zeroes the
    /// estimate.
    #[arg(long, default_value_t = 0.01)]
    pub lambda_ratio: f64,
    /// Starting penalty; defaults to the zeroing penalty of each problem.
    #[arg(long)]
    pub lambda_tilde: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 500)]
    pub max_inner_iters: usize,
    #[arg(long, default_value_t = 20_000)]
    pub max_total_iters: usize,
    #[arg(long, value_enum, default_value = "zero")]
    pub init: InitArg,
    /// Lipschitz constant override.
    #[arg(long)]
    pub l_f: Option<f64>,
    /// Relative threshold extraction instead of keeping the top K rows.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Echo the resolved configuration before running.
    #[arg(long)]
    pub print_config: bool,
}

/// Parses `start:stop:step`, `start:stop`, `v` or `a,b,c`.
pub fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let bad = |why: &str| param_err(format!("invalid grid `{spec}`: {why}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("not a non-negative integer"));
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(bad("empty"));
    }
    if spec.contains(',') {
        return spec.split(',').map(num).collect();
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let (start, stop, step) = match parts.as_slice() {
        [v] => return Ok(vec![num(v)?]),
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(bad("too many fields")),
    };
    if step == 0 {
        return Err(bad("step must be positive"));
    }
    if start > stop {
        return Err(bad("start exceeds stop"));
    }
    Ok((start..=stop).step_by(step).collect())
}

impl SweepArgs {
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let lambda = match self.lambda {
            Some(v) => Penalty::Absolute(v),
            None => Penalty::FractionOfMax(self.lambda_ratio),
        };
        let cfg = ExperimentConfig {
            n: self.n,
            k: self.k,
            phi_variance: self.phi_variance,
            sigma_v_sq: self.sigma_v_sq,
            m_values: parse_grid(&self.m)?,
            p_values: parse_grid(&self.p)?,
            trials: self.trials,
            seed: self.seed,
            method: match self.method {
                MethodArg::Joint => Method::Joint,
                MethodArg::Baseline => Method::Baseline,
            },
            solver: SolverConfig {
                lambda,
                lambda_tilde: self.lambda_tilde,
                alpha: self.alpha,
                epsilon: self.epsilon,
                max_inner_iters: self.max_inner_iters,
                max_total_iters: self.max_total_iters,
                init: match self.init {
                    InitArg::Zero => Init::Zero,
                    InitArg::Pinv => Init::PseudoInverse,
                },
                l_f_override: self.l_f,
                record_iterates: false,
            },
            extraction: match self.threshold {
                Some(t) => ExtractionMode::Threshold(t),
                None => ExtractionMode::KnownK(self.k),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs a parsed command line. The configuration echo goes to stderr when
/// the CSV itself goes to stdout.
pub fn execute(args: &SweepArgs) -> Result<()> {
    let cfg = args.to_config()?;
    if args.print_config {
        let text = cfg.describe();
        if args.out.is_some() {
            print!("{text}");
        } else {
            eprint!("{text}");
        }
    }
    let cells = match args.workers {
        Some(w) => run_sweep_with_workers(&cfg, w)?,
        None => run_sweep(&cfg)?,
    };
    match &args.out {
        Some(path) => emit_csv(&cells, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&cells, &mut lock)
                .and_then(|_| lock.flush())
                .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}
