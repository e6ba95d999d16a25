//! Seeded Monte Carlo sweeps over the number of measurements M and sensors P.
//!
//! Every trial draws a fresh Φ, S and noise from its own random stream. The
//! stream is a ChaCha20 generator keyed by the 32 bytes
//! `seed ‖ m ‖ p ‖ trial` (four little-endian u64 words), so a trial's data
//! depends only on those four numbers, never on scheduling or on which
//! other cells are in the sweep. Joint and baseline runs with the same seed
//! see identical data.

pub mod cli;
mod csv;

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::baseline;
use crate::error::{param_err, Result};
use crate::likelihood::LikelihoodContext;
use crate::model::{self, NoiseModel, SupportSet};
use crate::solver::{self, ExtractionMode, Init, Penalty, SolverConfig};

pub use self::csv::{emit_csv, format_sig6, write_csv, CSV_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// l1,∞-regularized recovery over all sensors at once.
    #[default]
    Joint,
    /// Per-sensor recovery fused by majority vote.
    Baseline,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Joint => "joint",
            Method::Baseline => "baseline",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub phi_variance: f64,
    pub sigma_v_sq: f64,
    pub m_values: Vec<usize>,
    pub p_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub method: Method,
    pub solver: SolverConfig,
    pub extraction: ExtractionMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 100,
            k: 5,
            phi_variance: 0.004,
            sigma_v_sq: 1e-4,
            m_values: vec![60],
            p_values: vec![3],
            trials: 1000,
            seed: 0,
            method: Method::Joint,
            solver: SolverConfig::default(),
            extraction: ExtractionMode::KnownK(5),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 || self.k > self.n {
            return Err(param_err(format!("need 1 <= k <= n, got k = {}, n = {}", self.k, self.n)));
        }
        if self.m_values.is_empty() || self.p_values.is_empty() {
            return Err(param_err("measurement and sensor grids must be non-empty"));
        }
        if self.m_values.contains(&0) || self.p_values.contains(&0) {
            return Err(param_err("grid values must be positive"));
        }
        if self.trials == 0 {
            return Err(param_err("trials must be at least 1"));
        }
        if !(self.phi_variance > 0.0) || !(self.sigma_v_sq > 0.0) {
            return Err(param_err("variances must be positive"));
        }
        match self.extraction {
            ExtractionMode::KnownK(k) if k == 0 || k > self.n => {
                return Err(param_err(format!("KnownK({k}) out of range for n = {}", self.n)));
            }
            ExtractionMode::Threshold(t) if !(t > 0.0 && t < 1.0) => {
                return Err(param_err(format!("threshold {t} must lie in (0, 1)")));
            }
            _ => {}
        }
        self.solver.validate()
    }

    /// Fully resolved configuration as `key = value` lines.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let snr = model::compute_snr(self.k, self.phi_variance, self.sigma_v_sq.sqrt())
            .map(|v| format!("{v:.2}"))
            .unwrap_or_else(|_| "n/a".into());
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "k = {}", self.k);
        let _ = writeln!(out, "phi_variance = {}", self.phi_variance);
        let _ = writeln!(out, "sigma_v_sq = {}", self.sigma_v_sq);
        let _ = writeln!(out, "snr_db = {snr}");
        let _ = writeln!(out, "m = {}", list(&self.m_values));
        let _ = writeln!(out, "p = {}", list(&self.p_values));
        let _ = writeln!(out, "trials = {}", self.trials);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "method = {}", self.method);
        let s = &self.solver;
        let lambda = match s.lambda {
            Penalty::Absolute(v) => format!("{v}"),
            Penalty::FractionOfMax(f) => format!("{f} * lambda_max"),
        };
        let _ = writeln!(out, "lambda = {lambda}");
        let _ = writeln!(
            out,
            "lambda_tilde = {}",
            s.lambda_tilde.map_or("lambda_max".to_string(), |v| v.to_string())
        );
        let _ = writeln!(out, "alpha = {}", s.alpha);
        let _ = writeln!(out, "epsilon = {}", s.epsilon);
        let _ = writeln!(out, "max_inner_iters = {}", s.max_inner_iters);
        let _ = writeln!(out, "max_total_iters = {}", s.max_total_iters);
        let init = match s.init {
            Init::Zero => "zero",
            Init::PseudoInverse => "pinv",
        };
        let _ = writeln!(out, "init = {init}");
        let _ = writeln!(
            out,
            "l_f = {}",
            s.l_f_override.map_or("sigma_max(phi)^2 / sigma_v^2".to_string(), |v| v.to_string())
        );
        let extraction = match self.extraction {
            ExtractionMode::KnownK(k) => format!("known_k({k})"),
            ExtractionMode::Threshold(t) => format!("threshold({t})"),
        };
        let _ = writeln!(out, "extraction = {extraction}");
        let _ = writeln!(out, "indexing = 0-based");
        out
    }
}

/// Aggregated metrics of one (M, P) grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsCell {
    pub m: usize,
    pub p: usize,
    /// Mean per-trial recall, in percent.
    pub pct_support_recovered: f64,
    /// Fraction of trials whose estimate equals the true support.
    pub prob_exact_support: f64,
    /// Trials that hit an iteration cap or failed outright.
    pub non_converged: usize,
    pub trials: usize,
    /// Trials that returned an error; scored as zero recall.
    pub failed: usize,
}

/// Random stream of one trial.
pub fn trial_rng(seed: u64, m: usize, p: usize, trial: usize) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([seed, m as u64, p as u64, trial as u64]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha20Rng::from_seed(key)
}

/// Recall in percent and exact-match flag.
pub fn score_trial(estimated: &SupportSet, truth: &SupportSet) -> Result<(f64, bool)> {
    if truth.is_empty() {
        return Err(param_err("true support must be non-empty"));
    }
    let hits = estimated.intersection_len(truth);
    Ok((100.0 * hits as f64 / truth.len() as f64, estimated == truth))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub pct: f64,
    pub exact: bool,
    pub converged: bool,
}

/// Draws and solves a single trial.
pub fn run_trial(cfg: &ExperimentConfig, m: usize, p: usize, trial: usize) -> Result<TrialOutcome> {
    let mut rng = trial_rng(cfg.seed, m, p, trial);
    let phi = model::generate_measurement_matrix(m, cfg.n, cfg.phi_variance, &mut rng)?;
    let (s, truth) = model::generate_signal_matrix(cfg.n, p, cfg.k, &mut rng)?;
    let noise = NoiseModel::from_variance(cfg.sigma_v_sq)?;
    let y = model::sense(&phi, &s, &noise, &mut rng)?;
    let z = model::quantize(y.view())?;

    let (estimate, converged) = match cfg.method {
        Method::Joint => {
            let ctx = LikelihoodContext::new(phi, z, noise.sigma_v())?;
            let res = solver::run(&ctx, &cfg.solver)?;
            (solver::extract_support(res.s_hat.view(), cfg.extraction)?, res.converged)
        }
        Method::Baseline => {
            let est = baseline::estimate(&z, &phi, noise.sigma_v(), &cfg.solver, cfg.extraction)?;
            (est.fused, est.non_converged == 0)
        }
    };
    let (pct, exact) = score_trial(&estimate, &truth)?;
    Ok(TrialOutcome { pct, exact, converged })
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<MetricsCell>> {
    cfg.validate()?;
    let cells: Vec<(usize, usize)> = cfg
        .m_values
        .iter()
        .flat_map(|&m| cfg.p_values.iter().map(move |&p| (m, p)))
        .collect();
    let jobs: Vec<(usize, usize, usize)> = cells
        .iter()
        .flat_map(|&(m, p)| (0..cfg.trials).map(move |t| (m, p, t)))
        .collect();
    let outcomes: Vec<Result<TrialOutcome>> =
        jobs.par_iter().map(|&(m, p, t)| run_trial(cfg, m, p, t)).collect();

    let metrics = cells
        .iter()
        .zip(outcomes.chunks(cfg.trials))
        .map(|(&(m, p), chunk)| aggregate(m, p, chunk))
        .collect();
    Ok(metrics)
}

/// Runs the sweep on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<MetricsCell>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| param_err(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

fn aggregate(m: usize, p: usize, outcomes: &[Result<TrialOutcome>]) -> MetricsCell {
    let mut pct_sum = 0.0;
    let mut exact = 0usize;
    let mut non_converged = 0usize;
    let mut failed = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                pct_sum += o.pct;
                exact += usize::from(o.exact);
                non_converged += usize::from(!o.converged);
            }
            Err(e) => {
                log::warn!("trial failed at m = {m}, p = {p}: {e}");
                failed += 1;
                non_converged += 1;
            }
        }
    }
    let trials = outcomes.len();
    MetricsCell {
        m,
        p,
        pct_support_recovered: pct_sum / trials as f64,
        prob_exact_support: exact as f64 / trials as f64,
        non_converged,
        trials,
        failed,
    }
}
