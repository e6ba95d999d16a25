//! Proximal gradient with penalty continuation for
//! `min_S f(ΦS) + λ‖S‖_{1,∞}`, and row-support extraction from the estimate.
//!
//! The outer loop shrinks the working penalty `λ̂` geometrically from `λ̃`
//! down to `λ` (the last step is clamped so the final phase runs at exactly
//! `λ`); every phase warm-starts from the previous
//! iterate and runs plain ISTA steps until the relative Frobenius change of
//! the iterate falls to `ε`. If a step ever increases the phase objective the
//! step size is halved and the step retried.

use ndarray::{Array2, ArrayView2};

use crate::error::{param_err, Error, Result};
use crate::likelihood::{lipschitz_constant, LikelihoodContext};
use crate::model::{SignalMatrix, SupportSet};
use crate::prox::{l1_inf_norm, prox_rows_in_place, row_max_abs};

/// Relative slack before a step counts as an objective increase.
const ASCENT_SLACK: f64 = 1e-12;
const MAX_STEP_HALVINGS: usize = 60;

/// Target penalty λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// A fixed value.
    Absolute(f64),
    /// A fraction of [`lambda_max`] for the problem at hand.
    FractionOfMax(f64),
}

/// Starting iterate S₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    #[default]
    Zero,
    /// Φ†(2Z − 1): the pseudoinverse applied to the bits recentered to ±1.
    PseudoInverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub lambda: Penalty,
    /// Starting penalty λ̃. `None` uses [`lambda_max`].
    pub lambda_tilde: Option<f64>,
    /// Continuation factor in (0, 1).
    pub alpha: f64,
    /// Relative stopping tolerance of the inner loop.
    pub epsilon: f64,
    pub max_inner_iters: usize,
    pub max_total_iters: usize,
    pub init: Init,
    /// Replaces σ_max(Φ)²/σ_v² as the initial Lipschitz constant.
    pub l_f_override: Option<f64>,
    /// Keep a copy of every accepted iterate in [`SolverResult::iterates`].
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: Penalty::FractionOfMax(0.01),
            lambda_tilde: None,
            alpha: 0.5,
            epsilon: 1e-4,
            max_inner_iters: 500,
            max_total_iters: 20_000,
            init: Init::Zero,
            l_f_override: None,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        match self.lambda {
            Penalty::Absolute(v) | Penalty::FractionOfMax(v) if !(v > 0.0 && v.is_finite()) => {
                return Err(param_err(format!("penalty must be positive, got {v}")));
            }
            _ => {}
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(param_err(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.epsilon > 0.0) {
            return Err(param_err(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_inner_iters == 0 || self.max_total_iters == 0 {
            return Err(param_err("iteration caps must be positive"));
        }
        if let Some(l) = self.l_f_override {
            if !(l > 0.0 && l.is_finite()) {
                return Err(param_err(format!("Lipschitz override must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

/// How a row support is read off the estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtractionMode {
    /// The `k` rows with the largest max-abs value.
    KnownK(usize),
    /// Rows whose max-abs value exceeds `tau` times the largest one.
    Threshold(f64),
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    /// Final iterate.
    pub s_hat: Array2<f64>,
    /// Phase objective at the start of every phase and after every accepted
    /// step.
    pub objective_trace: Vec<f64>,
    /// Index into `objective_trace` where each phase begins.
    pub phase_starts: Vec<usize>,
    pub inner_iterations: usize,
    /// Number of λ̂ values visited.
    pub phases: usize,
    /// False if the last phase or the whole run hit its iteration cap.
    pub converged: bool,
    /// Lipschitz constant in effect at the end, after any step halvings.
    pub lipschitz: f64,
    pub step_halvings: usize,
    pub lambda: f64,
    pub lambda_tilde: f64,
    /// Penalty of the last phase; equals `lambda`.
    pub final_lambda_hat: f64,
    pub iterates: Option<Vec<Array2<f64>>>,
}

impl SolverResult {
    /// Objective values belonging to phase `i`.
    pub fn phase_trace(&self, i: usize) -> &[f64] {
        let start = self.phase_starts[i];
        let end = self.phase_starts.get(i + 1).copied().unwrap_or(self.objective_trace.len());
        &self.objective_trace[start..end]
    }
}

/// `f(ΦS) + λ̂‖S‖_{1,∞}`.
pub fn objective(s: &SignalMatrix, ctx: &LikelihoodContext, lambda_hat: f64) -> Result<f64> {
    objective_of(s.view(), ctx, lambda_hat)
}

/// [`objective`] on a raw N×P array.
pub fn objective_of(s: ArrayView2<'_, f64>, ctx: &LikelihoodContext, lambda_hat: f64) -> Result<f64> {
    ctx.check_s(&s)?;
    let x = ctx.project(&s);
    Ok(ctx.nll_projected(&x.view()) + lambda_hat * l1_inf_norm(s))
}

/// Smallest penalty for which S = 0 is a minimizer: the largest row l1 norm
/// of the gradient at zero.
pub fn lambda_max(ctx: &LikelihoodContext) -> f64 {
    let x = Array2::zeros((ctx.m(), ctx.p()));
    let grad = ctx.phi().data().t().dot(&ctx.grad_projected(&x.view()));
    grad.rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Resolved (λ, λ̃) for a problem.
pub fn resolve_penalties(ctx: &LikelihoodContext, cfg: &SolverConfig) -> Result<(f64, f64)> {
    let lmax = lambda_max(ctx);
    let lambda = match cfg.lambda {
        Penalty::Absolute(v) => v,
        Penalty::FractionOfMax(f) => f * lmax,
    };
    if !(lambda > 0.0) {
        return Err(param_err(format!("resolved penalty must be positive, got {lambda}")));
    }
    let tilde = match cfg.lambda_tilde {
        Some(t) => t,
        // a single phase at exactly λ when λ already exceeds λ_max
        None if lmax > lambda => lmax,
        None => lambda / cfg.alpha,
    };
    if !(tilde > lambda) {
        return Err(param_err(format!("starting penalty {tilde} must exceed target {lambda}")));
    }
    Ok((lambda, tilde))
}

fn pseudo_inverse_start(ctx: &LikelihoodContext) -> Result<Array2<f64>> {
    let phi = ctx.phi().data();
    let dense = nalgebra::DMatrix::from_fn(phi.nrows(), phi.ncols(), |i, j| phi[[i, j]]);
    let pinv = dense
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::Numerical(format!("pseudoinverse failed: {e}")))?;
    let signs = ctx.z().data().mapv(|b| 2.0 * f64::from(b) - 1.0);
    let pinv = Array2::from_shape_fn((pinv.nrows(), pinv.ncols()), |(i, j)| pinv[(i, j)]);
    Ok(pinv.dot(&signs))
}

/// Runs the continuation ISTA double loop.
///
/// Hitting an iteration cap is reported through [`SolverResult::converged`];
/// non-finite iterates are an error.
pub fn run(ctx: &LikelihoodContext, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let (lambda, lambda_tilde) = resolve_penalties(ctx, cfg)?;
    let mut l_f = match cfg.l_f_override {
        Some(l) => l,
        None => lipschitz_constant(ctx.phi(), ctx.sigma_v())?,
    };
    // Φ = 0 makes the gradient vanish; any step size works
    if l_f <= 0.0 {
        l_f = 1.0;
    }

    let mut s = match cfg.init {
        Init::Zero => Array2::zeros((ctx.n(), ctx.p())),
        Init::PseudoInverse => pseudo_inverse_start(ctx)?,
    };
    let mut x = ctx.project(&s.view());
    let mut nll = ctx.nll_projected(&x.view());

    let mut trace = Vec::new();
    let mut phase_starts = Vec::new();
    let mut iterates = cfg.record_iterates.then(Vec::new);
    let mut total = 0usize;
    let mut halvings = 0usize;
    let mut converged = true;
    let mut lambda_hat = lambda_tilde;

    'outer: while lambda_hat > lambda {
        // the last phase lands exactly on λ
        lambda_hat = (lambda_hat * cfg.alpha).max(lambda);
        phase_starts.push(trace.len());
        let mut current = nll + lambda_hat * l1_inf_norm(s.view());
        trace.push(current);

        let mut inner = 0usize;
        loop {
            if total >= cfg.max_total_iters {
                converged = false;
                break 'outer;
            }
            if inner >= cfg.max_inner_iters {
                converged = false;
                break;
            }
            let grad = ctx.phi().data().t().dot(&ctx.grad_projected(&x.view()));

            let (cand, cand_x, cand_nll, cand_obj) = loop {
                let mut u = &s - &(&grad / l_f);
                prox_rows_in_place(&mut u, lambda_hat / l_f);
                let ux = ctx.project(&u.view());
                let unll = ctx.nll_projected(&ux.view());
                let obj = unll + lambda_hat * l1_inf_norm(u.view());
                if !obj.is_finite() {
                    return Err(Error::Numerical(format!(
                        "non-finite objective at iteration {total} (lambda_hat = {lambda_hat})"
                    )));
                }
                if obj <= current + ASCENT_SLACK * current.abs() {
                    break (u, ux, unll, obj);
                }
                halvings += 1;
                if halvings > MAX_STEP_HALVINGS {
                    return Err(Error::Numerical("step size safeguard exhausted".into()));
                }
                l_f *= 2.0;
            };

            let change = frobenius_distance(&cand, &s);
            // a zero previous iterate has no scale; measure against the new one
            let base = match frobenius_norm(&s) {
                b if b > 0.0 => b,
                _ => frobenius_norm(&cand),
            };
            s = cand;
            x = cand_x;
            nll = cand_nll;
            current = cand_obj;
            trace.push(current);
            if let Some(it) = iterates.as_mut() {
                it.push(s.clone());
            }
            inner += 1;
            total += 1;
            if change <= cfg.epsilon * base {
                break;
            }
        }
        // only the final phase has to settle
        if lambda_hat > lambda {
            converged = true;
        }
    }

    Ok(SolverResult {
        s_hat: s,
        objective_trace: trace,
        phases: phase_starts.len(),
        phase_starts,
        inner_iterations: total,
        converged,
        lipschitz: l_f,
        step_halvings: halvings,
        lambda,
        lambda_tilde,
        final_lambda_hat: lambda_hat,
        iterates,
    })
}

fn frobenius_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn frobenius_distance(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Reads a row support off an estimate.
pub fn extract_support(s_hat: ArrayView2<'_, f64>, mode: ExtractionMode) -> Result<SupportSet> {
    if s_hat.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("estimate has non-finite entries".into()));
    }
    let n = s_hat.nrows();
    let scores = row_max_abs(s_hat);
    match mode {
        ExtractionMode::KnownK(k) => {
            if k == 0 || k > n {
                return Err(param_err(format!("KnownK({k}) needs 1 <= k <= N = {n}")));
            }
            let mut order: Vec<usize> = (0..n).collect();
            // stable sort keeps lower indices first on ties
            order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
            order.truncate(k);
            order.sort_unstable();
            Ok(SupportSet::from_sorted_unchecked(order))
        }
        ExtractionMode::Threshold(tau) => {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(param_err(format!("threshold must lie in (0, 1), got {tau}")));
            }
            let top = scores.iter().copied().fold(0.0, f64::max);
            if top == 0.0 {
                return Ok(SupportSet::empty());
            }
            let cut = tau * top;
            let rows = (0..n).filter(|&i| scores[i] > cut).collect();
            Ok(SupportSet::from_sorted_unchecked(rows))
        }
    }
}
