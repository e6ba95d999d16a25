//! Proximal operator of the scaled l1,∞ norm.
//!
//! The operator separates over rows. For one row `u` and weight `λ̄` it
//! returns the minimizer of `λ̄·‖s‖_∞ + ½‖s − u‖²`. The optimum clips every
//! entry to a common level `t*`, where `t*` is the root of the piecewise
//! linear `g(t) = Σ_p (|u_p| − t)₊ − λ̄` on `[0, ‖u‖_∞]`, and
//! `s*_p = sgn(u_p)·t*` if `|u_p| ≥ t*`, otherwise `u_p`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut1, Axis};

use crate::error::{dim_err, param_err, Error, Result};

const MAX_BISECTION_STEPS: usize = 200;
const WIDTH_TOL: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-12;

/// One row subproblem: the shifted point `u` and the weight `λ̄ = λ/L_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxRowProblem {
    u: Array1<f64>,
    lambda_bar: f64,
}

impl ProxRowProblem {
    pub fn new(u: Array1<f64>, lambda_bar: f64) -> Result<Self> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("row has non-finite entries".into()));
        }
        if !(lambda_bar >= 0.0 && lambda_bar.is_finite()) {
            return Err(param_err(format!("lambda_bar must be non-negative, got {lambda_bar}")));
        }
        Ok(Self { u, lambda_bar })
    }

    pub fn u(&self) -> ArrayView1<'_, f64> {
        self.u.view()
    }

    pub fn lambda_bar(&self) -> f64 {
        self.lambda_bar
    }
}

/// `g(t) = Σ_p (|u_p| − t)₊ − λ̄`, non-increasing in `t`.
pub fn piecewise_g(t: f64, u: ArrayView1<'_, f64>, lambda_bar: f64) -> f64 {
    u.iter().map(|v| (v.abs() - t).max(0.0)).sum::<f64>() - lambda_bar
}

/// Clipping level `t*` of the row subproblem.
///
/// Returns 0 when `g` does not change sign on `[0, ‖u‖_∞]` (the penalty
/// dominates and the whole row vanishes). With `λ̄ = 0` nothing is clipped
/// and the result is `‖u‖_∞`.
pub fn solve_t_star(u: ArrayView1<'_, f64>, lambda_bar: f64) -> f64 {
    let (l1, linf) = u
        .iter()
        .fold((0.0f64, 0.0f64), |(s, m), v| (s + v.abs(), m.max(v.abs())));
    if lambda_bar == 0.0 {
        return linf;
    }
    let g_lo = l1 - lambda_bar;
    let g_hi = -lambda_bar;
    if g_lo * g_hi >= 0.0 {
        return 0.0;
    }

    let width_tol = WIDTH_TOL * linf;
    let residual_tol = RESIDUAL_TOL * l1;
    let (mut lo, mut hi) = (0.0, linf);
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let g = piecewise_g(mid, u, lambda_bar);
        if g.abs() <= residual_tol {
            return mid;
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= width_tol {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn clip_row(mut row: ArrayViewMut1<'_, f64>, lambda_bar: f64) {
    let t = solve_t_star(row.view(), lambda_bar);
    // ties |u_p| = t* take the clipped branch
    row.mapv_inplace(|v| if v.abs() >= t { t.copysign(v) } else { v });
}

/// Minimizer of `λ̄‖s‖_∞ + ½‖s − u‖²`.
pub fn solve_row(prob: &ProxRowProblem) -> Array1<f64> {
    let mut s = prob.u.clone();
    clip_row(s.view_mut(), prob.lambda_bar);
    s
}

/// In-place l∞ proximal step on every row of `u` with weight `lambda_bar`.
pub fn prox_rows_in_place(u: &mut Array2<f64>, lambda_bar: f64) {
    for row in u.axis_iter_mut(Axis(0)) {
        clip_row(row, lambda_bar);
    }
}

/// One proximal gradient step for the l1,∞ penalty:
/// rows of `T − grad/L_f` passed through [`solve_row`] with `λ̄ = λ̂/L_f`.
pub fn prox_matrix(
    t: ArrayView2<'_, f64>,
    grad: ArrayView2<'_, f64>,
    l_f: f64,
    lambda_hat: f64,
) -> Result<Array2<f64>> {
    if t.dim() != grad.dim() {
        return Err(dim_err(format!("iterate is {:?} but gradient is {:?}", t.dim(), grad.dim())));
    }
    if !(l_f > 0.0 && l_f.is_finite()) {
        return Err(param_err(format!("Lipschitz constant must be positive, got {l_f}")));
    }
    if !(lambda_hat >= 0.0 && lambda_hat.is_finite()) {
        return Err(param_err(format!("penalty must be non-negative, got {lambda_hat}")));
    }
    let step = 1.0 / l_f;
    let mut u = &t - &(&grad * step);
    if lambda_hat > 0.0 {
        prox_rows_in_place(&mut u, lambda_hat / l_f);
    }
    Ok(u)
}

/// Row-wise maximum absolute value.
pub fn row_max_abs(s: ArrayView2<'_, f64>) -> Array1<f64> {
    s.map_axis(Axis(1), |row| row.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// `Σ_i max_j |s_ij|`.
pub fn l1_inf_norm(s: ArrayView2<'_, f64>) -> f64 {
    row_max_abs(s).sum()
}
