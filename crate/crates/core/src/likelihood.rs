//! Probit negative log-likelihood of the bit matrix and its gradient.
//!
//! With X = ΦS and x̃ = x/σ_v the objective is
//! `f(X) = -Σ [z·log Φ(x̃) + (1 - z)·log Φ(-x̃)]`, where Φ is the standard
//! normal CDF. Both the log-CDF and the density/CDF ratio are evaluated so
//! that they stay finite far into the lower tail.

use ndarray::{Array1, Array2, ArrayView2, Zip};

use crate::error::{dim_err, param_err, Error, Result};
use crate::model::{BitMatrix, MeasurementMatrix, SignalMatrix};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Below this argument the lower tail is evaluated through the Mills ratio.
const TAIL_CUTOFF: f64 = -8.0;
/// Depth of the Mills-ratio continued fraction; converged to machine
/// precision for x ≥ 8.
const MILLS_DEPTH: usize = 64;

/// Mills ratio R(x) = Q(x)/ϕ(x) for x ≥ 8, by backward evaluation of
/// `1/(x + 1/(x + 2/(x + 3/(x + ...))))`.
fn mills_ratio(x: f64) -> f64 {
    let mut tail = x;
    for k in (1..=MILLS_DEPTH).rev() {
        tail = x + k as f64 / tail;
    }
    1.0 / tail
}

/// log Φ(t) without input checks.
#[inline]
pub(crate) fn ln_cdf(t: f64) -> f64 {
    if t > 0.0 {
        (-0.5 * libm::erfc(t * std::f64::consts::FRAC_1_SQRT_2)).ln_1p()
    } else if t >= TAIL_CUTOFF {
        (0.5 * libm::erfc(-t * std::f64::consts::FRAC_1_SQRT_2)).ln()
    } else {
        let x = -t;
        -0.5 * x * x - LN_SQRT_2PI + mills_ratio(x).ln()
    }
}

/// ϕ(t)/Φ(t), the inverse Mills ratio; tends to -t as t → -∞ and to 0 as
/// t → ∞.
#[inline]
pub(crate) fn pdf_cdf_ratio(t: f64) -> f64 {
    if t >= TAIL_CUTOFF {
        let pdf = FRAC_1_SQRT_2PI * (-0.5 * t * t).exp();
        let cdf = 0.5 * libm::erfc(-t * std::f64::consts::FRAC_1_SQRT_2);
        pdf / cdf
    } else {
        1.0 / mills_ratio(-t)
    }
}

/// Natural log of the standard normal CDF.
///
/// Stays finite for every finite argument; the lower tail below -8 goes
/// through a continued fraction for the Mills ratio instead of the CDF,
/// which would underflow near -38.
pub fn log_normal_cdf(t: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::Data("log_normal_cdf of NaN".into()));
    }
    Ok(ln_cdf(t))
}

/// Standard normal density over CDF, ϕ(t)/Φ(t).
pub fn inverse_mills_ratio(t: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::Data("inverse_mills_ratio of NaN".into()));
    }
    Ok(pdf_cdf_ratio(t))
}

/// Everything the likelihood needs besides the signal: Φ, the bits and σ_v.
#[derive(Debug, Clone)]
pub struct LikelihoodContext {
    phi: MeasurementMatrix,
    z: BitMatrix,
    sigma_v: f64,
}

impl LikelihoodContext {
    pub fn new(phi: MeasurementMatrix, z: BitMatrix, sigma_v: f64) -> Result<Self> {
        if phi.m() != z.rows() {
            return Err(dim_err(format!(
                "measurement matrix has {} rows but bit matrix has {}",
                phi.m(),
                z.rows()
            )));
        }
        if !(sigma_v > 0.0 && sigma_v.is_finite()) {
            return Err(param_err(format!("sigma_v must be positive, got {sigma_v}")));
        }
        Ok(Self { phi, z, sigma_v })
    }

    pub fn phi(&self) -> &MeasurementMatrix {
        &self.phi
    }

    pub fn z(&self) -> &BitMatrix {
        &self.z
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }

    /// M.
    pub fn m(&self) -> usize {
        self.phi.m()
    }

    /// N.
    pub fn n(&self) -> usize {
        self.phi.n()
    }

    /// P.
    pub fn p(&self) -> usize {
        self.z.cols()
    }

    pub(crate) fn check_x(&self, x: &ArrayView2<'_, f64>) -> Result<()> {
        if x.dim() != (self.m(), self.p()) {
            return Err(dim_err(format!(
                "expected {}x{} projections, got {}x{}",
                self.m(),
                self.p(),
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_s(&self, s: &ArrayView2<'_, f64>) -> Result<()> {
        if s.dim() != (self.n(), self.p()) {
            return Err(dim_err(format!(
                "expected {}x{} signal matrix, got {}x{}",
                self.n(),
                self.p(),
                s.nrows(),
                s.ncols()
            )));
        }
        Ok(())
    }

    /// ΦS.
    pub(crate) fn project(&self, s: &ArrayView2<'_, f64>) -> Array2<f64> {
        self.phi.data().dot(s)
    }

    /// f(X) for X already projected; shapes are not checked.
    pub(crate) fn nll_projected(&self, x: &ArrayView2<'_, f64>) -> f64 {
        let inv = 1.0 / self.sigma_v;
        let mut acc = 0.0;
        Zip::from(x).and(self.z.view()).for_each(|&x, &z| {
            let t = x * inv;
            acc -= if z == 1 { ln_cdf(t) } else { ln_cdf(-t) };
        });
        acc
    }

    /// ∂f/∂X; shapes are not checked.
    pub(crate) fn grad_projected(&self, x: &ArrayView2<'_, f64>) -> Array2<f64> {
        let inv = 1.0 / self.sigma_v;
        Zip::from(x).and(self.z.view()).map_collect(|&x, &z| {
            let t = x * inv;
            if z == 1 {
                -inv * pdf_cdf_ratio(t)
            } else {
                inv * pdf_cdf_ratio(-t)
            }
        })
    }
}

/// Negative log-likelihood of the bits given S.
pub fn nll(s: &SignalMatrix, ctx: &LikelihoodContext) -> Result<f64> {
    nll_of(s.view(), ctx)
}

/// [`nll`] on a raw N×P array.
pub fn nll_of(s: ArrayView2<'_, f64>, ctx: &LikelihoodContext) -> Result<f64> {
    ctx.check_s(&s)?;
    let x = ctx.project(&s);
    Ok(ctx.nll_projected(&x.view()))
}

/// Negative log-likelihood as a function of the projections X = ΦS.
pub fn nll_x(x: ArrayView2<'_, f64>, ctx: &LikelihoodContext) -> Result<f64> {
    ctx.check_x(&x)?;
    Ok(ctx.nll_projected(&x))
}

/// Gradient of the negative log-likelihood with respect to X.
///
/// Entries are negative where z = 1 and positive where z = 0.
pub fn grad_x(x: ArrayView2<'_, f64>, ctx: &LikelihoodContext) -> Result<Array2<f64>> {
    ctx.check_x(&x)?;
    Ok(ctx.grad_projected(&x))
}

/// Gradient with respect to S: Φᵀ·∇f(ΦS).
pub fn grad_s(s: &SignalMatrix, ctx: &LikelihoodContext) -> Result<Array2<f64>> {
    grad_s_of(s.view(), ctx)
}

/// [`grad_s`] on a raw N×P array.
pub fn grad_s_of(s: ArrayView2<'_, f64>, ctx: &LikelihoodContext) -> Result<Array2<f64>> {
    ctx.check_s(&s)?;
    let x = ctx.project(&s);
    Ok(ctx.phi.data().t().dot(&ctx.grad_projected(&x.view())))
}

const POWER_ITER_TOL: f64 = 1e-10;
const POWER_ITER_MAX: usize = 100_000;

/// Largest squared singular value of Φ by power iteration on the smaller of
/// ΦΦᵀ and ΦᵀΦ.
pub fn spectral_norm_sq(phi: &MeasurementMatrix) -> f64 {
    let a = phi.data();
    let gram = if a.nrows() <= a.ncols() { a.dot(&a.t()) } else { a.t().dot(a) };
    let dim = gram.nrows();
    if gram.iter().all(|&v| v == 0.0) {
        return 0.0;
    }

    let mut v = Array1::from_shape_fn(dim, |i| 1.0 + i as f64 / dim as f64);
    if gram.dot(&v).iter().all(|&x| x == 0.0) {
        let best = (0..dim)
            .max_by(|&i, &j| gram[[i, i]].total_cmp(&gram[[j, j]]))
            .unwrap_or(0);
        v = gram.column(best).to_owned();
    }
    v /= v.dot(&v).sqrt();

    let mut rayleigh = 0.0;
    for _ in 0..POWER_ITER_MAX {
        let w = gram.dot(&v);
        let next = v.dot(&w);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            break;
        }
        v = w / norm;
        let done = (next - rayleigh).abs() <= POWER_ITER_TOL * next.abs();
        rayleigh = next;
        if done {
            break;
        }
    }
    rayleigh
}

/// Lipschitz constant of S ↦ Φᵀ∇f(ΦS): σ_max(Φ)²/σ_v².
///
/// The second derivative of t ↦ -log Φ(t) lies in (0, 1), so the Hessian of
/// f in X is bounded by I/σ_v².
pub fn lipschitz_constant(phi: &MeasurementMatrix, sigma_v: f64) -> Result<f64> {
    if !(sigma_v > 0.0 && sigma_v.is_finite()) {
        return Err(param_err(format!("sigma_v must be positive, got {sigma_v}")));
    }
    Ok(spectral_norm_sq(phi) / (sigma_v * sigma_v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    // Reference values of log Φ(t) from 50-digit arithmetic.
    #[allow(clippy::approx_constant)]
    const LN_CDF_TABLE: &[(f64, f64)] = &[
        (-40.0, -804.608_442_013_753_8),
        (-38.0, -726.557_216_018_820_1),
        (-30.0, -454.321_243_956_343_2),
        (-20.0, -203.917_155_371_097_26),
        (-10.0, -53.231_285_150_512_47),
        (-8.5, -39.197_396_428_217_67),
        (-8.0, -35.013_437_159_914_55),
        (-7.5, -31.075_890_902_890_001),
        (-5.0, -15.064_998_393_988_726),
        (-2.0, -3.783_184_333_682_032),
        (-1.0, -1.841_021_645_009_263_5),
        (0.0, -0.693_147_180_559_945_3),
        (1.0, -0.172_753_779_023_449_9),
        (2.0, -0.023_012_909_328_963_49),
        (5.0, -2.866_516_129_637_636e-7),
        (8.0, -6.220_960_574_271_786e-16),
        (10.0, -7.619_853_024_160_526e-24),
    ];

    fn ctx_1x1(z: u8, sigma: f64) -> LikelihoodContext {
        LikelihoodContext::new(
            MeasurementMatrix::new(array![[1.0]]).unwrap(),
            BitMatrix::new(array![[z]]).unwrap(),
            sigma,
        )
        .unwrap()
    }

    #[test]
    fn log_cdf_matches_reference_table() {
        for &(t, expect) in LN_CDF_TABLE {
            let got = log_normal_cdf(t).unwrap();
            assert_relative_eq!(got, expect, max_relative = 1e-13);
        }
        assert!(log_normal_cdf(f64::NAN).is_err());
    }

    #[test]
    fn log_cdf_half_at_zero() {
        assert_eq!(log_normal_cdf(0.0).unwrap(), -std::f64::consts::LN_2);
    }

    #[test]
    fn log_cdf_reflection() {
        let mut t = -5.0;
        while t <= 5.0 {
            let s = ln_cdf(t).exp() + ln_cdf(-t).exp();
            assert!((s - 1.0).abs() < 1e-12, "t = {t}");
            t += 0.01;
        }
    }

    #[test]
    fn log_cdf_monotone_and_finite() {
        let mut prev = f64::NEG_INFINITY;
        let mut t = -300.0;
        while t <= 40.0 {
            let v = ln_cdf(t);
            assert!(v.is_finite() || t > 38.0);
            assert!(v >= prev, "not monotone at {t}");
            prev = v;
            t += 0.001;
        }
    }

    #[test]
    fn ratio_tail_values() {
        // 50-digit reference values of ϕ(t)/Φ(t)
        assert_relative_eq!(pdf_cdf_ratio(-30.0), 30.033_259_667_433_677, max_relative = 1e-13);
        assert_relative_eq!(pdf_cdf_ratio(-300.0), 300.003_333_259_263_4, max_relative = 1e-13);
        assert_relative_eq!(pdf_cdf_ratio(0.0), (2.0 / std::f64::consts::PI).sqrt(), max_relative = 1e-15);
        assert!(pdf_cdf_ratio(50.0) >= 0.0);
        // continuous across the tail switch
        let below = pdf_cdf_ratio(TAIL_CUTOFF - 1e-9);
        let above = pdf_cdf_ratio(TAIL_CUTOFF);
        assert!((below - above).abs() < 1e-8);
    }

    #[test]
    fn nll_at_zero_is_log2_per_entry() {
        let phi = MeasurementMatrix::new(array![[1.0, 2.0, 3.0], [0.5, -1.0, 0.0]]).unwrap();
        let z = BitMatrix::new(array![[1, 0, 1], [0, 0, 1]]).unwrap();
        let ctx = LikelihoodContext::new(phi, z, 0.7).unwrap();
        let v = nll(&SignalMatrix::zeros(3, 3), &ctx).unwrap();
        assert_relative_eq!(v, 6.0 * std::f64::consts::LN_2, max_relative = 1e-15);
    }

    #[test]
    fn nll_single_entry() {
        let ctx = ctx_1x1(1, 1.0);
        let v = nll_x(array![[1.0]].view(), &ctx).unwrap();
        assert_relative_eq!(v, 0.172_753_779_023_449_9, max_relative = 1e-14);
    }

    #[test]
    fn nll_decreases_along_consistent_ray() {
        let phi = MeasurementMatrix::new(array![[0.3, -0.2, 0.5], [0.1, 0.4, -0.3], [-0.6, 0.2, 0.1]]).unwrap();
        let s = SignalMatrix::new(array![[1.0, -1.0], [0.0, 0.0], [-1.0, 1.0]]).unwrap();
        let x = crate::model::project(&phi, &s).unwrap();
        let z = crate::model::quantize(x.view()).unwrap();
        let ctx = LikelihoodContext::new(phi, z, 0.1).unwrap();
        let vals: Vec<f64> = [1.0, 10.0, 100.0]
            .iter()
            .map(|c| nll_of((s.data() * *c).view(), &ctx).unwrap())
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2] && vals[2] >= 0.0, "{vals:?}");
    }

    #[test]
    fn grad_x_at_zero() {
        let g1 = grad_x(array![[0.0]].view(), &ctx_1x1(1, 1.0)).unwrap()[[0, 0]];
        let g0 = grad_x(array![[0.0]].view(), &ctx_1x1(0, 1.0)).unwrap()[[0, 0]];
        let r = (2.0 / std::f64::consts::PI).sqrt();
        assert_relative_eq!(g1, -r, max_relative = 1e-15);
        assert_relative_eq!(g0, r, max_relative = 1e-15);
        // central difference of the objective at the same point
        let ctx = ctx_1x1(1, 1.0);
        let h = 1e-6;
        let fd = (nll_x(array![[h]].view(), &ctx).unwrap() - nll_x(array![[-h]].view(), &ctx).unwrap()) / (2.0 * h);
        assert!((fd - g1).abs() < 1e-8);
    }

    #[test]
    fn grad_x_deep_tail() {
        let sigma = 0.5;
        let ctx = ctx_1x1(1, sigma);
        let g = grad_x(array![[-30.0 * sigma]].view(), &ctx).unwrap()[[0, 0]];
        assert!(g.is_finite());
        // ϕ(-30)/Φ(-30) = 30.0332596674336770 (50-digit reference)
        assert_relative_eq!(g, -30.033_259_667_433_677 / sigma, max_relative = 1e-13);
    }

    #[test]
    fn stable_up_to_300() {
        for z in [0u8, 1] {
            let ctx = ctx_1x1(z, 1.0);
            for x in [-300.0, -100.0, -37.0, 37.0, 100.0, 300.0] {
                assert!(nll_x(array![[x]].view(), &ctx).unwrap().is_finite());
                assert!(grad_x(array![[x]].view(), &ctx).unwrap()[[0, 0]].is_finite());
            }
        }
    }

    #[test]
    fn grad_s_zero_phi_and_identity() {
        let z = BitMatrix::new(array![[1, 0], [0, 1]]).unwrap();
        let zero = LikelihoodContext::new(MeasurementMatrix::new(Array2::zeros((2, 3))).unwrap(), z.clone(), 1.0).unwrap();
        let s = SignalMatrix::new(array![[1.0, 2.0], [0.0, -1.0], [3.0, 0.5]]).unwrap();
        assert!(grad_s(&s, &zero).unwrap().iter().all(|&v| v == 0.0));

        let ident = LikelihoodContext::new(MeasurementMatrix::new(Array2::eye(2)).unwrap(), z, 0.8).unwrap();
        let s = SignalMatrix::new(array![[0.3, -0.2], [1.5, 0.1]]).unwrap();
        assert_eq!(grad_s(&s, &ident).unwrap(), grad_x(s.view(), &ident).unwrap());
    }

    #[test]
    fn dimension_errors() {
        let ctx = ctx_1x1(1, 1.0);
        assert!(matches!(nll(&SignalMatrix::zeros(2, 1), &ctx), Err(Error::Dimension(_))));
        assert!(matches!(grad_x(Array2::zeros((1, 2)).view(), &ctx), Err(Error::Dimension(_))));
        let bad = LikelihoodContext::new(
            MeasurementMatrix::new(Array2::eye(2)).unwrap(),
            BitMatrix::new(array![[1u8]]).unwrap(),
            1.0,
        );
        assert!(matches!(bad, Err(Error::Dimension(_))));
    }

    #[test]
    fn lipschitz_small_cases() {
        let eye = MeasurementMatrix::new(Array2::eye(3)).unwrap();
        assert_relative_eq!(lipschitz_constant(&eye, 1.0).unwrap(), 1.0, max_relative = 1e-9);
        let d = MeasurementMatrix::new(array![[2.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_relative_eq!(lipschitz_constant(&d, 0.5).unwrap(), 16.0, max_relative = 1e-9);
        assert!(lipschitz_constant(&d, 0.0).is_err());
    }
}
