//! Probit negative log-likelihood, its gradient and the Lipschitz constant,
//! with a finite-difference spot check.

use ndarray::Array2;
use onebit_joint::harness::trial_rng;
use onebit_joint::likelihood::{self, LikelihoodContext};
use onebit_joint::model::{self, NoiseModel};

fn main() -> onebit_joint::Result<()> {
    let (m, n, p) = (20, 10, 2);
    let mut rng = trial_rng(2, m, p, 0);
    let phi = model::generate_measurement_matrix(m, n, 0.05, &mut rng)?;
    let (s, _) = model::generate_signal_matrix(n, p, 2, &mut rng)?;
    let noise = NoiseModel::new(0.1)?;
    let z = model::quantize(model::sense(&phi, &s, &noise, &mut rng)?.view())?;
    let ctx = LikelihoodContext::new(phi, z, noise.sigma_v())?;

    let origin = Array2::zeros((n, p));
    println!("f(0)    = {:.6}  (= M·P·ln 2 = {:.6})", likelihood::nll_of(origin.view(), &ctx)?, (m * p) as f64 * 2f64.ln());
    println!("f(S)    = {:.6}", likelihood::nll(&s, &ctx)?);
    println!("L_f     = {:.6}", likelihood::lipschitz_constant(ctx.phi(), ctx.sigma_v())?);

    let g = likelihood::grad_s(&s, &ctx)?;
    let h = 1e-6;
    let mut plus = s.data().clone();
    plus[[0, 0]] += h;
    let mut minus = s.data().clone();
    minus[[0, 0]] -= h;
    let fd = (likelihood::nll_of(plus.view(), &ctx)? - likelihood::nll_of(minus.view(), &ctx)?) / (2.0 * h);
    println!("df/dS00 = {:.9} analytic, {:.9} central difference", g[[0, 0]], fd);

    for t in [-40.0, -8.0, 0.0, 3.0] {
        println!("log Phi({t:>5}) = {:.10}", likelihood::log_normal_cdf(t)?);
    }
    Ok(())
}
