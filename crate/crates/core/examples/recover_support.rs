//! Joint recovery with continuation ISTA, then support extraction.

use onebit_joint::harness::trial_rng;
use onebit_joint::likelihood::LikelihoodContext;
use onebit_joint::model::{self, NoiseModel};
use onebit_joint::solver::{self, ExtractionMode, SolverConfig};

fn main() -> onebit_joint::Result<()> {
    let (m, n, p, k) = (60, 100, 3, 5);
    let mut rng = trial_rng(0, m, p, 0);
    let phi = model::generate_measurement_matrix(m, n, 0.004, &mut rng)?;
    let (s, truth) = model::generate_signal_matrix(n, p, k, &mut rng)?;
    let noise = NoiseModel::from_variance(1e-4)?;
    let z = model::quantize(model::sense(&phi, &s, &noise, &mut rng)?.view())?;
    let ctx = LikelihoodContext::new(phi, z, noise.sigma_v())?;

    let res = solver::run(&ctx, &SolverConfig::default())?;
    println!(
        "lambda = {:.4e} (lambda_max = {:.4e}), {} phases, {} iterations, converged = {}",
        res.lambda,
        solver::lambda_max(&ctx),
        res.phases,
        res.inner_iterations,
        res.converged
    );
    for ph in 0..res.phases {
        let trace = res.phase_trace(ph);
        println!("  phase {ph}: objective {:.4} -> {:.4} in {} steps", trace[0], trace[trace.len() - 1], trace.len() - 1);
    }
    let top_k = solver::extract_support(res.s_hat.view(), ExtractionMode::KnownK(k))?;
    let thresholded = solver::extract_support(res.s_hat.view(), ExtractionMode::Threshold(0.5))?;
    println!("true support:      {:?}", truth.indices());
    println!("top-{k} rows:        {:?}", top_k.indices());
    println!("rows above 50% max: {:?}", thresholded.indices());
    Ok(())
}
