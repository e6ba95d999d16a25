//! Per-sensor recovery fused by majority vote, next to the joint estimate
//! on the same data.

use onebit_joint::baseline;
use onebit_joint::harness::trial_rng;
use onebit_joint::likelihood::LikelihoodContext;
use onebit_joint::model::{self, NoiseModel};
use onebit_joint::solver::{self, ExtractionMode, SolverConfig};

fn main() -> onebit_joint::Result<()> {
    let (m, n, p, k) = (50, 100, 5, 5);
    let mut rng = trial_rng(11, m, p, 0);
    let phi = model::generate_measurement_matrix(m, n, 0.004, &mut rng)?;
    let (s, truth) = model::generate_signal_matrix(n, p, k, &mut rng)?;
    let noise = NoiseModel::from_variance(1e-4)?;
    let z = model::quantize(model::sense(&phi, &s, &noise, &mut rng)?.view())?;
    let cfg = SolverConfig::default();
    let mode = ExtractionMode::KnownK(k);

    let est = baseline::estimate(&z, &phi, noise.sigma_v(), &cfg, mode)?;
    println!("true support: {:?}", truth.indices());
    for (j, sup) in est.per_sensor.iter().enumerate() {
        println!("sensor {j}:     {:?}", sup.indices());
    }
    println!("majority:     {:?}", est.fused.indices());

    let ctx = LikelihoodContext::new(phi, z, noise.sigma_v())?;
    let joint = solver::extract_support(solver::run(&ctx, &cfg)?.s_hat.view(), mode)?;
    println!("joint:        {:?}", joint.indices());
    Ok(())
}
