//! Per-sensor baseline on planted problems.

use onebit_joint::baseline;
use onebit_joint::harness::trial_rng;
use onebit_joint::model::{self, NoiseModel};
use onebit_joint::solver::{ExtractionMode, SolverConfig};

#[test]
fn planted_singleton_recovered_in_most_seeds() {
    let (m, n, p) = (30, 10, 3);
    let mut hits = 0;
    for seed in 0..100 {
        let mut rng = trial_rng(seed, m, p, 0);
        let phi = model::generate_measurement_matrix(m, n, 0.004, &mut rng).unwrap();
        let (s, truth) = model::generate_signal_matrix(n, p, 1, &mut rng).unwrap();
        let noise = NoiseModel::from_variance(1e-4).unwrap();
        let y = model::sense(&phi, &s, &noise, &mut rng).unwrap();
        let z = model::quantize(y.view()).unwrap();
        let est = baseline::estimate(&z, &phi, noise.sigma_v(), &SolverConfig::default(), ExtractionMode::KnownK(1))
            .unwrap();
        assert_eq!(est.per_sensor.len(), p);
        hits += usize::from(est.fused == truth);
    }
    assert!(hits > 50, "recovered {hits} of 100");
}

#[test]
fn single_sensor_matches_one_column_of_the_estimate() {
    let (m, n, p) = (20, 15, 4);
    let mut rng = trial_rng(3, m, p, 0);
    let phi = model::generate_measurement_matrix(m, n, 0.01, &mut rng).unwrap();
    let (s, _) = model::generate_signal_matrix(n, p, 2, &mut rng).unwrap();
    let noise = NoiseModel::from_variance(1e-2).unwrap();
    let z = model::quantize(model::sense(&phi, &s, &noise, &mut rng).unwrap().view()).unwrap();
    let cfg = SolverConfig::default();
    let est = baseline::estimate(&z, &phi, noise.sigma_v(), &cfg, ExtractionMode::KnownK(2)).unwrap();
    for j in 0..p {
        let single =
            baseline::solve_single(&z.column(j).unwrap(), &phi, noise.sigma_v(), &cfg, ExtractionMode::KnownK(2)).unwrap();
        assert_eq!(single, est.per_sensor[j]);
    }
    assert_eq!(est.fused, baseline::majority_fuse(&est.per_sensor, p).unwrap());
}
