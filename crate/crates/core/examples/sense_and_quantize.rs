//! Draws a jointly sparse signal, senses it at P sensors and keeps one bit
//! per measurement.

use onebit_joint::harness::trial_rng;
use onebit_joint::model::{self, NoiseModel};

fn main() -> onebit_joint::Result<()> {
    let (m, n, p, k) = (12, 30, 3, 4);
    let mut rng = trial_rng(1, m, p, 0);
    let phi = model::generate_measurement_matrix(m, n, 0.004, &mut rng)?;
    let (s, support) = model::generate_signal_matrix(n, p, k, &mut rng)?;
    let noise = NoiseModel::from_variance(1e-4)?;
    let y = model::sense(&phi, &s, &noise, &mut rng)?;
    let z = model::quantize(y.view())?;

    println!("shared support (0-based rows): {:?}", support.indices());
    println!("row support read back from S:  {:?}", s.row_support().indices());
    for j in 0..p {
        let bits: String = z.column(j)?.data().iter().map(|b| char::from(b'0' + b)).collect();
        println!("sensor {j}: {bits}");
    }
    Ok(())
}
