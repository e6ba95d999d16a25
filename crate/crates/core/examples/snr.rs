//! Per-measurement SNR for the noise levels used in the sweeps.

use onebit_joint::model::compute_snr;

fn main() -> onebit_joint::Result<()> {
    for sigma_v_sq in [1e-4, 1e-3, 1e-2, 1e-1] {
        let db = compute_snr(5, 0.004, f64::sqrt(sigma_v_sq))?;
        println!("K = 5, var(phi) = 0.004, sigma_v^2 = {sigma_v_sq:e}: {db:6.2} dB");
    }
    Ok(())
}
