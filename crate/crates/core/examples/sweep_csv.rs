//! A small Monte Carlo sweep over (M, P), written as CSV to stdout.

use onebit_joint::harness::{self, ExperimentConfig};
use onebit_joint::solver::ExtractionMode;

fn main() -> onebit_joint::Result<()> {
    let cfg = ExperimentConfig {
        n: 50,
        k: 3,
        m_values: vec![20, 40],
        p_values: vec![1, 4],
        trials: 20,
        seed: 3,
        extraction: ExtractionMode::KnownK(3),
        ..ExperimentConfig::default()
    };
    eprint!("{}", cfg.describe());
    let cells = harness::run_sweep(&cfg)?;
    harness::write_csv(&cells, std::io::stdout().lock())
        .map_err(|source| onebit_joint::Error::Io { path: "<stdout>".into(), source })
}
