use clap::Parser;
use onebit_joint::harness::cli::{execute, SweepArgs};

fn main() {
    let args = SweepArgs::parse();
    if let Err(e) = execute(&args) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
