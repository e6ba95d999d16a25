//! The l∞ proximal map on single rows: clipping at t*, the soft-threshold
//! special case and the all-zero regime.

use ndarray::array;
use onebit_joint::prox::{self, ProxRowProblem};

fn main() -> onebit_joint::Result<()> {
    let cases = [
        (array![3.0, -1.0, 0.5], 1.0),
        (array![3.0, -1.0, 0.5], 3.0),
        (array![3.0, -1.0, 0.5], 4.5),
        (array![-2.5], 1.0),
        (array![1.0, 1.0, 1.0], 0.0),
    ];
    for (u, lambda_bar) in cases {
        let t = prox::solve_t_star(u.view(), lambda_bar);
        let s = prox::solve_row(&ProxRowProblem::new(u.clone(), lambda_bar)?);
        println!("u = {u}, lambda = {lambda_bar}: t* = {t:.6}, prox = {s}");
    }
    Ok(())
}
