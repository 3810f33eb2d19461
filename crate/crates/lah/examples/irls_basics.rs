//! IRLS on a one-dimensional location problem with a gross outlier, solved
//! with each kernel in turn.
//!
//! Five range differences, four near zero and one at +100 m: the LS estimate
//! is dragged to the mean while the bounded-score kernels stay at the inlier
//! consensus.
//!
//! Run: cargo run --example irls_basics

use lah::kernels::Kernel;
use lah::solver::{irls_solve, LinearSystem};
use nalgebra::{DMatrix, DVector};

fn main() {
    let y = vec![0.0, 0.1, -0.1, 0.05, 100.0];
    let sys = LinearSystem::new(
        DMatrix::from_element(5, 1, 1.0),
        DVector::from_vec(y.clone()),
    )
    .unwrap();
    println!("measurements: {y:?}");
    println!("{:>22} {:>12} {:>6} {:>10}", "kernel", "estimate", "iters", "objective");
    let kernels = [
        ("LS (sigma 1)", Kernel::ls(1.0).unwrap()),
        ("Huber (c 1.345)", Kernel::conventional_huber(1.0).unwrap()),
        ("LAH (s 1)", Kernel::lah(1.0).unwrap()),
        ("QLC (s 1)", Kernel::qlc(1.0).unwrap()),
    ];
    for (name, kernel) in kernels {
        let sol = irls_solve(&sys, &[kernel; 5], None, 1e-10, 100).unwrap();
        println!(
            "{name:>22} {:>12.6} {:>6} {:>10.4}",
            sol.state_x[0],
            sol.iterations,
            sol.objective_trace.last().unwrap()
        );
    }
    println!("\nthe objective trace is non-increasing for every kernel; e.g. LAH:");
    let sol = irls_solve(&sys, &[Kernel::lah(1.0).unwrap(); 5], None, 1e-10, 100).unwrap();
    for (i, obj) in sol.objective_trace.iter().enumerate().take(8) {
        println!("  iteration {i}: {obj:.6}");
    }
}
