//! Compare the QLC kernel with its logistic-aided Huber surrogate at unit
//! logistic scale: loss, score, and IRLS weight over a residual grid.
//!
//! The LAH construction (sigma = sqrt(2)*s, c = sqrt(2)) matches the QLC score
//! slope 1/(2s^2) at the origin and its +-1/s saturation for large residuals;
//! the table makes the agreement in both regimes visible.
//!
//! Run: cargo run --example kernel_curves

use lah::kernels::{HuberParams, QlcParams};

fn main() {
    let s = 1.0;
    let qlc = QlcParams::new(s).unwrap();
    let lah = HuberParams::from_logistic_scale(s).unwrap();
    println!(
        "LAH parameters from s = {s}: c = {:.6}, sigma = {:.6} (band |r| <= {:.4})",
        lah.threshold_c,
        lah.scale_sigma,
        lah.threshold_c * lah.scale_sigma
    );
    println!();
    println!("{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "r", "J_qlc", "J_lah", "psi_qlc", "psi_lah", "w_qlc", "w_lah");
    let mut r = -8.0;
    while r <= 8.0 + 1e-9 {
        let q = qlc.eval(r).unwrap();
        let h = lah.eval(r).unwrap();
        println!(
            "{r:>8.2} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            q.loss, h.loss, q.score, h.score, q.weight, h.weight
        );
        r += 0.5;
    }
    println!();
    let r = 50.0 * s;
    println!(
        "saturation at r = {r}: psi_qlc = {:.10}, psi_lah = {:.10}, 1/s = {:.10}",
        qlc.eval(r).unwrap().score,
        lah.eval(r).unwrap().score,
        1.0 / s
    );
}
