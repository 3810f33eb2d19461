//! Residual gross-error sensitivity of the LQLC and LAH estimators over the
//! logistic scale s, with the LS estimator's infinite GES for contrast.
//!
//! A lower GES caps the worst-case pull of a single outlier more tightly. The
//! LAH/LQLC ratio stays below 1 (the surrogate is marginally more robust) and
//! dips to about 0.86 before returning toward 1 at both ends.
//!
//! Run: cargo run --example ges_sweep

use lah::analysis::{residual_ges, sweep_ges};
use lah::distributions::GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO;
use lah::kernels::Kernel;

fn main() {
    let points = sweep_ges(0.05, 6.0, 0.05).unwrap();
    println!("{:>6} {:>14} {:>14} {:>10}", "s", "ges_lqlc", "ges_lah", "ratio");
    for p in points.iter().step_by(4) {
        println!(
            "{:>6.2} {:>14.6} {:>14.6} {:>10.6}",
            p.scale_s, p.ges_lqlc, p.ges_lah, p.ratio
        );
    }
    let min = points
        .iter()
        .min_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap())
        .unwrap();
    println!(
        "\nminimum GES ratio {:.4} at s = {:.2}",
        min.ratio, min.scale_s
    );
    let sm = GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO;
    let at_sm = points
        .iter()
        .min_by(|a, b| {
            (a.scale_s - sm).abs().partial_cmp(&(b.scale_s - sm).abs()).unwrap()
        })
        .unwrap();
    println!("GES ratio near the moment scale s = {sm:.4}: {:.4}", at_sm.ratio);
    println!(
        "LS residual GES: {} (unbounded score)",
        residual_ges(&Kernel::ls(1.0).unwrap()).unwrap()
    );
}
