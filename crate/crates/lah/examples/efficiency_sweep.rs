//! Asymptotic efficiency of the LQLC and LAH estimators relative to LS, as a
//! function of the logistic scale s, under standard Gaussian nominal errors.
//!
//! Prints the sweep and the two reference efficiencies at the moment scale
//! s = sqrt(3)/pi of a unit Gaussian (LQLC ~ 0.9412, LAH ~ 0.9195), plus the
//! 95%-efficiency check of the conventional c = 1.345 Huber threshold.
//!
//! Run: cargo run --example efficiency_sweep

use lah::analysis::{efficiency_huber, efficiency_lah, efficiency_lqlc, sweep_efficiency};
use lah::distributions::GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO;

fn main() {
    let points = sweep_efficiency(0.05, 3.0, 0.05).unwrap();
    println!("{:>6} {:>14} {:>14} {:>10}", "s", "eff_lqlc", "eff_lah", "are");
    for p in points.iter().step_by(2) {
        println!(
            "{:>6.2} {:>14.6} {:>14.6} {:>10.6}",
            p.scale_s, p.efficiency_lqlc, p.efficiency_lah, p.are
        );
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.are), hi.max(p.are))
        });
    println!("\nARE (eff_lah / eff_lqlc) stays within [{lo:.4}, {hi:.4}] over the sweep");

    let sm = GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO;
    println!("\nat the unit-Gaussian moment scale s = {sm:.4}:");
    println!("  LQLC efficiency = {:.4}", efficiency_lqlc(sm).unwrap());
    println!("  LAH  efficiency = {:.4}", efficiency_lah(sm).unwrap());
    println!(
        "conventional Huber with c = 1.345 reaches {:.4} relative efficiency",
        efficiency_huber(1.345).unwrap()
    );
}
