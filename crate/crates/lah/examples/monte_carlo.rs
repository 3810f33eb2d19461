//! The 2D anchor Monte Carlo benchmark: eight anchors a million meters out,
//! Student-t(2) range errors, per-anchor scale calibration, and the LS / CH /
//! LAH comparison.
//!
//! CH normalizes residuals with the inflated Gaussian sigma and misclassifies
//! outliers as inliers; LAH normalizes with the fitted logistic scale and
//! clips them, cutting both RMSE and STD.
//!
//! Run: cargo run --example monte_carlo

use lah::simulation::{build_default_scenario, calibrate_scales, run_monte_carlo, summarize};

fn main() {
    let seed = 42;
    let trials = 10_000;
    let scenario = build_default_scenario();
    println!(
        "8 anchors on a 1e6 m circle, t({}) errors with scales {:?}",
        scenario.noise_dof(),
        scenario.noise_scales()
    );

    let calibration = calibrate_scales(&scenario, 100_000, seed).unwrap();
    println!("\nper-anchor calibration (100000 samples each):");
    println!("{:>7} {:>9} {:>12} {:>12}", "anchor", "t-scale", "gauss sigma", "logistic s");
    for (i, (entry, true_scale)) in calibration
        .entries()
        .iter()
        .zip(scenario.noise_scales())
        .enumerate()
    {
        println!(
            "{i:>7} {true_scale:>9.2} {:>12.3} {:>12.3}",
            entry.gaussian.std_sigma, entry.logistic.scale_s
        );
    }

    let report = run_monte_carlo(&scenario, &calibration, trials, seed).unwrap();
    let [ls, ch, lah] = report.summaries;
    let (red_rmse, red_std) = report.reduction_lah_vs_ch();
    println!("\n{trials} trials, seed {seed}:");
    println!("metric       LS         CH         LAH        reduction (LAH vs CH)");
    println!(
        "2D RMSE   {:>8.3} m {:>8.3} m {:>8.3} m   {red_rmse:>6.2}%",
        ls.rmse, ch.rmse, lah.rmse
    );
    println!(
        "2D STD    {:>8.3} m {:>8.3} m {:>8.3} m   {red_std:>6.2}%",
        ls.std, ch.std, lah.std
    );

    println!("\nerror quantiles (m):");
    println!("{:>11} {:>9} {:>9} {:>9}", "percentile", "LS", "CH", "LAH");
    for q in [0.5, 0.9, 0.99] {
        let at = |errors: &[f64]| {
            let (_, _, cdf) = summarize(errors).unwrap();
            cdf[((cdf.len() - 1) as f64 * q) as usize].0
        };
        println!(
            "{:>10.0}% {:>9.3} {:>9.3} {:>9.3}",
            q * 100.0,
            at(&report.errors[0]),
            at(&report.errors[1]),
            at(&report.errors[2])
        );
    }
}
