//! End-to-end snapshot SPP on synthetic GNSS epochs: generate a contaminated
//! constellation, fit the elevation-binned scale model, and batch-solve with
//! all four estimators.
//!
//! Low-elevation satellites carry heavy-tailed t(2) errors, so the per-bin
//! Gaussian sigma exceeds the logistic s there, and the robust orderings from
//! the 2D benchmark carry over to the 3D position domain.
//!
//! Run: cargo run --example spp_synthetic

use lah::gnss::{
    generate_synthetic_epochs, spp_solve, spp_solve_batch, ElevationScaleModel, SyntheticConfig,
};
use lah::kernels::Method;

fn main() {
    let config = SyntheticConfig::contaminated(8, 500, 42);
    let scenario = generate_synthetic_epochs(&config).unwrap();
    let model = ElevationScaleModel::fit(&scenario.training, 3.0, 30).unwrap();

    println!("elevation scale model ({} bins after merging):", model.bins().len());
    println!("{:>14} {:>12} {:>12} {:>9}", "bin (deg)", "gauss sigma", "logistic s", "samples");
    for bin in model.bins().iter().step_by(4) {
        println!(
            "{:>6.1}-{:>6.1} {:>12.3} {:>12.3} {:>9}",
            bin.low_deg, bin.high_deg, bin.gaussian.std_sigma, bin.logistic.scale_s, bin.n_samples
        );
    }

    println!("\nsolving {} epochs with each method:", scenario.epochs.len());
    for method in Method::ALL {
        let fixes = spp_solve_batch(&scenario.epochs, &model, method);
        let mut sq = 0.0;
        let mut n = 0usize;
        for fix in fixes.into_iter().flatten() {
            sq += (fix.state.position[0] - scenario.truth.position[0]).powi(2)
                + (fix.state.position[1] - scenario.truth.position[1]).powi(2)
                + (fix.state.position[2] - scenario.truth.position[2]).powi(2);
            n += 1;
        }
        println!("  {method:>4}: 3D RMSE {:>7.3} m over {n} epochs", (sq / n as f64).sqrt());
    }

    // single-satellite fault demonstration on a clean epoch
    let clean = generate_synthetic_epochs(&SyntheticConfig::clean(8, 1, 5)).unwrap();
    let epoch = &clean.epochs[0];
    let mut faulted = epoch.clone();
    faulted.satellites[4].pseudorange += 500.0;
    println!("\n+500 m fault on one of 8 satellites (clean epoch):");
    for method in [Method::Ls, Method::Lah] {
        let base = spp_solve(epoch, &model, method, None).unwrap();
        let hit = spp_solve(&faulted, &model, method, None).unwrap();
        let shift = ((hit.state.position[0] - base.state.position[0]).powi(2)
            + (hit.state.position[1] - base.state.position[1]).powi(2)
            + (hit.state.position[2] - base.state.position[2]).powi(2))
        .sqrt();
        println!("  {method:>4}: fix shifted by {shift:>8.3} m");
    }
}
