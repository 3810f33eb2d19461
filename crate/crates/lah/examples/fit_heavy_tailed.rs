//! Gaussian vs logistic fits on heavy-tailed Student-t(2) range errors.
//!
//! Fitting a Gaussian to t(2) data inflates the estimated sigma severalfold
//! while the logistic MLE stays close to the underlying scale; the inflated
//! sigma is what mis-tunes a conventionally parameterized Huber kernel.
//!
//! Run: cargo run --example fit_heavy_tailed

use lah::distributions::{
    fit_gaussian_mle, fit_logistic_mle, moment_scale_from_gaussian, sample_student_t,
};

fn main() {
    let n = 100_000;
    println!(
        "{:>8} {:>12} {:>12} {:>10} {:>14}",
        "t-scale", "gauss sigma", "logistic s", "inflation", "moment s from sigma"
    );
    for (i, &scale) in [0.5, 1.0, 2.0, 5.0, 10.0].iter().enumerate() {
        let samples = sample_student_t(2.0, scale, n, 1000 + i as u64).unwrap();
        let gaussian = fit_gaussian_mle(&samples).unwrap();
        let logistic = fit_logistic_mle(&samples).unwrap();
        let moment = moment_scale_from_gaussian(gaussian.std_sigma).unwrap();
        println!(
            "{scale:>8.1} {:>12.4} {:>12.4} {:>9.1}x {:>14.4}",
            gaussian.std_sigma,
            logistic.scale_s,
            gaussian.std_sigma / scale,
            moment
        );
    }
    println!("\n(n = {n} draws per row; the logistic column tracks the t-scale,");
    println!(" the Gaussian column inflates with the heavy tails)");
}
