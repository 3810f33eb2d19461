//! Robust M-estimation for range-based and GNSS positioning.
//!
//! The central idea is a closed-form tuning of the Huber kernel from logistic
//! error statistics: fit a logistic scale s to the measurement errors and set
//! the Huber parameters to σ = √2·s, c = √2. The resulting logistic-aided
//! Huber (LAH) estimator matches the logistic maximum-likelihood (quasi-log-
//! cosh) score in both the small- and large-residual regimes while keeping the
//! piecewise-simple Huber form, and it retains the 0.5 measurement breakdown
//! point of bounded monotone scores.
//!
//! Modules:
//!
//! - [`kernels`] — LS / Huber / QLC evaluation and the logistic→Huber mapping
//! - [`distributions`] — logistic & Gaussian fits, moment conversion,
//!   Student-t sampling
//! - [`solver`] — IRLS on y = Hx + ε with per-measurement kernels
//! - [`analysis`] — efficiency, ARE, and residual gross-error sensitivity
//! - [`simulation`] — the 2D anchor Monte Carlo benchmark
//! - [`gnss`] — geometry construction, elevation-binned scale models,
//!   snapshot SPP, synthetic epochs
//! - [`formats`] — delimited text formats shared with the CLI
//! - [`quad`] — adaptive Gauss-Kronrod quadrature
//! - [`seeding`] — deterministic RNG substreams
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `efficiency_sweep` and `monte_carlo`. The `lah` binary wraps the same
//! pipelines behind `fit`, `analyze`, `simulate`, `spp`, and `generate`
//! subcommands.

pub mod analysis;
pub mod cli;
pub mod distributions;
pub mod formats;
pub mod gnss;
pub mod kernels;
pub mod quad;
pub mod seeding;
pub mod simulation;
pub mod solver;

pub use kernels::{HuberParams, Kernel, KernelEval, Method, QlcParams};
pub use solver::{irls_solve, LinearSystem, Solution};
