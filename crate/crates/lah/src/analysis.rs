//! Asymptotic efficiency and local-robustness analysis under the standard
//! Gaussian nominal error model.
//!
//! For an M-estimator with score ψ, the homoscedastic scalar-residual case
//! gives efficiency relative to LS as (E[ψ'])² / E[ψ²] with expectations under
//! the standard normal; the geometry factor cancels in the ratio. The residual
//! gross-error sensitivity is sup|ψ| / E[ψ'], infinite for the unbounded LS
//! score.
//!
//! Expectations are computed by adaptive quadrature on [-12, 12] (the normal
//! mass outside is below 1e-30) with panels split at the Huber kink points so
//! every panel is smooth.

use thiserror::Error;

use crate::kernels::{Kernel, KernelError};
use crate::quad::{self, QuadError};

const NORMAL_SUPPORT: f64 = 12.0;
const QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid scale: {0}")]
    InvalidScale(f64),
    #[error("invalid sweep range: min = {min}, max = {max}, step = {step}")]
    InvalidSweep { min: f64, max: f64, step: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn normal_pdf(r: f64) -> f64 {
    (-0.5 * r * r).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// E[f(r)] with r ~ N(0, 1), to absolute accuracy 1e-9.
pub fn expectation_under_standard_normal<F: Fn(f64) -> f64>(f: F) -> Result<f64, AnalysisError> {
    expectation_with_breakpoints(f, &[])
}

/// Same expectation with the integration window split at `breakpoints`, for
/// integrands with kinks (Huber score pieces, indicators).
pub fn expectation_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
) -> Result<f64, AnalysisError> {
    let mut edges = vec![-NORMAL_SUPPORT];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| b.is_finite() && b.abs() < NORMAL_SUPPORT)
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    inner.dedup();
    edges.extend(inner);
    edges.push(NORMAL_SUPPORT);

    let share = QUAD_TOL / (edges.len() - 1) as f64;
    let mut total = 0.0;
    for pair in edges.windows(2) {
        let (value, _) = quad::integrate(|r| f(r) * normal_pdf(r), pair[0], pair[1], share)?;
        total += value;
    }
    Ok(total)
}

fn kink_points(kernel: &Kernel) -> Vec<f64> {
    match kernel {
        Kernel::Huber(p) => {
            let k = p.threshold_c * p.scale_sigma;
            vec![-k, k]
        }
        _ => vec![],
    }
}

/// E[ψ'] and E[ψ²] for a kernel under the standard normal.
pub fn score_moments(kernel: &Kernel) -> Result<(f64, f64), AnalysisError> {
    let kinks = kink_points(kernel);
    let deriv = expectation_with_breakpoints(
        |r| kernel.eval(r).map(|e| e.score_deriv).unwrap_or(f64::NAN),
        &kinks,
    )?;
    let square = expectation_with_breakpoints(
        |r| kernel.eval(r).map(|e| e.score * e.score).unwrap_or(f64::NAN),
        &kinks,
    )?;
    Ok((deriv, square))
}

/// Efficiency relative to LS: (E[ψ'])² / E[ψ²].
pub fn kernel_efficiency(kernel: &Kernel) -> Result<f64, AnalysisError> {
    let (deriv, square) = score_moments(kernel)?;
    Ok(deriv * deriv / square)
}

/// Efficiency of the least quasi-log-cosh estimator at logistic scale s.
pub fn efficiency_lqlc(s: f64) -> Result<f64, AnalysisError> {
    if !(s.is_finite() && s > 0.0) {
        return Err(AnalysisError::InvalidScale(s));
    }
    kernel_efficiency(&Kernel::qlc(s)?)
}

/// Efficiency of the logistic-aided Huber estimator at logistic scale s.
pub fn efficiency_lah(s: f64) -> Result<f64, AnalysisError> {
    if !(s.is_finite() && s > 0.0) {
        return Err(AnalysisError::InvalidScale(s));
    }
    kernel_efficiency(&Kernel::lah(s)?)
}

/// Efficiency of a unit-scale Huber estimator with threshold c.
pub fn efficiency_huber(c: f64) -> Result<f64, AnalysisError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(AnalysisError::InvalidScale(c));
    }
    kernel_efficiency(&Kernel::Huber(crate::kernels::HuberParams::new(c, 1.0)?))
}

/// Residual gross-error sensitivity; infinite for the unbounded LS score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualGes {
    Finite(f64),
    Infinite,
}

impl ResidualGes {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ResidualGes::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ResidualGes::Finite(v) => Some(*v),
            ResidualGes::Infinite => None,
        }
    }
}

impl std::fmt::Display for ResidualGes {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResidualGes::Finite(v) => write!(f, "{v}"),
            ResidualGes::Infinite => f.write_str("inf"),
        }
    }
}

/// γ_res = sup|ψ| / E[ψ'] for the kernel, under the standard normal.
pub fn residual_ges(kernel: &Kernel) -> Result<ResidualGes, AnalysisError> {
    let Some(bound) = kernel.score_bound() else {
        return Ok(ResidualGes::Infinite);
    };
    let (deriv, _) = score_moments(kernel)?;
    Ok(ResidualGes::Finite(bound / deriv))
}

/// Measurement breakdown point: 0.5 for the bounded monotone scores, 0 for LS.
pub fn measurement_bdp(kernel: &Kernel) -> f64 {
    match kernel {
        Kernel::Ls { .. } => 0.0,
        Kernel::Huber(_) | Kernel::Qlc(_) => 0.5,
    }
}

/// One row of the efficiency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyPoint {
    pub scale_s: f64,
    pub efficiency_lqlc: f64,
    pub efficiency_lah: f64,
    /// Relative efficiency between the two estimators, efficiency_lah divided
    /// by efficiency_lqlc (the bounded ratio of the two LS-relative
    /// efficiencies).
    pub are: f64,
}

/// One row of the GES sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GesPoint {
    pub scale_s: f64,
    pub ges_lqlc: f64,
    pub ges_lah: f64,
    /// ges_lah / ges_lqlc.
    pub ratio: f64,
}

fn sweep_grid(s_min: f64, s_max: f64, step: f64) -> Result<Vec<f64>, AnalysisError> {
    if !(s_min.is_finite() && s_max.is_finite() && step.is_finite())
        || s_min <= 0.0
        || s_min >= s_max
        || step <= 0.0
    {
        return Err(AnalysisError::InvalidSweep {
            min: s_min,
            max: s_max,
            step,
        });
    }
    let count = ((s_max - s_min) / step).round() as usize;
    let mut grid = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let s = s_min + i as f64 * step;
        if s <= s_max + 0.5 * step {
            grid.push(s.min(s_max));
        }
    }
    Ok(grid)
}

/// Efficiency and ARE over an s grid.
pub fn sweep_efficiency(
    s_min: f64,
    s_max: f64,
    step: f64,
) -> Result<Vec<EfficiencyPoint>, AnalysisError> {
    sweep_grid(s_min, s_max, step)?
        .into_iter()
        .map(|s| {
            let lqlc = efficiency_lqlc(s)?;
            let lah = efficiency_lah(s)?;
            Ok(EfficiencyPoint {
                scale_s: s,
                efficiency_lqlc: lqlc,
                efficiency_lah: lah,
                are: lah / lqlc,
            })
        })
        .collect()
}

/// Residual GES of both estimators over an s grid.
pub fn sweep_ges(s_min: f64, s_max: f64, step: f64) -> Result<Vec<GesPoint>, AnalysisError> {
    sweep_grid(s_min, s_max, step)?
        .into_iter()
        .map(|s| {
            let lah = residual_ges(&Kernel::lah(s)?)?
                .finite()
                .expect("bounded score");
            let lqlc = residual_ges(&Kernel::qlc(s)?)?
                .finite()
                .expect("bounded score");
            Ok(GesPoint {
                scale_s: s,
                ges_lqlc: lqlc,
                ges_lah: lah,
                ratio: lah / lqlc,
            })
        })
        .collect()
}
