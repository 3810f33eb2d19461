//! Loss kernels for M-estimation: least squares, Huber, quasi-log-cosh (QLC),
//! and the logistic-aided Huber (LAH) parameterization.
//!
//! Each kernel evaluates to a [`KernelEval`] carrying the loss J(r), the score
//! ψ(r) = dJ/dr, the IRLS weight ψ(r)/r (with its analytic limit at r = 0), and
//! the score derivative ψ'(r) used by the efficiency/robustness analysis.
//!
//! The LAH construction maps a fitted logistic scale s onto Huber parameters by
//! matching the QLC score function in both regimes:
//!
//! ```text
//! σ = √2·s,   c = √2
//! ```
//!
//! so the quadratic band ends at |r| = cσ = 2s and the clipped score is ±1/s,
//! exactly the QLC asymptote.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Fixed LAH threshold from the score-matching construction.
pub const LAH_THRESHOLD: f64 = SQRT_2;

/// Classic 95%-efficiency Huber threshold used by the conventional tuning.
pub const CONVENTIONAL_HUBER_THRESHOLD: f64 = 1.345;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("non-finite residual")]
    NonFiniteResidual,
    #[error("invalid Huber parameters: c = {threshold_c}, sigma = {scale_sigma}")]
    InvalidHuberParams { threshold_c: f64, scale_sigma: f64 },
    #[error("invalid QLC scale: s = {0}")]
    InvalidQlcScale(f64),
    #[error("invalid logistic scale")]
    InvalidLogisticScale,
    #[error("invalid LS sigma: {0}")]
    InvalidLsSigma(f64),
}

/// Huber kernel parameters: dimensionless threshold c and residual-unit scale σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuberParams {
    pub threshold_c: f64,
    pub scale_sigma: f64,
}

impl HuberParams {
    pub fn new(threshold_c: f64, scale_sigma: f64) -> Result<Self, KernelError> {
        if !(threshold_c.is_finite() && threshold_c > 0.0)
            || !(scale_sigma.is_finite() && scale_sigma > 0.0)
        {
            return Err(KernelError::InvalidHuberParams {
                threshold_c,
                scale_sigma,
            });
        }
        Ok(Self {
            threshold_c,
            scale_sigma,
        })
    }

    /// LAH mapping: logistic scale s → Huber (c = √2, σ = √2·s), exactly.
    pub fn from_logistic_scale(s: f64) -> Result<Self, KernelError> {
        if !(s.is_finite() && s > 0.0) {
            return Err(KernelError::InvalidLogisticScale);
        }
        Ok(Self {
            threshold_c: LAH_THRESHOLD,
            scale_sigma: SQRT_2 * s,
        })
    }

    /// Conventional tuning: fixed c = 1.345 with a Gaussian-fitted σ.
    pub fn conventional(scale_sigma: f64) -> Result<Self, KernelError> {
        Self::new(CONVENTIONAL_HUBER_THRESHOLD, scale_sigma)
    }

    /// Evaluate loss, score, weight, and score derivative at residual `r`.
    ///
    /// The boundary |r|/σ = c is assigned to the quadratic branch; both
    /// branches agree there in loss and score, and the score derivative takes
    /// the inside value 1/σ².
    pub fn eval(&self, r: f64) -> Result<KernelEval, KernelError> {
        if !r.is_finite() {
            return Err(KernelError::NonFiniteResidual);
        }
        let c = self.threshold_c;
        let sigma = self.scale_sigma;
        let u = r / sigma;
        let inv_s2 = 1.0 / (sigma * sigma);
        if u.abs() <= c {
            Ok(KernelEval {
                loss: 0.5 * u * u,
                score: r * inv_s2,
                weight: inv_s2,
                score_deriv: inv_s2,
            })
        } else {
            let score = c / sigma * r.signum();
            Ok(KernelEval {
                loss: c * (u.abs() - 0.5 * c),
                score,
                weight: score / r,
                score_deriv: 0.0,
            })
        }
    }

    /// sup |ψ| = c/σ.
    pub fn score_bound(&self) -> f64 {
        self.threshold_c / self.scale_sigma
    }
}

/// Quasi-log-cosh kernel parameters: the logistic error-model scale s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QlcParams {
    pub scale_s: f64,
}

impl QlcParams {
    pub fn new(scale_s: f64) -> Result<Self, KernelError> {
        if !(scale_s.is_finite() && scale_s > 0.0) {
            return Err(KernelError::InvalidQlcScale(scale_s));
        }
        Ok(Self { scale_s })
    }

    /// Evaluate J(r) = ln(cosh(r/s) + 1) and ψ(r) = (1/s)·tanh(r/(2s)).
    ///
    /// The loss uses the identity cosh x + 1 = e^|x| (1 + e^{-|x|})² / 2, so
    /// ln(cosh x + 1) = |x| - ln 2 + 2·ln(1 + e^{-|x|}), which never overflows.
    pub fn eval(&self, r: f64) -> Result<KernelEval, KernelError> {
        if !r.is_finite() {
            return Err(KernelError::NonFiniteResidual);
        }
        let s = self.scale_s;
        let x = (r / s).abs();
        let loss = x - std::f64::consts::LN_2 + 2.0 * (-x).exp().ln_1p();
        let half = r / (2.0 * s);
        let score = half.tanh() / s;
        // sech(y) = 2 e^{-|y|} / (1 + e^{-2|y|}), stable for any y
        let e = (-half.abs()).exp();
        let sech = 2.0 * e / (1.0 + e * e);
        let inv_2s2 = 1.0 / (2.0 * s * s);
        let weight = if r == 0.0 { inv_2s2 } else { score / r };
        Ok(KernelEval {
            loss,
            score,
            weight,
            score_deriv: inv_2s2 * sech * sech,
        })
    }

    /// sup |ψ| = 1/s.
    pub fn score_bound(&self) -> f64 {
        1.0 / self.scale_s
    }
}

/// Quadratic baseline: J = r²/(2σ²), ψ = r/σ², constant weight 1/σ².
pub fn ls_eval(r: f64, sigma: f64) -> Result<KernelEval, KernelError> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(KernelError::InvalidLsSigma(sigma));
    }
    if !r.is_finite() {
        return Err(KernelError::NonFiniteResidual);
    }
    let inv_s2 = 1.0 / (sigma * sigma);
    Ok(KernelEval {
        loss: 0.5 * r * r * inv_s2,
        score: r * inv_s2,
        weight: inv_s2,
        score_deriv: inv_s2,
    })
}

/// One kernel evaluation: loss J(r), score ψ(r), IRLS weight ψ(r)/r, and ψ'(r).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub loss: f64,
    pub score: f64,
    pub weight: f64,
    pub score_deriv: f64,
}

/// A per-measurement kernel descriptor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// Least squares with scale σ.
    Ls { sigma: f64 },
    /// Huber kernel (covers both conventional and LAH tunings).
    Huber(HuberParams),
    /// Quasi-log-cosh kernel.
    Qlc(QlcParams),
}

impl Kernel {
    pub fn ls(sigma: f64) -> Result<Self, KernelError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(KernelError::InvalidLsSigma(sigma));
        }
        Ok(Kernel::Ls { sigma })
    }

    /// Conventional Huber: c = 1.345, Gaussian-fitted σ.
    pub fn conventional_huber(sigma: f64) -> Result<Self, KernelError> {
        Ok(Kernel::Huber(HuberParams::conventional(sigma)?))
    }

    /// Logistic-aided Huber from a fitted logistic scale s.
    pub fn lah(s: f64) -> Result<Self, KernelError> {
        Ok(Kernel::Huber(HuberParams::from_logistic_scale(s)?))
    }

    pub fn qlc(s: f64) -> Result<Self, KernelError> {
        Ok(Kernel::Qlc(QlcParams::new(s)?))
    }

    pub fn eval(&self, r: f64) -> Result<KernelEval, KernelError> {
        match self {
            Kernel::Ls { sigma } => ls_eval(r, *sigma),
            Kernel::Huber(p) => p.eval(r),
            Kernel::Qlc(p) => p.eval(r),
        }
    }

    /// sup |ψ|, or `None` for the unbounded LS score.
    pub fn score_bound(&self) -> Option<f64> {
        match self {
            Kernel::Ls { .. } => None,
            Kernel::Huber(p) => Some(p.score_bound()),
            Kernel::Qlc(p) => Some(p.score_bound()),
        }
    }
}

/// Estimator selection used by the simulation, SPP, and CLI layers.
///
/// The method decides both the kernel family and which fitted scale feeds it:
/// Gaussian σ for LS/CH, logistic s for LAH/QLC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ls,
    Ch,
    Lah,
    Qlc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ls, Method::Ch, Method::Lah, Method::Qlc];

    /// Build the per-measurement kernel from the two fitted scales.
    pub fn kernel(&self, gaussian_sigma: f64, logistic_s: f64) -> Result<Kernel, KernelError> {
        match self {
            Method::Ls => Kernel::ls(gaussian_sigma),
            Method::Ch => Kernel::conventional_huber(gaussian_sigma),
            Method::Lah => Kernel::lah(logistic_s),
            Method::Qlc => Kernel::qlc(logistic_s),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::Ls => "LS",
            Method::Ch => "CH",
            Method::Lah => "LAH",
            Method::Qlc => "QLC",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "LS" => Ok(Method::Ls),
            "CH" => Ok(Method::Ch),
            "LAH" => Ok(Method::Lah),
            "QLC" => Ok(Method::Qlc),
            other => Err(format!(
                "unknown method '{other}' (expected LS, CH, LAH, or QLC)"
            )),
        }
    }
}
