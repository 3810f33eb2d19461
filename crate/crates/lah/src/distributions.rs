//! Logistic and Gaussian error models: densities, maximum-likelihood fits,
//! moment-based scale conversion, and Student-t sampling for contamination
//! experiments.
//!
//! The logistic fit is the scale source for the LAH/QLC kernels; the Gaussian
//! fit feeds the LS/CH baselines. On heavy-tailed data the Gaussian σ̂ inflates
//! while the logistic ŝ stays close to the underlying scale, which is exactly
//! the effect the estimator comparison exercises.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use thiserror::Error;

use crate::seeding::{substream, Domain};

/// √3/π, the variance-matching ratio between a Gaussian σ and a logistic s.
pub const GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO: f64 = 0.551_328_895_421_792_1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("invalid logistic parameters: m = {location}, s = {scale}")]
    InvalidLogisticParams { location: f64, scale: f64 },
    #[error("invalid gaussian parameters: mu = {mean}, sigma = {std}")]
    InvalidGaussianParams { mean: f64, std: f64 },
    #[error("non-finite sample value at index {0}")]
    NonFiniteSample(usize),
    #[error("sample too small: {got} values, need at least {need}")]
    SampleTooSmall { got: usize, need: usize },
    #[error("degenerate sample")]
    DegenerateSample,
    #[error("logistic fit did not converge after {iterations} iterations (last m = {location}, s = {scale})")]
    FitDidNotConverge {
        iterations: usize,
        location: f64,
        scale: f64,
    },
    #[error("non-finite evaluation point")]
    NonFinitePoint,
    #[error("invalid scale: {0}")]
    InvalidScale(f64),
    #[error("invalid sampling parameters: dof = {dof}, scale = {scale}, n = {n}")]
    InvalidSampling { dof: f64, scale: f64, n: usize },
}

/// Logistic distribution with location m and scale s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub location_m: f64,
    pub scale_s: f64,
}

impl LogisticParams {
    pub fn new(location_m: f64, scale_s: f64) -> Result<Self, DistributionError> {
        if !location_m.is_finite() || !(scale_s.is_finite() && scale_s > 0.0) {
            return Err(DistributionError::InvalidLogisticParams {
                location: location_m,
                scale: scale_s,
            });
        }
        Ok(Self {
            location_m,
            scale_s,
        })
    }

    /// Density e^{-z} / (s (1 + e^{-z})²), z = (x - m)/s, evaluated through the
    /// symmetric form e^{-|z|} / (s (1 + e^{-|z|})²) so large |z| never
    /// overflows.
    pub fn pdf(&self, x: f64) -> Result<f64, DistributionError> {
        if !x.is_finite() {
            return Err(DistributionError::NonFinitePoint);
        }
        let z = ((x - self.location_m) / self.scale_s).abs();
        let e = (-z).exp();
        Ok(e / (self.scale_s * (1.0 + e) * (1.0 + e)))
    }

    /// CDF 1 / (1 + e^{-(x-m)/s}).
    pub fn cdf(&self, x: f64) -> Result<f64, DistributionError> {
        if !x.is_finite() {
            return Err(DistributionError::NonFinitePoint);
        }
        let z = (x - self.location_m) / self.scale_s;
        Ok(1.0 / (1.0 + (-z).exp()))
    }

    /// Inverse-CDF draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        self.location_m + self.scale_s * (u / (1.0 - u)).ln()
    }

    /// Per-sample log-density, summed.
    fn log_likelihood(&self, values: &[f64]) -> f64 {
        let (m, s) = (self.location_m, self.scale_s);
        let ln_s = s.ln();
        values
            .iter()
            .map(|&x| {
                let z = ((x - m) / s).abs();
                -z - ln_s - 2.0 * (-z).exp().ln_1p()
            })
            .sum()
    }
}

/// Gaussian distribution with mean μ and standard deviation σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub mean_mu: f64,
    pub std_sigma: f64,
}

impl GaussianParams {
    pub fn new(mean_mu: f64, std_sigma: f64) -> Result<Self, DistributionError> {
        if !mean_mu.is_finite() || !(std_sigma.is_finite() && std_sigma > 0.0) {
            return Err(DistributionError::InvalidGaussianParams {
                mean: mean_mu,
                std: std_sigma,
            });
        }
        Ok(Self { mean_mu, std_sigma })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean_mu + self.std_sigma * z
    }
}

/// A finite collection of scalar measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self, DistributionError> {
        if values.is_empty() {
            return Err(DistributionError::SampleTooSmall { got: 0, need: 1 });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(DistributionError::NonFiniteSample(i));
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn median(&self) -> f64 {
        let mut sorted = self.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        }
    }
}

/// Gaussian MLE: sample mean and population (1/n) standard deviation.
pub fn fit_gaussian_mle(samples: &SampleSet) -> Result<GaussianParams, DistributionError> {
    let n = samples.len();
    if n < 2 {
        return Err(DistributionError::SampleTooSmall { got: n, need: 2 });
    }
    let mean = samples.values.iter().sum::<f64>() / n as f64;
    let var = samples
        .values
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .sum::<f64>()
        / n as f64;
    if var == 0.0 {
        return Err(DistributionError::DegenerateSample);
    }
    GaussianParams::new(mean, var.sqrt())
}

/// Logistic MLE by damped Newton ascent on the (m, s) log-likelihood.
///
/// Initialization is (median, √3/π · sample σ). When the Newton direction is
/// not an ascent direction (the Hessian can be indefinite far from the
/// optimum, e.g. on heavy-tailed samples whose moment initializer lands wide),
/// the step falls back to scaled gradient ascent; the line search is Armijo on
/// the actual log-likelihood. Convergence: parameter step below 1e-10, cap 100
/// iterations.
pub fn fit_logistic_mle(samples: &SampleSet) -> Result<LogisticParams, DistributionError> {
    let n = samples.len();
    if n < 10 {
        return Err(DistributionError::SampleTooSmall { got: n, need: 10 });
    }
    let gaussian = fit_gaussian_mle(samples)?; // rejects all-identical samples
    let mut m = samples.median();
    let mut s = GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO * gaussian.std_sigma;
    let xs = samples.values();
    let nf = n as f64;

    let grad = |m: f64, s: f64| -> (f64, f64) {
        let mut gm = 0.0;
        let mut gs = 0.0;
        for &x in xs {
            let z = (x - m) / s;
            let t = (0.5 * z).tanh();
            gm += t;
            gs += z * t - 1.0;
        }
        (gm / s, gs / s)
    };

    let newton_direction = |m: f64, s: f64, gm: f64, gs: f64| -> Option<(f64, f64)> {
        let mut sum_d = 0.0;
        let mut sum_t_zd = 0.0;
        let mut sum_zt = 0.0;
        let mut sum_z2d = 0.0;
        for &x in xs {
            let z = (x - m) / s;
            let t = (0.5 * z).tanh();
            let d = 0.5 * (1.0 - t * t); // (1/2) sech^2(z/2)
            sum_d += d;
            sum_t_zd += t + z * d;
            sum_zt += z * t;
            sum_z2d += z * z * d;
        }
        let s2 = s * s;
        let hmm = -sum_d / s2;
        let hms = -sum_t_zd / s2;
        let hss = (nf - 2.0 * sum_zt - sum_z2d) / s2;
        let det = hmm * hss - hms * hms;
        if det.abs() < 1e-300 {
            return None;
        }
        let pm = (-gm * hss + gs * hms) / det;
        let ps = (-gs * hmm + gm * hms) / det;
        (pm.is_finite() && ps.is_finite()).then_some((pm, ps))
    };

    // The line search stalls once improvements drop below the float
    // resolution of the summed log-likelihood; Newton stays contractive
    // there, so a few undamped steps reach machine-level stationarity.
    let polish = |mut m: f64, mut s: f64| -> (f64, f64) {
        for _ in 0..30 {
            let (gm, gs) = grad(m, s);
            let Some((pm, ps)) = newton_direction(m, s, gm, gs) else {
                break;
            };
            let bound = 1e-3 * s.abs().max(m.abs()).max(1.0);
            if s + ps <= 0.0 || pm.abs().max(ps.abs()) > bound {
                break;
            }
            m += pm;
            s += ps;
            if pm.abs().max(ps.abs()) < 1e-14 * s.abs().max(1.0) {
                break;
            }
        }
        (m, s)
    };

    // Stationarity gate for the returned parameters.
    let finish = |m: f64, s: f64, iterations: usize| -> Result<LogisticParams, DistributionError> {
        let (m, s) = polish(m, s);
        let (gm, gs) = grad(m, s);
        if (gm * gm + gs * gs).sqrt() > 1e-8 * nf {
            return Err(DistributionError::FitDidNotConverge {
                iterations,
                location: m,
                scale: s,
            });
        }
        LogisticParams::new(m, s)
    };

    const MAX_ITER: usize = 100;
    const STEP_TOL: f64 = 1e-10;
    for iteration in 0..MAX_ITER {
        let (gm, gs) = grad(m, s);
        let mut direction = newton_direction(m, s, gm, gs);
        if let Some((pm, ps)) = direction {
            if gm * pm + gs * ps <= 0.0 {
                direction = None;
            }
        }
        // Far from the optimum the Hessian can be indefinite; fall back to
        // scaled gradient ascent there.
        let (pm, ps) = direction.unwrap_or((gm * s * s / nf, gs * s * s / nf));
        if pm.abs().max(ps.abs()) < STEP_TOL {
            return finish(m, s, iteration + 1);
        }
        let directional = gm * pm + gs * ps;

        let base_ll = LogisticParams { location_m: m, scale_s: s }.log_likelihood(xs);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let m1 = m + lambda * pm;
            let s1 = s + lambda * ps;
            if s1 > 0.0 && s1.is_finite() && m1.is_finite() {
                let ll = LogisticParams { location_m: m1, scale_s: s1 }.log_likelihood(xs);
                if ll > base_ll + 1e-4 * lambda * directional {
                    m = m1;
                    s = s1;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if accepted && (lambda * pm).abs().max((lambda * ps).abs()) >= STEP_TOL {
            continue;
        }
        return finish(m, s, iteration + 1);
    }
    Err(DistributionError::FitDidNotConverge {
        iterations: MAX_ITER,
        location: m,
        scale: s,
    })
}

/// Logistic scale implied by a Gaussian σ under variance matching: (√3/π)·σ.
pub fn moment_scale_from_gaussian(sigma: f64) -> Result<f64, DistributionError> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(DistributionError::InvalidScale(sigma));
    }
    Ok(GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO * sigma)
}

/// Draw one scaled Student-t variate via the ratio construction Z/√(V/ν).
pub(crate) fn draw_student_t<R: Rng + ?Sized>(rng: &mut R, dof: f64, scale: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    let chi = ChiSquared::new(dof).expect("validated dof");
    let v: f64 = chi.sample(rng);
    scale * z / (v / dof).sqrt()
}

/// n i.i.d. draws of scale·T with T ~ Student-t(dof), deterministic per seed.
pub fn sample_student_t(
    dof: f64,
    scale: f64,
    n: usize,
    seed: u64,
) -> Result<SampleSet, DistributionError> {
    if !(dof.is_finite() && dof > 0.0) || !(scale.is_finite() && scale > 0.0) || n < 1 {
        return Err(DistributionError::InvalidSampling { dof, scale, n });
    }
    let mut rng = substream(seed, Domain::SampleSet, 0);
    let values = (0..n).map(|_| draw_student_t(&mut rng, dof, scale)).collect();
    SampleSet::new(values)
}
