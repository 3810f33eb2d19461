//! Snapshot GNSS single point positioning: geometry construction, an
//! elevation-binned scale model, robust SPP solves, and a synthetic epoch
//! generator for end-to-end evaluation without a real dataset.
//!
//! Pseudoranges are assumed corrected for atmospheric, ephemeris, and
//! satellite-clock effects; the state is receiver ECEF position plus clock
//! bias in meters. The outer Gauss-Newton relinearization wraps the inner IRLS
//! solve, so each IRLS iteration works on a fixed geometry matrix.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::distributions::{
    draw_student_t, fit_gaussian_mle, fit_logistic_mle, DistributionError, GaussianParams,
    LogisticParams, SampleSet,
};
use crate::kernels::{Kernel, KernelError, Method};
use crate::seeding::{substream, Domain};
use crate::solver::{irls_solve, LinearSystem, SolverError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GnssError {
    #[error("underdetermined epoch {epoch_id}: {satellites} satellites, need 4")]
    UnderdeterminedEpoch { epoch_id: u64, satellites: usize },
    #[error("satellite {sat_id} coincides with the receiver")]
    SatelliteCoincident { sat_id: u32 },
    #[error("elevation {0} outside [0, 90] degrees")]
    ElevationOutOfRange(f64),
    #[error("non-finite observation field for satellite {0}")]
    NonFiniteObservation(u32),
    #[error("empty training set")]
    EmptyTraining,
    #[error("invalid bin width: {0}")]
    InvalidBinWidth(f64),
    #[error("too few training samples to fit any bin: {got} total, need {need}")]
    TrainingTooSmall { got: usize, need: usize },
    #[error("scale model bins are not contiguous over [0, 90]")]
    ModelNotContiguous,
    #[error("solver diverged: position update grew for 3 consecutive outer iterations")]
    Diverged,
    #[error("invalid synthetic config: {0}")]
    InvalidSyntheticConfig(String),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// One satellite's contribution to an epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteObservation {
    pub sat_id: u32,
    /// Satellite ECEF position, meters.
    pub position: [f64; 3],
    /// Corrected pseudorange, meters.
    pub pseudorange: f64,
    /// Elevation angle, degrees in [0, 90].
    pub elevation_deg: f64,
}

/// All observations of one measurement epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochObservations {
    pub epoch_id: u64,
    pub satellites: Vec<SatelliteObservation>,
}

impl EpochObservations {
    pub fn new(
        epoch_id: u64,
        satellites: Vec<SatelliteObservation>,
    ) -> Result<Self, GnssError> {
        for sat in &satellites {
            if !sat.position.iter().all(|v| v.is_finite())
                || !sat.pseudorange.is_finite()
                || !sat.elevation_deg.is_finite()
            {
                return Err(GnssError::NonFiniteObservation(sat.sat_id));
            }
            if !(0.0..=90.0).contains(&sat.elevation_deg) {
                return Err(GnssError::ElevationOutOfRange(sat.elevation_deg));
            }
        }
        Ok(Self {
            epoch_id,
            satellites,
        })
    }
}

/// Receiver state: ECEF position and clock bias, all meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SppState {
    pub position: [f64; 3],
    pub clock_bias: f64,
}

impl SppState {
    pub const ORIGIN: SppState = SppState {
        position: [0.0; 3],
        clock_bias: 0.0,
    };
}

/// Converged SPP estimate with solver metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SppFix {
    pub epoch_id: u64,
    pub state: SppState,
    pub residuals: Vec<f64>,
    /// Outer relinearization iterations.
    pub iterations: usize,
    pub converged: bool,
}

/// Linearize the pseudorange model at `point`: row i is (-unit LOS to
/// satellite i, 1) and delta_y is measured minus predicted pseudorange.
pub fn build_geometry(
    epoch: &EpochObservations,
    point: &SppState,
) -> Result<LinearSystem, GnssError> {
    let n = epoch.satellites.len();
    if n < 4 {
        return Err(GnssError::UnderdeterminedEpoch {
            epoch_id: epoch.epoch_id,
            satellites: n,
        });
    }
    if !point.position.iter().all(|v| v.is_finite()) || !point.clock_bias.is_finite() {
        return Err(GnssError::NonFiniteObservation(0));
    }
    let mut h = DMatrix::zeros(n, 4);
    let mut delta_y = DVector::zeros(n);
    for (i, sat) in epoch.satellites.iter().enumerate() {
        let dx = sat.position[0] - point.position[0];
        let dy = sat.position[1] - point.position[1];
        let dz = sat.position[2] - point.position[2];
        let range = (dx * dx + dy * dy + dz * dz).sqrt();
        if range < 1e-6 {
            return Err(GnssError::SatelliteCoincident { sat_id: sat.sat_id });
        }
        h[(i, 0)] = -dx / range;
        h[(i, 1)] = -dy / range;
        h[(i, 2)] = -dz / range;
        h[(i, 3)] = 1.0;
        delta_y[i] = sat.pseudorange - (range + point.clock_bias);
    }
    Ok(LinearSystem::new(h, delta_y)?)
}

/// One elevation bin with its dual fits.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationBin {
    pub low_deg: f64,
    pub high_deg: f64,
    pub gaussian: GaussianParams,
    pub logistic: LogisticParams,
    pub n_samples: usize,
}

/// Contiguous elevation bins covering [0, 90] degrees, each carrying a
/// Gaussian and a logistic scale fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationScaleModel {
    bins: Vec<ElevationBin>,
}

/// Default bin width in degrees.
pub const DEFAULT_BIN_WIDTH_DEG: f64 = 3.0;

/// Default minimum samples for a bin to stand alone.
pub const DEFAULT_MIN_BIN_SAMPLES: usize = 30;

impl ElevationScaleModel {
    /// Fit per-bin Gaussian and logistic models from (elevation, error)
    /// training pairs.
    ///
    /// Bins of `bin_width_deg` partition [0, 90]; an elevation exactly on an
    /// edge belongs to the upper bin. Bins holding fewer than `min_samples`
    /// values are merged into the adjacent bin with the larger count (upper
    /// neighbor on ties), so the final model is total on [0, 90].
    pub fn fit(
        training: &[(f64, f64)],
        bin_width_deg: f64,
        min_samples: usize,
    ) -> Result<Self, GnssError> {
        if training.is_empty() {
            return Err(GnssError::EmptyTraining);
        }
        if !(bin_width_deg.is_finite() && bin_width_deg > 0.0 && bin_width_deg <= 90.0) {
            return Err(GnssError::InvalidBinWidth(bin_width_deg));
        }
        let n_bins = (90.0 / bin_width_deg).ceil() as usize;
        let mut edges: Vec<f64> = (0..n_bins)
            .map(|i| i as f64 * bin_width_deg)
            .collect();
        edges.push(90.0);

        let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); n_bins];
        for &(elev, err) in training {
            if !elev.is_finite() || !(0.0..=90.0).contains(&elev) {
                return Err(GnssError::ElevationOutOfRange(elev));
            }
            let idx = ((elev / bin_width_deg).floor() as usize).min(n_bins - 1);
            buckets[idx].push(err);
        }

        // merge sparse bins into their better-populated neighbor
        let mut spans: Vec<(f64, f64, Vec<f64>)> = edges
            .windows(2)
            .zip(buckets)
            .map(|(e, b)| (e[0], e[1], b))
            .collect();
        while let Some(idx) = spans
            .iter()
            .position(|(_, _, b)| b.len() < min_samples)
        {
            if spans.len() == 1 {
                break;
            }
            let target = if idx == 0 {
                1
            } else if idx == spans.len() - 1 {
                idx - 1
            } else if spans[idx + 1].2.len() >= spans[idx - 1].2.len() {
                idx + 1
            } else {
                idx - 1
            };
            let (low, high, values) = spans.remove(idx);
            let target = if target > idx { target - 1 } else { target };
            let merged = &mut spans[target];
            merged.0 = merged.0.min(low);
            merged.1 = merged.1.max(high);
            merged.2.extend(values);
        }

        let total: usize = spans.iter().map(|(_, _, b)| b.len()).sum();
        if spans.len() == 1 && spans[0].2.len() < 10 {
            return Err(GnssError::TrainingTooSmall {
                got: total,
                need: 10,
            });
        }
        let bins = spans
            .into_iter()
            .map(|(low, high, values)| {
                let samples = SampleSet::new(values)?;
                Ok(ElevationBin {
                    low_deg: low,
                    high_deg: high,
                    gaussian: fit_gaussian_mle(&samples)?,
                    logistic: fit_logistic_mle(&samples)?,
                    n_samples: samples.len(),
                })
            })
            .collect::<Result<Vec<_>, GnssError>>()?;
        Ok(Self { bins })
    }

    /// Rebuild a model from stored bins (e.g. read back from a file).
    pub fn from_bins(bins: Vec<ElevationBin>) -> Result<Self, GnssError> {
        if bins.is_empty() {
            return Err(GnssError::ModelNotContiguous);
        }
        let mut expected = 0.0;
        for bin in &bins {
            if (bin.low_deg - expected).abs() > 1e-9 || bin.high_deg <= bin.low_deg {
                return Err(GnssError::ModelNotContiguous);
            }
            expected = bin.high_deg;
        }
        if (expected - 90.0).abs() > 1e-9 {
            return Err(GnssError::ModelNotContiguous);
        }
        Ok(Self { bins })
    }

    pub fn bins(&self) -> &[ElevationBin] {
        &self.bins
    }

    /// Bin containing the elevation; an edge value belongs to the upper bin,
    /// 90 degrees to the last bin.
    pub fn lookup(&self, elevation_deg: f64) -> Result<&ElevationBin, GnssError> {
        if !elevation_deg.is_finite() || !(0.0..=90.0).contains(&elevation_deg) {
            return Err(GnssError::ElevationOutOfRange(elevation_deg));
        }
        let found = self
            .bins
            .iter()
            .find(|b| elevation_deg >= b.low_deg && elevation_deg < b.high_deg)
            .unwrap_or_else(|| self.bins.last().expect("non-empty"));
        Ok(found)
    }

    fn kernels_for(&self, epoch: &EpochObservations, method: Method) -> Result<Vec<Kernel>, GnssError> {
        epoch
            .satellites
            .iter()
            .map(|sat| {
                let bin = self.lookup(sat.elevation_deg)?;
                Ok(method.kernel(bin.gaussian.std_sigma, bin.logistic.scale_s)?)
            })
            .collect()
    }
}

/// Convenience wrapper over [`ElevationScaleModel::fit`].
pub fn fit_elevation_model(
    training: &[(f64, f64)],
    bin_width_deg: f64,
    min_samples: usize,
) -> Result<ElevationScaleModel, GnssError> {
    ElevationScaleModel::fit(training, bin_width_deg, min_samples)
}

const OUTER_MAX_ITER: usize = 10;
const OUTER_POSITION_TOL: f64 = 1e-4;

fn gauss_newton(
    epoch: &EpochObservations,
    kernels: &[Kernel],
    start: SppState,
) -> Result<SppFix, GnssError> {
    let mut state = start;
    let mut prev_update = f64::INFINITY;
    let mut growth_streak = 0usize;
    let mut residuals = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    // Warm-start each inner solve at delta-x = 0 (the current outer state),
    // so robust reweighting progress accumulates across relinearizations.
    let warm = DVector::zeros(4);
    for _ in 0..OUTER_MAX_ITER {
        iterations += 1;
        let sys = build_geometry(epoch, &state)?;
        let sol = irls_solve(&sys, kernels, Some(&warm), 1e-8, 100)?;
        let dx = &sol.state_x;
        state.position[0] += dx[0];
        state.position[1] += dx[1];
        state.position[2] += dx[2];
        state.clock_bias += dx[3];
        let update = (dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2]).sqrt();
        residuals = sol.final_residuals.iter().copied().collect();
        if update < OUTER_POSITION_TOL {
            converged = true;
            break;
        }
        if update > prev_update {
            growth_streak += 1;
            if growth_streak >= 3 {
                return Err(GnssError::Diverged);
            }
        } else {
            growth_streak = 0;
        }
        prev_update = update;
    }
    Ok(SppFix {
        epoch_id: epoch.epoch_id,
        state,
        residuals,
        iterations,
        converged,
    })
}

/// Solve one epoch with the requested method, scales drawn per satellite from
/// the elevation model.
///
/// Without `x0` a plain unweighted-LS bootstrap runs first from the ECEF
/// origin and the requested method starts from that fix, keeping the robust
/// kernels out of the far-from-linear regime.
pub fn spp_solve(
    epoch: &EpochObservations,
    model: &ElevationScaleModel,
    method: Method,
    x0: Option<SppState>,
) -> Result<SppFix, GnssError> {
    let kernels = model.kernels_for(epoch, method)?;
    let start = match x0 {
        Some(state) => state,
        None => {
            let unit = vec![Kernel::ls(1.0)?; epoch.satellites.len()];
            gauss_newton(epoch, &unit, SppState::ORIGIN)?.state
        }
    };
    gauss_newton(epoch, &kernels, start)
}

/// Solve a batch of epochs, skipping (and reporting) the ones that fail.
pub fn spp_solve_batch(
    epochs: &[EpochObservations],
    model: &ElevationScaleModel,
    method: Method,
) -> Vec<Result<SppFix, GnssError>> {
    epochs
        .par_iter()
        .map(|epoch| spp_solve(epoch, model, method, None))
        .collect()
}

/// Error law for one elevation band of the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorModel {
    None,
    Gaussian { sigma: f64 },
    Logistic { scale: f64 },
    StudentT { dof: f64, scale: f64 },
}

impl ErrorModel {
    fn draw(&self, rng: &mut impl rand::Rng) -> f64 {
        match *self {
            ErrorModel::None => 0.0,
            ErrorModel::Gaussian { sigma } => GaussianParams { mean_mu: 0.0, std_sigma: sigma }.draw(rng),
            ErrorModel::Logistic { scale } => {
                LogisticParams { location_m: 0.0, scale_s: scale }.draw(rng)
            }
            ErrorModel::StudentT { dof, scale } => draw_student_t(rng, dof, scale),
        }
    }

    fn validate(&self) -> Result<(), GnssError> {
        let ok = match *self {
            ErrorModel::None => true,
            ErrorModel::Gaussian { sigma } => sigma.is_finite() && sigma > 0.0,
            ErrorModel::Logistic { scale } => scale.is_finite() && scale > 0.0,
            ErrorModel::StudentT { dof, scale } => {
                dof.is_finite() && dof > 0.0 && scale.is_finite() && scale > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(GnssError::InvalidSyntheticConfig(format!(
                "invalid error model {self:?}"
            )))
        }
    }
}

/// One elevation band [low, high) with its error law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBand {
    pub low_deg: f64,
    pub high_deg: f64,
    pub model: ErrorModel,
}

/// Configuration of the synthetic constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_satellites: usize,
    pub n_epochs: usize,
    pub seed: u64,
    /// Receiver truth, ECEF meters.
    pub receiver: [f64; 3],
    /// Receiver clock bias truth, meters.
    pub clock_bias: f64,
    /// Elevation bands covering [5, 90]; a band is picked by elevation.
    pub bands: Vec<ErrorBand>,
}

/// Satellite slant range from the receiver, meters.
const SYNTHETIC_RANGE: f64 = 2.2e7;

/// Minimum generated elevation, degrees.
pub const SYNTHETIC_MIN_ELEVATION: f64 = 5.0;

impl SyntheticConfig {
    /// Heavy-tailed low-elevation profile: t(2) errors whose scale shrinks
    /// with elevation.
    pub fn contaminated(n_satellites: usize, n_epochs: usize, seed: u64) -> Self {
        Self {
            n_satellites,
            n_epochs,
            seed,
            receiver: [6_378_137.0, 0.0, 0.0],
            clock_bias: 1.0e5,
            bands: vec![
                ErrorBand {
                    low_deg: 0.0,
                    high_deg: 30.0,
                    model: ErrorModel::StudentT { dof: 2.0, scale: 5.0 },
                },
                ErrorBand {
                    low_deg: 30.0,
                    high_deg: 60.0,
                    model: ErrorModel::StudentT { dof: 2.0, scale: 1.5 },
                },
                ErrorBand {
                    low_deg: 60.0,
                    high_deg: 90.0,
                    model: ErrorModel::StudentT { dof: 2.0, scale: 0.5 },
                },
            ],
        }
    }

    /// Noise-free profile, for round-trip checks.
    pub fn clean(n_satellites: usize, n_epochs: usize, seed: u64) -> Self {
        let mut config = Self::contaminated(n_satellites, n_epochs, seed);
        config.bands = vec![ErrorBand {
            low_deg: 0.0,
            high_deg: 90.0,
            model: ErrorModel::None,
        }];
        config
    }

    fn band_for(&self, elevation: f64) -> Result<&ErrorBand, GnssError> {
        self.bands
            .iter()
            .find(|b| elevation >= b.low_deg && (elevation < b.high_deg || b.high_deg >= 90.0))
            .ok_or_else(|| {
                GnssError::InvalidSyntheticConfig(format!(
                    "no error band covers elevation {elevation}"
                ))
            })
    }

    fn validate(&self) -> Result<(), GnssError> {
        if self.n_satellites < 4 {
            return Err(GnssError::InvalidSyntheticConfig(format!(
                "need at least 4 satellites, got {}",
                self.n_satellites
            )));
        }
        if self.n_epochs == 0 {
            return Err(GnssError::InvalidSyntheticConfig("zero epochs".into()));
        }
        if self.bands.is_empty() {
            return Err(GnssError::InvalidSyntheticConfig("no error bands".into()));
        }
        for band in &self.bands {
            band.model.validate()?;
        }
        Ok(())
    }
}

/// Generated epochs plus the injected truth, for evaluation and model
/// training.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScenario {
    pub epochs: Vec<EpochObservations>,
    /// (elevation, injected error) pairs in generation order.
    pub training: Vec<(f64, f64)>,
    pub truth: SppState,
}

/// Generate a reproducible synthetic constellation with elevations spread
/// over [5, 90] degrees and per-band error laws. Epoch e uses substream
/// (seed, SyntheticEpoch, e).
pub fn generate_synthetic_epochs(config: &SyntheticConfig) -> Result<SyntheticScenario, GnssError> {
    config.validate()?;
    let up = {
        let n = (config.receiver[0].powi(2)
            + config.receiver[1].powi(2)
            + config.receiver[2].powi(2))
        .sqrt();
        if n < 1.0 {
            return Err(GnssError::InvalidSyntheticConfig(
                "receiver must be away from the ECEF origin".into(),
            ));
        }
        [
            config.receiver[0] / n,
            config.receiver[1] / n,
            config.receiver[2] / n,
        ]
    };
    // local east/north completing the up vector
    let east = {
        let e = [-up[1], up[0], 0.0];
        let n = (e[0] * e[0] + e[1] * e[1]).sqrt();
        if n < 1e-9 {
            [1.0, 0.0, 0.0]
        } else {
            [e[0] / n, e[1] / n, 0.0]
        }
    };
    let north = [
        up[1] * east[2] - up[2] * east[1],
        up[2] * east[0] - up[0] * east[2],
        up[0] * east[1] - up[1] * east[0],
    ];

    let stratum = (90.0 - SYNTHETIC_MIN_ELEVATION) / config.n_satellites as f64;
    let mut epochs = Vec::with_capacity(config.n_epochs);
    let mut training = Vec::with_capacity(config.n_epochs * config.n_satellites);
    for e in 0..config.n_epochs {
        let mut rng = substream(config.seed, Domain::SyntheticEpoch, e as u64);
        let mut satellites = Vec::with_capacity(config.n_satellites);
        for k in 0..config.n_satellites {
            // stratified elevations guarantee coverage of [5, 90]
            let lo = SYNTHETIC_MIN_ELEVATION + k as f64 * stratum;
            let elevation: f64 = rng.gen_range(lo..lo + stratum);
            let azimuth: f64 = rng.gen_range(0.0..360.0f64);
            let (el, az) = (elevation.to_radians(), azimuth.to_radians());
            let (s_el, c_el) = el.sin_cos();
            let (s_az, c_az) = az.sin_cos();
            let mut dir = [0.0f64; 3];
            for i in 0..3 {
                dir[i] = up[i] * s_el + east[i] * c_el * s_az + north[i] * c_el * c_az;
            }
            let error = config.band_for(elevation)?.model.draw(&mut rng);
            satellites.push(SatelliteObservation {
                sat_id: k as u32,
                position: [
                    config.receiver[0] + dir[0] * SYNTHETIC_RANGE,
                    config.receiver[1] + dir[1] * SYNTHETIC_RANGE,
                    config.receiver[2] + dir[2] * SYNTHETIC_RANGE,
                ],
                pseudorange: SYNTHETIC_RANGE + config.clock_bias + error,
                elevation_deg: elevation,
            });
            training.push((elevation, error));
        }
        epochs.push(EpochObservations::new(e as u64, satellites)?);
    }
    Ok(SyntheticScenario {
        epochs,
        training,
        truth: SppState {
            position: config.receiver,
            clock_bias: config.clock_bias,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn flat_model(gauss_sigma: f64, logistic_s: f64) -> ElevationScaleModel {
        ElevationScaleModel::from_bins(vec![ElevationBin {
            low_deg: 0.0,
            high_deg: 90.0,
            gaussian: GaussianParams::new(0.0, gauss_sigma).unwrap(),
            logistic: LogisticParams::new(0.0, logistic_s).unwrap(),
            n_samples: 0,
        }])
        .unwrap()
    }

    fn toy_epoch() -> EpochObservations {
        // receiver truth at origin-ish coordinates for easy hand checks
        let r = 6.4e6;
        let sats = [
            ([0.0, 0.0, r + 2.0e7], 60.0),
            ([2.0e7, 0.0, r + 1.0e7], 30.0),
            ([0.0, 2.0e7, r + 1.0e7], 30.0),
            ([-1.5e7, -1.5e7, r + 1.2e7], 25.0),
            ([1.0e7, -1.8e7, r + 0.9e7], 20.0),
        ];
        let receiver = [0.0, 0.0, r];
        let satellites = sats
            .iter()
            .enumerate()
            .map(|(i, (p, el))| {
                let dx = p[0] - receiver[0];
                let dy = p[1] - receiver[1];
                let dz = p[2] - receiver[2];
                SatelliteObservation {
                    sat_id: i as u32,
                    position: *p,
                    pseudorange: (dx * dx + dy * dy + dz * dz).sqrt(),
                    elevation_deg: *el,
                }
            })
            .collect();
        EpochObservations::new(7, satellites).unwrap()
    }

    #[test]
    fn geometry_overhead_satellite() {
        let r = 6.4e6;
        let epoch = EpochObservations::new(
            1,
            vec![
                SatelliteObservation {
                    sat_id: 0,
                    position: [0.0, 0.0, r + 2.0e7],
                    pseudorange: 2.0e7,
                    elevation_deg: 90.0,
                },
                SatelliteObservation {
                    sat_id: 1,
                    position: [2.0e7, 0.0, r],
                    pseudorange: 2.0e7,
                    elevation_deg: 0.0,
                },
                SatelliteObservation {
                    sat_id: 2,
                    position: [0.0, 2.0e7, r],
                    pseudorange: 2.0e7,
                    elevation_deg: 0.0,
                },
                SatelliteObservation {
                    sat_id: 3,
                    position: [-2.0e7, 0.0, r],
                    pseudorange: 2.0e7,
                    elevation_deg: 0.0,
                },
            ],
        )
        .unwrap();
        let point = SppState {
            position: [0.0, 0.0, r],
            clock_bias: 0.0,
        };
        let sys = build_geometry(&epoch, &point).unwrap();
        let h = sys.geometry();
        assert_abs_diff_eq!(h[(0, 0)], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h[(0, 1)], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h[(0, 2)], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h[(0, 3)], 1.0, epsilon = 1e-12);
        // predicted == measured, so delta_y = 0
        assert!(sys.delta_y().amax() < 1e-9);
        // unit-norm line-of-sight block
        for i in 0..4 {
            let norm =
                (h[(i, 0)].powi(2) + h[(i, 1)].powi(2) + h[(i, 2)].powi(2)).sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn geometry_error_cases() {
        let epoch = toy_epoch();
        let short = EpochObservations::new(2, epoch.satellites[..3].to_vec()).unwrap();
        assert!(matches!(
            build_geometry(&short, &SppState::ORIGIN),
            Err(GnssError::UnderdeterminedEpoch { satellites: 3, .. })
        ));
        let coincident = SppState {
            position: epoch.satellites[0].position,
            clock_bias: 0.0,
        };
        assert!(matches!(
            build_geometry(&epoch, &coincident),
            Err(GnssError::SatelliteCoincident { sat_id: 0 })
        ));
    }

    #[test]
    fn noise_free_round_trip_recovers_truth() {
        let epoch = toy_epoch();
        let truth = [0.0, 0.0, 6.4e6];
        let model = flat_model(1.0, 1.0);
        for method in Method::ALL {
            let fix = spp_solve(&epoch, &model, method, None).unwrap();
            assert!(fix.converged);
            for (got, want) in fix.state.position.iter().zip(truth) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-3);
            }
            assert_abs_diff_eq!(fix.state.clock_bias, 0.0, epsilon = 1e-3);
        }
        // from a 1 km-offset start the relinearization settles in <= 3 rounds
        let near = SppState {
            position: [1000.0, -1000.0, 6.4e6 + 1000.0],
            clock_bias: 500.0,
        };
        let fix = spp_solve(&epoch, &model, Method::Ls, Some(near)).unwrap();
        assert!(fix.iterations <= 3, "took {} iterations", fix.iterations);
        for (got, want) in fix.state.position.iter().zip(truth) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-6);
        }
    }

    #[test]
    fn single_fault_is_suppressed_by_lah() {
        // 8 satellites leave enough redundancy to identify one faulted
        // pseudorange (a fault on a high-leverage row with few satellites is
        // genuinely unidentifiable and any estimator follows it).
        let scenario =
            generate_synthetic_epochs(&SyntheticConfig::clean(8, 1, 5)).unwrap();
        let epoch = &scenario.epochs[0];
        let model = flat_model(2.7, 2.0);
        let clean_ls = spp_solve(epoch, &model, Method::Ls, None).unwrap();
        let clean_lah = spp_solve(epoch, &model, Method::Lah, None).unwrap();

        let mut faulted = epoch.clone();
        faulted.satellites[4].pseudorange += 500.0;
        let ls = spp_solve(&faulted, &model, Method::Ls, None).unwrap();
        let lah = spp_solve(&faulted, &model, Method::Lah, None).unwrap();

        let shift = |a: &SppFix, b: &SppFix| {
            ((a.state.position[0] - b.state.position[0]).powi(2)
                + (a.state.position[1] - b.state.position[1]).powi(2)
                + (a.state.position[2] - b.state.position[2]).powi(2))
            .sqrt()
        };
        let ls_shift = shift(&ls, &clean_ls);
        let lah_shift = shift(&lah, &clean_lah);
        assert!(
            lah_shift < 0.1 * ls_shift,
            "LAH shift {lah_shift} vs LS shift {ls_shift}"
        );

        // leave-one-out oracle: drop the faulted satellite entirely
        let mut pruned = epoch.clone();
        pruned.satellites.remove(4);
        let oracle = spp_solve(&pruned, &model, Method::Lah, None).unwrap();
        assert!(
            shift(&lah, &oracle) < 2.0,
            "LAH sits {} m from the leave-one-out solution",
            shift(&lah, &oracle)
        );
    }

    #[test]
    fn elevation_model_fit_recovers_uniform_scale() {
        let mut rng = substream(5, Domain::SyntheticEpoch, 999);
        let law = LogisticParams::new(0.0, 2.0).unwrap();
        let training: Vec<(f64, f64)> = (0..30_000)
            .map(|_| (rng.gen_range(0.0..90.0), law.draw(&mut rng)))
            .collect();
        let model = ElevationScaleModel::fit(&training, 3.0, 30).unwrap();
        for bin in model.bins() {
            assert!(
                (bin.logistic.scale_s - 2.0).abs() < 0.3,
                "bin [{}, {}) fitted s = {}",
                bin.low_deg,
                bin.high_deg,
                bin.logistic.scale_s
            );
        }
    }

    #[test]
    fn elevation_model_merges_sparse_bins_and_stays_total() {
        let mut rng = substream(6, Domain::SyntheticEpoch, 998);
        // train only low elevations; everything above 30 degrees is empty
        let law = LogisticParams::new(0.0, 1.0).unwrap();
        let training: Vec<(f64, f64)> = (0..5_000)
            .map(|_| (rng.gen_range(0.0..30.0), law.draw(&mut rng)))
            .collect();
        let model = ElevationScaleModel::fit(&training, 3.0, 30).unwrap();
        let mut expected = 0.0;
        for bin in model.bins() {
            assert_abs_diff_eq!(bin.low_deg, expected, epsilon = 1e-9);
            assert!(bin.n_samples >= 30);
            expected = bin.high_deg;
        }
        assert_abs_diff_eq!(expected, 90.0, epsilon = 1e-9);
        // lookup total on [0, 90]
        for e in [0.0, 3.0, 29.9, 45.0, 89.99, 90.0] {
            model.lookup(e).unwrap();
        }
        assert!(model.lookup(90.01).is_err());
        assert!(model.lookup(-0.1).is_err());
    }

    #[test]
    fn bin_edge_belongs_to_upper_bin() {
        let mut rng = substream(8, Domain::SyntheticEpoch, 997);
        let law = LogisticParams::new(0.0, 1.0).unwrap();
        let training: Vec<(f64, f64)> = (0..40_000)
            .map(|_| (rng.gen_range(0.0..90.0), law.draw(&mut rng)))
            .collect();
        let model = ElevationScaleModel::fit(&training, 3.0, 30).unwrap();
        let bin = model.lookup(3.0).unwrap();
        assert_eq!(bin.low_deg, 3.0);
        let bin = model.lookup(2.999999).unwrap();
        assert_eq!(bin.low_deg, 0.0);
    }

    #[test]
    fn contaminated_low_bins_show_gaussian_inflation() {
        let config = SyntheticConfig::contaminated(8, 400, 21);
        let scenario = generate_synthetic_epochs(&config).unwrap();
        let model = ElevationScaleModel::fit(&scenario.training, 3.0, 30).unwrap();
        for bin in model.bins() {
            assert!(
                bin.gaussian.std_sigma > bin.logistic.scale_s,
                "bin [{}, {}): sigma {} vs s {}",
                bin.low_deg,
                bin.high_deg,
                bin.gaussian.std_sigma,
                bin.logistic.scale_s
            );
        }
    }

    #[test]
    fn synthetic_generation_is_deterministic() {
        let config = SyntheticConfig::contaminated(8, 50, 123);
        let a = generate_synthetic_epochs(&config).unwrap();
        let b = generate_synthetic_epochs(&config).unwrap();
        assert_eq!(a, b);
        let other = generate_synthetic_epochs(&SyntheticConfig::contaminated(8, 50, 124)).unwrap();
        assert_ne!(a.epochs[0], other.epochs[0]);
    }

    #[test]
    fn clean_synthetic_epochs_recover_truth() {
        let config = SyntheticConfig::clean(8, 20, 5);
        let scenario = generate_synthetic_epochs(&config).unwrap();
        let model = flat_model(1.0, 1.0);
        for epoch in &scenario.epochs {
            let fix = spp_solve(epoch, &model, Method::Ls, None).unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(
                    fix.state.position[i],
                    scenario.truth.position[i],
                    epsilon = 1e-3
                );
            }
            assert_abs_diff_eq!(fix.state.clock_bias, scenario.truth.clock_bias, epsilon = 1e-3);
        }
    }

    #[test]
    fn logistic_band_scale_is_recovered_through_the_pipeline() {
        let mut config = SyntheticConfig::contaminated(8, 600, 77);
        config.bands = vec![ErrorBand {
            low_deg: 0.0,
            high_deg: 90.0,
            model: ErrorModel::Logistic { scale: 1.3 },
        }];
        let scenario = generate_synthetic_epochs(&config).unwrap();
        let model = ElevationScaleModel::fit(&scenario.training, 3.0, 30).unwrap();
        for bin in model.bins() {
            assert!(
                (bin.logistic.scale_s - 1.3).abs() < 0.35,
                "bin [{}, {}) fitted s = {}",
                bin.low_deg,
                bin.high_deg,
                bin.logistic.scale_s
            );
        }
    }

    #[test]
    fn robustness_ordering_on_contaminated_epochs() {
        let config = SyntheticConfig::contaminated(8, 150, 42);
        let scenario = generate_synthetic_epochs(&config).unwrap();
        let model = ElevationScaleModel::fit(&scenario.training, 3.0, 30).unwrap();
        let mut rmse = std::collections::HashMap::new();
        for method in [Method::Ls, Method::Ch, Method::Lah] {
            let fixes = spp_solve_batch(&scenario.epochs, &model, method);
            let mut sq = 0.0;
            let mut count = 0usize;
            for fix in fixes.into_iter().flatten() {
                let e = (fix.state.position[0] - scenario.truth.position[0]).powi(2)
                    + (fix.state.position[1] - scenario.truth.position[1]).powi(2)
                    + (fix.state.position[2] - scenario.truth.position[2]).powi(2);
                sq += e;
                count += 1;
            }
            rmse.insert(method, (sq / count as f64).sqrt());
        }
        assert!(
            rmse[&Method::Lah] < rmse[&Method::Ch] && rmse[&Method::Ch] < rmse[&Method::Ls],
            "rmse LS {} CH {} LAH {}",
            rmse[&Method::Ls],
            rmse[&Method::Ch],
            rmse[&Method::Lah]
        );
    }

    #[test]
    fn synthetic_config_validation() {
        assert!(generate_synthetic_epochs(&SyntheticConfig::contaminated(3, 10, 1)).is_err());
        assert!(generate_synthetic_epochs(&SyntheticConfig::contaminated(8, 0, 1)).is_err());
        let mut config = SyntheticConfig::contaminated(8, 10, 1);
        config.bands[0].model = ErrorModel::Gaussian { sigma: -1.0 };
        assert!(generate_synthetic_epochs(&config).is_err());
    }

    #[test]
    fn geometry_rows_are_unit_los_with_clock_ones() {
        let scenario =
            generate_synthetic_epochs(&SyntheticConfig::contaminated(8, 25, 33)).unwrap();
        let point = SppState {
            position: scenario.truth.position,
            clock_bias: scenario.truth.clock_bias,
        };
        for epoch in &scenario.epochs {
            let sys = build_geometry(epoch, &point).unwrap();
            let h = sys.geometry();
            for i in 0..sys.rows() {
                let norm =
                    (h[(i, 0)].powi(2) + h[(i, 1)].powi(2) + h[(i, 2)].powi(2)).sqrt();
                assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
                assert_eq!(h[(i, 3)], 1.0);
            }
        }
    }

    #[test]
    fn stratified_elevations_cover_the_band() {
        let config = SyntheticConfig::clean(8, 30, 9);
        let scenario = generate_synthetic_epochs(&config).unwrap();
        for epoch in &scenario.epochs {
            let mut made_low = false;
            let mut made_high = false;
            for sat in &epoch.satellites {
                assert!(sat.elevation_deg >= 5.0 && sat.elevation_deg <= 90.0);
                made_low |= sat.elevation_deg < 20.0;
                made_high |= sat.elevation_deg > 70.0;
            }
            assert!(made_low && made_high);
        }
        let relative = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        // satellites sit at the synthetic slant range from the receiver
        let epoch = &scenario.epochs[0];
        for sat in &epoch.satellites {
            let d = ((sat.position[0] - config.receiver[0]).powi(2)
                + (sat.position[1] - config.receiver[1]).powi(2)
                + (sat.position[2] - config.receiver[2]).powi(2))
            .sqrt();
            assert!(relative(d, SYNTHETIC_RANGE) < 1e-9);
        }
    }

    #[test]
    fn epoch_validation_rejects_bad_fields() {
        let sat = SatelliteObservation {
            sat_id: 0,
            position: [1.0, f64::NAN, 0.0],
            pseudorange: 1.0,
            elevation_deg: 10.0,
        };
        assert!(EpochObservations::new(0, vec![sat]).is_err());
        let sat = SatelliteObservation {
            sat_id: 0,
            position: [1.0, 0.0, 0.0],
            pseudorange: 1.0,
            elevation_deg: 97.0,
        };
        assert!(matches!(
            EpochObservations::new(0, vec![sat]),
            Err(GnssError::ElevationOutOfRange(_))
        ));
    }
}
