//! Delimited-text file formats: sample files, sweep tables, simulation
//! reports, epoch observations, scale models, and fix outputs.
//!
//! All files are comma-separated with a mandatory header line. Floats are
//! written with Rust's shortest round-trip formatting, so write → read
//! reproduces the exact bit pattern; parse errors carry 1-based line numbers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::analysis::{EfficiencyPoint, GesPoint};
use crate::distributions::{GaussianParams, LogisticParams};
use crate::gnss::{ElevationBin, ElevationScaleModel, EpochObservations, SatelliteObservation, SppFix};
use crate::kernels::Method;
use crate::simulation::TrialReport;

pub const EPOCH_HEADER: &str = "epoch_id,sat_id,sat_x,sat_y,sat_z,pseudorange,elevation_deg";
pub const SCALE_MODEL_HEADER: &str = "bin_low_deg,bin_high_deg,gauss_sigma,logistic_s,n_samples";
pub const TRAINING_HEADER: &str = "elevation_deg,error_m";
pub const FIX_HEADER: &str = "epoch_id,x,y,z,clock,method,iterations,converged";
pub const TRUTH_HEADER: &str = "x,y,z";
pub const EFFICIENCY_HEADER: &str = "s,efficiency_lqlc,efficiency_lah,are";
pub const GES_HEADER: &str = "s,ges_lqlc,ges_lah,ratio";
pub const CDF_HEADER: &str = "error_m,fraction";
pub const SUMMARY_HEADER: &str = "metric,ls,ch,lah,reduction_lah_vs_ch_pct";
pub const ANCHOR_SCALES_HEADER: &str = "anchor,true_t_scale,gauss_sigma,logistic_s";
pub const FIT_HEADER: &str = "distribution,location,scale,n_samples";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected {expected} fields, got {got}")]
    FieldCount {
        path: String,
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("{path}:{line}: invalid number '{token}'")]
    BadNumber {
        path: String,
        line: usize,
        token: String,
    },
    #[error("{path}:1: expected header '{expected}'")]
    BadHeader { path: String, expected: &'static str },
    #[error("{path}: no samples")]
    NoSamples { path: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn read_to_string(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_string(path: &Path, contents: &str) -> Result<(), FormatError> {
    fs::write(path, contents).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_f64(path: &Path, line: usize, token: &str) -> Result<f64, FormatError> {
    token.trim().parse::<f64>().map_err(|_| FormatError::BadNumber {
        path: path.display().to_string(),
        line,
        token: token.trim().to_string(),
    })
}

fn parse_u64(path: &Path, line: usize, token: &str) -> Result<u64, FormatError> {
    token.trim().parse::<u64>().map_err(|_| FormatError::BadNumber {
        path: path.display().to_string(),
        line,
        token: token.trim().to_string(),
    })
}

fn split_line<'a>(
    path: &Path,
    line_no: usize,
    line: &'a str,
    expected: usize,
) -> Result<Vec<&'a str>, FormatError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(FormatError::FieldCount {
            path: path.display().to_string(),
            line: line_no,
            expected,
            got: fields.len(),
        });
    }
    Ok(fields)
}

fn check_header(path: &Path, line: Option<&str>, expected: &'static str) -> Result<(), FormatError> {
    match line {
        Some(l) if l.trim() == expected => Ok(()),
        _ => Err(FormatError::BadHeader {
            path: path.display().to_string(),
            expected,
        }),
    }
}

/// Read a one-value-per-line sample file; blank lines are skipped.
pub fn read_samples(path: &Path) -> Result<Vec<f64>, FormatError> {
    let contents = read_to_string(path)?;
    let mut values = Vec::new();
    for (i, raw) in contents.lines().enumerate() {
        let token = raw.trim();
        if token.is_empty() {
            continue;
        }
        values.push(parse_f64(path, i + 1, token)?);
    }
    if values.is_empty() {
        return Err(FormatError::NoSamples {
            path: path.display().to_string(),
        });
    }
    Ok(values)
}

pub fn write_samples(path: &Path, values: &[f64]) -> Result<(), FormatError> {
    let mut out = String::new();
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    write_string(path, &out)
}

pub fn write_efficiency_sweep(path: &Path, points: &[EfficiencyPoint]) -> Result<(), FormatError> {
    let mut out = String::from(EFFICIENCY_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.scale_s, p.efficiency_lqlc, p.efficiency_lah, p.are
        );
    }
    write_string(path, &out)
}

pub fn read_efficiency_sweep(path: &Path) -> Result<Vec<EfficiencyPoint>, FormatError> {
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), EFFICIENCY_HEADER)?;
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f = split_line(path, i + 2, line, 4)?;
        points.push(EfficiencyPoint {
            scale_s: parse_f64(path, i + 2, f[0])?,
            efficiency_lqlc: parse_f64(path, i + 2, f[1])?,
            efficiency_lah: parse_f64(path, i + 2, f[2])?,
            are: parse_f64(path, i + 2, f[3])?,
        });
    }
    Ok(points)
}

pub fn write_ges_sweep(path: &Path, points: &[GesPoint]) -> Result<(), FormatError> {
    let mut out = String::from(GES_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", p.scale_s, p.ges_lqlc, p.ges_lah, p.ratio);
    }
    write_string(path, &out)
}

pub fn read_ges_sweep(path: &Path) -> Result<Vec<GesPoint>, FormatError> {
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), GES_HEADER)?;
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f = split_line(path, i + 2, line, 4)?;
        points.push(GesPoint {
            scale_s: parse_f64(path, i + 2, f[0])?,
            ges_lqlc: parse_f64(path, i + 2, f[1])?,
            ges_lah: parse_f64(path, i + 2, f[2])?,
            ratio: parse_f64(path, i + 2, f[3])?,
        });
    }
    Ok(points)
}

pub fn write_epochs(path: &Path, epochs: &[EpochObservations]) -> Result<(), FormatError> {
    let mut out = String::from(EPOCH_HEADER);
    out.push('\n');
    for epoch in epochs {
        for sat in &epoch.satellites {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                epoch.epoch_id,
                sat.sat_id,
                sat.position[0],
                sat.position[1],
                sat.position[2],
                sat.pseudorange,
                sat.elevation_deg
            );
        }
    }
    write_string(path, &out)
}

/// Read an epoch observation file, grouping rows by epoch_id in first-seen
/// order.
pub fn read_epochs(path: &Path) -> Result<Vec<EpochObservations>, FormatError> {
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), EPOCH_HEADER)?;
    let mut order: Vec<u64> = Vec::new();
    let mut groups: std::collections::HashMap<u64, Vec<SatelliteObservation>> =
        std::collections::HashMap::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 2;
        let f = split_line(path, line_no, line, 7)?;
        let epoch_id = parse_u64(path, line_no, f[0])?;
        let sat = SatelliteObservation {
            sat_id: parse_u64(path, line_no, f[1])? as u32,
            position: [
                parse_f64(path, line_no, f[2])?,
                parse_f64(path, line_no, f[3])?,
                parse_f64(path, line_no, f[4])?,
            ],
            pseudorange: parse_f64(path, line_no, f[5])?,
            elevation_deg: parse_f64(path, line_no, f[6])?,
        };
        if !groups.contains_key(&epoch_id) {
            order.push(epoch_id);
        }
        groups.entry(epoch_id).or_default().push(sat);
    }
    if order.is_empty() {
        return Err(FormatError::NoSamples {
            path: path.display().to_string(),
        });
    }
    order
        .into_iter()
        .map(|id| {
            EpochObservations::new(id, groups.remove(&id).unwrap()).map_err(|e| {
                FormatError::Invalid {
                    path: path.display().to_string(),
                    message: e.to_string(),
                }
            })
        })
        .collect()
}

pub fn write_scale_model(path: &Path, model: &ElevationScaleModel) -> Result<(), FormatError> {
    let mut out = String::from(SCALE_MODEL_HEADER);
    out.push('\n');
    for bin in model.bins() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            bin.low_deg, bin.high_deg, bin.gaussian.std_sigma, bin.logistic.scale_s, bin.n_samples
        );
    }
    write_string(path, &out)
}

pub fn read_scale_model(path: &Path) -> Result<ElevationScaleModel, FormatError> {
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), SCALE_MODEL_HEADER)?;
    let mut bins = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 2;
        let f = split_line(path, line_no, line, 5)?;
        let low = parse_f64(path, line_no, f[0])?;
        let high = parse_f64(path, line_no, f[1])?;
        let sigma = parse_f64(path, line_no, f[2])?;
        let s = parse_f64(path, line_no, f[3])?;
        let n = parse_u64(path, line_no, f[4])? as usize;
        let invalid = |message: String| FormatError::Invalid {
            path: path.display().to_string(),
            message,
        };
        bins.push(ElevationBin {
            low_deg: low,
            high_deg: high,
            gaussian: GaussianParams::new(0.0, sigma).map_err(|e| invalid(e.to_string()))?,
            logistic: LogisticParams::new(0.0, s).map_err(|e| invalid(e.to_string()))?,
            n_samples: n,
        });
    }
    ElevationScaleModel::from_bins(bins).map_err(|e| FormatError::Invalid {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_training_pairs(path: &Path, pairs: &[(f64, f64)]) -> Result<(), FormatError> {
    let mut out = String::from(TRAINING_HEADER);
    out.push('\n');
    for (elev, err) in pairs {
        let _ = writeln!(out, "{elev},{err}");
    }
    write_string(path, &out)
}

pub fn read_training_pairs(path: &Path) -> Result<Vec<(f64, f64)>, FormatError> {
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), TRAINING_HEADER)?;
    let mut pairs = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f = split_line(path, i + 2, line, 2)?;
        pairs.push((parse_f64(path, i + 2, f[0])?, parse_f64(path, i + 2, f[1])?));
    }
    if pairs.is_empty() {
        return Err(FormatError::NoSamples {
            path: path.display().to_string(),
        });
    }
    Ok(pairs)
}

/// Write per-epoch fixes; `errors` supplies the optional 3D error column.
pub fn write_fixes(
    path: &Path,
    rows: &[(Method, SppFix)],
    errors: Option<&[f64]>,
) -> Result<(), FormatError> {
    let mut out = String::from(FIX_HEADER);
    if errors.is_some() {
        out.push_str(",error_3d");
    }
    out.push('\n');
    for (i, (method, fix)) in rows.iter().enumerate() {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            fix.epoch_id,
            fix.state.position[0],
            fix.state.position[1],
            fix.state.position[2],
            fix.state.clock_bias,
            method,
            fix.iterations,
            fix.converged
        );
        if let Some(errs) = errors {
            let _ = write!(out, ",{}", errs[i]);
        }
        out.push('\n');
    }
    write_string(path, &out)
}

pub fn read_truth(path: &Path) -> Result<[f64; 3], FormatError> {
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), TRUTH_HEADER)?;
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f = split_line(path, i + 2, line, 3)?;
        return Ok([
            parse_f64(path, i + 2, f[0])?,
            parse_f64(path, i + 2, f[1])?,
            parse_f64(path, i + 2, f[2])?,
        ]);
    }
    Err(FormatError::NoSamples {
        path: path.display().to_string(),
    })
}

pub fn write_truth(path: &Path, truth: [f64; 3]) -> Result<(), FormatError> {
    write_string(
        path,
        &format!("{TRUTH_HEADER}\n{},{},{}\n", truth[0], truth[1], truth[2]),
    )
}

/// Table-1-shaped summary: one row per metric with the LAH-vs-CH reduction.
pub fn write_summary(path: &Path, report: &TrialReport) -> Result<(), FormatError> {
    let [ls, ch, lah] = report.summaries;
    let (red_rmse, red_std) = report.reduction_lah_vs_ch();
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    let _ = writeln!(out, "rmse_2d,{},{},{},{}", ls.rmse, ch.rmse, lah.rmse, red_rmse);
    let _ = writeln!(out, "std_2d,{},{},{},{}", ls.std, ch.std, lah.std, red_std);
    write_string(path, &out)
}

pub fn write_cdf(path: &Path, cdf: &[(f64, f64)]) -> Result<(), FormatError> {
    let mut out = String::from(CDF_HEADER);
    out.push('\n');
    for (e, f) in cdf {
        let _ = writeln!(out, "{e},{f}");
    }
    write_string(path, &out)
}

/// Per-anchor truth/fitted scale comparison table.
pub fn write_anchor_scales(
    path: &Path,
    true_scales: &[f64],
    calibration: &crate::simulation::ScaleCalibration,
) -> Result<(), FormatError> {
    let mut out = String::from(ANCHOR_SCALES_HEADER);
    out.push('\n');
    for (i, (t, entry)) in true_scales
        .iter()
        .zip(calibration.entries())
        .enumerate()
    {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            i, t, entry.gaussian.std_sigma, entry.logistic.scale_s
        );
    }
    write_string(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnss::{generate_synthetic_epochs, ElevationScaleModel, SyntheticConfig};
    use tempfile::tempdir;

    #[test]
    fn sample_file_round_trip_and_errors() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("samples.txt");
        write_samples(&path, &[1.5, -0.25, 3.0e-7]).unwrap();
        assert_eq!(read_samples(&path).unwrap(), vec![1.5, -0.25, 3.0e-7]);

        std::fs::write(&path, "1.0\nabc\n2.0\n").unwrap();
        match read_samples(&path).unwrap_err() {
            FormatError::BadNumber { line, token, .. } => {
                assert_eq!(line, 2);
                assert_eq!(token, "abc");
            }
            other => panic!("unexpected error {other}"),
        }

        std::fs::write(&path, "").unwrap();
        assert!(matches!(
            read_samples(&path).unwrap_err(),
            FormatError::NoSamples { .. }
        ));
    }

    #[test]
    fn scale_model_file_round_trips_exactly() {
        let config = SyntheticConfig::contaminated(8, 200, 3);
        let scenario = generate_synthetic_epochs(&config).unwrap();
        let model = ElevationScaleModel::fit(&scenario.training, 3.0, 30).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.csv");
        write_scale_model(&path, &model).unwrap();
        let back = read_scale_model(&path).unwrap();
        assert_eq!(model.bins().len(), back.bins().len());
        for (a, b) in model.bins().iter().zip(back.bins()) {
            assert_eq!(a.low_deg.to_bits(), b.low_deg.to_bits());
            assert_eq!(a.high_deg.to_bits(), b.high_deg.to_bits());
            assert_eq!(
                a.gaussian.std_sigma.to_bits(),
                b.gaussian.std_sigma.to_bits()
            );
            assert_eq!(a.logistic.scale_s.to_bits(), b.logistic.scale_s.to_bits());
            assert_eq!(a.n_samples, b.n_samples);
        }
    }

    #[test]
    fn epoch_file_round_trips() {
        let config = SyntheticConfig::contaminated(6, 4, 11);
        let scenario = generate_synthetic_epochs(&config).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("epochs.csv");
        write_epochs(&path, &scenario.epochs).unwrap();
        let back = read_epochs(&path).unwrap();
        assert_eq!(scenario.epochs, back);
    }

    #[test]
    fn epoch_file_requires_header() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("epochs.csv");
        std::fs::write(&path, "1,2,3\n").unwrap();
        assert!(matches!(
            read_epochs(&path).unwrap_err(),
            FormatError::BadHeader { .. }
        ));
    }

    #[test]
    fn training_pairs_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("training.csv");
        let pairs = vec![(5.5, -0.3), (47.0, 12.25)];
        write_training_pairs(&path, &pairs).unwrap();
        assert_eq!(read_training_pairs(&path).unwrap(), pairs);
    }

    #[test]
    fn truth_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("truth.csv");
        write_truth(&path, [1.0, -2.5, 3.75]).unwrap();
        assert_eq!(read_truth(&path).unwrap(), [1.0, -2.5, 3.75]);
    }

    #[test]
    fn sweep_files_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("eff.csv");
        let points = vec![EfficiencyPoint {
            scale_s: 0.05,
            efficiency_lqlc: 0.5,
            efficiency_lah: 0.49,
            are: 0.98,
        }];
        write_efficiency_sweep(&path, &points).unwrap();
        assert_eq!(read_efficiency_sweep(&path).unwrap(), points);

        let path = dir.path().join("ges.csv");
        let points = vec![GesPoint {
            scale_s: 0.05,
            ges_lqlc: 1.1,
            ges_lah: 1.0,
            ratio: 1.0 / 1.1,
        }];
        write_ges_sweep(&path, &points).unwrap();
        assert_eq!(read_ges_sweep(&path).unwrap(), points);
    }
}
