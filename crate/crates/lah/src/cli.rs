//! Command-line front end: distribution fitting, analysis sweeps, the Monte
//! Carlo benchmark, synthetic epoch generation, and batch SPP solving.
//!
//! Every flag can also come from a `--config` key=value file (the key is the
//! long flag name without dashes); the command line wins on conflict. Seeds
//! are mandatory for the stochastic subcommands so no run is silently
//! nondeterministic.
//!
//! Exit codes: 0 on success, 2 for input/usage errors, 3 for numeric
//! failures.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis;
use crate::distributions::{
    fit_gaussian_mle, fit_logistic_mle, moment_scale_from_gaussian, SampleSet,
    GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO,
};
use crate::formats;
use crate::gnss::{
    self, generate_synthetic_epochs, ErrorBand, ErrorModel, SppFix, SyntheticConfig,
    DEFAULT_BIN_WIDTH_DEG, DEFAULT_MIN_BIN_SAMPLES,
};
use crate::kernels::Method;
use crate::simulation::{
    build_scenario_with_scales, calibrate_scales, run_monte_carlo, summarize,
    DEFAULT_NOISE_SCALES, ESTIMATORS,
};

pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_NUMERIC_ERROR: i32 = 3;

#[derive(Debug)]
enum CliError {
    /// Bad flags, unreadable or malformed files.
    Input(String),
    /// A numeric pipeline failed (fit, solve, quadrature).
    Numeric(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT_ERROR,
            CliError::Numeric(_) => EXIT_NUMERIC_ERROR,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn numeric_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "lah",
    version,
    about = "Robust M-estimation for range-based and GNSS positioning",
    after_help = "Sweep table columns: efficiency -> s,efficiency_lqlc,efficiency_lah,are \
                  (are = efficiency_lah/efficiency_lqlc); ges -> s,ges_lqlc,ges_lah,ratio \
                  (ratio = ges_lah/ges_lqlc)."
)]
struct Cli {
    /// key=value file supplying defaults for any flag; the command line wins
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit Gaussian and/or logistic models to a one-value-per-line sample file
    Fit(FitArgs),
    /// Write an efficiency or GES sweep table
    Analyze(AnalyzeArgs),
    /// Run the 2D anchor Monte Carlo benchmark
    Simulate(SimulateArgs),
    /// Batch-solve SPP epochs with the selected estimators
    Spp(SppArgs),
    /// Generate synthetic GNSS epochs
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Sample file, one value per line
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// gaussian, logistic, or both
    #[arg(long, value_name = "WHICH")]
    dist: Option<String>,
    /// Optional output table
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// efficiency or ges
    #[arg(long, value_name = "WHICH")]
    sweep: Option<String>,
    #[arg(long, value_name = "S")]
    sweep_min: Option<f64>,
    #[arg(long, value_name = "S")]
    sweep_max: Option<f64>,
    #[arg(long, value_name = "S")]
    step: Option<f64>,
    /// Output table path
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// RNG seed (required; reproducibility is part of the contract)
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials
    #[arg(long)]
    trials: Option<usize>,
    /// Calibration samples per anchor
    #[arg(long)]
    calibration_samples: Option<usize>,
    /// Comma-separated per-anchor t-scales, meters
    #[arg(long, value_name = "LIST")]
    scales: Option<String>,
    /// Student-t degrees of freedom
    #[arg(long)]
    dof: Option<f64>,
    /// Worker threads (default: rayon's choice); results do not depend on it
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for summary, CDF, and scale tables
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SppArgs {
    /// Epoch observation file
    #[arg(long, value_name = "FILE")]
    obs: Option<PathBuf>,
    /// Elevation scale model file (takes precedence over --training)
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Training pair file (elevation_deg, error_m) to fit a model from
    #[arg(long, value_name = "FILE")]
    training: Option<PathBuf>,
    /// Elevation bin width in degrees
    #[arg(long)]
    bin_width: Option<f64>,
    /// Minimum samples per elevation bin before merging
    #[arg(long)]
    min_bin_samples: Option<usize>,
    /// Comma-separated methods out of LS, CH, LAH, QLC
    #[arg(long, value_name = "LIST")]
    methods: Option<String>,
    /// Truth position file enabling the per-epoch error column
    #[arg(long, value_name = "FILE")]
    truth: Option<PathBuf>,
    /// Fix output file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the fitted scale model here (only with --training)
    #[arg(long, value_name = "FILE")]
    model_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// RNG seed (required)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    satellites: Option<usize>,
    /// Elevation band spec LOW:HIGH:KIND[:P1[:P2]] (kinds: none, gaussian,
    /// logistic, t), repeatable; default is a heavy-tailed low-elevation
    /// profile
    #[arg(long, value_name = "BAND")]
    band: Vec<String>,
    /// Observation output file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Optional truth position file
    #[arg(long, value_name = "FILE")]
    truth_out: Option<PathBuf>,
    /// Optional (elevation, error) training pair file
    #[arg(long, value_name = "FILE")]
    training_out: Option<PathBuf>,
}

/// key=value defaults loaded from --config.
struct ConfigMap(HashMap<String, String>);

impl ConfigMap {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let contents = fs::read_to_string(path)
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            for (i, raw) in contents.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(input_err(format!(
                        "{}:{}: expected key=value",
                        path.display(),
                        i + 1
                    )));
                };
                map.insert(key.trim().replace('-', "_"), value.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| input_err(format!("config key '{key}': {e}"))),
        }
    }
}

/// `flag` wins, then the config value, then `default` (when given).
fn resolve<T: std::str::FromStr + Clone>(
    flag: Option<T>,
    cfg: &ConfigMap,
    key: &str,
    default: Option<T>,
) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(v) = cfg.get::<T>(key)? {
        return Ok(v);
    }
    default.ok_or_else(|| input_err(format!("missing required flag --{}", key.replace('_', "-"))))
}

fn resolve_optional<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &ConfigMap,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get::<T>(key),
    }
}

/// Entry point for the `lah` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match ConfigMap::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.code();
        }
    };
    let result = match cli.command {
        Command::Fit(args) => cmd_fit(args, &cfg),
        Command::Analyze(args) => cmd_analyze(args, &cfg),
        Command::Simulate(args) => cmd_simulate(args, &cfg),
        Command::Spp(args) => cmd_spp(args, &cfg),
        Command::Generate(args) => cmd_generate(args, &cfg),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn cmd_fit(args: FitArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let input: PathBuf = resolve(args.input, cfg, "input", None)?;
    let dist: String = resolve(args.dist, cfg, "dist", Some("both".to_string()))?;
    let dist = dist.to_ascii_lowercase();
    if !["gaussian", "logistic", "both"].contains(&dist.as_str()) {
        return Err(input_err(format!(
            "--dist must be gaussian, logistic, or both (got '{dist}')"
        )));
    }
    let out: Option<PathBuf> = resolve_optional(args.out, cfg, "out")?;

    let values = formats::read_samples(&input).map_err(input_err)?;
    let n = values.len();
    let samples = SampleSet::new(values).map_err(input_err)?;

    let mut table = String::from(formats::FIT_HEADER);
    table.push('\n');
    let mut gaussian = None;
    if dist == "gaussian" || dist == "both" {
        let g = fit_gaussian_mle(&samples).map_err(numeric_err)?;
        println!("gaussian: mu = {:.6}, sigma = {:.6} (n = {n})", g.mean_mu, g.std_sigma);
        table.push_str(&format!("gaussian,{},{},{n}\n", g.mean_mu, g.std_sigma));
        gaussian = Some(g);
    }
    if dist == "logistic" || dist == "both" {
        let l = fit_logistic_mle(&samples).map_err(numeric_err)?;
        println!("logistic: m = {:.6}, s = {:.6} (n = {n})", l.location_m, l.scale_s);
        table.push_str(&format!("logistic,{},{},{n}\n", l.location_m, l.scale_s));
        if let Some(g) = gaussian {
            let implied = moment_scale_from_gaussian(g.std_sigma).map_err(numeric_err)?;
            println!(
                "moment-implied logistic scale (sqrt(3)/pi * sigma) = {implied:.6}; fitted s = {:.6}",
                l.scale_s
            );
        }
    }
    if let Some(out) = out {
        fs::write(&out, table).map_err(|e| input_err(format!("{}: {e}", out.display())))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let sweep: String = resolve(args.sweep, cfg, "sweep", None)?;
    let sweep = sweep.to_ascii_lowercase();
    let out: PathBuf = resolve(args.out, cfg, "out", None)?;
    let sm = GAUSSIAN_TO_LOGISTIC_MOMENT_RATIO;
    match sweep.as_str() {
        "efficiency" => {
            let min = resolve(args.sweep_min, cfg, "sweep_min", Some(0.05))?;
            let max = resolve(args.sweep_max, cfg, "sweep_max", Some(3.0))?;
            let step = resolve(args.step, cfg, "step", Some(0.05))?;
            if step <= 0.0 || min <= 0.0 || min >= max {
                return Err(input_err(format!(
                    "invalid sweep range: min {min}, max {max}, step {step}"
                )));
            }
            let points = analysis::sweep_efficiency(min, max, step).map_err(numeric_err)?;
            formats::write_efficiency_sweep(&out, &points).map_err(input_err)?;
            let lqlc = analysis::efficiency_lqlc(sm).map_err(numeric_err)?;
            let lah = analysis::efficiency_lah(sm).map_err(numeric_err)?;
            println!(
                "efficiency at s = {sm:.4} (moment scale of a unit Gaussian): LQLC {lqlc:.4}, LAH {lah:.4}"
            );
            println!("wrote {} ({} rows)", out.display(), points.len());
        }
        "ges" => {
            let min = resolve(args.sweep_min, cfg, "sweep_min", Some(0.05))?;
            let max = resolve(args.sweep_max, cfg, "sweep_max", Some(6.0))?;
            let step = resolve(args.step, cfg, "step", Some(0.05))?;
            if step <= 0.0 || min <= 0.0 || min >= max {
                return Err(input_err(format!(
                    "invalid sweep range: min {min}, max {max}, step {step}"
                )));
            }
            let points = analysis::sweep_ges(min, max, step).map_err(numeric_err)?;
            formats::write_ges_sweep(&out, &points).map_err(input_err)?;
            let lah = analysis::residual_ges(&Method::Lah.kernel(1.0, sm).map_err(numeric_err)?)
                .map_err(numeric_err)?
                .finite()
                .expect("bounded");
            let lqlc = analysis::residual_ges(&Method::Qlc.kernel(1.0, sm).map_err(numeric_err)?)
                .map_err(numeric_err)?
                .finite()
                .expect("bounded");
            println!("GES ratio (LAH/LQLC) at s = {sm:.4}: {:.4}", lah / lqlc);
            println!("residual GES of LS: inf");
            println!("wrote {} ({} rows)", out.display(), points.len());
        }
        other => {
            return Err(input_err(format!(
                "--sweep must be efficiency or ges (got '{other}')"
            )))
        }
    }
    Ok(())
}

fn parse_scales(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| input_err(format!("invalid scale '{}'", t.trim())))
        })
        .collect()
}

fn maybe_pool(workers: Option<usize>) -> Result<Option<rayon::ThreadPool>, CliError> {
    match workers {
        None => Ok(None),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(Some)
            .map_err(|e| input_err(format!("worker pool: {e}"))),
    }
}

fn cmd_simulate(args: SimulateArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let seed: u64 = resolve(args.seed, cfg, "seed", None)?;
    let trials: usize = resolve(args.trials, cfg, "trials", Some(100_000))?;
    if trials == 0 {
        return Err(input_err("--trials must be at least 1"));
    }
    let calibration_samples: usize =
        resolve(args.calibration_samples, cfg, "calibration_samples", Some(100_000))?;
    let scales = match resolve_optional(args.scales, cfg, "scales")? {
        Some(raw) => parse_scales(&raw)?,
        None => DEFAULT_NOISE_SCALES.to_vec(),
    };
    let dof: f64 = resolve(args.dof, cfg, "dof", Some(2.0))?;
    let workers = resolve_optional(args.workers, cfg, "workers")?;
    let out_dir: PathBuf = resolve(args.out_dir, cfg, "out_dir", None)?;
    fs::create_dir_all(&out_dir).map_err(|e| input_err(format!("{}: {e}", out_dir.display())))?;

    let scenario = build_scenario_with_scales(scales.clone(), dof).map_err(input_err)?;
    let pool = maybe_pool(workers)?;
    let run = || -> Result<_, CliError> {
        let calibration =
            calibrate_scales(&scenario, calibration_samples, seed).map_err(numeric_err)?;
        let report = run_monte_carlo(&scenario, &calibration, trials, seed).map_err(numeric_err)?;
        Ok((calibration, report))
    };
    let (calibration, report) = match &pool {
        Some(pool) => pool.install(run)?,
        None => run()?,
    };

    formats::write_summary(&out_dir.join("summary.csv"), &report).map_err(input_err)?;
    formats::write_anchor_scales(&out_dir.join("anchor_scales.csv"), &scales, &calibration)
        .map_err(input_err)?;
    for (i, method) in ESTIMATORS.iter().enumerate() {
        let (_, _, cdf) = summarize(&report.errors[i]).map_err(numeric_err)?;
        let name = format!("cdf_{}.csv", method.label().to_ascii_lowercase());
        formats::write_cdf(&out_dir.join(name), &cdf).map_err(input_err)?;
    }

    let [ls, ch, lah] = report.summaries;
    let (red_rmse, red_std) = report.reduction_lah_vs_ch();
    println!("trials: {trials}, seed: {seed}, anchors: {}", scales.len());
    println!("metric       LS         CH         LAH        reduction (LAH vs CH)");
    println!(
        "2D RMSE   {:>8.3} m {:>8.3} m {:>8.3} m   {red_rmse:>6.2}%",
        ls.rmse, ch.rmse, lah.rmse
    );
    println!(
        "2D STD    {:>8.3} m {:>8.3} m {:>8.3} m   {red_std:>6.2}%",
        ls.std, ch.std, lah.std
    );
    let excluded: usize = report.excluded.iter().sum();
    if excluded > 0 {
        println!("excluded trials (solver failures): {excluded}");
    }
    println!("wrote summary, anchor scales, and CDF tables to {}", out_dir.display());
    Ok(())
}

fn parse_methods(raw: &str) -> Result<Vec<Method>, CliError> {
    let methods = raw
        .split(',')
        .map(|t| t.trim().parse::<Method>().map_err(input_err))
        .collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(input_err("--methods must name at least one method"));
    }
    Ok(methods)
}

fn cmd_spp(args: SppArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let obs: PathBuf = resolve(args.obs, cfg, "obs", None)?;
    let model_path: Option<PathBuf> = resolve_optional(args.model, cfg, "model")?;
    let training_path: Option<PathBuf> = resolve_optional(args.training, cfg, "training")?;
    let bin_width: f64 = resolve(args.bin_width, cfg, "bin_width", Some(DEFAULT_BIN_WIDTH_DEG))?;
    let min_bin_samples: usize = resolve(
        args.min_bin_samples,
        cfg,
        "min_bin_samples",
        Some(DEFAULT_MIN_BIN_SAMPLES),
    )?;
    let methods = match resolve_optional(args.methods, cfg, "methods")? {
        Some(raw) => parse_methods(&raw)?,
        None => vec![Method::Ls, Method::Ch, Method::Lah],
    };
    let truth_path: Option<PathBuf> = resolve_optional(args.truth, cfg, "truth")?;
    let out: PathBuf = resolve(args.out, cfg, "out", None)?;
    let model_out: Option<PathBuf> = resolve_optional(args.model_out, cfg, "model_out")?;

    let epochs = formats::read_epochs(&obs).map_err(input_err)?;
    let model = match (model_path, training_path) {
        (Some(path), _) => formats::read_scale_model(&path).map_err(input_err)?,
        (None, Some(path)) => {
            let pairs = formats::read_training_pairs(&path).map_err(input_err)?;
            let model = gnss::fit_elevation_model(&pairs, bin_width, min_bin_samples)
                .map_err(numeric_err)?;
            if let Some(model_out) = &model_out {
                formats::write_scale_model(model_out, &model).map_err(input_err)?;
                println!("wrote fitted scale model to {}", model_out.display());
            }
            model
        }
        (None, None) => return Err(input_err("no scale source: pass --model or --training")),
    };
    let truth = truth_path
        .map(|p| formats::read_truth(&p).map_err(input_err))
        .transpose()?;

    let mut rows: Vec<(Method, SppFix)> = Vec::new();
    let mut errors: Vec<f64> = Vec::new();
    let mut skipped = 0usize;
    for &method in &methods {
        let fixes = gnss::spp_solve_batch(&epochs, &model, method);
        let mut sq_sum = 0.0;
        let mut count = 0usize;
        for (epoch, fix) in epochs.iter().zip(fixes) {
            match fix {
                Ok(fix) => {
                    if let Some(truth) = truth {
                        let e = ((fix.state.position[0] - truth[0]).powi(2)
                            + (fix.state.position[1] - truth[1]).powi(2)
                            + (fix.state.position[2] - truth[2]).powi(2))
                        .sqrt();
                        errors.push(e);
                        sq_sum += e * e;
                        count += 1;
                    }
                    rows.push((method, fix));
                }
                Err(e) => {
                    skipped += 1;
                    eprintln!("epoch {} ({method}): skipped: {e}", epoch.epoch_id);
                }
            }
        }
        if truth.is_some() && count > 0 {
            println!("{method}: 3D RMSE = {:.3} m over {count} epochs", (sq_sum / count as f64).sqrt());
        }
    }
    let error_col = truth.map(|_| errors.as_slice());
    formats::write_fixes(&out, &rows, error_col).map_err(input_err)?;
    println!(
        "wrote {} fixes ({} methods x {} epochs, {skipped} skipped) to {}",
        rows.len(),
        methods.len(),
        epochs.len(),
        out.display()
    );
    Ok(())
}

fn parse_band(raw: &str) -> Result<ErrorBand, CliError> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() < 3 {
        return Err(input_err(format!(
            "band '{raw}': expected LOW:HIGH:KIND[:P1[:P2]]"
        )));
    }
    let low: f64 = parts[0]
        .parse()
        .map_err(|_| input_err(format!("band '{raw}': bad low edge")))?;
    let high: f64 = parts[1]
        .parse()
        .map_err(|_| input_err(format!("band '{raw}': bad high edge")))?;
    let param = |i: usize| -> Result<f64, CliError> {
        parts
            .get(i)
            .ok_or_else(|| input_err(format!("band '{raw}': missing parameter")))?
            .parse()
            .map_err(|_| input_err(format!("band '{raw}': bad parameter")))
    };
    let model = match parts[2].to_ascii_lowercase().as_str() {
        "none" => ErrorModel::None,
        "gaussian" => ErrorModel::Gaussian { sigma: param(3)? },
        "logistic" => ErrorModel::Logistic { scale: param(3)? },
        "t" => ErrorModel::StudentT {
            dof: param(3)?,
            scale: param(4)?,
        },
        kind => return Err(input_err(format!("band '{raw}': unknown kind '{kind}'"))),
    };
    Ok(ErrorBand {
        low_deg: low,
        high_deg: high,
        model,
    })
}

fn cmd_generate(args: GenerateArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let seed: u64 = resolve(args.seed, cfg, "seed", None)?;
    let epochs: usize = resolve(args.epochs, cfg, "epochs", Some(100))?;
    let satellites: usize = resolve(args.satellites, cfg, "satellites", Some(8))?;
    let out: PathBuf = resolve(args.out, cfg, "out", None)?;
    let truth_out: Option<PathBuf> = resolve_optional(args.truth_out, cfg, "truth_out")?;
    let training_out: Option<PathBuf> = resolve_optional(args.training_out, cfg, "training_out")?;

    let mut config = SyntheticConfig::contaminated(satellites, epochs, seed);
    let bands = if args.band.is_empty() {
        match cfg.get::<String>("band")? {
            Some(raw) => raw
                .split(';')
                .map(parse_band)
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        }
    } else {
        args.band
            .iter()
            .map(|b| parse_band(b))
            .collect::<Result<Vec<_>, _>>()?
    };
    if !bands.is_empty() {
        config.bands = bands;
    }

    let scenario = generate_synthetic_epochs(&config).map_err(input_err)?;
    formats::write_epochs(&out, &scenario.epochs).map_err(input_err)?;
    println!(
        "wrote {} epochs x {} satellites to {}",
        epochs,
        satellites,
        out.display()
    );
    if let Some(path) = truth_out {
        formats::write_truth(&path, scenario.truth.position).map_err(input_err)?;
        println!("wrote truth to {}", path.display());
    }
    if let Some(path) = training_out {
        formats::write_training_pairs(&path, &scenario.training).map_err(input_err)?;
        println!("wrote {} training pairs to {}", scenario.training.len(), path.display());
    }
    Ok(())
}
