//! Command-line front end: `train`, `predict`, `pd`, `varimp`, `cv`, `bench`, `simulate`.
//!
//! Tables are written tab-separated with a header line. Errors go to stderr as
//! `error[Exxx]: message` with a nonzero exit status. Configuration comes from
//! flags only; no environment variables are read.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{warn, Level, LevelFilter, Log, Metadata, Record};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::{scaling_benchmark, BenchOptions};
use crate::data::{
    generate_friedman, load_csv, load_features, write_csv, CsvOptions, Dataset, ResponseTransform, DEFAULT_MAX_CUTPOINTS,
};
use crate::error::{Error, Result};
use crate::mcmc::{run_chain_observed, ChainConfig, MoveProbabilities, SweepRecord};
use crate::model::{load_model, save_model};
use crate::posterior::{default_grid, PosteriorDraws, DEFAULT_PD_POINTS};
use crate::priors::{PriorSettings, PriorSpec, SigmaHatMode};
use crate::probit::{offset_for, run_probit_chain_observed, simulate_probit};
use crate::Mode;

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "bart", version, about = "Bayesian additive regression trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit a model and write it with its run manifest.
    Train(TrainArgs),
    /// Posterior mean (and optional interval) for every row of a CSV.
    Predict(PredictArgs),
    /// Partial-dependence curves.
    Pd(PdArgs),
    /// Variable inclusion proportions.
    Varimp(VarimpArgs),
    /// K-fold cross-validation over prior settings.
    Cv(CvArgs),
    /// Time short chains over a range of sample sizes.
    Bench(BenchArgs),
    /// Write a simulated dataset.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorArgs {
    #[arg(long, default_value_t = 0.95)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Number of trees.
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long, default_value_t = 3.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.90)]
    pub q: f64,
    /// naive or linear
    #[arg(long, default_value = "linear")]
    pub sigma_hat: String,
    /// Minimum rows on each side of a split.
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
}

impl PriorArgs {
    fn settings(&self) -> Result<PriorSettings> {
        let s = PriorSettings {
            alpha: self.alpha,
            beta: self.beta,
            k: self.k,
            m: self.m,
            nu: self.nu,
            q: self.q,
            sigma_hat_mode: SigmaHatMode::parse(&self.sigma_hat)?,
            n_min: self.n_min,
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 200)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1000)]
    pub keep: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent chains, run in parallel and concatenated.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
}

impl ChainArgs {
    fn config(&self) -> ChainConfig {
        ChainConfig {
            burn_in: self.burn_in,
            keep: self.keep,
            thin: self.thin,
            seed: self.seed,
            moves: MoveProbabilities::default(),
        }
    }
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainArgs {
    /// Training CSV with a header row.
    #[arg(long, required_unless_present = "replay")]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Model output path; the manifest goes to `<out>.manifest.json`.
    #[arg(long, default_value = "model.bart")]
    pub out: PathBuf,
    /// Binary 0/1 response with a probit link.
    #[arg(long)]
    pub probit: bool,
    /// Probit shrinkage target p0; the offset is Phi^-1(p0).
    #[arg(long, default_value_t = 0.5)]
    pub p0: f64,
    /// Use the sample base rate as p0.
    #[arg(long)]
    pub base_rate: bool,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = DEFAULT_MAX_CUTPOINTS)]
    pub max_cutpoints: usize,
    /// Response transform applied before fitting: none, log or sqrt.
    #[arg(long, default_value = "none")]
    pub transform: String,
    /// Columns to one-hot encode even if they look numeric.
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Write one JSON record per sweep to this file.
    #[arg(long)]
    pub progress: Option<PathBuf>,
    /// Re-run the training recorded in a manifest (other flags except --out are ignored).
    #[arg(long)]
    #[serde(skip)]
    pub replay: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Add lower, median and upper columns for a 1 - alpha interval.
    #[arg(long)]
    pub interval: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PdArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Training CSV supplying the rows averaged over.
    #[arg(long)]
    pub data: PathBuf,
    /// Variable or comma-separated variable set; repeat for several curves.
    #[arg(long = "vars", required = true)]
    pub vars: Vec<String>,
    /// Grid points per variable, evenly spaced from min to max.
    #[arg(long, default_value_t = DEFAULT_PD_POINTS)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.10)]
    pub interval: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VarimpArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "y")]
    pub response: String,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// `default`, or settings `nu,q,k,m` separated by `;`.
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[arg(long, default_value_t = 200)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1000)]
    pub keep: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_CUTPOINTS)]
    pub max_cutpoints: usize,
    #[arg(long, default_value = "none")]
    pub transform: String,
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Write the model refit on all rows with the selected setting.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Manifest path (defaults to `<out>.manifest.json` when --out is given).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Per-setting table destination (stdout if absent).
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = crate::bench::DEFAULT_SIZES.to_vec())]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub p: usize,
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    #[arg(long, default_value_t = 20)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// friedman or probit
    #[arg(long, default_value = "friedman")]
    pub kind: String,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub p: usize,
    /// Noise sd (friedman only).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the noiseless signal, one value per row.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

/// One prior setting evaluated by cross-validation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvSetting {
    pub nu: f64,
    pub q: f64,
    pub k: f64,
    pub m: usize,
}

/// Everything needed to replay a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub library_version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<TrainArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvArgs>,
    /// Prior after calibration against the data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrated_prior: Option<PriorSpec>,
    pub mode: Mode,
    pub offset: f64,
    /// Number of models fitted by the run.
    pub trainings: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<CvSetting>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Manifest(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))
    }
}

/// `<model>.manifest.json`
pub fn manifest_path(model: &Path) -> PathBuf {
    let mut s = model.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

struct StderrLogger;

impl Log for StderrLogger {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= Level::Warn
    }

    fn log(&self, record: &Record) {
        if self.enabled(record.metadata()) {
            let tag = if record.level() == Level::Error { "error" } else { "warning" };
            eprintln!("{tag}: {}", record.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn init_logger() {
    if log::set_logger(&LOGGER).is_ok() {
        log::set_max_level(LevelFilter::Warn);
    }
}

/// Parse arguments and run; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logger();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            1
        }
    }
}

pub fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(run(std::env::args_os()).clamp(0, 255) as u8)
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Pd(a) => cmd_pd(a),
        Command::Varimp(a) => cmd_varimp(a),
        Command::Cv(a) => cmd_cv(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_err(e: io::Error) -> Error {
    Error::io("<output>", e)
}

fn csv_options(response: &str, mode: Mode, max_cutpoints: usize, transform: &str, categorical: &[String]) -> Result<CsvOptions> {
    Ok(CsvOptions {
        max_cutpoints,
        transform: ResponseTransform::parse(transform)?,
        categorical: categorical.to_vec(),
        ..CsvOptions::new(response, mode)
    })
}

/// Run `chains` chains of the appropriate sampler, returning merged draws and
/// the per-chain sweep records when `record` is set.
fn sample(
    data: &Dataset,
    spec: &PriorSpec,
    config: &ChainConfig,
    offset: f64,
    chains: usize,
    record: bool,
) -> Result<(PosteriorDraws, Vec<Vec<SweepRecord>>)> {
    if chains == 0 {
        return Err(Error::InvalidParameter("--chains must be at least 1".into()));
    }
    let runs: Vec<Result<(PosteriorDraws, Vec<SweepRecord>)>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut records = Vec::new();
            let mut obs = |r: &SweepRecord| {
                if record {
                    records.push(r.clone());
                }
            };
            let d = match data.mode() {
                Mode::Regression => run_chain_observed(data, spec, config, c, &mut obs)?,
                Mode::Probit => run_probit_chain_observed(data, spec, config, offset, c, &mut obs)?,
            };
            Ok((d, records))
        })
        .collect();
    let mut draws = Vec::with_capacity(chains);
    let mut records = Vec::with_capacity(chains);
    for r in runs {
        let (d, rec) = r?;
        draws.push(d);
        records.push(rec);
    }
    Ok((PosteriorDraws::merge(draws)?, records))
}

pub fn cmd_train(args: TrainArgs) -> Result<()> {
    let args = match &args.replay {
        Some(path) => {
            let manifest = RunManifest::load(path)?;
            let mut recorded = manifest
                .train
                .ok_or_else(|| Error::Manifest(format!("{} does not record a training run", path.display())))?;
            if manifest.library_version != LIBRARY_VERSION {
                warn!(
                    "manifest was written by version {}, replaying with {LIBRARY_VERSION}",
                    manifest.library_version
                );
            }
            if args.out != PathBuf::from("model.bart") {
                recorded.out = args.out.clone();
            }
            recorded
        }
        None => args,
    };
    let data_path = args
        .data
        .clone()
        .ok_or_else(|| Error::InvalidParameter("--data is required".into()))?;
    let mode = if args.probit { Mode::Probit } else { Mode::Regression };
    let opts = csv_options(&args.response, mode, args.max_cutpoints, &args.transform, &args.categorical)?;
    let data = load_csv(&data_path, &opts)?;
    let spec = PriorSpec::calibrate(&data, &args.prior.settings()?)?;
    let config = args.chain.config();
    let offset = match mode {
        Mode::Regression => 0.0,
        Mode::Probit => {
            let p0 = if args.base_rate {
                data.y().iter().sum::<f64>() / data.n() as f64
            } else {
                args.p0
            };
            offset_for(p0)?
        }
    };
    let (draws, records) = sample(&data, &spec, &config, offset, args.chain.chains, args.progress.is_some())?;
    save_model(&draws, &args.out)?;
    let mut outputs = vec![args.out.clone()];
    if let Some(path) = &args.progress {
        let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for rec in records.iter().flatten() {
            let line = serde_json::to_string(rec).map_err(|e| Error::Manifest(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        outputs.push(path.clone());
    }
    let manifest = RunManifest {
        library_version: LIBRARY_VERSION.to_string(),
        command: "train".into(),
        train: Some(args.clone()),
        cv: None,
        calibrated_prior: Some(spec),
        mode,
        offset,
        trainings: 1,
        selected: None,
        outputs,
    };
    manifest.save(&manifest_path(&args.out))?;
    eprintln!("saved {} draws to {}", draws.len(), args.out.display());
    Ok(())
}

/// Load a model and check the manifest beside it, if any.
fn open_model(path: &Path) -> Result<PosteriorDraws> {
    let draws = load_model(path)?;
    let mpath = manifest_path(path);
    if mpath.exists() {
        let manifest = RunManifest::load(&mpath)?;
        if manifest.mode != draws.mode() {
            return Err(Error::Manifest(format!(
                "{} records a {} run but the model is {}",
                mpath.display(),
                manifest.mode.as_str(),
                draws.mode().as_str()
            )));
        }
        if manifest.library_version != LIBRARY_VERSION {
            warn!("model was written by version {}, this is {LIBRARY_VERSION}", manifest.library_version);
        }
    } else {
        warn!("no manifest found at {}", mpath.display());
    }
    Ok(draws)
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn cmd_predict(args: PredictArgs) -> Result<()> {
    let draws = open_model(&args.model)?;
    let table = load_features(&args.data, draws.schema())?;
    let mut w = output(&args.out)?;
    match args.interval {
        Some(alpha) => {
            let s = draws.summarize(&table.rows, alpha)?;
            writeln!(w, "row\testimate\tlower\tmedian\tupper").map_err(write_err)?;
            for (i, s) in s.iter().enumerate() {
                writeln!(w, "{i}\t{}\t{}\t{}\t{}", fmt(s.mean), fmt(s.lower), fmt(s.median), fmt(s.upper))
                    .map_err(write_err)?;
            }
        }
        None => {
            writeln!(w, "row\testimate").map_err(write_err)?;
            for (i, e) in draws.point_estimate(&table.rows).iter().enumerate() {
                writeln!(w, "{i}\t{}", fmt(*e)).map_err(write_err)?;
            }
        }
    }
    w.flush().map_err(write_err)
}

fn resolve_vars(draws: &PosteriorDraws, spec: &str) -> Result<Vec<usize>> {
    let names = draws.schema().feature_names();
    spec.split(',')
        .map(|name| {
            let name = name.trim();
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown variable {name:?}; model has {}", names.join(", "))))
        })
        .collect()
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect()
    })
}

pub fn cmd_pd(args: PdArgs) -> Result<()> {
    let draws = open_model(&args.model)?;
    if args.grid == 0 {
        return Err(Error::InvalidParameter("--grid must be at least 1".into()));
    }
    let table = load_features(&args.data, draws.schema())?;
    let names = draws.schema().feature_names();
    let mut w = output(&args.out)?;
    writeln!(w, "variables\tvalue\tmean\tlower\tupper").map_err(write_err)?;
    for set in &args.vars {
        let vars = resolve_vars(&draws, set)?;
        let axes: Vec<Vec<f64>> = vars.iter().map(|&v| default_grid(&table.rows, v, args.grid)).collect();
        let grid = cartesian(&axes);
        let label = vars.iter().map(|&v| names[v].as_str()).collect::<Vec<_>>().join(",");
        for pt in draws.partial_dependence(&table.rows, &vars, &grid, args.interval)? {
            let value = pt.x.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(",");
            writeln!(w, "{label}\t{value}\t{}\t{}\t{}", fmt(pt.mean), fmt(pt.lower), fmt(pt.upper)).map_err(write_err)?;
        }
    }
    w.flush().map_err(write_err)
}

pub fn cmd_varimp(args: VarimpArgs) -> Result<()> {
    let draws = open_model(&args.model)?;
    let v = draws.variable_inclusion();
    let names = draws.schema().feature_names();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let mut w = output(&args.out)?;
    writeln!(w, "variable\tinclusion").map_err(write_err)?;
    for i in order {
        writeln!(w, "{}\t{}", names[i], fmt(v[i])).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

/// The 24 settings: (nu, q) in {(3, 0.90), (3, 0.99), (10, 0.75)}, k in {1, 2, 3, 5}, m in {50, 200}.
pub fn default_cv_grid() -> Vec<CvSetting> {
    let mut out = Vec::new();
    for (nu, q) in [(3.0, 0.90), (3.0, 0.99), (10.0, 0.75)] {
        for k in [1.0, 2.0, 3.0, 5.0] {
            for m in [50, 200] {
                out.push(CvSetting { nu, q, k, m });
            }
        }
    }
    out
}

pub fn parse_cv_grid(spec: &str) -> Result<Vec<CvSetting>> {
    if spec.trim() == "default" {
        return Ok(default_cv_grid());
    }
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            let bad = || Error::InvalidParameter(format!("cv setting {s:?} is not nu,q,k,m"));
            if parts.len() != 4 {
                return Err(bad());
            }
            Ok(CvSetting {
                nu: parts[0].parse().map_err(|_| bad())?,
                q: parts[1].parse().map_err(|_| bad())?,
                k: parts[2].parse().map_err(|_| bad())?,
                m: parts[3].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Fold of every row: a seeded permutation cut into contiguous blocks.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &row) in perm.iter().enumerate() {
        fold[row] = pos * folds / n;
    }
    fold
}

/// Index of the best setting: lowest RMSE, then smaller m, then smaller k,
/// then the earlier (nu, q) pair in the default ordering.
pub fn select_setting(settings: &[CvSetting], rmse: &[f64]) -> Option<usize> {
    let nu_q_rank = |s: &CvSetting| {
        [(3.0, 0.90), (3.0, 0.99), (10.0, 0.75)]
            .iter()
            .position(|&(nu, q)| nu == s.nu && q == s.q)
            .unwrap_or(usize::MAX)
    };
    (0..settings.len()).filter(|&i| rmse[i].is_finite()).min_by(|&a, &b| {
        let (sa, sb) = (&settings[a], &settings[b]);
        rmse[a]
            .total_cmp(&rmse[b])
            .then(sa.m.cmp(&sb.m))
            .then(sa.k.total_cmp(&sb.k))
            .then(nu_q_rank(sa).cmp(&nu_q_rank(sb)))
            .then(a.cmp(&b))
    })
}

fn settings_for(s: &CvSetting) -> PriorSettings {
    PriorSettings { nu: s.nu, q: s.q, k: s.k, m: s.m, ..PriorSettings::default() }
}

pub fn cmd_cv(args: CvArgs) -> Result<()> {
    let opts = csv_options(&args.response, Mode::Regression, args.max_cutpoints, &args.transform, &args.categorical)?;
    let data = load_csv(&args.data, &opts)?;
    let n = data.n();
    if args.folds < 2 || n < args.folds {
        return Err(Error::InvalidParameter(format!("need 2 <= folds <= n (folds = {}, n = {n})", args.folds)));
    }
    let grid = parse_cv_grid(&args.grid)?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty cv grid".into()));
    }
    let fold = fold_assignment(n, args.folds, args.seed);
    let config = ChainConfig { burn_in: args.burn_in, keep: args.keep, seed: args.seed, ..ChainConfig::default() };
    let rows = data.rows();
    let truth = data.raw_y();
    let cells: Vec<(usize, usize)> = (0..grid.len()).flat_map(|s| (0..args.folds).map(move |f| (s, f))).collect();
    let results: Vec<Result<Option<f64>>> = cells
        .par_iter()
        .map(|&(s, f)| {
            let train: Vec<usize> = (0..n).filter(|&i| fold[i] != f).collect();
            let test: Vec<usize> = (0..n).filter(|&i| fold[i] == f).collect();
            let sub = match data.subset(&train) {
                Ok(d) => d,
                Err(Error::DegenerateResponse(msg)) => {
                    warn!("fold {f} skipped: {msg}");
                    return Ok(None);
                }
                Err(e) => return Err(e),
            };
            let spec = match PriorSpec::calibrate(&sub, &settings_for(&grid[s])) {
                Ok(p) => p,
                Err(Error::DegenerateResponse(msg)) => {
                    warn!("fold {f} skipped: {msg}");
                    return Ok(None);
                }
                Err(e) => return Err(e),
            };
            let draws = run_chain_observed(&sub, &spec, &config, s * args.folds + f, &mut |_| {})?;
            let test_rows: Vec<Vec<f64>> = test.iter().map(|&i| rows[i].clone()).collect();
            let pred = draws.point_estimate(&test_rows);
            let mse = test.iter().zip(&pred).map(|(&i, p)| (p - truth[i]).powi(2)).sum::<f64>() / test.len() as f64;
            Ok(Some(mse.sqrt()))
        })
        .collect();
    let mut per_setting: Vec<Vec<f64>> = vec![Vec::new(); grid.len()];
    for ((s, _), r) in cells.iter().zip(results) {
        if let Some(rmse) = r? {
            per_setting[*s].push(rmse);
        }
    }
    let rmse: Vec<f64> = per_setting
        .iter()
        .map(|v| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 })
        .collect();
    let best = select_setting(&grid, &rmse).ok_or_else(|| Error::Data("every fold was skipped".into()))?;
    let mut trainings = cells.len();

    let mut w = output(&args.table)?;
    writeln!(w, "nu\tq\tk\tm\trmse\tfolds\tselected").map_err(write_err)?;
    for (i, s) in grid.iter().enumerate() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            fmt(s.nu),
            fmt(s.q),
            fmt(s.k),
            s.m,
            fmt(rmse[i]),
            per_setting[i].len(),
            (i == best) as u8
        )
        .map_err(write_err)?;
    }
    w.flush().map_err(write_err)?;

    // refit on all rows with the selected setting
    let spec = PriorSpec::calibrate(&data, &settings_for(&grid[best]))?;
    let final_draws = run_chain_observed(&data, &spec, &config, 0, &mut |_| {})?;
    trainings += 1;
    let mut outputs = Vec::new();
    if let Some(out) = &args.out {
        save_model(&final_draws, out)?;
        outputs.push(out.clone());
    }
    let manifest = RunManifest {
        library_version: LIBRARY_VERSION.to_string(),
        command: "cv".into(),
        train: None,
        cv: Some(args.clone()),
        calibrated_prior: Some(spec),
        mode: Mode::Regression,
        offset: 0.0,
        trainings,
        selected: Some(grid[best]),
        outputs,
    };
    let mpath = args.manifest.clone().or_else(|| args.out.as_deref().map(manifest_path));
    match mpath {
        Some(p) => manifest.save(&p)?,
        None => eprintln!("{trainings} models trained; pass --manifest to record the run"),
    }
    Ok(())
}

pub fn cmd_bench(args: BenchArgs) -> Result<()> {
    let report = scaling_benchmark(&BenchOptions {
        sizes: args.sizes,
        p: args.p,
        m: args.m,
        sweeps: args.sweeps,
        seed: args.seed,
    })?;
    let mut w = output(&args.out)?;
    writeln!(w, "n\tseconds\tfitted").map_err(write_err)?;
    for r in &report.rows {
        let fitted = report.intercept + report.slope * r.n as f64;
        writeln!(w, "{}\t{}\t{}", r.n, fmt(r.seconds), fmt(fitted)).map_err(write_err)?;
    }
    w.flush().map_err(write_err)?;
    eprintln!(
        "linear fit: seconds = {:.3e} + {:.3e} * n, R^2 = {:.4}",
        report.intercept, report.slope, report.r_squared
    );
    Ok(())
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (data, signal, signal_name) = match args.kind.as_str() {
        "friedman" => {
            let s = generate_friedman(&mut rng, args.n, args.p, args.sigma)?;
            (s.data, s.f, "f")
        }
        "probit" => {
            let s = simulate_probit(&mut rng, args.n, args.p)?;
            (s.data, s.g, "g")
        }
        other => return Err(Error::InvalidParameter(format!("unknown simulation kind {other:?}"))),
    };
    let mut headers = data.schema().feature_names();
    headers.push("y".into());
    let rows: Vec<Vec<f64>> = (0..data.n())
        .map(|i| {
            let mut r = data.row(i);
            r.push(data.raw_y()[i]);
            r
        })
        .collect();
    write_csv(&args.out, &headers, &rows)?;
    if let Some(path) = &args.truth {
        let truth: Vec<Vec<f64>> = signal.iter().map(|&v| vec![v]).collect();
        write_csv(path, &[signal_name.to_string()], &truth)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_24_settings() {
        let g = default_cv_grid();
        assert_eq!(g.len(), 24);
        assert_eq!(g[0], CvSetting { nu: 3.0, q: 0.90, k: 1.0, m: 50 });
    }

    #[test]
    fn grid_parsing() {
        let g = parse_cv_grid("3,0.9,2,200; 10,0.75,3,50").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].m, 50);
        assert!(parse_cv_grid("3,0.9,2").is_err());
    }

    #[test]
    fn folds_are_balanced_and_deterministic() {
        let a = fold_assignment(23, 5, 4);
        assert_eq!(a, fold_assignment(23, 5, 4));
        let mut counts = [0; 5];
        for f in &a {
            counts[*f] += 1;
        }
        assert!(counts.iter().all(|&c| c == 4 || c == 5), "{counts:?}");
    }

    #[test]
    fn tie_breaking() {
        let g = default_cv_grid();
        let rmse = vec![1.0; g.len()];
        // all tied: smallest m, then smallest k, then the default (nu, q)
        assert_eq!(g[select_setting(&g, &rmse).unwrap()], CvSetting { nu: 3.0, q: 0.90, k: 1.0, m: 50 });
        let mut r = rmse.clone();
        r[5] = 0.5;
        assert_eq!(select_setting(&g, &r), Some(5));
        let one = vec![CvSetting { nu: 10.0, q: 0.75, k: 3.0, m: 7 }];
        assert_eq!(select_setting(&one, &[2.0]), Some(0));
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(manifest_path(Path::new("a/b.bart")), PathBuf::from("a/b.bart.manifest.json"));
    }

    #[test]
    fn cartesian_product() {
        let c = cartesian(&[vec![1.0, 2.0], vec![3.0, 4.0, 5.0]]);
        assert_eq!(c.len(), 6);
        assert_eq!(c[4], vec![2.0, 4.0]);
    }
}
