//! `krylov` — batch experiment runner for circuit spread complexity.
//!
//! Every experiment writes a series CSV (`t,c_mean,c_stderr,n_samples`) and
//! a JSON summary/manifest. Results are deterministic in (config, seed) and
//! independent of the worker count.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use krylov_circuits::error::Error as CoreError;
use krylov_circuits::gaussian::{BlockEnsemble, GaussianMode};
use krylov_circuits::krylov::{default_window, detect_saturation, DEFAULT_SATURATION_REL_TOL};
use krylov_circuits::state::{Boundary, MeasurementSchedule};
use krylov_circuits::{analytics, runner, spins, GateEnsemble};

use config::FileConfig;
use output::{write_series, write_summary, SummaryBuilder};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// exit codes: 2 config, 3 resource cap, 4 numerical inconsistency
const EXIT_CONFIG: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "krylov", version, about = "Krylov spread complexity of random circuits")]
struct Cli {
    /// Master seed; per-realization streams derive from (seed, index).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (default: all cores). Never affects results.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for series/summary files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key = value config file; explicit CLI flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brickwork random unitary circuit (fresh local Haar gates each step).
    Ruc(CircuitArgs),
    /// Brickwork circuit with randomized projective measurements.
    Monitored(MonitoredArgs),
    /// Floquet Gaussian (free-fermion) circuit in the Majorana picture.
    Gaussian(GaussianArgs),
    /// Floquet spin circuit with Haar or MBL gates.
    Spins(SpinsArgs),
    /// Saturation-value scan over the MBL coupling grid.
    MblScan(MblScanArgs),
    /// Closed-form evaluation; prints JSON to stdout.
    Analytics(AnalyticsArgs),
    /// Canned desk-scale reconstructions of the three figure classes.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Clone)]
struct CircuitArgs {
    /// Number of qubits.
    #[arg(long)]
    n: Option<usize>,
    /// Time steps (default 4·2^N).
    #[arg(long)]
    t: Option<usize>,
    /// Disorder realizations.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
    /// Plateau window for saturation detection (default max(10, T/10)).
    #[arg(long)]
    window: Option<usize>,
    /// Saturation threshold tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Clone)]
struct MonitoredArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Measurement rate in [0, 1].
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum)]
    schedule: Option<ScheduleArg>,
}

#[derive(Args, Clone)]
struct GaussianArgs {
    /// Number of fermionic pairs (even).
    #[arg(long)]
    n: Option<usize>,
    /// Time steps (default 512).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Tile one (P, Q) block pair across all sites.
    #[arg(long)]
    homogeneous: bool,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    ensemble: Option<BlockArg>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Clone)]
struct SpinsArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long, value_enum)]
    ensemble: Option<SpinEnsembleArg>,
    /// MBL coupling half-width (required for --ensemble mbl).
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Args, Clone)]
struct MblScanArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Grid as comma list "0.05,0.1,..." or range "start:stop:step".
    #[arg(long)]
    h_grid: Option<String>,
}

#[derive(Args, Clone)]
struct AnalyticsArgs {
    #[command(subcommand)]
    formula: Formula,
}

#[derive(Subcommand, Clone)]
enum Formula {
    /// P(n, D): probability n uniform draws cover all D basis states.
    Coverage {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
    },
    /// P(n, m): probability of exactly m distinct states in n draws.
    PartialCoverage {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    /// Smallest n with P(n, D) >= 1 - epsilon, plus the analytic proxy.
    SaturationBound {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Modal minimal-complexity estimate at measurement rate 1.
    MinComplexity {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        t: u64,
    },
    /// Expected Haar complexity t - t(t-1)/(2D), plateau D/2.
    ExpectedComplexity {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        t: u64,
    },
}

#[derive(Args, Clone)]
struct ReproduceArgs {
    #[arg(value_enum)]
    target: ReproduceTarget,
}

#[derive(ValueEnum, Clone, Copy)]
enum ReproduceTarget {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BoundaryArg {
    Open,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScheduleArg {
    PerHalfLayer,
    PerStep,
}

impl From<ScheduleArg> for MeasurementSchedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::PerHalfLayer => MeasurementSchedule::PerHalfLayer,
            ScheduleArg::PerStep => MeasurementSchedule::PerStep,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    SingleParticle,
    CovarianceHs,
}

impl From<ModeArg> for GaussianMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::SingleParticle => GaussianMode::SingleParticle,
            ModeArg::CovarianceHs => GaussianMode::CovarianceHs,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BlockArg {
    So4,
    O4,
}

impl From<BlockArg> for BlockEnsemble {
    fn from(b: BlockArg) -> Self {
        match b {
            BlockArg::So4 => BlockEnsemble::So4,
            BlockArg::O4 => BlockEnsemble::O4,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SpinEnsembleArg {
    Haar,
    Mbl,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: msg.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::ResourceCap(_) => EXIT_RESOURCE,
            CoreError::NumericalInconsistency(_) => EXIT_NUMERICAL,
            CoreError::InvalidParameter(_) | CoreError::InvalidDimension(_) => EXIT_CONFIG,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self { code: 1, message: format!("io: {e}") }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // single machine-parsable line on the diagnostic stream
            eprintln!("error: code={} message={:?}", e.code, e.message);
            ExitCode::from(e.code)
        }
    }
}

struct Global {
    seed: u64,
    out: PathBuf,
    file: FileConfig,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(CliError::config)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.get_u64("seed").map_err(CliError::config)?).unwrap_or(0);
    let workers = cli
        .workers
        .or(file.get_usize("workers").map_err(CliError::config)?);
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::config("workers must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::config(format!("worker pool: {e}")))?;
    }
    let out = cli
        .out
        .or(file.get_path("out"))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let global = Global { seed, out, file };

    match cli.command {
        Command::Ruc(args) => run_ruc(&global, &args),
        Command::Monitored(args) => run_monitored(&global, &args),
        Command::Gaussian(args) => run_gaussian(&global, &args),
        Command::Spins(args) => run_spins(&global, &args),
        Command::MblScan(args) => run_mbl_scan(&global, &args),
        Command::Analytics(args) => run_analytics(&args),
        Command::Reproduce(args) => run_reproduce(&global, &args),
    }
}

struct CircuitParams {
    n: usize,
    t: usize,
    samples: usize,
    boundary: Boundary,
    window: usize,
    rel_tol: f64,
}

fn resolve_circuit(
    global: &Global,
    args: &CircuitArgs,
    default_t: impl Fn(usize) -> usize,
    default_samples: usize,
) -> Result<CircuitParams, CliError> {
    let f = &global.file;
    let n = args
        .n
        .or(f.get_usize("n").map_err(CliError::config)?)
        .ok_or_else(|| CliError::config("missing required parameter: n"))?;
    let t = args
        .t
        .or(f.get_usize("t").map_err(CliError::config)?)
        .unwrap_or_else(|| default_t(n));
    let samples = args
        .samples
        .or(f.get_usize("samples").map_err(CliError::config)?)
        .unwrap_or(default_samples);
    let boundary = args
        .boundary
        .map(Boundary::from)
        .or(f.get_boundary("boundary").map_err(CliError::config)?)
        .unwrap_or(Boundary::Open);
    let window = args
        .window
        .or(f.get_usize("window").map_err(CliError::config)?)
        .unwrap_or_else(|| default_window(t));
    let rel_tol = args
        .rel_tol
        .or(f.get_f64("rel_tol").map_err(CliError::config)?)
        .unwrap_or(DEFAULT_SATURATION_REL_TOL);
    if t == 0 || samples == 0 {
        return Err(CliError::config("t and samples must be >= 1"));
    }
    Ok(CircuitParams { n, t, samples, boundary, window, rel_tol })
}

fn saturation_summary(
    series: &[krylov_circuits::ComplexitySeries],
    mean: &analytics::AveragedSeries,
    window: usize,
    rel_tol: f64,
) -> Result<(usize, f64, f64), CliError> {
    let (t_sat, c_inf) = detect_saturation(&mean.mean, window, rel_tol)?;
    let tails: Vec<f64> = series
        .iter()
        .map(|s| s.values[s.len() - window..].iter().sum::<f64>() / window as f64)
        .collect();
    let (_, stderr) = krylov_circuits::stats::mean_stderr(&tails);
    Ok((t_sat, c_inf, stderr))
}

fn run_ruc(global: &Global, args: &CircuitArgs) -> Result<(), CliError> {
    let p = resolve_circuit(global, args, |n| 4 * (1usize << n), 200)?;
    let start = Instant::now();
    let series = runner::ruc_realizations(p.n, p.t, p.samples, global.seed, p.boundary)?;
    let mean = analytics::aggregate(&series)?;
    let (t_sat, c_inf, c_inf_stderr) = saturation_summary(&series, &mean, p.window, p.rel_tol)?;
    write_series(&global.out, "ruc", &mean)?;
    write_summary(
        &global.out,
        SummaryBuilder::new("ruc", global.seed, start.elapsed())
            .param("n", p.n)
            .param("t", p.t)
            .param("samples", p.samples)
            .param("boundary", format!("{:?}", p.boundary).to_lowercase())
            .param("window", p.window)
            .param("rel_tol", p.rel_tol)
            .saturation(t_sat, c_inf, c_inf_stderr)
            .realizations(p.samples),
    )?;
    Ok(())
}

fn run_monitored(global: &Global, args: &MonitoredArgs) -> Result<(), CliError> {
    let p = resolve_circuit(global, &args.circuit, |n| 4 * (1usize << n), 200)?;
    let rate = args
        .p
        .or(global.file.get_f64("p").map_err(CliError::config)?)
        .ok_or_else(|| CliError::config("missing required parameter: p"))?;
    let schedule = args
        .schedule
        .map(MeasurementSchedule::from)
        .unwrap_or(MeasurementSchedule::PerHalfLayer);
    let start = Instant::now();
    let realizations = runner::monitored_realizations(
        p.n, p.t, rate, p.samples, global.seed, p.boundary, schedule,
    )?;
    let series: Vec<_> = realizations.into_iter().map(|r| r.series).collect();
    let mean = analytics::aggregate(&series)?;
    let (t_sat, c_inf, c_inf_stderr) = saturation_summary(&series, &mean, p.window, p.rel_tol)?;
    write_series(&global.out, "monitored", &mean)?;
    write_summary(
        &global.out,
        SummaryBuilder::new("monitored", global.seed, start.elapsed())
            .param("n", p.n)
            .param("t", p.t)
            .param("samples", p.samples)
            .param("p", rate)
            .param("schedule", format!("{schedule:?}"))
            .param("boundary", format!("{:?}", p.boundary).to_lowercase())
            .saturation(t_sat, c_inf, c_inf_stderr)
            .realizations(p.samples),
    )?;
    Ok(())
}

fn run_gaussian(global: &Global, args: &GaussianArgs) -> Result<(), CliError> {
    let f = &global.file;
    let n = args
        .n
        .or(f.get_usize("n").map_err(CliError::config)?)
        .ok_or_else(|| CliError::config("missing required parameter: n"))?;
    let t = args.t.or(f.get_usize("t").map_err(CliError::config)?).unwrap_or(512);
    let samples = args
        .samples
        .or(f.get_usize("samples").map_err(CliError::config)?)
        .unwrap_or(200);
    let homogeneous = args.homogeneous || f.get_bool("homogeneous").map_err(CliError::config)?.unwrap_or(false);
    let mode = args.mode.map(GaussianMode::from).unwrap_or(GaussianMode::SingleParticle);
    let ensemble = args.ensemble.map(BlockEnsemble::from).unwrap_or(BlockEnsemble::So4);
    let window = args.window.unwrap_or_else(|| default_window(t));
    let rel_tol = args.rel_tol.unwrap_or(DEFAULT_SATURATION_REL_TOL);
    let start = Instant::now();
    let series = runner::gaussian_realizations(n, t, samples, global.seed, homogeneous, ensemble, mode)?;
    let mean = analytics::aggregate(&series)?;
    let (t_sat, c_inf, c_inf_stderr) = saturation_summary(&series, &mean, window, rel_tol)?;
    write_series(&global.out, "gaussian", &mean)?;
    write_summary(
        &global.out,
        SummaryBuilder::new("gaussian", global.seed, start.elapsed())
            .param("n", n)
            .param("t", t)
            .param("samples", samples)
            .param("homogeneous", homogeneous)
            .param("mode", format!("{mode:?}"))
            .param("ensemble", format!("{ensemble:?}").to_lowercase())
            .saturation(t_sat, c_inf, c_inf_stderr)
            .realizations(samples),
    )?;
    Ok(())
}

fn run_spins(global: &Global, args: &SpinsArgs) -> Result<(), CliError> {
    let p = resolve_circuit(global, &args.circuit, |n| 4 * (1usize << n), 200)?;
    let kind = args.ensemble.unwrap_or(SpinEnsembleArg::Haar);
    let ensemble = match kind {
        SpinEnsembleArg::Haar => GateEnsemble::HaarU4,
        SpinEnsembleArg::Mbl => {
            let h = args
                .h
                .or(global.file.get_f64("h").map_err(CliError::config)?)
                .ok_or_else(|| CliError::config("--ensemble mbl requires --h"))?;
            GateEnsemble::mbl(h)?
        }
    };
    let start = Instant::now();
    let series = spins::floquet_realizations(
        p.n, ensemble, p.boundary, None, p.t, p.samples, global.seed, 0,
    )?;
    let mean = analytics::aggregate(&series)?;
    let (t_sat, c_inf, c_inf_stderr) = saturation_summary(&series, &mean, p.window, p.rel_tol)?;
    write_series(&global.out, "spins", &mean)?;
    let mut summary = SummaryBuilder::new("spins", global.seed, start.elapsed())
        .param("n", p.n)
        .param("t", p.t)
        .param("samples", p.samples)
        .param("ensemble", match kind {
            SpinEnsembleArg::Haar => "haar".to_string(),
            SpinEnsembleArg::Mbl => "mbl".to_string(),
        })
        .param("boundary", format!("{:?}", p.boundary).to_lowercase())
        .saturation(t_sat, c_inf, c_inf_stderr)
        .realizations(p.samples);
    if let GateEnsemble::Mbl { h } = ensemble {
        summary = summary.param("h", h);
    }
    write_summary(&global.out, summary)?;
    Ok(())
}

fn parse_h_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::config("h grid range must be start:stop:step"));
        }
        let start: f64 = parts[0].parse().map_err(|_| CliError::config("bad h grid start"))?;
        let stop: f64 = parts[1].parse().map_err(|_| CliError::config("bad h grid stop"))?;
        let step: f64 = parts[2].parse().map_err(|_| CliError::config("bad h grid step"))?;
        if step <= 0.0 || stop < start {
            return Err(CliError::config("h grid range must ascend with positive step"));
        }
        let mut grid = Vec::new();
        let mut h = start;
        while h <= stop + 1e-12 {
            grid.push(h);
            h += step;
        }
        Ok(grid)
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::config("bad h grid value")))
            .collect()
    }
}

fn run_mbl_scan(global: &Global, args: &MblScanArgs) -> Result<(), CliError> {
    let p = resolve_circuit(global, &args.circuit, |n| 4 * (1usize << n), 200)?;
    let grid_spec = args
        .h_grid
        .clone()
        .or(global.file.get_string("h_grid"))
        .ok_or_else(|| CliError::config("missing required parameter: h-grid"))?;
    let grid = parse_h_grid(&grid_spec)?;
    let start = Instant::now();
    let scan = spins::scan_mbl_transition(p.n, &grid, p.t, p.samples, global.seed, p.boundary)?;

    // one series-style CSV over the h grid
    let path = global.out.join("mbl_scan_series.csv");
    let mut csv = String::from("h,c_inf,c_inf_stderr,t_sat,n_samples\n");
    for i in 0..scan.h_grid.len() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            scan.h_grid[i], scan.c_inf[i], scan.c_inf_stderr[i], scan.t_sat[i], p.samples
        ));
    }
    std::fs::write(&path, csv)?;

    let last = scan.h_grid.len() - 1;
    let mut summary = SummaryBuilder::new("mbl_scan", global.seed, start.elapsed())
        .param("n", p.n)
        .param("t", p.t)
        .param("samples", p.samples)
        .param("h_grid", grid_spec)
        .saturation(scan.t_sat[last], scan.c_inf[last], scan.c_inf_stderr[last])
        .realizations(p.samples);
    if let Some(h0) = scan.h0 {
        summary = summary.h0(h0);
    }
    write_summary(&global.out, summary)?;
    if scan.h0.is_none() {
        return Err(CliError {
            code: EXIT_NUMERICAL,
            message: "h grid does not bracket the half-maximum crossing (partial results written)"
                .into(),
        });
    }
    Ok(())
}

fn run_analytics(args: &AnalyticsArgs) -> Result<(), CliError> {
    let json = match &args.formula {
        Formula::Coverage { d, n } => serde_json::json!(analytics::coverage_probability(*n, *d)?),
        Formula::PartialCoverage { d, n, m } => {
            serde_json::json!(analytics::partial_coverage_probability(*n, *m, *d)?)
        }
        Formula::SaturationBound { d, epsilon } => {
            serde_json::to_value(analytics::saturation_time_bound(*d, *epsilon)?).unwrap()
        }
        Formula::MinComplexity { d, t } => {
            serde_json::to_value(analytics::min_complexity_estimate(*t, *d)?).unwrap()
        }
        Formula::ExpectedComplexity { d, t } => {
            serde_json::json!(analytics::expected_complexity_haar(*t, *d))
        }
    };
    println!("{json}");
    Ok(())
}

fn run_reproduce(global: &Global, args: &ReproduceArgs) -> Result<(), CliError> {
    match args.target {
        ReproduceTarget::Fig1 => {
            // complexity profile + saturation for a small brickwork circuit
            for n in [6usize, 7, 8] {
                let t = 4 * (1usize << n);
                let sub = Global {
                    seed: global.seed,
                    out: global.out.join(format!("fig1_n{n}")),
                    file: FileConfig::default(),
                };
                std::fs::create_dir_all(&sub.out)?;
                run_ruc(
                    &sub,
                    &CircuitArgs {
                        n: Some(n),
                        t: Some(t),
                        samples: Some(if n >= 8 { 50 } else { 100 }),
                        boundary: None,
                        window: None,
                        rel_tol: None,
                    },
                )?;
            }
        }
        ReproduceTarget::Fig2 => {
            for homogeneous in [true, false] {
                let label = if homogeneous { "homogeneous" } else { "inhomogeneous" };
                let sub = Global {
                    seed: global.seed,
                    out: global.out.join(format!("fig2_{label}")),
                    file: FileConfig::default(),
                };
                std::fs::create_dir_all(&sub.out)?;
                run_gaussian(
                    &sub,
                    &GaussianArgs {
                        n: Some(40),
                        t: Some(512),
                        samples: Some(100),
                        homogeneous,
                        mode: None,
                        ensemble: None,
                        window: None,
                        rel_tol: None,
                    },
                )?;
            }
        }
        ReproduceTarget::Fig3 => {
            let sub = Global {
                seed: global.seed,
                out: global.out.join("fig3"),
                file: FileConfig::default(),
            };
            std::fs::create_dir_all(&sub.out)?;
            run_mbl_scan(
                &sub,
                &MblScanArgs {
                    circuit: CircuitArgs {
                        n: Some(6),
                        t: None,
                        samples: Some(100),
                        boundary: None,
                        window: None,
                        rel_tol: None,
                    },
                    h_grid: Some("0.05:0.6:0.05".into()),
                },
            )?;
        }
    }
    Ok(())
}
