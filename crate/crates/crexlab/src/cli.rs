//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crexlab_core::{
    draw_minrssu, draw_srs, Discrimination, Error, EstimatorSpec, Evaluation, Measures, OrderStatistics,
    ParametricDistribution,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{load_config, preset, PRESETS};
use crate::csv_io::{self, NumberFormat, Sample};
use crate::simulation::{
    calibrate_parameter, default_calibration_key, run_grid, with_threads, BiasConvention, Cell, EstimatorGrid,
    SimulationConfig, WGrid, DEFAULT_REPLICATIONS, DEFAULT_SEED,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CREXLAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{failed} of {total} cells failed")]
    PartialGrid { failed: usize, total: usize },
}

impl CliError {
    /// 2 for usage/config problems, 3 for numeric divergence, 4 for a
    /// partially failed grid.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Divergence(_)) => 3,
            CliError::PartialGrid { .. } => 4,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "crexlab",
    version,
    about = "Cumulative residual extropy under SRS and MinRSSU designs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a theoretical measure of a distribution
    Measure(MeasureArgs),
    /// Evaluate estimators on a drawn or imported sample
    Estimate(EstimateArgs),
    /// Run a Monte Carlo bias/RMSE grid
    Simulate(SimulateArgs),
    /// Evaluate the survival-based discrimination measure
    Discriminate(DiscriminateArgs),
    /// Fit a distribution parameter to a target (bias, RMSE) pair
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Significant digits for printed numbers
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    /// Print numbers at full round-trip precision
    #[arg(long)]
    pub raw: bool,
}

impl OutputArgs {
    fn number_format(&self) -> NumberFormat {
        if self.raw {
            NumberFormat::Raw
        } else {
            NumberFormat::Significant(self.precision)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Design {
    /// CREX of the minimum of m draws (m = 1 is the plain CREX)
    Single,
    /// SRS design CREX
    Srs,
    /// MinRSSU design CREX
    Minrssu,
    /// Residual-life CREX at age t; with m > 1 both design values
    Dynamic,
    /// Extropy of the density
    Extropy,
    /// Cumulative extropy
    Cumulative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridFormat {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Distribution, e.g. exp:rate=1 or unif:a=0,b=1
    #[arg(long)]
    pub dist: String,
    #[arg(long, value_enum, default_value_t = Design::Single)]
    pub design: Design,
    /// Design size, or set size of the minimum for --design single
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Age for --design dynamic
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Integrate numerically even when a closed form exists
    #[arg(long)]
    pub quadrature: bool,
    #[arg(long, value_enum, default_value_t = TextFormat::Table)]
    pub format: TextFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleDesign {
    Srs,
    Minrssu,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Estimator spec, e.g. rn, rmn:w=-2, lstat_adj:family=exp,w=0 (repeatable)
    #[arg(long = "estimator", required = true)]
    pub estimators: Vec<String>,
    /// Read the sample from CSV (`cycle,set_size,value` or `value`)
    #[arg(long, conflicts_with_all = ["dist", "design", "l", "n", "seed"])]
    pub input: Option<PathBuf>,
    /// Distribution to draw from
    #[arg(long, required_unless_present = "input")]
    pub dist: Option<String>,
    #[arg(long, value_enum)]
    pub design: Option<SampleDesign>,
    /// Sets per cycle; for SRS input, the m used by adjusted estimators
    #[arg(long)]
    pub m: Option<usize>,
    /// Cycles
    #[arg(long)]
    pub l: Option<usize>,
    /// SRS size (defaults to m·l)
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the sample used to this CSV file
    #[arg(long)]
    pub export_sample: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TextFormat::Table)]
    pub format: TextFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML grid description
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in grid (exp, exp-spacing, exp-lstat, unif..., beta...)
    #[arg(long)]
    pub preset: Option<String>,
    /// Re-read a results CSV instead of simulating
    #[arg(long, conflicts_with_all = ["config", "preset", "dists", "m", "l", "estimators", "reps", "seed", "convention"])]
    pub input: Option<PathBuf>,
    /// Distribution (repeatable)
    #[arg(long = "dist")]
    pub dists: Vec<String>,
    /// Comma-separated set counts
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Comma-separated cycle counts
    #[arg(long, value_delimiter = ',')]
    pub l: Vec<usize>,
    /// Estimator spec with its w, e.g. rmn:w=-2 (repeatable)
    #[arg(long = "estimator")]
    pub estimators: Vec<String>,
    /// Replications per cell
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// estimate-minus-truth or truth-minus-estimate
    #[arg(long)]
    pub convention: Option<BiasConvention>,
    /// Worker threads (capped by CREXLAB_THREADS)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GridFormat::Csv)]
    pub format: GridFormat,
    #[command(flatten)]
    pub numbers: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiscriminationMode {
    /// Minimum of i draws against the parent
    MinVsParent,
    /// MinRSSU design against SRS design of size m
    Designs,
}

#[derive(Debug, Args)]
pub struct DiscriminateArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, value_enum, default_value_t = DiscriminationMode::MinVsParent)]
    pub mode: DiscriminationMode,
    /// Set size (min-vs-parent) or design size (designs)
    #[arg(long, visible_alias = "m", default_value_t = 1)]
    pub i: u32,
    /// Integrate numerically even when a closed form exists
    #[arg(long)]
    pub quadrature: bool,
    #[arg(long, value_enum, default_value_t = TextFormat::Table)]
    pub format: TextFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Distribution whose parameter is varied
    #[arg(long)]
    pub dist: String,
    /// Parameter to vary (default: rate, b or alpha by family)
    #[arg(long)]
    pub param: Option<String>,
    /// Grid as lo:hi:count or a comma-separated list
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub estimator: String,
    #[arg(long, allow_hyphen_values = true)]
    pub target_bias: f64,
    #[arg(long)]
    pub target_rmse: f64,
    /// Replications per grid point
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (capped by CREXLAB_THREADS)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Print every grid point, not just the best
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value_t = TextFormat::Table)]
    pub format: TextFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Measure(a) => measure(&a, &mut out),
        Command::Estimate(a) => estimate(&a, &mut out),
        Command::Simulate(a) => simulate(&a, &mut out),
        Command::Discriminate(a) => discriminate(&a, &mut out),
        Command::Calibrate(a) => calibrate(&a, &mut out),
    };
    let flushed = out.flush();
    match result.and(flushed.map_err(CliError::from)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("crexlab: {e}");
            e.exit_code()
        }
    }
}

fn parse_dist(s: &str) -> Result<ParametricDistribution, CliError> {
    Ok(s.parse::<ParametricDistribution>()?)
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let cap = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };
    Ok(match (flag, cap) {
        (Some(f), Some(c)) => Some(f.min(c)),
        (f, c) => f.or(c),
    })
}

fn write_table<W: Write + ?Sized>(out: &mut W, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for r in rows {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

fn write_json<W: Write + ?Sized, T: Serialize>(out: &mut W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct MeasureLine {
    measure: &'static str,
    distribution: String,
    m: u32,
    t: Option<f64>,
    value: f64,
    method: &'static str,
    error_bound: f64,
}

fn measure<W: Write>(a: &MeasureArgs, out: &mut W) -> Result<(), CliError> {
    let d = parse_dist(&a.dist)?;
    let measures = if a.quadrature {
        Measures::quadrature_only()
    } else {
        Measures::default()
    };
    let line = |measure, m, t, v: crexlab_core::CrexValue| MeasureLine {
        measure,
        distribution: d.to_string(),
        m,
        t,
        value: v.value,
        method: v.method.as_str(),
        error_bound: v.abs_error_bound,
    };
    let lines = match a.design {
        Design::Single => vec![line("crex", a.m, None, measures.crex_min_order_stat(&d, a.m)?)],
        Design::Srs => vec![line("srs", a.m, None, measures.crex_srs_design(&d, a.m)?)],
        Design::Minrssu => vec![line("minrssu", a.m, None, measures.crex_minrssu_design(&d, a.m)?)],
        Design::Dynamic if a.m == 1 => vec![line("dynamic", 1, Some(a.t), measures.dynamic_crex(&d, a.t)?)],
        Design::Dynamic => {
            let (mr, srs) = measures.dynamic_crex_designs(&d, a.m, a.t)?;
            vec![
                line("dynamic-minrssu", a.m, Some(a.t), mr),
                line("dynamic-srs", a.m, Some(a.t), srs),
            ]
        }
        Design::Extropy => vec![line("extropy", 1, None, measures.extropy(&d)?)],
        Design::Cumulative => vec![line("cumulative-extropy", 1, None, measures.cumulative_extropy(&d)?)],
    };
    match a.format {
        TextFormat::Json => write_json(out, &lines),
        TextFormat::Table => {
            let f = a.output.number_format();
            let rows: Vec<Vec<String>> = lines
                .iter()
                .map(|l| {
                    vec![
                        l.measure.to_string(),
                        l.distribution.clone(),
                        l.m.to_string(),
                        l.t.map(|t| f.format(t)).unwrap_or_else(|| "-".into()),
                        f.format(l.value),
                        l.method.to_string(),
                        f.format(l.error_bound),
                    ]
                })
                .collect();
            Ok(write_table(
                out,
                &["measure", "distribution", "m", "t", "value", "method", "error_bound"],
                &rows,
            )?)
        }
    }
}

#[derive(Debug, Serialize)]
struct EstimateLine {
    estimator: String,
    n: usize,
    m: usize,
    value: f64,
}

fn estimate<W: Write>(a: &EstimateArgs, out: &mut W) -> Result<(), CliError> {
    let specs: Vec<EstimatorSpec> = a
        .estimators
        .iter()
        .map(|s| s.parse::<EstimatorSpec>())
        .collect::<Result<_, _>>()?;
    let sample = match &a.input {
        Some(path) => csv_io::read_sample(File::open(path)?)?,
        None => {
            let d = parse_dist(a.dist.as_deref().expect("required without --input"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(DEFAULT_SEED));
            let design = a.design.unwrap_or(if specs.iter().all(|s| s.kind().uses_srs()) {
                SampleDesign::Srs
            } else {
                SampleDesign::Minrssu
            });
            let (m, l) = (a.m.unwrap_or(1), a.l.unwrap_or(1));
            match design {
                SampleDesign::Srs => Sample::Srs(draw_srs(&d, a.n.unwrap_or(m * l), &mut rng)),
                SampleDesign::Minrssu => {
                    if a.n.is_some() {
                        return Err(CliError::Usage("--n applies to SRS samples; use --m and --l".into()));
                    }
                    Sample::MinRssu(draw_minrssu(&d, m, l, &mut rng)?)
                }
            }
        }
    };
    if let Some(path) = &a.export_sample {
        let file = BufWriter::new(File::create(path)?);
        match &sample {
            Sample::MinRssu(s) => csv_io::write_minrssu_sample(file, s, NumberFormat::Raw)?,
            Sample::Srs(v) => csv_io::write_srs_sample(file, v, NumberFormat::Raw)?,
        }
    }
    let (pooled, m) = match sample {
        Sample::MinRssu(s) => {
            if a.m.is_some_and(|m| m != s.m()) {
                return Err(CliError::Usage(format!(
                    "--m {} disagrees with the sample's m = {}",
                    a.m.unwrap(),
                    s.m()
                )));
            }
            let m = s.m();
            (s.pooled_order_statistics(), m)
        }
        Sample::Srs(v) => (OrderStatistics::from_unsorted(v)?, a.m.unwrap_or(1)),
    };
    let lines = specs
        .iter()
        .map(|spec| {
            Ok(EstimateLine {
                estimator: spec.to_string(),
                n: pooled.len(),
                m,
                value: spec.evaluate(&pooled, m)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    match a.format {
        TextFormat::Json => write_json(out, &lines),
        TextFormat::Table => {
            let f = a.output.number_format();
            let rows: Vec<Vec<String>> = lines
                .iter()
                .map(|l| vec![l.estimator.clone(), l.n.to_string(), l.m.to_string(), f.format(l.value)])
                .collect();
            Ok(write_table(out, &["estimator", "n", "m", "value"], &rows)?)
        }
    }
}

fn simulation_config(a: &SimulateArgs) -> Result<SimulationConfig, CliError> {
    let mut cfg = match (&a.config, &a.preset) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => preset(name)
            .ok_or_else(|| CliError::Usage(format!("unknown preset `{name}` (known: {})", PRESETS.join(", "))))?,
        (None, None) => {
            if a.dists.is_empty() || a.estimators.is_empty() {
                return Err(CliError::Usage(
                    "give --config, --preset, or at least one --dist and --estimator".into(),
                ));
            }
            SimulationConfig {
                distributions: Vec::new(),
                m: vec![2, 3, 4, 5],
                l: vec![2, 3],
                estimators: Vec::new(),
                replications: DEFAULT_REPLICATIONS,
                seed: DEFAULT_SEED,
                convention: BiasConvention::default(),
            }
        }
    };
    if !a.dists.is_empty() {
        cfg.distributions = a.dists.iter().map(|s| parse_dist(s)).collect::<Result<_, _>>()?;
    }
    if !a.m.is_empty() {
        cfg.m = a.m.clone();
    }
    if !a.l.is_empty() {
        cfg.l = a.l.clone();
    }
    if !a.estimators.is_empty() {
        cfg.estimators = a
            .estimators
            .iter()
            .map(|s| {
                let spec: EstimatorSpec = s.parse()?;
                Ok(EstimatorGrid::new(
                    spec.label(),
                    spec.w().map_or(WGrid::None, |w| WGrid::List(vec![w])),
                ))
            })
            .collect::<Result<_, Error>>()?;
    }
    if let Some(r) = a.reps {
        cfg.replications = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(c) = a.convention {
        cfg.convention = c;
    }
    cfg.groups()?;
    Ok(cfg)
}

fn simulate<W: Write>(a: &SimulateArgs, stdout: &mut W) -> Result<(), CliError> {
    let (rows, failures, comments) = match &a.input {
        Some(path) => (csv_io::read_rows(File::open(path)?)?, Vec::new(), Vec::new()),
        None => {
            let cfg = simulation_config(a)?;
            let threads = threads(a.threads)?;
            let outcome = with_threads(threads, || run_grid(&cfg))?;
            let seed_note = if a.seed.is_none() && a.config.is_none() && cfg.seed == DEFAULT_SEED {
                " (default)"
            } else {
                ""
            };
            let comments = vec![format!(
                "crexlab simulate seed={}{seed_note} reps={} convention={}",
                cfg.seed, cfg.replications, cfg.convention
            )];
            (outcome.rows, outcome.failures, comments)
        }
    };
    for f in &failures {
        eprintln!("crexlab: cell failed: {f}");
    }
    let mut file;
    let out: &mut dyn Write = match &a.output {
        Some(path) => {
            file = BufWriter::new(File::create(path)?);
            &mut file
        }
        None => stdout,
    };
    let fmt = a.numbers.number_format();
    match a.format {
        GridFormat::Csv => csv_io::write_rows(&mut *out, &rows, fmt, &comments)?,
        GridFormat::Json => write_json(&mut *out, &rows)?,
        GridFormat::Table => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.distribution_spec(),
                        r.estimator.clone(),
                        r.m.to_string(),
                        r.l.to_string(),
                        r.w.map_or_else(|| "-".to_string(), |w| w.to_string()),
                        fmt.format(r.true_value),
                        fmt.format(r.bias),
                        fmt.format(r.rmse),
                        fmt.format(r.mc_se),
                    ]
                })
                .collect();
            write_table(
                &mut *out,
                &[
                    "distribution", "estimator", "m", "l", "w", "true_value", "bias", "rmse", "mc_se",
                ],
                &table,
            )?;
        }
    }
    out.flush()?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::PartialGrid {
            failed: failures.len(),
            total: failures.len() + rows.len(),
        })
    }
}

#[derive(Debug, Serialize)]
struct DiscriminationLine {
    mode: &'static str,
    distribution: String,
    size: u32,
    value: f64,
    method: &'static str,
}

fn discriminate<W: Write>(a: &DiscriminateArgs, out: &mut W) -> Result<(), CliError> {
    let d = parse_dist(&a.dist)?;
    let disc = Discrimination {
        evaluation: if a.quadrature {
            Evaluation::Quadrature
        } else {
            Evaluation::Auto
        },
        ..Discrimination::default()
    };
    let (mode, v) = match a.mode {
        DiscriminationMode::MinVsParent => ("min-vs-parent", disc.min_vs_parent(&d, a.i)?),
        DiscriminationMode::Designs => ("designs", disc.designs(&d, a.i)?),
    };
    let line = DiscriminationLine {
        mode,
        distribution: d.to_string(),
        size: v.i_or_m,
        value: v.value,
        method: v.method.as_str(),
    };
    match a.format {
        TextFormat::Json => write_json(out, &line),
        TextFormat::Table => {
            let f = a.output.number_format();
            Ok(write_table(
                out,
                &["mode", "distribution", "size", "value", "method"],
                &[vec![
                    line.mode.to_string(),
                    line.distribution,
                    line.size.to_string(),
                    f.format(line.value),
                    line.method.to_string(),
                ]],
            )?)
        }
    }
}

/// Parses `lo:hi:count` (inclusive, evenly spaced) or `v1,v2,...`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("invalid grid `{s}` (expected lo:hi:count or v1,v2,...)"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let grid = match parts.as_slice() {
        [lo, hi, count] => {
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            let count: usize = count.parse().map_err(|_| bad())?;
            match count {
                0 => return Err(bad()),
                1 => vec![lo],
                _ => (0..count)
                    .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                    .collect(),
            }
        }
        [list] => list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

fn calibrate<W: Write>(a: &CalibrateArgs, out: &mut W) -> Result<(), CliError> {
    let d = parse_dist(&a.dist)?;
    let cell = Cell {
        distribution: d,
        m: a.m,
        l: a.l,
        estimator: a.estimator.parse()?,
    };
    let key = a
        .param
        .clone()
        .unwrap_or_else(|| default_calibration_key(&d).to_string());
    let grid = parse_grid(&a.grid)?;
    let threads = threads(a.threads)?;
    let result = with_threads(threads, || {
        calibrate_parameter(&cell, &key, &grid, (a.target_bias, a.target_rmse), a.reps, a.seed)
    })?;
    match a.format {
        TextFormat::Json => write_json(out, &result),
        TextFormat::Table => {
            let f = a.output.number_format();
            let points = if a.all {
                result.points.clone()
            } else {
                vec![result.best]
            };
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| {
                    vec![
                        key.clone(),
                        f.format(p.parameter),
                        p.convention.to_string(),
                        f.format(p.bias),
                        f.format(p.rmse),
                        f.format(p.residual),
                    ]
                })
                .collect();
            Ok(write_table(
                out,
                &["param", "value", "convention", "bias", "rmse", "residual"],
                &rows,
            )?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.5:1.5:3").unwrap(), vec![0.5, 1.0, 1.5]);
        assert_eq!(parse_grid("2").unwrap(), vec![2.0]);
        assert_eq!(parse_grid("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_grid("1:1:1").unwrap(), vec![1.0]);
        for bad in ["", "1:2", "1:2:0", "a,b", "1:2:x"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Core(Error::Divergence("x".into())).exit_code(), 3);
        assert_eq!(CliError::Core(Error::Parse("x".into())).exit_code(), 2);
        assert_eq!(CliError::PartialGrid { failed: 1, total: 2 }.exit_code(), 4);
    }
}
