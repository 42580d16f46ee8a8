//! Seeded Monte Carlo estimation of bias and RMSE for the CREX estimators.
//!
//! A grid is the Cartesian product of distributions, set counts `m`, cycle
//! counts `l` and estimator/`w` choices. All estimators of one
//! `(distribution, m, l)` group are evaluated on the same replications, so
//! `R_n` and `R_{m,n}` in a row are compared on identical samples.
//!
//! Replication `r` of a group draws from a ChaCha8 generator keyed by a hash
//! of `(seed, distribution, m, l)` and positioned on stream `r`. Replications
//! may run on any number of threads; estimates are gathered in replication
//! order before any summation, so results are bit-identical across thread
//! counts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crexlab_core::{
    crex, draw_minrssu, draw_srs, CompensatedSum, Error, EstimatorSpec, OrderStatistics, ParametricDistribution,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

/// Replications per cell when none is given.
pub const DEFAULT_REPLICATIONS: usize = 5000;

/// Sign of the reported bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasConvention {
    /// `mean(estimate) − truth`.
    #[default]
    EstimateMinusTruth,
    /// `truth − mean(estimate)`.
    TruthMinusEstimate,
}

impl BiasConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            BiasConvention::EstimateMinusTruth => "estimate-minus-truth",
            BiasConvention::TruthMinusEstimate => "truth-minus-estimate",
        }
    }

    fn apply(&self, estimate_minus_truth: f64) -> f64 {
        match self {
            BiasConvention::EstimateMinusTruth => estimate_minus_truth,
            BiasConvention::TruthMinusEstimate => -estimate_minus_truth,
        }
    }
}

impl fmt::Display for BiasConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BiasConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "estimate-minus-truth" | "em" => Ok(BiasConvention::EstimateMinusTruth),
            "truth-minus-estimate" | "te" => Ok(BiasConvention::TruthMinusEstimate),
            other => Err(format!(
                "unknown bias convention `{other}` (expected estimate-minus-truth or truth-minus-estimate)"
            )),
        }
    }
}

/// The `w` values to run for one estimator.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum WGrid {
    /// The estimator takes no `w`.
    #[default]
    None,
    /// The same list for every `m`.
    List(Vec<i64>),
    /// A list per `m`; an `m` without an entry runs no cells.
    ByM(BTreeMap<usize, Vec<i64>>),
}

impl WGrid {
    /// `w` values for design size `m`; `[None]` when the estimator takes none.
    pub fn values(&self, m: usize) -> Vec<Option<i64>> {
        match self {
            WGrid::None => vec![None],
            WGrid::List(v) => v.iter().copied().map(Some).collect(),
            WGrid::ByM(map) => map
                .get(&m)
                .map_or_else(Vec::new, |v| v.iter().copied().map(Some).collect()),
        }
    }
}

/// An estimator label (see [`EstimatorSpec::label`]) and its `w` values.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorGrid {
    pub label: String,
    pub w: WGrid,
}

impl EstimatorGrid {
    pub fn new(label: impl Into<String>, w: WGrid) -> Self {
        Self { label: label.into(), w }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub distributions: Vec<ParametricDistribution>,
    pub m: Vec<usize>,
    pub l: Vec<usize>,
    pub estimators: Vec<EstimatorGrid>,
    pub replications: usize,
    pub seed: u64,
    pub convention: BiasConvention,
}

impl SimulationConfig {
    /// Checks list contents and expands the grid into groups sharing samples.
    pub fn groups(&self) -> Result<Vec<CellGroup>, Error> {
        if self.replications == 0 {
            return Err(Error::Parameter("replications must be >= 1".into()));
        }
        if self.distributions.is_empty() || self.m.is_empty() || self.l.is_empty() || self.estimators.is_empty() {
            return Err(Error::Parameter(
                "distributions, m, l and estimators must all be nonempty".into(),
            ));
        }
        if let Some(bad) = self.m.iter().chain(&self.l).find(|&&v| v == 0) {
            return Err(Error::Parameter(format!("m and l values must be >= 1, got {bad}")));
        }
        let mut groups = Vec::new();
        for dist in &self.distributions {
            for &m in &self.m {
                for &l in &self.l {
                    let mut specs = Vec::new();
                    for est in &self.estimators {
                        for w in est.w.values(m) {
                            specs.push(EstimatorSpec::from_label(&est.label, w)?);
                        }
                    }
                    groups.push(CellGroup {
                        distribution: *dist,
                        m,
                        l,
                        specs,
                    });
                }
            }
        }
        Ok(groups)
    }
}

/// All estimator cells that share one `(distribution, m, l)` sample stream.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGroup {
    pub distribution: ParametricDistribution,
    pub m: usize,
    pub l: usize,
    pub specs: Vec<EstimatorSpec>,
}

/// A single grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub distribution: ParametricDistribution,
    pub m: usize,
    pub l: usize,
    pub estimator: EstimatorSpec,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} m={} l={} {}", self.distribution, self.m, self.l, self.estimator)
    }
}

/// One summarized cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub distribution: String,
    pub params: String,
    pub estimator: String,
    pub m: usize,
    pub l: usize,
    pub w: Option<i64>,
    pub reps: usize,
    pub seed: u64,
    pub true_value: f64,
    pub bias: f64,
    pub rmse: f64,
    pub mc_se: f64,
}

impl SimulationRow {
    pub fn distribution_spec(&self) -> String {
        format!("{}:{}", self.distribution, self.params)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{cell}: {source}")]
pub struct CellError {
    pub cell: String,
    pub source: Error,
}

/// Rows in grid order plus the cells that failed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridOutcome {
    pub rows: Vec<SimulationRow>,
    pub failures: Vec<CellError>,
}

/// Bias, RMSE and Monte Carlo standard error of `estimates` against `truth`.
///
/// RMSE is assembled as `sqrt(bias² + mean((e − ē)²))`, which equals the root
/// mean squared error and can never fall below `|bias|`.
pub fn summarize(cell: &Cell, estimates: &[f64], truth: f64, seed: u64, convention: BiasConvention) -> SimulationRow {
    let reps = estimates.len();
    let n = reps as f64;
    let mean = estimates.iter().copied().collect::<CompensatedSum>().value() / n;
    let centered_sq = estimates
        .iter()
        .map(|e| (e - mean) * (e - mean))
        .collect::<CompensatedSum>()
        .value();
    let raw_bias = mean - truth;
    let rmse = (raw_bias * raw_bias + centered_sq / n).sqrt();
    let mc_se = if reps > 1 {
        (centered_sq / (n - 1.0) / n).sqrt()
    } else {
        f64::NAN
    };
    SimulationRow {
        distribution: cell.distribution.family_name().to_string(),
        params: cell.distribution.params_string(),
        estimator: cell.estimator.label(),
        m: cell.m,
        l: cell.l,
        w: cell.estimator.w(),
        reps,
        seed,
        true_value: truth,
        bias: convention.apply(raw_bias),
        rmse,
        mc_se,
    }
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key of the sample stream of a `(distribution, m, l)` group.
fn group_key(seed: u64, dist: &ParametricDistribution, m: usize, l: usize, tag: &str) -> u64 {
    let text = format!("{dist}|{m}|{l}|{tag}");
    text.bytes().fold(mix64(seed), |h, b| mix64(h ^ u64::from(b)))
}

/// Generator for replication `rep` of a group.
pub fn replication_rng(seed: u64, dist: &ParametricDistribution, m: usize, l: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(group_key(seed, dist, m, l, "minrssu"));
    rng.set_stream(rep as u64);
    rng
}

fn srs_rng(seed: u64, dist: &ParametricDistribution, m: usize, l: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(group_key(seed, dist, m, l, "srs"));
    rng.set_stream(rep as u64);
    rng
}

/// Runs every cell of a group on shared replications.
pub fn run_group(
    group: &CellGroup,
    replications: usize,
    seed: u64,
    convention: BiasConvention,
) -> Vec<Result<SimulationRow, CellError>> {
    let cells: Vec<Cell> = group
        .specs
        .iter()
        .map(|&estimator| Cell {
            distribution: group.distribution,
            m: group.m,
            l: group.l,
            estimator,
        })
        .collect();
    let fail_all = |e: Error| {
        cells
            .iter()
            .map(|c| {
                Err(CellError {
                    cell: c.to_string(),
                    source: e.clone(),
                })
            })
            .collect()
    };
    if replications == 0 {
        return fail_all(Error::Parameter("replications must be >= 1".into()));
    }
    let truth = match crex(&group.distribution) {
        Ok(v) => v.value,
        Err(e) => return fail_all(e),
    };
    let needs_srs = group.specs.iter().any(|s| s.kind().uses_srs());
    let needs_minrssu = group.specs.iter().any(|s| !s.kind().uses_srs());
    let dist = group.distribution;
    let (m, l) = (group.m, group.l);

    let per_rep: Vec<Vec<Result<f64, Error>>> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let pooled = if needs_minrssu {
                let mut rng = replication_rng(seed, &dist, m, l, rep);
                Some(draw_minrssu(&dist, m, l, &mut rng).map(|s| s.pooled_order_statistics()))
            } else {
                None
            };
            let srs = if needs_srs {
                let mut rng = srs_rng(seed, &dist, m, l, rep);
                Some(OrderStatistics::from_unsorted(draw_srs(&dist, m * l, &mut rng)))
            } else {
                None
            };
            group
                .specs
                .iter()
                .map(|spec| {
                    let sample = if spec.kind().uses_srs() { &srs } else { &pooled };
                    match sample.as_ref().expect("drawn when needed") {
                        Ok(os) => spec.evaluate(os, m),
                        Err(e) => Err(e.clone()),
                    }
                })
                .collect()
        })
        .collect();

    cells
        .iter()
        .enumerate()
        .map(|(j, cell)| {
            let estimates = per_rep
                .iter()
                .map(|r| r[j].clone())
                .collect::<Result<Vec<f64>, Error>>()
                .map_err(|source| CellError {
                    cell: cell.to_string(),
                    source,
                })?;
            Ok(summarize(cell, &estimates, truth, seed, convention))
        })
        .collect()
}

/// Runs one cell; equal to the matching row of any grid containing it.
pub fn run_cell(
    cell: &Cell,
    replications: usize,
    seed: u64,
    convention: BiasConvention,
) -> Result<SimulationRow, CellError> {
    let group = CellGroup {
        distribution: cell.distribution,
        m: cell.m,
        l: cell.l,
        specs: vec![cell.estimator],
    };
    run_group(&group, replications, seed, convention)
        .pop()
        .expect("one cell in, one row out")
}

/// Runs the whole grid on the current rayon pool, continuing past failed cells.
pub fn run_grid(cfg: &SimulationConfig) -> Result<GridOutcome, Error> {
    let groups = cfg.groups()?;
    let mut outcome = GridOutcome::default();
    for group in &groups {
        for r in run_group(group, cfg.replications, cfg.seed, cfg.convention) {
            match r {
                Ok(row) => outcome.rows.push(row),
                Err(e) => outcome.failures.push(e),
            }
        }
    }
    Ok(outcome)
}

/// Runs `f` on a dedicated pool of `threads` workers (`None` uses rayon's default).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Replaces one parameter of `d`, keeping the others.
pub fn with_parameter(d: &ParametricDistribution, key: &str, value: f64) -> Result<ParametricDistribution, Error> {
    let key = match key.trim() {
        "lambda" => "rate",
        k => k,
    };
    let params = d.params_string();
    let mut found = false;
    let replaced: Vec<String> = params
        .split(',')
        .map(|pair| {
            let (k, v) = pair.split_once('=').expect("canonical key=value");
            if k == key {
                found = true;
                format!("{k}={value}")
            } else {
                format!("{k}={v}")
            }
        })
        .collect();
    if !found {
        return Err(Error::Parse(format!(
            "{} has no parameter `{key}` (has {params})",
            d.family_name()
        )));
    }
    format!("{}:{}", d.family_name(), replaced.join(",")).parse()
}

/// The parameter varied by default when calibrating a family.
pub fn default_calibration_key(d: &ParametricDistribution) -> &'static str {
    match d.family_name() {
        "exp" => "rate",
        "powerbeta" => "alpha",
        _ => "b",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub parameter: f64,
    pub convention: BiasConvention,
    pub bias: f64,
    pub rmse: f64,
    /// `(bias − target bias)² + (rmse − target rmse)²`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub key: String,
    pub best: CalibrationPoint,
    /// Every grid point under both conventions, grid order first.
    pub points: Vec<CalibrationPoint>,
}

/// Scans `grid` for the parameter value whose simulated `(bias, rmse)` is
/// closest to `target`, trying both bias conventions.
///
/// Grid points where the cell fails carry an infinite residual.
pub fn calibrate_parameter(
    cell: &Cell,
    key: &str,
    grid: &[f64],
    target: (f64, f64),
    replications: usize,
    seed: u64,
) -> Result<Calibration, Error> {
    if grid.is_empty() {
        return Err(Error::Parameter("calibration grid is empty".into()));
    }
    if !(target.0.is_finite() && target.1.is_finite()) {
        return Err(Error::Parameter("calibration target must be finite".into()));
    }
    let mut points = Vec::with_capacity(2 * grid.len());
    for &value in grid {
        let dist = with_parameter(&cell.distribution, key, value)?;
        let probe = Cell {
            distribution: dist,
            ..*cell
        };
        let row = run_cell(&probe, replications, seed, BiasConvention::EstimateMinusTruth);
        for convention in [BiasConvention::EstimateMinusTruth, BiasConvention::TruthMinusEstimate] {
            let point = match &row {
                Ok(r) => {
                    let bias = convention.apply(r.bias);
                    CalibrationPoint {
                        parameter: value,
                        convention,
                        bias,
                        rmse: r.rmse,
                        residual: (bias - target.0).powi(2) + (r.rmse - target.1).powi(2),
                    }
                }
                Err(_) => CalibrationPoint {
                    parameter: value,
                    convention,
                    bias: f64::NAN,
                    rmse: f64::NAN,
                    residual: f64::INFINITY,
                },
            };
            points.push(point);
        }
    }
    let best = *points
        .iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .expect("nonempty grid");
    Ok(Calibration {
        key: key.to_string(),
        best,
        points,
    })
}
