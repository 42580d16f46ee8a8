//! Simulation grids from TOML files and built-in presets.
//!
//! ```toml
//! preset = "exp-spacing"          # optional starting point
//! distributions = ["exp:rate=1"]
//! m = [2, 3, 4, 5]
//! l = [2, 3]
//! replications = 5000
//! seed = 42
//! convention = "estimate-minus-truth"
//!
//! [[estimators]]
//! name = "rmn"
//! w_by_m = { 2 = [-2, -1, 0, 1], 3 = [-1, 0, 1, 2] }
//!
//! [[estimators]]
//! name = "rn"
//! ```
//!
//! Fields given in the file replace those of the preset. An estimator takes
//! either `w` (one list for every `m`), `w_by_m`, or neither.

use std::collections::BTreeMap;
use std::path::Path;

use crexlab_core::{Error, ParametricDistribution};
use serde::Deserialize;

use crate::simulation::{BiasConvention, EstimatorGrid, SimulationConfig, WGrid, DEFAULT_REPLICATIONS, DEFAULT_SEED};

/// Preset names accepted by [`preset`].
pub const PRESETS: [&str; 9] = [
    "exp", "exp-spacing", "exp-lstat", "unif", "unif-spacing", "unif-lstat", "beta", "beta-spacing", "beta-lstat",
];

fn by_m(lists: [(usize, std::ops::RangeInclusive<i64>); 4]) -> WGrid {
    WGrid::ByM(lists.into_iter().map(|(m, r)| (m, r.collect())).collect())
}

/// `w ∈ {m−4, …, m−1}` for the spacing estimator.
fn spacing_w() -> WGrid {
    by_m([(2, -2..=1), (3, -1..=2), (4, 0..=3), (5, 1..=4)])
}

fn spacing_estimators() -> Vec<EstimatorGrid> {
    vec![
        EstimatorGrid::new("rmn", spacing_w()),
        EstimatorGrid::new("rn", WGrid::None),
    ]
}

fn lstat_estimators(family: &str) -> Vec<EstimatorGrid> {
    let w = match family {
        "exp" => by_m([(2, -11..=-8), (3, -7..=-4), (4, -3..=0), (5, 1..=4)]),
        "unif" => by_m([(2, -4..=-1), (3, -2..=1), (4, 0..=3), (5, 2..=5)]),
        _ => WGrid::List((-3..=0).collect()),
    };
    vec![
        EstimatorGrid::new(format!("lstat_adj:family={family}"), w),
        EstimatorGrid::new("lstat", WGrid::None),
    ]
}

/// Built-in grids over `m = 2..5`, `l = 2, 3` at the default distribution of
/// each family (`exp:rate=1`, `unif:a=0,b=1`, `powerbeta:alpha=2`).
///
/// `<family>-spacing` runs `R_{m,n}` and `R_n`, `<family>-lstat` the adjusted
/// and plain L-statistics, and `<family>` both.
pub fn preset(name: &str) -> Option<SimulationConfig> {
    let (family, part) = name.split_once('-').unwrap_or((name, "all"));
    let dist = match family {
        "exp" => "exp:rate=1",
        "unif" => "unif:a=0,b=1",
        "beta" => "powerbeta:alpha=2",
        _ => return None,
    };
    let estimators = match part {
        "spacing" => spacing_estimators(),
        "lstat" => lstat_estimators(family),
        "all" => spacing_estimators()
            .into_iter()
            .chain(lstat_estimators(family))
            .collect(),
        _ => return None,
    };
    Some(SimulationConfig {
        distributions: vec![dist.parse().expect("valid preset distribution")],
        m: vec![2, 3, 4, 5],
        l: vec![2, 3],
        estimators,
        replications: DEFAULT_REPLICATIONS,
        seed: DEFAULT_SEED,
        convention: BiasConvention::default(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: Option<String>,
    distributions: Option<Vec<String>>,
    m: Option<Vec<usize>>,
    l: Option<Vec<usize>>,
    estimators: Option<Vec<EstimatorEntry>>,
    replications: Option<usize>,
    seed: Option<u64>,
    convention: Option<BiasConvention>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimatorEntry {
    name: String,
    w: Option<Vec<i64>>,
    w_by_m: Option<BTreeMap<String, Vec<i64>>>,
}

impl EstimatorEntry {
    fn into_grid(self) -> Result<EstimatorGrid, Error> {
        let w = match (self.w, self.w_by_m) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse(format!(
                    "estimator {}: give w or w_by_m, not both",
                    self.name
                )))
            }
            (Some(list), None) => WGrid::List(list),
            (None, Some(map)) => WGrid::ByM(
                map.into_iter()
                    .map(|(k, v)| {
                        k.trim()
                            .parse::<usize>()
                            .map(|m| (m, v))
                            .map_err(|_| Error::Parse(format!("w_by_m key `{k}` is not a set count")))
                    })
                    .collect::<Result<_, _>>()?,
            ),
            (None, None) => WGrid::None,
        };
        Ok(EstimatorGrid::new(self.name, w))
    }
}

/// Parses a TOML grid description.
pub fn parse_config(text: &str) -> Result<SimulationConfig, Error> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut cfg = match &file.preset {
        Some(name) => preset(name)
            .ok_or_else(|| Error::Parse(format!("unknown preset `{name}` (known: {})", PRESETS.join(", "))))?,
        None => SimulationConfig {
            distributions: Vec::new(),
            m: vec![2, 3, 4, 5],
            l: vec![2, 3],
            estimators: Vec::new(),
            replications: DEFAULT_REPLICATIONS,
            seed: DEFAULT_SEED,
            convention: BiasConvention::default(),
        },
    };
    if let Some(d) = file.distributions {
        cfg.distributions = d
            .iter()
            .map(|s| s.parse::<ParametricDistribution>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(m) = file.m {
        cfg.m = m;
    }
    if let Some(l) = file.l {
        cfg.l = l;
    }
    if let Some(e) = file.estimators {
        cfg.estimators = e.into_iter().map(EstimatorEntry::into_grid).collect::<Result<_, _>>()?;
    }
    if let Some(r) = file.replications {
        cfg.replications = r;
    }
    if let Some(s) = file.seed {
        cfg.seed = s;
    }
    if let Some(c) = file.convention {
        cfg.convention = c;
    }
    cfg.groups()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SimulationConfig, Error> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
