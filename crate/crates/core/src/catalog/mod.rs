//! Named graph families and constructive procedures on them.

mod builders;
mod krpamm;
mod limits;
mod perturb;
mod random;
mod straighten;

pub use builders::{
    complete, cycle, fig_m3, figure8, flower, lasso, loop_dumbbell, n_star_long_short, path, perturbed_figure8,
    pumpkin, pumpkin_necklace, pumpkin_on_stick, star,
};
pub use krpamm::{krpamm_eigenfunction, krpamm_leaf_length, krpamm_lengthened, krpamm_ratio, krpamm_tree};
pub use limits::{
    convergence_csv, limit_compare, mode_edges, sup_difference, topology_placement, ConvergenceRow, LimitFamily,
    Placement, PlacementMode, RescaledFunction, PLACEMENT_DELTA_FLOOR, PLACEMENT_DELTA_START, SUPNORM_TOL,
};
pub use random::{random_graph, random_star, random_tree};
pub use perturb::{boundary_distinct_perturb, PairChange, Perturbation};
pub use straighten::{pendant_length, straighten_maxima, Straightening, TreatedVertex};

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    Path,
    Cycle,
    Pumpkin,
    Star,
    Flower,
    Complete,
    Lasso,
    Figure8,
    PerturbedFigure8,
    LoopDumbbell,
    KrpammTree,
    NStarLongShort,
    PumpkinOnStick,
    PumpkinNecklace,
    FigM3,
}

impl ExampleId {
    pub const ALL: [ExampleId; 15] = [
        ExampleId::Path,
        ExampleId::Cycle,
        ExampleId::Pumpkin,
        ExampleId::Star,
        ExampleId::Flower,
        ExampleId::Complete,
        ExampleId::Lasso,
        ExampleId::Figure8,
        ExampleId::PerturbedFigure8,
        ExampleId::LoopDumbbell,
        ExampleId::KrpammTree,
        ExampleId::NStarLongShort,
        ExampleId::PumpkinOnStick,
        ExampleId::PumpkinNecklace,
        ExampleId::FigM3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::Path => "path",
            ExampleId::Cycle => "cycle",
            ExampleId::Pumpkin => "pumpkin",
            ExampleId::Star => "star",
            ExampleId::Flower => "flower",
            ExampleId::Complete => "complete",
            ExampleId::Lasso => "lasso",
            ExampleId::Figure8 => "figure8",
            ExampleId::PerturbedFigure8 => "perturbed_figure8",
            ExampleId::LoopDumbbell => "loop_dumbbell",
            ExampleId::KrpammTree => "krpamm_tree",
            ExampleId::NStarLongShort => "n_star_long_short",
            ExampleId::PumpkinOnStick => "pumpkin_on_stick",
            ExampleId::PumpkinNecklace => "pumpkin_necklace",
            ExampleId::FigM3 => "fig_m3",
        }
    }

    /// Accepted parameter names and their defaults as written on the command line.
    pub fn parameters(self) -> &'static [(&'static str, &'static str)] {
        match self {
            ExampleId::Path => &[("L", "1"), ("lengths", "")],
            ExampleId::Cycle => &[("L", "1")],
            ExampleId::Pumpkin | ExampleId::Star => &[("E", "3"), ("L", "1"), ("lengths", "")],
            ExampleId::Flower => &[("petals", "2"), ("lengths", "")],
            ExampleId::Complete => &[("V", "4"), ("L", "1")],
            ExampleId::Lasso => &[("loop", "1"), ("tail", "1")],
            ExampleId::Figure8 => &[("l1", "1"), ("l2", "1")],
            ExampleId::PerturbedFigure8 => &[("eps", "0.05")],
            ExampleId::LoopDumbbell => &[("loop", "0.1"), ("L", "pi")],
            ExampleId::KrpammTree => &[("eps", "0.05"), ("m", "20"), ("delta", "0")],
            ExampleId::NStarLongShort => &[("n", "5"), ("eps", "0.1")],
            ExampleId::PumpkinOnStick => &[("s1", "1"), ("s2", "1"), ("lengths", "1:1:1")],
            ExampleId::PumpkinNecklace => &[("thickness", "4"), ("pumpkin", "0.1"), ("gap", "0.1"), ("arc", "2")],
            ExampleId::FigM3 => &[("lengths", "3:0.3:0.4:0.6:0.9")],
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

/// Example parameters as `name → text`; lists are colon-separated (`1:1.2`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params(pub BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `k=v` items; each item may hold several comma-separated pairs.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in items {
            for pair in item.as_ref().split(',').filter(|s| !s.trim().is_empty()) {
                let (k, v) = pair.split_once('=').ok_or_else(|| Error::BadParameter {
                    name: pair.to_string(),
                    reason: "expected name=value".into(),
                })?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str).filter(|s| !s.is_empty())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_f64(key, v),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::BadParameter {
                name: key.into(),
                reason: format!("expected a non-negative integer, got `{v}`"),
            }),
        }
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| v.split(':').map(|x| parse_f64(key, x)).collect())
            .transpose()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    let parsed = match v {
        "pi" => Some(PI),
        _ => v.strip_suffix("pi").map_or_else(
            || v.parse::<f64>().ok(),
            |m| m.trim_end_matches('*').parse::<f64>().ok().map(|x| x * PI),
        ),
    };
    parsed.filter(|x| x.is_finite()).ok_or_else(|| Error::BadParameter {
        name: key.into(),
        reason: format!("expected a number, got `{v}`"),
    })
}

/// Builds the graph for `id`. Unknown parameter names are rejected.
pub fn build_example(id: ExampleId, params: &Params) -> Result<MetricGraph> {
    let allowed: BTreeSet<&str> = id.parameters().iter().map(|(k, _)| *k).collect();
    if let Some(k) = params.0.keys().find(|k| !allowed.contains(k.as_str())) {
        return Err(Error::BadParameter {
            name: k.clone(),
            reason: format!("not a parameter of `{id}` (expected one of {allowed:?})"),
        });
    }
    let equal = |count_key: &str, default: usize| -> Result<Vec<f64>> {
        match params.list("lengths")? {
            Some(l) => Ok(l),
            None => Ok(vec![params.f64_or("L", 1.0)?; params.usize_or(count_key, default)?]),
        }
    };
    let g = match id {
        ExampleId::Path => match params.list("lengths")? {
            Some(l) => path(&l)?,
            None => path(&[params.f64_or("L", 1.0)?])?,
        },
        ExampleId::Cycle => cycle(params.f64_or("L", 1.0)?)?,
        ExampleId::Pumpkin => pumpkin(&equal("E", 3)?)?,
        ExampleId::Star => star(&equal("E", 3)?)?,
        ExampleId::Flower => {
            let petals = params.usize_or("petals", 2)?;
            let lengths = params.list("lengths")?.unwrap_or_else(|| vec![1.0; petals]);
            if params.get("petals").is_some() && lengths.len() != petals {
                return Err(Error::BadParameter {
                    name: "lengths".into(),
                    reason: format!("{} lengths for {petals} petals", lengths.len()),
                });
            }
            flower(&lengths)?
        }
        ExampleId::Complete => complete(params.usize_or("V", 4)?, params.f64_or("L", 1.0)?)?,
        ExampleId::Lasso => lasso(params.f64_or("loop", 1.0)?, params.f64_or("tail", 1.0)?)?,
        ExampleId::Figure8 => figure8(params.f64_or("l1", 1.0)?, params.f64_or("l2", 1.0)?)?,
        ExampleId::PerturbedFigure8 => perturbed_figure8(params.f64_or("eps", 0.05)?)?,
        ExampleId::LoopDumbbell => loop_dumbbell(params.f64_or("L", PI)?, params.f64_or("loop", 0.1)?)?,
        ExampleId::KrpammTree => krpamm_lengthened(
            params.f64_or("eps", 0.05)?,
            params.usize_or("m", 20)?,
            params.f64_or("delta", 0.0)?,
        )?,
        ExampleId::NStarLongShort => n_star_long_short(params.usize_or("n", 5)?, params.f64_or("eps", 0.1)?)?,
        ExampleId::PumpkinOnStick => {
            let lengths = params.list("lengths")?.unwrap_or_else(|| vec![1.0; 3]);
            pumpkin_on_stick([params.f64_or("s1", 1.0)?, params.f64_or("s2", 1.0)?], &lengths)?
        }
        ExampleId::PumpkinNecklace => pumpkin_necklace(
            params.usize_or("thickness", 4)?,
            params.f64_or("pumpkin", 0.1)?,
            params.f64_or("gap", 0.1)?,
            params.f64_or("arc", 2.0)?,
        )?,
        ExampleId::FigM3 => {
            let l = params.list("lengths")?.unwrap_or_else(|| vec![3.0, 0.3, 0.4, 0.6, 0.9]);
            let arr: [f64; 5] = l.as_slice().try_into().map_err(|_| Error::BadParameter {
                name: "lengths".into(),
                reason: format!("need 5 lengths, got {}", l.len()),
            })?;
            fig_m3(arr)?
        }
    };
    Ok(g)
}

/// Seeds of the random members of [`corpus`].
pub const CORPUS_SEEDS: [u64; 3] = [11, 23, 37];

/// The test corpus: every basic family with default parameters plus three
/// seeded random graphs with cycles.
pub fn corpus() -> Vec<MetricGraph> {
    let named = [
        ExampleId::Path,
        ExampleId::Cycle,
        ExampleId::Pumpkin,
        ExampleId::Star,
        ExampleId::Flower,
        ExampleId::Complete,
        ExampleId::Lasso,
        ExampleId::PerturbedFigure8,
        ExampleId::LoopDumbbell,
    ];
    let mut out: Vec<MetricGraph> = named
        .iter()
        .map(|&id| build_example(id, &Params::new()).expect("default parameters are valid"))
        .collect();
    out.extend(CORPUS_SEEDS.iter().map(|&s| random_graph(s, 5, 2).expect("valid size")));
    out
}
