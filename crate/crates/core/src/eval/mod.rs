//! Running planners by name, benchmarking them against each other, the
//! risk-type ablation, the mitigation experiment and its confidence
//! interval.

mod ablation;
mod bench;
mod mitigation;
mod stats;

pub use ablation::{ablation_weights, risk_ablation, AblationReport, AblationRow};
pub use bench::{
    derive_seed, records_csv, render_summary_table, run_benchmark, summarize, BenchScenario, BenchmarkRecord, BenchmarkReport,
    SummaryRow,
};
pub use mitigation::{mitigation_experiment, MitigationReport, MitigationRow};
pub use stats::{confidence_interval, confidence_interval_from_stats, CIResult, Z_95};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::eda::{eda_fra_star, eda_ra_star, EdaParams, TraceRow};
use crate::error::{Error, Result};
use crate::grid::CellIndex;
use crate::planner::{dijkstra_distance, dijkstra_risk, path_cost, risk_a_star, validate_path, FlightPath, HeuristicInfo};
use crate::risk::RiskMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "dijkstra")]
    Dijkstra,
    #[serde(rename = "riskastar")]
    RiskAStar,
    #[serde(rename = "eda-ra")]
    EdaRa,
    #[serde(rename = "eda-fra")]
    EdaFra,
    /// Shortest metric path, risk ignored.
    #[serde(rename = "distance")]
    Distance,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Dijkstra,
        Algorithm::RiskAStar,
        Algorithm::EdaRa,
        Algorithm::EdaFra,
        Algorithm::Distance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Dijkstra => "dijkstra",
            Algorithm::RiskAStar => "riskastar",
            Algorithm::EdaRa => "eda-ra",
            Algorithm::EdaFra => "eda-fra",
            Algorithm::Distance => "distance",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown algorithm `{s}` (expected dijkstra, riskastar, eda-ra, eda-fra or distance)")))
    }
}

/// Settings shared by every planner run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub eda: EdaParams,
    /// Guidance for the stand-alone `riskastar` algorithm.
    pub heuristic: HeuristicInfo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub algorithm: Algorithm,
    pub path: FlightPath,
    pub wall_time_s: f64,
    /// EDA convergence trace, empty for the graph searches.
    pub trace: Vec<TraceRow>,
    /// Guidance extracted by EDA-FRA*.
    pub heuristic: Option<HeuristicInfo>,
}

/// Runs one planner, timing it on a monotonic clock.
pub fn plan(
    map: &RiskMap,
    origin: CellIndex,
    destination: CellIndex,
    algorithm: Algorithm,
    config: &PlannerConfig,
) -> Result<PlanOutcome> {
    let start = Instant::now();
    let (path, trace, heuristic) = match algorithm {
        Algorithm::Dijkstra => (dijkstra_risk(map, origin, destination)?, Vec::new(), None),
        Algorithm::Distance => (dijkstra_distance(map, origin, destination)?, Vec::new(), None),
        Algorithm::RiskAStar => (risk_a_star(map, origin, destination, &config.heuristic)?, Vec::new(), None),
        Algorithm::EdaRa => {
            let out = eda_ra_star(map, origin, destination, &config.eda)?;
            (out.path, out.trace, None)
        }
        Algorithm::EdaFra => {
            let out = eda_fra_star(map, origin, destination, &config.eda)?;
            (out.path, out.trace, Some(out.heuristic))
        }
    };
    Ok(PlanOutcome {
        algorithm,
        path,
        wall_time_s: start.elapsed().as_secs_f64(),
        trace,
        heuristic,
    })
}

/// Path file contents. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub algorithm: String,
    pub origin: [usize; 3],
    pub destination: [usize; 3],
    pub vertices: Vec<[usize; 3]>,
    pub total_risk_cost: f64,
    pub distance_m: f64,
    pub expanded_nodes: usize,
    pub wall_time_s: f64,
}

impl PathReport {
    /// Re-validates the path against the map and recomputes its cost before
    /// building the report.
    pub fn verified(map: &RiskMap, outcome: &PlanOutcome) -> Result<Self> {
        let path = &outcome.path;
        validate_path(&path.vertices, map.spec(), map.occupancy())
            .map_err(|v| Error::InvalidInput(format!("planner produced an invalid path: {v}")))?;
        let cost = path_cost(&path.vertices, map)?;
        if cost != path.total_risk_cost {
            return Err(Error::InvalidInput(format!(
                "reported cost {} differs from recomputed {cost}",
                path.total_risk_cost
            )));
        }
        Ok(Self {
            algorithm: outcome.algorithm.name().to_string(),
            origin: path.origin().one_based(),
            destination: path.destination().one_based(),
            vertices: path.vertices.iter().map(|v| v.one_based()).collect(),
            total_risk_cost: cost,
            distance_m: path.distance_m,
            expanded_nodes: path.expanded_nodes,
            wall_time_s: outcome.wall_time_s,
        })
    }
}

/// Hex SHA-256 of the JSON encoding of `value`.
pub fn params_digest<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("parameters serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Trace rows as CSV.
pub fn trace_csv(trace: &[TraceRow]) -> Result<String> {
    crate::io::rows_csv(trace)
}
