use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{confidence_interval, CIResult};
use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridSpec};
use crate::planner::{dijkstra_distance, dijkstra_risk, path_cost};
use crate::risk::{build_risk_map, RiskModel, RiskWeights};
use crate::scenario::{generate_scenario, ScenarioGenConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationRow {
    pub pattern: usize,
    pub seed: u64,
    /// Risk cost of the minimum-risk path.
    pub mitigated: Option<f64>,
    /// Risk cost of the minimum-distance path on the same map.
    pub unmitigated: Option<f64>,
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationReport {
    pub rows: Vec<MitigationRow>,
    pub excluded: usize,
    /// Group 1 is mitigated, group 2 unmitigated, so the interval bounds the
    /// relative risk reduction.
    pub ci: CIResult,
}

/// Generates `n` patterns with seeds `gen_cfg.rng_seed + k` and compares the
/// minimum-risk and minimum-distance paths on each. Patterns without a path
/// are excluded and counted.
#[allow(clippy::too_many_arguments)]
pub fn mitigation_experiment(
    n: usize,
    gen_cfg: &ScenarioGenConfig,
    spec: &GridSpec,
    model: &RiskModel,
    weights: RiskWeights,
    origin: CellIndex,
    destination: CellIndex,
    z: f64,
) -> Result<MitigationReport> {
    if n < 2 {
        return Err(Error::DegenerateGroup(format!("need at least 2 patterns, got {n}")));
    }
    gen_cfg.validate(spec)?;
    let rows = (0..n)
        .into_par_iter()
        .map(|k| {
            let seed = gen_cfg.rng_seed.wrapping_add(k as u64);
            let cfg = ScenarioGenConfig {
                rng_seed: seed,
                ..gen_cfg.clone()
            };
            let scn = generate_scenario(&cfg, spec)?;
            let map = build_risk_map(&scn, model, weights)?;
            let mut row = MitigationRow {
                pattern: k,
                seed,
                mitigated: None,
                unmitigated: None,
                excluded: None,
            };
            let paths = dijkstra_risk(&map, origin, destination)
                .and_then(|r| dijkstra_distance(&map, origin, destination).map(|d| (r, d)));
            match paths {
                Ok((risk, dist)) => {
                    row.mitigated = Some(risk.total_risk_cost);
                    row.unmitigated = Some(path_cost(&dist.vertices, &map)?);
                }
                Err(e @ (Error::NoPath { .. } | Error::OccupiedEndpoint(_))) => row.excluded = Some(e.to_string()),
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let g1: Vec<f64> = rows.iter().filter_map(|r| r.mitigated).collect();
    let g2: Vec<f64> = rows.iter().filter_map(|r| r.unmitigated).collect();
    let ci = confidence_interval(&g1, &g2, z)?;
    Ok(MitigationReport {
        excluded: rows.iter().filter(|r| r.excluded.is_some()).count(),
        rows,
        ci,
    })
}
