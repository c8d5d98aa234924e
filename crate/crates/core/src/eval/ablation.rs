use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::eda::{eda_fra_star, EdaParams};
use crate::error::Result;
use crate::grid::CellIndex;
use crate::planner::path_cost;
use crate::risk::{build_risk_map, RiskMap, RiskModel, RiskWeights};
use crate::scenario::UrbanScenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub label: String,
    pub description: String,
    /// `None` for the risk-free planning map.
    pub weights: Option<RiskWeights>,
    /// Cost on the full three-component map.
    pub risk_cost: f64,
    /// Cost on the map the path was planned on.
    pub planning_cost: f64,
    pub distance_m: f64,
    /// 1-based.
    pub vertices: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub full_weights: RiskWeights,
    pub rows: Vec<AblationRow>,
}

/// Weight sets of the three risk-aware maps, in row order.
pub fn ablation_weights() -> [(&'static str, RiskWeights); 3] {
    [
        ("fatality only", RiskWeights::new(1.0, 0.0, 0.0).expect("valid weights")),
        ("fatality and property", RiskWeights::new(0.67, 0.33, 0.0).expect("valid weights")),
        ("fatality, property and noise", RiskWeights::default()),
    ]
}

/// Plans with EDA-FRA* on a unit-cost map (obstacles kept) and on three
/// progressively richer risk maps, then scores every path on the full map.
pub fn risk_ablation(
    scenario: &UrbanScenario,
    model: &RiskModel,
    origin: CellIndex,
    destination: CellIndex,
    eda: &EdaParams,
) -> Result<AblationReport> {
    let full = build_risk_map(scenario, model, RiskWeights::default())?;
    let mut maps: Vec<(String, Option<RiskWeights>, RiskMap)> =
        vec![("no risk, unit cost".into(), None, RiskMap::uniform(full.occupancy().clone(), 1.0)?)];
    for (name, w) in ablation_weights() {
        maps.push((name.into(), Some(w), full.reweighted(w)?));
    }
    let rows = maps
        .into_iter()
        .enumerate()
        .map(|(i, (description, weights, map))| {
            let out = eda_fra_star(&map, origin, destination, eda)?;
            Ok(AblationRow {
                label: format!("Path{}", i + 1),
                description,
                weights,
                risk_cost: path_cost(&out.path.vertices, &full)?,
                planning_cost: out.path.total_risk_cost,
                distance_m: out.path.distance_m,
                vertices: out.path.vertices.iter().map(|v| v.one_based()).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AblationReport {
        full_weights: full.weights(),
        rows,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    label: &'a str,
    description: &'a str,
    w_fatality: Option<f64>,
    w_property: Option<f64>,
    w_noise: Option<f64>,
    risk_cost: f64,
    planning_cost: f64,
    distance_m: f64,
    steps: usize,
}

impl AblationReport {
    /// One row per path, without the vertices.
    pub fn rows_csv(&self) -> Result<String> {
        let rows: Vec<CsvRow> = self
            .rows
            .iter()
            .map(|r| CsvRow {
                label: &r.label,
                description: &r.description,
                w_fatality: r.weights.map(|w| w.fatality),
                w_property: r.weights.map(|w| w.property),
                w_noise: r.weights.map(|w| w.noise),
                risk_cost: r.risk_cost,
                planning_cost: r.planning_cost,
                distance_m: r.distance_m,
                steps: r.vertices.len().saturating_sub(1),
            })
            .collect();
        crate::io::rows_csv(&rows)
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<6}  {:<30}  {:>12}  {:>12}", "path", "planning map", "risk cost", "distance (m)");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<6}  {:<30}  {:>12.4}  {:>12.1}",
                r.label, r.description, r.risk_cost, r.distance_m
            );
        }
        out
    }
}
