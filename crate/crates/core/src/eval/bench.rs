use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{params_digest, plan, Algorithm, PathReport, PlannerConfig};
use crate::error::{Error, Result};
use crate::grid::CellIndex;
use crate::risk::RiskMap;

pub struct BenchScenario {
    pub id: String,
    pub seed: u64,
    pub map: RiskMap,
}

/// One (scenario, algorithm, OD) run. Optional fields are empty when the
/// planner failed; `error` then says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub scenario: String,
    pub algorithm: Algorithm,
    /// 1-based.
    pub origin: [usize; 3],
    pub destination: [usize; 3],
    pub scenario_seed: u64,
    /// EDA seed actually used; absent for the deterministic searches.
    pub planner_seed: Option<u64>,
    pub total_risk_cost: Option<f64>,
    pub distance_m: Option<f64>,
    pub wall_time_s: f64,
    pub expanded_nodes: Option<usize>,
    pub params_digest: String,
    pub error: Option<String>,
}

/// Per-algorithm aggregate. Ratios are fractions of the Dijkstra value on
/// the same scenario and OD pair, over runs where both succeeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub failures: usize,
    pub mean_cost_ratio: Option<f64>,
    pub std_cost_ratio: Option<f64>,
    pub mean_distance_ratio: Option<f64>,
    pub std_distance_ratio: Option<f64>,
    pub mean_time_fraction: Option<f64>,
    pub median_wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub records: Vec<BenchmarkRecord>,
    /// Dijkstra reference runs, one per scenario and OD pair, in record
    /// order. They double as the `dijkstra` records when that algorithm is
    /// requested.
    pub reference: Vec<BenchmarkRecord>,
    pub summary: Vec<SummaryRow>,
}

/// EDA seed for one scenario and OD pair, derived from the configured base
/// seed so that runs differ across scenarios yet stay reproducible.
pub fn derive_seed(base: u64, scenario_seed: u64, od_index: usize) -> u64 {
    // splitmix64 finalizer over a simple combination.
    let mut z = base
        .wrapping_add(scenario_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((od_index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_one(
    scn: &BenchScenario,
    algorithm: Algorithm,
    od_index: usize,
    (o, d): (CellIndex, CellIndex),
    base: &PlannerConfig,
) -> BenchmarkRecord {
    let mut cfg = base.clone();
    let planner_seed = matches!(algorithm, Algorithm::EdaRa | Algorithm::EdaFra).then(|| {
        let s = derive_seed(base.eda.rng_seed, scn.seed, od_index);
        cfg.eda.rng_seed = s;
        s
    });
    let digest = params_digest(&(algorithm, &cfg));
    let mut rec = BenchmarkRecord {
        scenario: scn.id.clone(),
        algorithm,
        origin: o.one_based(),
        destination: d.one_based(),
        scenario_seed: scn.seed,
        planner_seed,
        total_risk_cost: None,
        distance_m: None,
        wall_time_s: 0.0,
        expanded_nodes: None,
        params_digest: digest,
        error: None,
    };
    match plan(&scn.map, o, d, algorithm, &cfg).and_then(|out| PathReport::verified(&scn.map, &out)) {
        Ok(rep) => {
            rec.total_risk_cost = Some(rep.total_risk_cost);
            rec.distance_m = Some(rep.distance_m);
            rec.wall_time_s = rep.wall_time_s;
            rec.expanded_nodes = Some(rep.expanded_nodes);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Runs every (scenario, algorithm, OD) combination sequentially so each
/// wall time is measured without contention. Planner failures are recorded,
/// not propagated.
pub fn run_benchmark(
    scenarios: &[BenchScenario],
    algorithms: &[Algorithm],
    od_pairs: &[(CellIndex, CellIndex)],
    config: &PlannerConfig,
) -> Result<BenchmarkReport> {
    if scenarios.is_empty() || algorithms.is_empty() || od_pairs.is_empty() {
        return Err(Error::InvalidInput(
            "benchmark needs at least one scenario, algorithm and OD pair".into(),
        ));
    }
    config.eda.validate()?;
    let mut records = Vec::new();
    let mut reference = Vec::new();
    for scn in scenarios {
        for (k, od) in od_pairs.iter().enumerate() {
            let dij = run_one(scn, Algorithm::Dijkstra, k, *od, config);
            for a in algorithms {
                records.push(if *a == Algorithm::Dijkstra {
                    dij.clone()
                } else {
                    run_one(scn, *a, k, *od, config)
                });
            }
            reference.push(dij);
        }
    }
    let summary = summarize(&records, &reference, algorithms);
    Ok(BenchmarkReport {
        records,
        reference,
        summary,
    })
}

impl BenchmarkReport {
    /// Zeroes every wall time and recomputes the summary, so the report is
    /// a pure function of its inputs.
    pub fn without_timing(mut self) -> Self {
        for r in self.records.iter_mut().chain(self.reference.iter_mut()) {
            r.wall_time_s = 0.0;
        }
        let mut algos: Vec<Algorithm> = Vec::new();
        for r in &self.records {
            if !algos.contains(&r.algorithm) {
                algos.push(r.algorithm);
            }
        }
        self.summary = summarize(&self.records, &self.reference, &algos);
        self
    }
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let s = if xs.len() > 1 {
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(m), Some(s))
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) })
}

/// Pure reduction over the records; recomputable at any time.
pub fn summarize(records: &[BenchmarkRecord], reference: &[BenchmarkRecord], algorithms: &[Algorithm]) -> Vec<SummaryRow> {
    let find_ref = |r: &BenchmarkRecord| {
        reference
            .iter()
            .find(|d| d.scenario == r.scenario && d.origin == r.origin && d.destination == r.destination)
    };
    algorithms
        .iter()
        .map(|a| {
            let mine: Vec<&BenchmarkRecord> = records.iter().filter(|r| r.algorithm == *a).collect();
            let mut cost = Vec::new();
            let mut dist = Vec::new();
            let mut time = Vec::new();
            let mut walls = Vec::new();
            for r in &mine {
                let Some(c) = r.total_risk_cost else { continue };
                walls.push(r.wall_time_s);
                let Some(d) = find_ref(r).filter(|d| d.error.is_none()) else {
                    continue;
                };
                let (dc, dd) = (d.total_risk_cost.unwrap(), d.distance_m.unwrap());
                if dc > 0.0 {
                    cost.push(c / dc);
                }
                if dd > 0.0 {
                    dist.push(r.distance_m.unwrap() / dd);
                }
                if d.wall_time_s > 0.0 {
                    time.push(r.wall_time_s / d.wall_time_s);
                }
            }
            let (mc, sc) = mean_std(&cost);
            let (md, sd) = mean_std(&dist);
            SummaryRow {
                algorithm: *a,
                runs: mine.len(),
                failures: mine.iter().filter(|r| r.error.is_some()).count(),
                mean_cost_ratio: mc,
                std_cost_ratio: sc,
                mean_distance_ratio: md,
                std_distance_ratio: sd,
                mean_time_fraction: mean_std(&time).0,
                median_wall_time_s: median(walls),
            }
        })
        .collect()
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    scenario: &'a str,
    algorithm: &'a str,
    origin: String,
    destination: String,
    scenario_seed: u64,
    planner_seed: Option<u64>,
    total_risk_cost: Option<f64>,
    distance_m: Option<f64>,
    wall_time_s: f64,
    expanded_nodes: Option<usize>,
    params_digest: &'a str,
    error: Option<&'a str>,
}

/// One CSV row per record. Coordinates are written as `x y z`, 1-based.
pub fn records_csv(records: &[BenchmarkRecord]) -> Result<String> {
    let coord = |c: [usize; 3]| format!("{} {} {}", c[0], c[1], c[2]);
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRecord {
            scenario: &r.scenario,
            algorithm: r.algorithm.name(),
            origin: coord(r.origin),
            destination: coord(r.destination),
            scenario_seed: r.scenario_seed,
            planner_seed: r.planner_seed,
            total_risk_cost: r.total_risk_cost,
            distance_m: r.distance_m,
            wall_time_s: r.wall_time_s,
            expanded_nodes: r.expanded_nodes,
            params_digest: &r.params_digest,
            error: r.error.as_deref(),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Plain-text table with ratios as percentages.
pub fn render_summary_table(rows: &[SummaryRow]) -> String {
    let pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{:.2}%", v * 100.0));
    let secs = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    let header = [
        "algorithm",
        "runs",
        "failures",
        "cost ratio",
        "cost std",
        "distance ratio",
        "distance std",
        "time fraction",
        "median time (s)",
    ];
    let body: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.algorithm.to_string(),
                r.runs.to_string(),
                r.failures.to_string(),
                pct(r.mean_cost_ratio),
                pct(r.std_cost_ratio),
                pct(r.mean_distance_ratio),
                pct(r.std_distance_ratio),
                pct(r.mean_time_fraction),
                secs(r.median_wall_time_s),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &body {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(width)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&header);
    let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
    line(&rule.iter().map(String::as_str).collect::<Vec<_>>());
    for row in &body {
        line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}
