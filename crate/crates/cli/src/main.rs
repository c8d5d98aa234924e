//! `airrisk` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use airrisk::eda::{EdaParams, InnerSearch};
use airrisk::eval::{
    mitigation_experiment, params_digest, plan, records_csv, render_summary_table, risk_ablation, run_benchmark,
    trace_csv, Algorithm, BenchScenario, PathReport, PlannerConfig,
};
use airrisk::io::{rows_csv, write_atomic};
use airrisk::planner::HeuristicInfo;
use airrisk::risk::{build_risk_map, layer_csv, load_risk_map, save_risk_map, RiskMap};
use airrisk::scenario::{generate_scenario, load_scenario, save_scenario};
use airrisk::{CellIndex, Error, GridSpec, RiskModel, RiskWeights, ScenarioGenConfig, UavModel};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "airrisk", version, about = "Urban airspace risk maps and minimum-risk UAV path planning")]
struct Cli {
    /// Directory for outputs whose path is not given explicitly.
    #[arg(long, global = true, env = "AIRRISK_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Format of the summary artifact.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random urban scenario.
    ScenarioGen(ScenarioGenArgs),
    /// Build a risk map from a scenario.
    Riskmap(RiskmapArgs),
    /// Plan one path on a risk map.
    Plan(PlanArgs),
    /// Compare planners over generated scenarios.
    Bench(BenchArgs),
    /// Minimum-risk versus minimum-distance paths over many patterns.
    Mitigate(MitigateArgs),
    /// Plan with progressively richer risk maps.
    Ablate(AblateArgs),
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Cells along x, y and z.
    #[arg(long, num_args = 3, value_names = ["NX", "NY", "NZ"], default_values_t = [60, 60, 4])]
    grid: Vec<usize>,
    /// Cell edge lengths in meters.
    #[arg(long, num_args = 3, value_names = ["UX", "UY", "UZ"], default_values_t = [100.0, 100.0, 30.0])]
    unit: Vec<f64>,
}

impl GridArgs {
    fn spec(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.grid[0], self.grid[1], self.grid[2], [self.unit[0], self.unit[1], self.unit[2]])?)
    }
}

#[derive(Args, Clone)]
struct GenArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    districts: Option<usize>,
    /// District population density range, people per km^2.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pop_range: Option<Vec<f64>>,
    /// Vehicles per km^2.
    #[arg(long)]
    traffic: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    amenities: Option<Vec<usize>>,
    /// Fraction of ground cells with a building.
    #[arg(long)]
    coverage: Option<f64>,
    #[arg(long)]
    sheltering: Option<f64>,
}

impl GenArgs {
    fn config(&self, spec: &GridSpec, seed: u64) -> ScenarioGenConfig {
        let mut cfg = ScenarioGenConfig::for_grid(spec, seed);
        if let Some(v) = self.districts {
            cfg.n_districts = v;
        }
        if let Some(v) = &self.pop_range {
            cfg.pop_density_range = [v[0], v[1]];
        }
        if let Some(v) = self.traffic {
            cfg.traffic_density = v;
        }
        if let Some(v) = &self.amenities {
            cfg.amenity_count_range = [v[0], v[1]];
        }
        if let Some(v) = self.coverage {
            cfg.building_coverage = v;
        }
        if let Some(v) = self.sheltering {
            cfg.sheltering_coeff = v;
        }
        cfg
    }
}

#[derive(Args, Clone)]
struct UavArgs {
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    drag: Option<f64>,
    /// m^2
    #[arg(long)]
    impact_area: Option<f64>,
    /// Crashes per flight hour.
    #[arg(long)]
    crash_prob: Option<f64>,
}

impl UavArgs {
    fn model(&self) -> RiskModel {
        let mut uav = UavModel::default();
        if let Some(v) = self.mass {
            uav.mass_kg = v;
        }
        if let Some(v) = self.drag {
            uav.drag_coeff = v;
        }
        if let Some(v) = self.impact_area {
            uav.impact_area_m2 = v;
        }
        if let Some(v) = self.crash_prob {
            uav.crash_prob_per_hour = v;
        }
        RiskModel::new(uav)
    }
}

#[derive(Args, Clone)]
struct WeightArgs {
    /// Fatality, property and noise weights; must sum to 1.
    #[arg(long, num_args = 3, value_names = ["F", "P", "N"], default_values_t = [0.5, 0.25, 0.25])]
    weights: Vec<f64>,
}

impl WeightArgs {
    fn weights(&self) -> Result<RiskWeights> {
        Ok(RiskWeights::new(self.weights[0], self.weights[1], self.weights[2])?)
    }
}

#[derive(Args, Clone)]
struct OdArgs {
    /// Origin and destination cells, 1-based.
    #[arg(long, num_args = 6, value_names = ["OX", "OY", "OZ", "DX", "DY", "DZ"], default_values_t = [1, 1, 1, 60, 60, 4])]
    od: Vec<usize>,
}

impl OdArgs {
    fn cells(&self) -> Result<(CellIndex, CellIndex)> {
        let o = &self.od;
        Ok((CellIndex::from_one_based(o[0], o[1], o[2])?, CellIndex::from_one_based(o[3], o[4], o[5])?))
    }
}

#[derive(Args, Clone)]
struct EdaArgs {
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    dominant_fraction: Option<f64>,
    /// Number of k-means clusters.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    initial_probability: Option<f64>,
    #[arg(long)]
    connectivity_penalty: Option<f64>,
    /// Use a guided inner search with this factor instead of an exact one.
    #[arg(long)]
    inner_factor: Option<f64>,
    /// Evaluate species in parallel. Results are unchanged.
    #[arg(long)]
    parallel: bool,
}

impl EdaArgs {
    fn params(&self, seed: u64) -> EdaParams {
        let d = EdaParams::default();
        EdaParams {
            population_size: self.pop.unwrap_or(d.population_size),
            iterations: self.iters.unwrap_or(d.iterations),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            dominant_fraction: self.dominant_fraction.unwrap_or(d.dominant_fraction),
            rng_seed: seed,
            k_clusters: self.clusters.unwrap_or(d.k_clusters),
            connectivity_penalty: self.connectivity_penalty,
            initial_probability: self.initial_probability.unwrap_or(d.initial_probability),
            inner_search: self
                .inner_factor
                .map_or(InnerSearch::Dijkstra, |f| InnerSearch::RiskAStar { heuristic_factor: f }),
            parallel: self.parallel,
        }
    }
}

#[derive(Args)]
struct ScenarioGenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenArgs,
    /// Defaults to `<out-dir>/scenario.json`.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RiskmapArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    uav: UavArgs,
    /// Defaults to `<out-dir>/riskmap.json`. Layer CSVs and the summary go
    /// next to it.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    map: PathBuf,
    #[command(flatten)]
    od: OdArgs,
    #[arg(long, default_value = "eda-fra")]
    algo: Algorithm,
    /// EDA seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    eda: EdaArgs,
    /// Straight-line heuristic factor for `riskastar`.
    #[arg(long, conflicts_with = "heuristic")]
    heuristic_factor: Option<f64>,
    /// Heuristic file (JSON) for `riskastar`, e.g. one written by `eda-fra`.
    #[arg(long)]
    heuristic: Option<PathBuf>,
    /// Defaults to `<out-dir>/path.<format>`.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the EDA convergence trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Report zero wall time so outputs are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Number of generated scenarios; scenario k uses seed `seed + k`.
    #[arg(long, default_value_t = 20)]
    scenarios: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    uav: UavArgs,
    #[arg(long, value_delimiter = ',', default_value = "dijkstra,eda-ra,eda-fra")]
    algos: Vec<Algorithm>,
    #[command(flatten)]
    od: OdArgs,
    #[command(flatten)]
    eda: EdaArgs,
    #[arg(long)]
    heuristic_factor: Option<f64>,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct MitigateArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Pattern k uses seed `seed + k`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    uav: UavArgs,
    #[command(flatten)]
    od: OdArgs,
    #[arg(long, default_value_t = airrisk::eval::Z_95)]
    z: f64,
}

#[derive(Args)]
struct AblateArgs {
    /// Scenario file; generated from `--seed` when absent.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenArgs,
    #[command(flatten)]
    uav: UavArgs,
    #[command(flatten)]
    od: OdArgs,
    #[command(flatten)]
    eda: EdaArgs,
}

/// Provenance stamped on every summary.
#[derive(Serialize)]
struct Stamp<'a> {
    tool: &'a str,
    version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    params_digest: String,
}

fn stamp<T: Serialize + ?Sized>(seed: Option<u64>, params: &T) -> Stamp<'static> {
    Stamp {
        tool: "airrisk",
        version: VERSION,
        seed,
        params_digest: params_digest(params),
    }
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Single-line JSON for artifacts carrying long coordinate lists.
fn json_compact<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `dir/name` unless `explicit` is given.
fn out_path(explicit: &Option<PathBuf>, dir: &Path, name: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| dir.join(name))
}

/// `path` with its extension replaced by `suffix`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn cmd_scenario_gen(cli: &Cli, a: &ScenarioGenArgs) -> Result<()> {
    let spec = a.gen.grid.spec()?;
    let cfg = a.gen.config(&spec, a.seed);
    let scn = generate_scenario(&cfg, &spec)?;
    let path = out_path(&a.output, &cli.out_dir, "scenario.json");
    save_scenario(&scn, &path).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    println!("seed {}", a.seed);
    Ok(())
}

#[derive(Serialize)]
struct RiskmapSummary<'a> {
    #[serde(flatten)]
    stamp: Stamp<'static>,
    weights: RiskWeights,
    omega: [f64; 3],
    occupied_cells: usize,
    layers: &'a [airrisk::risk::LayerSummary],
}

fn cmd_riskmap(cli: &Cli, a: &RiskmapArgs) -> Result<()> {
    let scn = load_scenario(&a.scenario).with_context(|| format!("reading {}", a.scenario.display()))?;
    let model = a.uav.model();
    let weights = a.weights.weights()?;
    let map = build_risk_map(&scn, &model, weights)?;
    let path = out_path(&a.output, &cli.out_dir, "riskmap.json");
    save_risk_map(&map, &path).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    for z in 0..map.spec().nz {
        write(&sibling(&path, &format!("_layer{}.csv", z + 1)), layer_csv(&map, z)?.as_bytes())?;
    }
    let layers = map.layer_summary();
    let summary_path = sibling(&path, &format!("_summary.{}", cli.format.ext()));
    let bytes = match cli.format {
        Format::Json => json(&RiskmapSummary {
            stamp: stamp(None, &(&model, &weights)),
            weights,
            omega: airrisk::risk::Component::ALL.map(|c| map.omega(c)),
            occupied_cells: map.occupancy().occupied_count(),
            layers: &layers,
        })?,
        Format::Csv => rows_csv(&layers)?.into_bytes(),
    };
    write(&summary_path, &bytes)?;
    println!(
        "weights fatality {} property {} noise {}",
        weights.fatality, weights.property, weights.noise
    );
    Ok(())
}

fn heuristic_for(a: &PlanArgs) -> Result<HeuristicInfo> {
    match (&a.heuristic, a.heuristic_factor) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| {
                Error::Parse {
                    location: p.display().to_string(),
                    message: e.to_string(),
                }
                .into()
            })
        }
        (None, Some(f)) => Ok(HeuristicInfo::straight(f)),
        (None, None) if a.algo == Algorithm::RiskAStar => Err(Error::InvalidConfig(
            "riskastar needs --heuristic-factor or --heuristic".into(),
        )
        .into()),
        (None, None) => Ok(HeuristicInfo::none()),
    }
}

#[derive(Serialize)]
struct PlanFile<'a> {
    #[serde(flatten)]
    stamp: Stamp<'static>,
    #[serde(flatten)]
    path: &'a PathReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    heuristic: Option<&'a HeuristicInfo>,
}

#[derive(Serialize)]
struct StepRow {
    step: usize,
    x: usize,
    y: usize,
    z: usize,
    cell_cost: f64,
    cumulative_cost: f64,
}

fn step_rows(map: &RiskMap, rep: &PathReport) -> Vec<StepRow> {
    let mut acc = 0.0;
    rep.vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let c = if i == 0 {
                0.0
            } else {
                map.total(CellIndex::new(v[0] - 1, v[1] - 1, v[2] - 1))
            };
            acc += c;
            StepRow {
                step: i,
                x: v[0],
                y: v[1],
                z: v[2],
                cell_cost: c,
                cumulative_cost: acc,
            }
        })
        .collect()
}

fn cmd_plan(cli: &Cli, a: &PlanArgs) -> Result<()> {
    let map = load_risk_map(&a.map).with_context(|| format!("reading {}", a.map.display()))?;
    let (o, d) = a.od.cells()?;
    let spec = map.spec();
    spec.check(o)?;
    spec.check(d)?;
    for (name, c) in [("origin", o), ("destination", d)] {
        if map.is_occupied(c) {
            return Err(Error::OccupiedEndpoint(format!("{name} {c}")).into());
        }
    }
    let cfg = PlannerConfig {
        eda: a.eda.params(a.seed),
        heuristic: heuristic_for(a)?,
    };
    let out = plan(&map, o, d, a.algo, &cfg)?;
    let mut rep = PathReport::verified(&map, &out)?;
    if a.no_timing {
        rep.wall_time_s = 0.0;
    }
    let path = out_path(&a.output, &cli.out_dir, &format!("path.{}", cli.format.ext()));
    let bytes = match cli.format {
        Format::Json => json_compact(&PlanFile {
            stamp: stamp(Some(a.seed), &(a.algo, &cfg)),
            path: &rep,
            heuristic: out.heuristic.as_ref(),
        })?,
        Format::Csv => rows_csv(&step_rows(&map, &rep))?.into_bytes(),
    };
    write(&path, &bytes)?;
    if let Some(t) = &a.trace {
        write(t, trace_csv(&out.trace)?.as_bytes())?;
    }
    println!(
        "{}: risk cost {:.6}, distance {:.1} m, {} steps",
        a.algo,
        rep.total_risk_cost,
        rep.distance_m,
        rep.vertices.len() - 1
    );
    Ok(())
}

#[derive(Serialize)]
struct BenchSummary<'a> {
    #[serde(flatten)]
    stamp: Stamp<'static>,
    scenario_seeds: Vec<u64>,
    algorithms: &'a [Algorithm],
    timing: bool,
    summary: &'a [airrisk::eval::SummaryRow],
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> Result<()> {
    if a.scenarios == 0 {
        return Err(Error::InvalidInput("--scenarios must be at least 1".into()).into());
    }
    let spec = a.gen.grid.spec()?;
    let model = a.uav.model();
    let weights = a.weights.weights()?;
    let seeds: Vec<u64> = (0..a.scenarios as u64).map(|k| a.seed.wrapping_add(k)).collect();
    let scenarios = seeds
        .iter()
        .map(|s| {
            let scn = generate_scenario(&a.gen.config(&spec, *s), &spec)?;
            Ok(BenchScenario {
                id: format!("s{s}"),
                seed: *s,
                map: build_risk_map(&scn, &model, weights)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cfg = PlannerConfig {
        eda: a.eda.params(a.seed),
        heuristic: a.heuristic_factor.map_or_else(HeuristicInfo::none, HeuristicInfo::straight),
    };
    let mut rep = run_benchmark(&scenarios, &a.algos, &[a.od.cells()?], &cfg)?;
    if a.no_timing {
        rep = rep.without_timing();
    }
    write(&cli.out_dir.join("bench_records.csv"), records_csv(&rep.records)?.as_bytes())?;
    let summary_path = cli.out_dir.join(format!("bench_summary.{}", cli.format.ext()));
    let bytes = match cli.format {
        Format::Json => json(&BenchSummary {
            stamp: stamp(Some(a.seed), &(&cfg, &model, &weights, &a.gen.config(&spec, a.seed))),
            scenario_seeds: seeds,
            algorithms: &a.algos,
            timing: !a.no_timing,
            summary: &rep.summary,
        })?,
        Format::Csv => rows_csv(&rep.summary)?.into_bytes(),
    };
    write(&summary_path, &bytes)?;
    let table = render_summary_table(&rep.summary);
    write(&cli.out_dir.join("bench_summary.txt"), table.as_bytes())?;
    print!("{table}");
    if rep.records.iter().all(|r| r.error.is_some()) {
        bail!("every benchmark run failed");
    }
    Ok(())
}

#[derive(Serialize)]
struct MitigationSummary<'a> {
    #[serde(flatten)]
    stamp: Stamp<'static>,
    patterns: usize,
    excluded: usize,
    ci: &'a airrisk::eval::CIResult,
}

fn cmd_mitigate(cli: &Cli, a: &MitigateArgs) -> Result<()> {
    let spec = a.gen.grid.spec()?;
    let gen = a.gen.config(&spec, a.seed);
    let model = a.uav.model();
    let weights = a.weights.weights()?;
    let (o, d) = a.od.cells()?;
    let rep = mitigation_experiment(a.n, &gen, &spec, &model, weights, o, d, a.z)?;
    write(&cli.out_dir.join("mitigation_patterns.csv"), rows_csv(&rep.rows)?.as_bytes())?;
    let path = cli.out_dir.join(format!("mitigation_summary.{}", cli.format.ext()));
    let bytes = match cli.format {
        Format::Json => json(&MitigationSummary {
            stamp: stamp(Some(a.seed), &(&gen, &model, &weights, &a.od.od, a.z)),
            patterns: a.n,
            excluded: rep.excluded,
            ci: &rep.ci,
        })?,
        Format::Csv => rows_csv(&[rep.ci])?.into_bytes(),
    };
    write(&path, &bytes)?;
    println!(
        "risk mitigated: {:.2}% to {:.2}% (z = {}), {} of {} patterns excluded",
        rep.ci.interval_low * 100.0,
        rep.ci.interval_high * 100.0,
        rep.ci.z_value,
        rep.excluded,
        a.n
    );
    Ok(())
}

#[derive(Serialize)]
struct AblationFile<'a> {
    #[serde(flatten)]
    stamp: Stamp<'static>,
    #[serde(flatten)]
    report: &'a airrisk::eval::AblationReport,
}

fn cmd_ablate(cli: &Cli, a: &AblateArgs) -> Result<()> {
    let scn = match &a.scenario {
        Some(p) => load_scenario(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let spec = a.gen.grid.spec()?;
            generate_scenario(&a.gen.config(&spec, a.seed), &spec)?
        }
    };
    let model = a.uav.model();
    let eda = a.eda.params(a.seed);
    let (o, d) = a.od.cells()?;
    let rep = risk_ablation(&scn, &model, o, d, &eda)?;
    let path = cli.out_dir.join(format!("ablation.{}", cli.format.ext()));
    let bytes = match cli.format {
        Format::Json => json_compact(&AblationFile {
            stamp: stamp(Some(a.seed), &(&model, &eda)),
            report: &rep,
        })?,
        Format::Csv => rep.rows_csv()?.into_bytes(),
    };
    write(&path, &bytes)?;
    let table = rep.render_table();
    write(&cli.out_dir.join("ablation.txt"), table.as_bytes())?;
    print!("{table}");
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::NoPath { .. }) => 3,
        Some(Error::Io(_)) => 4,
        Some(_) => 2,
        None if err.chain().any(|e| e.is::<std::io::Error>()) => 4,
        None if err.chain().any(|e| e.is::<serde_json::Error>()) => 2,
        None => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ScenarioGen(a) => cmd_scenario_gen(&cli, a),
        Command::Riskmap(a) => cmd_riskmap(&cli, a),
        Command::Plan(a) => cmd_plan(&cli, a),
        Command::Bench(a) => cmd_bench(&cli, a),
        Command::Mitigate(a) => cmd_mitigate(&cli, a),
        Command::Ablate(a) => cmd_ablate(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
