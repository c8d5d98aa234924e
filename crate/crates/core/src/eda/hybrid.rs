use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kmeans_heuristic, sample_species, update_probability, EdaParams, InnerSearch, ProbabilityField, Species};
use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridSpec};
use crate::planner::{check_endpoints, risk_a_star, risk_a_star_masked, FlightPath, HeuristicInfo};
use crate::risk::RiskMap;

/// One line of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// 1-based.
    pub iteration: usize,
    /// Best fitness seen so far in the run.
    pub best_fitness: f64,
    /// Mean fitness of this iteration's population.
    pub mean_fitness: f64,
    /// Mean share of unoccupied cells left open by the population.
    pub open_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RaOutcome {
    pub path: FlightPath,
    pub trace: Vec<TraceRow>,
    /// Inner searches that found a path.
    pub feasible_species: usize,
    /// Cells expanded across every inner search.
    pub total_expanded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FraOutcome {
    pub path: FlightPath,
    pub heuristic: HeuristicInfo,
    pub trace: Vec<TraceRow>,
}

fn map_params(map: &RiskMap, origin: CellIndex, destination: CellIndex, params: &EdaParams) -> Result<()> {
    params.validate()?;
    check_endpoints(map, origin, destination)
}

fn evaluate_all<T: Send>(params: &EdaParams, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    if params.parallel {
        (0..params.population_size).into_par_iter().map(f).collect()
    } else {
        (0..params.population_size).map(f).collect()
    }
}

/// Indices of the dominant species: lowest fitness first, ties by index.
fn dominant<'a>(population: &'a [Species], params: &EdaParams) -> Vec<&'a Species> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|a, b| population[*a].fitness.total_cmp(&population[*b].fitness).then(a.cmp(b)));
    order.into_iter().take(params.dominant_count()).map(|i| &population[i]).collect()
}

fn trace_row(iteration: usize, best: f64, population: &[Species], free_cells: usize) -> TraceRow {
    let n = population.len() as f64;
    TraceRow {
        iteration: iteration + 1,
        best_fitness: best,
        mean_fitness: population.iter().map(|s| s.fitness).sum::<f64>() / n,
        open_fraction: population.iter().map(|s| s.open_count() as f64).sum::<f64>() / n / free_cells.max(1) as f64,
    }
}

fn inner_info(params: &EdaParams) -> HeuristicInfo {
    match params.inner_search {
        InnerSearch::Dijkstra => HeuristicInfo::none(),
        InnerSearch::RiskAStar { heuristic_factor } => HeuristicInfo::straight(heuristic_factor),
    }
}

/// EDA with a path search inside every sampled feasible region. A species'
/// fitness is the risk cost of the path found in its region; species with
/// no path get the worst feasible fitness of their population. Returns the
/// cheapest path seen in any iteration.
pub fn eda_ra_star(map: &RiskMap, origin: CellIndex, destination: CellIndex, params: &EdaParams) -> Result<RaOutcome> {
    map_params(map, origin, destination, params)?;
    let spec = *map.spec();
    let occupancy = map.occupancy();
    let free_cells = spec.cell_count() - occupancy.occupied_count();
    let info = inner_info(params);
    let mut field = ProbabilityField::uniform(spec, params.initial_probability, origin, destination)?;
    let mut best: Option<FlightPath> = None;
    let mut trace = Vec::with_capacity(params.iterations);
    let mut feasible_species = 0;
    let mut total_expanded = 0;

    for it in 0..params.iterations {
        let evaluated = evaluate_all(params, |j| {
            let mut rng = params.species_rng(it, j);
            let species = sample_species(&field, occupancy, &mut rng);
            match risk_a_star_masked(map, origin, destination, &info, Some(&species.mask)) {
                Ok(path) => Ok((species, Some(path))),
                Err(Error::NoPath { .. }) => Ok((species, None)),
                Err(e) => Err(e),
            }
        })?;
        let worst = evaluated
            .iter()
            .filter_map(|(_, p)| p.as_ref().map(|p| p.total_risk_cost))
            .fold(f64::NEG_INFINITY, f64::max);
        let mut population = Vec::with_capacity(evaluated.len());
        for (mut species, path) in evaluated {
            match path {
                Some(path) => {
                    feasible_species += 1;
                    total_expanded += path.expanded_nodes;
                    species.fitness = path.total_risk_cost;
                    if best.as_ref().is_none_or(|b| path.total_risk_cost < b.total_risk_cost) {
                        best = Some(path);
                    }
                }
                None => {
                    species.fitness = if worst.is_finite() { worst } else { f64::INFINITY };
                }
            }
            population.push(species);
        }
        let best_fitness = best.as_ref().map_or(f64::INFINITY, |b| b.total_risk_cost);
        trace.push(trace_row(it, best_fitness, &population, free_cells));
        field = update_probability(&field, &dominant(&population, params), params.learning_rate)?;
    }

    let path = match best {
        Some(p) => p,
        // No region ever held a path; fall back to one unrestricted search.
        None => risk_a_star(map, origin, destination, &info)?,
    };
    Ok(RaOutcome {
        path,
        trace,
        feasible_species,
        total_expanded,
    })
}

/// Whether origin and destination are joined through open cells.
fn connected(spec: &GridSpec, mask: &[bool], src: usize, dst: usize) -> bool {
    let mut seen = vec![false; mask.len()];
    let mut stack = vec![src];
    seen[src] = true;
    while let Some(i) = stack.pop() {
        if i == dst {
            return true;
        }
        spec.for_each_neighbor_flat(i, |j| {
            if mask[j] && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        });
    }
    false
}

/// Mean total cost of the open cells, plus `penalty` when the mask leaves
/// origin and destination disconnected.
pub fn region_fitness(map: &RiskMap, mask: &[bool], src: usize, dst: usize, penalty: f64) -> f64 {
    let totals = map.totals();
    let (sum, n) = mask
        .iter()
        .zip(totals)
        .filter(|(m, t)| **m && t.is_finite())
        .fold((0.0, 0usize), |(s, n), (_, t)| (s + t, n + 1));
    let mean = if n == 0 { 0.0 } else { sum / n as f64 };
    if connected(map.spec(), mask, src, dst) {
        mean
    } else {
        mean + penalty
    }
}

/// EDA over feasible regions scored by [`region_fitness`] with no path
/// search in the loop, followed by a single guided search on the full map
/// using heuristics extracted from the best region.
pub fn eda_fra_star(map: &RiskMap, origin: CellIndex, destination: CellIndex, params: &EdaParams) -> Result<FraOutcome> {
    map_params(map, origin, destination, params)?;
    let spec = *map.spec();
    let occupancy = map.occupancy();
    let free_cells = spec.cell_count() - occupancy.occupied_count();
    let penalty = params
        .connectivity_penalty
        .unwrap_or_else(|| map.max_finite_total() * spec.cell_count() as f64);
    let (src, dst) = (spec.flat(origin), spec.flat(destination));
    let mut field = ProbabilityField::uniform(spec, params.initial_probability, origin, destination)?;
    let mut best: Option<Species> = None;
    let mut trace = Vec::with_capacity(params.iterations);

    for it in 0..params.iterations {
        let population = evaluate_all(params, |j| {
            let mut rng = params.species_rng(it, j);
            let mut species = sample_species(&field, occupancy, &mut rng);
            species.fitness = region_fitness(map, &species.mask, src, dst, penalty);
            Ok(species)
        })?;
        for s in &population {
            if best.as_ref().is_none_or(|b| s.fitness < b.fitness) {
                best = Some(s.clone());
            }
        }
        let best_fitness = best.as_ref().map_or(f64::INFINITY, |b| b.fitness);
        trace.push(trace_row(it, best_fitness, &population, free_cells));
        field = update_probability(&field, &dominant(&population, params), params.learning_rate)?;
    }

    let best = best.expect("at least one iteration with one species");
    let open = best.open_points(&spec);
    let heuristic = kmeans_heuristic(&open, map, params.k_clusters, origin, destination, &mut params.clustering_rng())?;
    let path = risk_a_star(map, origin, destination, &heuristic)?;
    Ok(FraOutcome { path, heuristic, trace })
}
