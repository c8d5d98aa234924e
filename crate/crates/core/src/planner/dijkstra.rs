use super::{check_endpoints, trace_back, FlightPath};
use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridSpec};
use crate::risk::RiskMap;

/// Exact minimum-risk path. Entering a cell costs its total risk.
///
/// This is the classic array-scan formulation: every round selects the
/// cheapest unsettled cell by a linear sweep, giving `O(V^2)` work and no
/// dependence on a priority queue. Ties resolve to the lowest flat index
/// and relaxation follows the fixed neighbor order, so output is
/// deterministic.
pub fn dijkstra_risk(map: &RiskMap, origin: CellIndex, destination: CellIndex) -> Result<FlightPath> {
    check_endpoints(map, origin, destination)?;
    let totals = map.totals();
    let spec = *map.spec();
    let (vertices, expanded) = dense_search(&spec, totals, origin, destination, |_, to| totals[to])
        .ok_or_else(|| Error::no_path(origin, destination))?;
    FlightPath::from_vertices(map, vertices, expanded)
}

/// Shortest metric path ignoring risk, with obstacles still enforced. The
/// returned path's risk cost is evaluated on `map`.
pub fn dijkstra_distance(map: &RiskMap, origin: CellIndex, destination: CellIndex) -> Result<FlightPath> {
    check_endpoints(map, origin, destination)?;
    let spec = *map.spec();
    let (vertices, expanded) = dense_search(&spec, map.totals(), origin, destination, |from, to| {
        spec.segment_length_m(spec.unflat(from), spec.unflat(to))
    })
    .ok_or_else(|| Error::no_path(origin, destination))?;
    FlightPath::from_vertices(map, vertices, expanded)
}

/// Cells whose total is infinite are impassable.
fn dense_search(
    spec: &GridSpec,
    totals: &[f64],
    origin: CellIndex,
    destination: CellIndex,
    weight: impl Fn(usize, usize) -> f64,
) -> Option<(Vec<CellIndex>, usize)> {
    let n = spec.cell_count();
    let src = spec.flat(origin);
    let dst = spec.flat(destination);
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut prev = vec![u32::MAX; n];
    dist[src] = 0.0;
    let mut expanded = 0;
    loop {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for i in 0..n {
            if !settled[i] && dist[i] < best_d {
                best_d = dist[i];
                best = i;
            }
        }
        if best == usize::MAX {
            return None;
        }
        settled[best] = true;
        expanded += 1;
        if best == dst {
            break;
        }
        spec.for_each_neighbor_flat(best, |j| {
            if settled[j] || !totals[j].is_finite() {
                return;
            }
            let nd = best_d + weight(best, j);
            if nd < dist[j] {
                dist[j] = nd;
                prev[j] = best as u32;
            }
        });
    }
    Some((trace_back(&prev, spec, dst), expanded))
}
