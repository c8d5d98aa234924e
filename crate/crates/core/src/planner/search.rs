use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::heuristic::Estimator;
use super::{check_endpoints, trace_back, FlightPath, HeuristicInfo};
use crate::error::{Error, Result};
use crate::grid::CellIndex;
use crate::risk::RiskMap;

#[derive(Debug, Clone, Copy)]
struct Entry {
    f: f64,
    seq: u64,
    cell: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed so the max-heap pops the smallest f, then the oldest entry.
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Best-first risk search guided by `info`. With a zero heuristic factor it
/// returns a minimum-risk path; with a positive factor the result may be
/// suboptimal but typically expands far fewer cells.
pub fn risk_a_star(
    map: &RiskMap,
    origin: CellIndex,
    destination: CellIndex,
    info: &HeuristicInfo,
) -> Result<FlightPath> {
    risk_a_star_masked(map, origin, destination, info, None)
}

/// As [`risk_a_star`], restricted to cells whose flag in `allowed` (flat
/// layout) is set. The origin and destination are always allowed.
pub fn risk_a_star_masked(
    map: &RiskMap,
    origin: CellIndex,
    destination: CellIndex,
    info: &HeuristicInfo,
    allowed: Option<&[bool]>,
) -> Result<FlightPath> {
    check_endpoints(map, origin, destination)?;
    let spec = *map.spec();
    info.validate(&spec, origin, destination)?;
    let n = spec.cell_count();
    if let Some(mask) = allowed {
        if mask.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "mask has {} entries, grid has {n} cells",
                mask.len()
            )));
        }
    }
    let totals = map.totals();
    let estimator = Estimator::new(&spec, info, destination);
    let src = spec.flat(origin);
    let dst = spec.flat(destination);
    let passable = |j: usize| totals[j].is_finite() && (j == dst || allowed.is_none_or(|m| m[j]));

    let mut g = vec![f64::INFINITY; n];
    let mut closed = vec![false; n];
    let mut prev = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    g[src] = 0.0;
    heap.push(Entry {
        f: estimator.estimate(origin).unwrap_or(0.0),
        seq,
        cell: src as u32,
    });
    let mut expanded = 0;
    while let Some(Entry { cell, .. }) = heap.pop() {
        let i = cell as usize;
        if closed[i] {
            continue;
        }
        closed[i] = true;
        expanded += 1;
        if i == dst {
            let vertices = trace_back(&prev, &spec, dst);
            return FlightPath::from_vertices(map, vertices, expanded);
        }
        let gi = g[i];
        spec.for_each_neighbor_flat(i, |j| {
            if closed[j] || !passable(j) {
                return;
            }
            let ng = gi + totals[j];
            if ng >= g[j] {
                return;
            }
            let Some(h) = (if j == dst { Some(0.0) } else { estimator.estimate(spec.unflat(j)) }) else {
                return;
            };
            g[j] = ng;
            prev[j] = i as u32;
            seq += 1;
            heap.push(Entry {
                f: ng + h,
                seq,
                cell: j as u32,
            });
        });
    }
    Err(Error::no_path(origin, destination))
}
