//! Minimum-risk path search over a [`RiskMap`].
//!
//! A path is a sequence of 26-adjacent, unoccupied, non-repeating cells. Its
//! risk cost is the sum of the total cost of every cell entered, so the
//! origin itself is free. Risk is charged per cell regardless of whether the
//! move into it is straight or diagonal; metric distance is tracked
//! separately.

mod dijkstra;
mod heuristic;
mod search;

pub use dijkstra::{dijkstra_distance, dijkstra_risk};
pub use heuristic::{DeviationMode, HeuristicInfo, DEFAULT_DEVIATION_TOLERANCE};
pub use search::{risk_a_star, risk_a_star_masked};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{CellIndex, GridSpec, OccupancyGrid};
use crate::risk::RiskMap;

#[derive(Debug, Clone, PartialEq)]
pub struct FlightPath {
    pub vertices: Vec<CellIndex>,
    pub total_risk_cost: f64,
    pub distance_m: f64,
    /// Cells removed from the open set during the search that produced it.
    pub expanded_nodes: usize,
}

impl FlightPath {
    pub(crate) fn from_vertices(map: &RiskMap, vertices: Vec<CellIndex>, expanded_nodes: usize) -> Result<Self> {
        let total_risk_cost = path_cost(&vertices, map)?;
        let distance_m = path_distance(map.spec(), &vertices);
        Ok(Self {
            vertices,
            total_risk_cost,
            distance_m,
            expanded_nodes,
        })
    }

    pub fn origin(&self) -> CellIndex {
        self.vertices[0]
    }

    pub fn destination(&self) -> CellIndex {
        *self.vertices.last().expect("paths are never empty")
    }
}

/// Sum of the total cost of every vertex after the first. Infinite when any
/// counted vertex is occupied.
pub fn path_cost(vertices: &[CellIndex], map: &RiskMap) -> Result<f64> {
    let spec = map.spec();
    for v in vertices {
        spec.check(*v)?;
    }
    Ok(vertices.iter().skip(1).map(|v| map.total(*v)).sum())
}

/// Metric length in meters of the polyline through the cell centroids.
pub fn path_distance(spec: &GridSpec, vertices: &[CellIndex]) -> f64 {
    vertices.windows(2).map(|w| spec.segment_length_m(w[0], w[1])).sum()
}

/// First constraint violated by a candidate path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathViolation {
    Empty,
    OutOfBounds { index: usize },
    /// Zero move between consecutive vertices.
    HoverViolation { index: usize },
    /// Consecutive vertices are not 26-neighbors.
    AdjacencyViolation { index: usize },
    Occupied { index: usize },
    RepeatedVertex { index: usize },
}

impl std::fmt::Display for PathViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathViolation::Empty => write!(f, "path has no vertices"),
            PathViolation::OutOfBounds { index } => write!(f, "vertex {index} is outside the grid"),
            PathViolation::HoverViolation { index } => write!(f, "vertex {index} repeats its predecessor (hover)"),
            PathViolation::AdjacencyViolation { index } => {
                write!(f, "vertex {index} is not adjacent to its predecessor")
            }
            PathViolation::Occupied { index } => write!(f, "vertex {index} lies in an occupied cell"),
            PathViolation::RepeatedVertex { index } => write!(f, "vertex {index} revisits an earlier cell"),
        }
    }
}

/// Checks bounds, occupancy, single-cell moves, no hovering and no revisits.
/// Reports the first violation in path order.
pub fn validate_path(
    vertices: &[CellIndex],
    spec: &GridSpec,
    occupancy: &OccupancyGrid,
) -> std::result::Result<(), PathViolation> {
    if vertices.is_empty() {
        return Err(PathViolation::Empty);
    }
    let mut seen = std::collections::HashSet::with_capacity(vertices.len());
    for (index, v) in vertices.iter().enumerate() {
        if !spec.contains(*v) {
            return Err(PathViolation::OutOfBounds { index });
        }
        if index > 0 {
            let p = vertices[index - 1];
            let d = [p.x.abs_diff(v.x), p.y.abs_diff(v.y), p.z.abs_diff(v.z)];
            if d == [0, 0, 0] {
                return Err(PathViolation::HoverViolation { index });
            }
            if d.iter().any(|s| *s > 1) {
                return Err(PathViolation::AdjacencyViolation { index });
            }
        }
        if occupancy.is_occupied(*v) {
            return Err(PathViolation::Occupied { index });
        }
        if !seen.insert(*v) {
            return Err(PathViolation::RepeatedVertex { index });
        }
    }
    Ok(())
}

pub(crate) fn check_endpoints(map: &RiskMap, origin: CellIndex, destination: CellIndex) -> Result<()> {
    let spec = map.spec();
    spec.check(origin)?;
    spec.check(destination)?;
    for c in [origin, destination] {
        if map.is_occupied(c) {
            return Err(crate::Error::OccupiedEndpoint(c.to_string()));
        }
    }
    Ok(())
}

pub(crate) fn trace_back(prev: &[u32], spec: &GridSpec, destination: usize) -> Vec<CellIndex> {
    let mut out = vec![spec.unflat(destination)];
    let mut cur = destination;
    while prev[cur] != u32::MAX {
        cur = prev[cur] as usize;
        out.push(spec.unflat(cur));
    }
    out.reverse();
    out
}
