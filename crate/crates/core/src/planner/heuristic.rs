use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridSpec};

pub const DEFAULT_DEVIATION_TOLERANCE: f64 = 0.2;

/// Floor on the straight-line estimate when computing relative deviation.
const DEVIATION_FLOOR: f64 = 1e-9;

/// What happens to a node whose track estimate deviates too far from the
/// straight-line estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationMode {
    /// Use the longer along-track estimate for that node.
    #[default]
    Penalize,
    /// Drop the node from the search.
    Prune,
}

/// Heuristic guidance for [`risk_a_star`](super::risk_a_star).
///
/// Distances are measured in cell units: world offsets are divided by the
/// cell edge length on each axis, so one straight move is length 1 on every
/// axis and `heuristic_factor` reads as risk cost per cell traversed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicInfo {
    pub heuristic_factor: f64,
    /// World-space polyline from the origin centroid through the cluster
    /// centroids to the destination centroid. Empty means no track.
    pub centroid_track: Vec<[f64; 3]>,
    pub deviation_tolerance: f64,
    #[serde(default)]
    pub deviation_mode: DeviationMode,
}

impl Default for HeuristicInfo {
    fn default() -> Self {
        Self::none()
    }
}

impl HeuristicInfo {
    /// No heuristic at all; the search then behaves like Dijkstra.
    pub fn none() -> Self {
        Self {
            heuristic_factor: 0.0,
            centroid_track: Vec::new(),
            deviation_tolerance: DEFAULT_DEVIATION_TOLERANCE,
            deviation_mode: DeviationMode::Penalize,
        }
    }

    /// Straight-line heuristic with the given factor and no track.
    pub fn straight(factor: f64) -> Self {
        Self {
            heuristic_factor: factor,
            ..Self::none()
        }
    }

    pub fn validate(&self, spec: &GridSpec, origin: CellIndex, destination: CellIndex) -> Result<()> {
        if !(self.heuristic_factor >= 0.0 && self.heuristic_factor.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "heuristic factor must be finite and >= 0, got {}",
                self.heuristic_factor
            )));
        }
        if !(self.deviation_tolerance >= 0.0) {
            return Err(Error::InvalidInput("deviation tolerance must be >= 0".into()));
        }
        if let (Some(first), Some(last)) = (self.centroid_track.first(), self.centroid_track.last()) {
            let close = |a: &[f64; 3], b: [f64; 3]| (0..3).all(|i| (a[i] - b[i]).abs() <= 1e-6 * spec.unit_m[i]);
            if !close(first, spec.centroid(origin)) || !close(last, spec.centroid(destination)) {
                return Err(Error::InvalidInput(
                    "centroid track must start at the origin centroid and end at the destination centroid".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Heuristic evaluator with the track converted to cell units.
pub(crate) struct Estimator {
    factor: f64,
    tolerance: f64,
    mode: DeviationMode,
    dest: [f64; 3],
    track: Vec<[f64; 3]>,
    /// Along-track length from each track vertex to the end.
    remaining: Vec<f64>,
}

impl Estimator {
    pub(crate) fn new(spec: &GridSpec, info: &HeuristicInfo, destination: CellIndex) -> Self {
        let origin_world = spec.ground_origin;
        let unit = spec.unit_m;
        let to_cells = |p: &[f64; 3]| {
            [
                (p[0] - origin_world[0]) / unit[0] - 0.5,
                (p[1] - origin_world[1]) / unit[1] - 0.5,
                (p[2] - origin_world[2]) / unit[2] - 0.5,
            ]
        };
        let track: Vec<[f64; 3]> = if info.heuristic_factor > 0.0 && info.centroid_track.len() >= 2 {
            info.centroid_track.iter().map(to_cells).collect()
        } else {
            Vec::new()
        };
        let mut remaining = vec![0.0; track.len()];
        for i in (0..track.len().saturating_sub(1)).rev() {
            remaining[i] = remaining[i + 1] + dist(track[i], track[i + 1]);
        }
        Self {
            factor: info.heuristic_factor,
            tolerance: info.deviation_tolerance,
            mode: info.deviation_mode,
            dest: [destination.x as f64, destination.y as f64, destination.z as f64],
            track,
            remaining,
        }
    }

    /// Estimated remaining cost from `c`, or `None` if the node is pruned.
    #[inline]
    pub(crate) fn estimate(&self, c: CellIndex) -> Option<f64> {
        if self.factor == 0.0 {
            return Some(0.0);
        }
        let p = [c.x as f64, c.y as f64, c.z as f64];
        let to_dest = self.factor * dist(p, self.dest);
        if self.track.is_empty() {
            return Some(to_dest);
        }
        let along = self.factor * self.track_distance(p);
        let deviation = (along - to_dest) / to_dest.max(DEVIATION_FLOOR);
        if deviation < self.tolerance {
            Some(to_dest)
        } else {
            match self.mode {
                DeviationMode::Penalize => Some(along),
                DeviationMode::Prune => None,
            }
        }
    }

    /// Distance to the nearest point on the track plus the along-track
    /// length from there to the destination.
    fn track_distance(&self, p: [f64; 3]) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.track.len() - 1 {
            let (a, b) = (self.track[i], self.track[i + 1]);
            let ab = sub(b, a);
            let len2 = dot(ab, ab);
            let t = if len2 > 0.0 { (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let q = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
            let seg_len = len2.sqrt();
            let total = dist(p, q) + (1.0 - t) * seg_len + self.remaining[i + 1];
            if total < best {
                best = total;
            }
        }
        best
    }
}

#[inline]
fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    dot(sub(a, b), sub(a, b)).sqrt()
}
