//! Helpers shared by the integration suites.
#![allow(dead_code)]

use airrisk::{CellIndex, GridSpec, OccupancyGrid, RiskMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const UNIT: [f64; 3] = [100.0, 100.0, 30.0];

/// Random map whose costs are multiples of 1/16 in [1/16, 2], so every path
/// sum is exact in binary floating point. Corner cells stay free.
pub fn dyadic_map(seed: u64, dims: [usize; 3], obstacle_frac: f64) -> RiskMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = GridSpec::new(dims[0], dims[1], dims[2], UNIT).unwrap();
    let mut occ = OccupancyGrid::empty(spec);
    let (o, d) = corners(&spec);
    for i in 0..spec.cell_count() {
        let c = spec.unflat(i);
        if c != o && c != d && rng.random_bool(obstacle_frac) {
            occ.set(c, true);
        }
    }
    let costs = (0..spec.cell_count()).map(|_| rng.random_range(1..=32) as f64 / 16.0).collect();
    RiskMap::from_total_costs(occ, costs).unwrap()
}

pub fn corners(spec: &GridSpec) -> (CellIndex, CellIndex) {
    (CellIndex::new(0, 0, 0), CellIndex::new(spec.nx - 1, spec.ny - 1, spec.nz - 1))
}

fn neighbors(dims: [usize; 3], c: [usize; 3]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for dx in -1i64..=1 {
        for dy in -1i64..=1 {
            for dz in -1i64..=1 {
                if (dx, dy, dz) == (0, 0, 0) {
                    continue;
                }
                let n = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                if (0..3).all(|a| n[a] >= 0 && n[a] < dims[a] as i64) {
                    out.push([n[0] as usize, n[1] as usize, n[2] as usize]);
                }
            }
        }
    }
    out
}

struct Enumerator<'a> {
    dims: [usize; 3],
    cost: &'a dyn Fn([usize; 3]) -> Option<f64>,
    dst: [usize; 3],
    min_step: f64,
    prune: bool,
    best: Option<f64>,
    paths: u64,
}

impl Enumerator<'_> {
    fn dfs(&mut self, c: [usize; 3], acc: f64, visited: &mut Vec<[usize; 3]>) {
        if c == self.dst {
            self.paths += 1;
            if self.best.is_none_or(|b| acc < b) {
                self.best = Some(acc);
            }
            return;
        }
        let mut next: Vec<([usize; 3], f64)> = neighbors(self.dims, c)
            .into_iter()
            .filter(|n| !visited.contains(n))
            .filter_map(|n| (self.cost)(n).map(|k| (n, acc + k)))
            .collect();
        if self.prune {
            next.sort_by(|a, b| a.1.total_cmp(&b.1));
        }
        for (n, g) in next {
            if self.prune {
                let cheb = (0..3).map(|a| n[a].abs_diff(self.dst[a])).max().unwrap() as f64;
                if self.best.is_some_and(|b| g + cheb * self.min_step >= b) {
                    continue;
                }
            }
            visited.push(n);
            self.dfs(n, g, visited);
            visited.pop();
        }
    }
}

/// Minimum risk cost over simple paths by depth-first enumeration. With
/// `prune`, partial paths that provably cannot beat the incumbent are cut
/// (costs are positive, each remaining step costs at least the cheapest
/// cell). Returns the cost and the number of complete paths visited.
pub fn enumerate_min_cost(map: &RiskMap, origin: CellIndex, destination: CellIndex, prune: bool) -> (Option<f64>, u64) {
    let spec = map.spec();
    let dims = [spec.nx, spec.ny, spec.nz];
    let cost = |c: [usize; 3]| {
        let v = map.total(CellIndex::new(c[0], c[1], c[2]));
        v.is_finite().then_some(v)
    };
    let min_step = map.totals().iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    let mut e = Enumerator {
        dims,
        cost: &cost,
        dst: [destination.x, destination.y, destination.z],
        min_step,
        prune,
        best: None,
        paths: 0,
    };
    let src = [origin.x, origin.y, origin.z];
    let mut visited = vec![src];
    e.dfs(src, 0.0, &mut visited);
    (e.best, e.paths)
}
