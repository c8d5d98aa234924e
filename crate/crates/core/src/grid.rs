//! Uniform voxel discretization of a bounded airspace volume.
//!
//! Cells are addressed with 0-based [`CellIndex`] values. The flattened
//! layout used by every per-cell array in this crate is row-major with `x`
//! varying fastest, then `y`, then `z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions and placement of a voxel grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    /// Edge lengths of one cell in meters, `[x, y, z]`.
    pub unit_m: [f64; 3],
    /// World coordinates of the lower corner of cell `(0, 0, 0)`.
    #[serde(default)]
    pub ground_origin: [f64; 3],
}

/// 0-based cell address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl CellIndex {
    pub const fn new(x: usize, y: usize, z: usize) -> Self {
        Self { x, y, z }
    }

    /// Converts a 1-based `(x, y, z)` triple as used on the command line.
    pub fn from_one_based(x: usize, y: usize, z: usize) -> Result<Self> {
        if x == 0 || y == 0 || z == 0 {
            return Err(Error::OutOfBounds(format!(
                "1-based coordinates must be >= 1, got ({x}, {y}, {z})"
            )));
        }
        Ok(Self::new(x - 1, y - 1, z - 1))
    }

    pub fn one_based(&self) -> [usize; 3] {
        [self.x + 1, self.y + 1, self.z + 1]
    }
}

impl std::fmt::Display for CellIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Offsets of the 26-neighborhood in the fixed enumeration order:
/// `dx` outermost, then `dy`, then `dz`, each ascending over `-1, 0, 1`.
pub const NEIGHBOR_OFFSETS: [[i8; 3]; 26] = {
    let mut out = [[0i8; 3]; 26];
    let mut n = 0;
    let mut dx = -1i8;
    while dx <= 1 {
        let mut dy = -1i8;
        while dy <= 1 {
            let mut dz = -1i8;
            while dz <= 1 {
                if !(dx == 0 && dy == 0 && dz == 0) {
                    out[n] = [dx, dy, dz];
                    n += 1;
                }
                dz += 1;
            }
            dy += 1;
        }
        dx += 1;
    }
    out
};

impl GridSpec {
    pub fn new(nx: usize, ny: usize, nz: usize, unit_m: [f64; 3]) -> Result<Self> {
        let spec = Self {
            nx,
            ny,
            nz,
            unit_m,
            ground_origin: [0.0; 3],
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The 6 km x 6 km x 120 m volume split into 100 m x 100 m x 30 m blocks.
    pub fn case_study() -> Self {
        Self {
            nx: 60,
            ny: 60,
            nz: 4,
            unit_m: [100.0, 100.0, 30.0],
            ground_origin: [0.0; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.nz == 0 {
            return Err(Error::NonPositiveDimension(format!(
                "cell counts must be >= 1, got {}x{}x{}",
                self.nx, self.ny, self.nz
            )));
        }
        if self.unit_m.iter().any(|u| !(u.is_finite() && *u > 0.0)) {
            return Err(Error::NonPositiveDimension(format!(
                "unit dimensions must be > 0, got {:?}",
                self.unit_m
            )));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn footprint_len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn contains(&self, c: CellIndex) -> bool {
        c.x < self.nx && c.y < self.ny && c.z < self.nz
    }

    pub fn check(&self, c: CellIndex) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::OutOfBounds(format!(
                "cell {c} outside {}x{}x{} grid",
                self.nx, self.ny, self.nz
            )))
        }
    }

    #[inline]
    pub fn flat(&self, c: CellIndex) -> usize {
        (c.z * self.ny + c.y) * self.nx + c.x
    }

    #[inline]
    pub fn unflat(&self, i: usize) -> CellIndex {
        let x = i % self.nx;
        let y = (i / self.nx) % self.ny;
        let z = i / (self.nx * self.ny);
        CellIndex { x, y, z }
    }

    #[inline]
    pub fn ground_flat(&self, x: usize, y: usize) -> usize {
        y * self.nx + x
    }

    /// World-space centroid of a cell in meters.
    pub fn centroid(&self, c: CellIndex) -> [f64; 3] {
        [
            self.ground_origin[0] + (c.x as f64 + 0.5) * self.unit_m[0],
            self.ground_origin[1] + (c.y as f64 + 0.5) * self.unit_m[1],
            self.ground_origin[2] + (c.z as f64 + 0.5) * self.unit_m[2],
        ]
    }

    /// Ground-plane centroid of column `(x, y)` in meters.
    pub fn ground_centroid(&self, x: usize, y: usize) -> [f64; 2] {
        [
            self.ground_origin[0] + (x as f64 + 0.5) * self.unit_m[0],
            self.ground_origin[1] + (y as f64 + 0.5) * self.unit_m[1],
        ]
    }

    /// Maps a world point to the cell containing it, if any.
    pub fn cell_at(&self, p: [f64; 3]) -> Option<CellIndex> {
        let mut idx = [0usize; 3];
        let dims = [self.nx, self.ny, self.nz];
        for a in 0..3 {
            let t = (p[a] - self.ground_origin[a]) / self.unit_m[a];
            if !(t >= 0.0) || t >= dims[a] as f64 {
                return None;
            }
            idx[a] = t as usize;
        }
        Some(CellIndex::new(idx[0], idx[1], idx[2]))
    }

    /// Euclidean length in meters of the segment between two cell centroids.
    pub fn segment_length_m(&self, a: CellIndex, b: CellIndex) -> f64 {
        let dx = (a.x as f64 - b.x as f64) * self.unit_m[0];
        let dy = (a.y as f64 - b.y as f64) * self.unit_m[1];
        let dz = (a.z as f64 - b.z as f64) * self.unit_m[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Calls `f` for every in-bounds neighbor in [`NEIGHBOR_OFFSETS`] order.
    #[inline]
    pub fn for_each_neighbor(&self, c: CellIndex, mut f: impl FnMut(CellIndex)) {
        for off in NEIGHBOR_OFFSETS.iter() {
            let x = c.x as isize + off[0] as isize;
            let y = c.y as isize + off[1] as isize;
            let z = c.z as isize + off[2] as isize;
            if x < 0 || y < 0 || z < 0 {
                continue;
            }
            let n = CellIndex::new(x as usize, y as usize, z as usize);
            if self.contains(n) {
                f(n);
            }
        }
    }

    /// Flat-index form of [`for_each_neighbor`](Self::for_each_neighbor),
    /// same order.
    #[inline]
    pub fn for_each_neighbor_flat(&self, i: usize, mut f: impl FnMut(usize)) {
        let c = self.unflat(i);
        let plane = self.nx * self.ny;
        let (x0, x1) = (c.x.saturating_sub(1), (c.x + 2).min(self.nx));
        let (y0, y1) = (c.y.saturating_sub(1), (c.y + 2).min(self.ny));
        let (z0, z1) = (c.z.saturating_sub(1), (c.z + 2).min(self.nz));
        for x in x0..x1 {
            for y in y0..y1 {
                let row = y * self.nx + x;
                for z in z0..z1 {
                    let j = z * plane + row;
                    if j != i {
                        f(j);
                    }
                }
            }
        }
    }
}

/// Builds a grid from the volume extent and the cell size, both in meters.
pub fn build_grid(extent_m: [f64; 3], unit_m: [f64; 3]) -> Result<GridSpec> {
    let mut counts = [0usize; 3];
    for a in 0..3 {
        if !(extent_m[a].is_finite() && extent_m[a] > 0.0) || !(unit_m[a].is_finite() && unit_m[a] > 0.0) {
            return Err(Error::NonPositiveDimension(format!(
                "extent {:?} and unit {:?} must be strictly positive",
                extent_m, unit_m
            )));
        }
        let ratio = extent_m[a] / unit_m[a];
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::NonDivisibleExtent {
                axis: a,
                extent: extent_m[a],
                unit: unit_m[a],
            });
        }
        counts[a] = rounded as usize;
    }
    GridSpec::new(counts[0], counts[1], counts[2], unit_m)
}

/// All in-bounds 26-neighbors of `c`, in the fixed enumeration order.
pub fn neighbors(spec: &GridSpec, c: CellIndex) -> Result<Vec<CellIndex>> {
    spec.check(c)?;
    let mut out = Vec::with_capacity(26);
    spec.for_each_neighbor(c, |n| out.push(n));
    Ok(out)
}

/// Representative altitude of layer `z`: the top of the layer.
pub fn layer_altitude(spec: &GridSpec, z: usize) -> Result<f64> {
    if z >= spec.nz {
        return Err(Error::OutOfBounds(format!("layer {z} outside 0..{}", spec.nz)));
    }
    Ok((z + 1) as f64 * spec.unit_m[2])
}

/// Per-cell obstacle flags.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    spec: GridSpec,
    occupied: Vec<bool>,
}

impl OccupancyGrid {
    pub fn empty(spec: GridSpec) -> Self {
        Self {
            spec,
            occupied: vec![false; spec.cell_count()],
        }
    }

    pub fn from_flags(spec: GridSpec, occupied: Vec<bool>) -> Result<Self> {
        if occupied.len() != spec.cell_count() {
            return Err(Error::DimensionMismatch(format!(
                "occupancy has {} entries, grid has {} cells",
                occupied.len(),
                spec.cell_count()
            )));
        }
        Ok(Self { spec, occupied })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn is_occupied(&self, c: CellIndex) -> bool {
        self.occupied[self.spec.flat(c)]
    }

    pub fn flags(&self) -> &[bool] {
        &self.occupied
    }

    pub fn set(&mut self, c: CellIndex, occupied: bool) {
        let i = self.spec.flat(c);
        self.occupied[i] = occupied;
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|o| **o).count()
    }
}

/// Marks cell `(x, y, z)` occupied when the building at `(x, y)` rises above
/// the cell's lower boundary `z * unit_z`.
pub fn mark_obstacles(spec: &GridSpec, building_heights: &[f64]) -> Result<OccupancyGrid> {
    if building_heights.len() != spec.footprint_len() {
        return Err(Error::DimensionMismatch(format!(
            "building field has {} entries, footprint is {}x{}",
            building_heights.len(),
            spec.nx,
            spec.ny
        )));
    }
    if let Some(h) = building_heights.iter().find(|h| !(**h >= 0.0) || !h.is_finite()) {
        return Err(Error::InvalidInput(format!("building height {h} must be finite and >= 0")));
    }
    let mut occ = OccupancyGrid::empty(*spec);
    for z in 0..spec.nz {
        let lower = z as f64 * spec.unit_m[2];
        for y in 0..spec.ny {
            for x in 0..spec.nx {
                if building_heights[spec.ground_flat(x, y)] > lower {
                    occ.set(CellIndex::new(x, y, z), true);
                }
            }
        }
    }
    Ok(occ)
}
