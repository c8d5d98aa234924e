//! Estimation-of-distribution search over open-cell masks, and the two
//! hybrids built on it: [`eda_ra_star`] runs a restricted path search per
//! sampled mask, [`eda_fra_star`] evolves masks by region cost only and then
//! runs one guided search with heuristics extracted by k-means.

mod hybrid;
mod kmeans;

pub use hybrid::{eda_fra_star, eda_ra_star, region_fitness, FraOutcome, RaOutcome, TraceRow};
pub use kmeans::{kmeans, kmeans_heuristic, KMeansResult};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridSpec, OccupancyGrid};

/// Search run inside each species' feasible region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnerSearch {
    /// Zero-heuristic risk search, i.e. exact within the mask.
    Dijkstra,
    /// Straight-line guided search with the given factor.
    RiskAStar { heuristic_factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdaParams {
    pub population_size: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub dominant_fraction: f64,
    pub rng_seed: u64,
    pub k_clusters: usize,
    /// Added to the region fitness of masks that disconnect origin and
    /// destination. `None` means max finite cost times cell count.
    pub connectivity_penalty: Option<f64>,
    pub initial_probability: f64,
    pub inner_search: InnerSearch,
    /// Evaluate species on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for EdaParams {
    fn default() -> Self {
        Self {
            population_size: 50,
            iterations: 100,
            learning_rate: 0.1,
            dominant_fraction: 0.3,
            rng_seed: 0,
            k_clusters: 5,
            connectivity_penalty: None,
            initial_probability: 0.5,
            inner_search: InnerSearch::Dijkstra,
            parallel: false,
        }
    }
}

impl EdaParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.population_size == 0 {
            return bad("population_size must be >= 1");
        }
        if self.iterations == 0 {
            return bad("iterations must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.learning_rate) {
            return bad("learning_rate must lie in [0, 1]");
        }
        if !(self.dominant_fraction > 0.0 && self.dominant_fraction <= 1.0) {
            return bad("dominant_fraction must lie in (0, 1]");
        }
        if self.k_clusters == 0 {
            return bad("k_clusters must be >= 1");
        }
        if let Some(p) = self.connectivity_penalty {
            if !(p > 0.0 && p.is_finite()) {
                return bad("connectivity_penalty must be finite and > 0");
            }
        }
        if !(0.0..=1.0).contains(&self.initial_probability) {
            return bad("initial_probability must lie in [0, 1]");
        }
        if let InnerSearch::RiskAStar { heuristic_factor } = self.inner_search {
            if !(heuristic_factor >= 0.0 && heuristic_factor.is_finite()) {
                return bad("inner heuristic_factor must be finite and >= 0");
            }
        }
        Ok(())
    }

    /// Number of species kept for the probability update.
    pub fn dominant_count(&self) -> usize {
        ((self.dominant_fraction * self.population_size as f64).ceil() as usize).clamp(1, self.population_size)
    }

    /// Independent stream for one species of one iteration.
    pub(crate) fn species_rng(&self, iteration: usize, species: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(((iteration as u64) << 32) | species as u64);
        rng
    }

    pub(crate) fn clustering_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(u64::MAX);
        rng
    }
}

/// Per-cell probability of a cell being open in a sampled species.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    spec: GridSpec,
    p: Vec<f64>,
    pinned: [usize; 2],
}

impl ProbabilityField {
    pub fn uniform(spec: GridSpec, value: f64, origin: CellIndex, destination: CellIndex) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidInput(format!("probability {value} outside [0, 1]")));
        }
        spec.check(origin)?;
        spec.check(destination)?;
        let mut field = Self {
            spec,
            p: vec![value; spec.cell_count()],
            pinned: [spec.flat(origin), spec.flat(destination)],
        };
        field.pin();
        Ok(field)
    }

    fn pin(&mut self) {
        for i in self.pinned {
            self.p[i] = 1.0;
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, c: CellIndex) -> f64 {
        self.p[self.spec.flat(c)]
    }
}

/// One sampled mask (`true` = open) and its fitness, lower is better.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub mask: Vec<bool>,
    pub fitness: f64,
}

impl Species {
    pub fn open_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn open_points(&self, spec: &GridSpec) -> Vec<CellIndex> {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, m)| **m)
            .map(|(i, _)| spec.unflat(i))
            .collect()
    }
}

/// Bernoulli draw per cell, then origin and destination opened and occupied
/// cells closed. Fitness starts at +inf.
pub fn sample_species<R: Rng + ?Sized>(prob: &ProbabilityField, occupancy: &OccupancyGrid, rng: &mut R) -> Species {
    let occupied = occupancy.flags();
    let mut mask: Vec<bool> = prob.p.iter().map(|&p| rng.random::<f64>() < p).collect();
    for (m, o) in mask.iter_mut().zip(occupied) {
        if *o {
            *m = false;
        }
    }
    for i in prob.pinned {
        mask[i] = true;
    }
    Species {
        mask,
        fitness: f64::INFINITY,
    }
}

/// `p <- (1 - l) p + l * DS / DN` with DS the per-cell count of open masks
/// among the dominant species and DN their number.
pub fn update_probability(prob: &ProbabilityField, dominant: &[&Species], l_rate: f64) -> Result<ProbabilityField> {
    if dominant.is_empty() {
        return Err(Error::EmptyDominantSet);
    }
    if !(0.0..=1.0).contains(&l_rate) {
        return Err(Error::InvalidInput(format!("learning rate {l_rate} outside [0, 1]")));
    }
    let n = prob.p.len();
    if let Some(s) = dominant.iter().find(|s| s.mask.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "species mask has {} entries, field has {n}",
            s.mask.len()
        )));
    }
    let mut counts = vec![0u32; n];
    for s in dominant {
        for (c, m) in counts.iter_mut().zip(&s.mask) {
            *c += *m as u32;
        }
    }
    let dn = dominant.len() as f64;
    let mut out = prob.clone();
    for (p, c) in out.p.iter_mut().zip(&counts) {
        *p = ((1.0 - l_rate) * *p + l_rate * (*c as f64 / dn)).clamp(0.0, 1.0);
    }
    out.pin();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(nx: usize, ny: usize, nz: usize) -> (GridSpec, OccupancyGrid, CellIndex, CellIndex) {
        let spec = GridSpec::new(nx, ny, nz, [100.0, 100.0, 30.0]).unwrap();
        let mut occ = OccupancyGrid::empty(spec);
        occ.set(CellIndex::new(1, 1, 0), true);
        (spec, occ, CellIndex::new(0, 0, 0), CellIndex::new(nx - 1, ny - 1, nz - 1))
    }

    #[test]
    fn extreme_probabilities() {
        let (spec, occ, o, d) = setup(6, 6, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let all = sample_species(&ProbabilityField::uniform(spec, 1.0, o, d).unwrap(), &occ, &mut rng);
        assert_eq!(all.open_count(), spec.cell_count() - 1);
        assert!(!all.mask[spec.flat(CellIndex::new(1, 1, 0))]);
        let none = sample_species(&ProbabilityField::uniform(spec, 0.0, o, d).unwrap(), &occ, &mut rng);
        assert_eq!(none.open_points(&spec), vec![o, d]);
    }

    #[test]
    fn half_probability_opens_half() {
        let (spec, _, o, d) = setup(100, 100, 1);
        let occ = OccupancyGrid::empty(spec);
        let field = ProbabilityField::uniform(spec, 0.5, o, d).unwrap();
        for seed in 0..20 {
            let s = sample_species(&field, &occ, &mut ChaCha8Rng::seed_from_u64(seed));
            let frac = s.open_count() as f64 / spec.cell_count() as f64;
            assert!((frac - 0.5).abs() <= 0.02, "seed {seed}: {frac}");
        }
    }

    #[test]
    fn update_rule_extremes() {
        let (spec, occ, o, d) = setup(5, 5, 2);
        let field = ProbabilityField::uniform(spec, 0.3, o, d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = sample_species(&field, &occ, &mut rng);
        let b = sample_species(&field, &occ, &mut rng);
        assert_eq!(update_probability(&field, &[&a, &b], 0.0).unwrap(), field);
        let full = update_probability(&field, &[&a, &b], 1.0).unwrap();
        for i in 0..spec.cell_count() {
            let expected = (a.mask[i] as u8 + b.mask[i] as u8) as f64 / 2.0;
            assert_eq!(full.values()[i], expected);
        }
        assert_eq!(full.get(o), 1.0);
        assert_eq!(full.get(d), 1.0);
        assert!(matches!(update_probability(&field, &[], 0.5), Err(Error::EmptyDominantSet)));
    }

    #[test]
    fn repeated_updates_stay_in_unit_interval() {
        let (spec, occ, o, d) = setup(8, 8, 2);
        let mut field = ProbabilityField::uniform(spec, 0.5, o, d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let pop: Vec<Species> = (0..4).map(|_| sample_species(&field, &occ, &mut rng)).collect();
            let refs: Vec<&Species> = pop.iter().take(2).collect();
            field = update_probability(&field, &refs, 0.37).unwrap();
            assert!(field.values().iter().all(|p| (0.0..=1.0).contains(p)));
            assert_eq!(field.get(o), 1.0);
        }
    }

    #[test]
    fn params_validation_and_dominant_count() {
        let p = EdaParams::default();
        p.validate().unwrap();
        assert_eq!(p.dominant_count(), 15);
        let q = EdaParams {
            population_size: 7,
            ..p.clone()
        };
        assert_eq!(q.dominant_count(), 3);
        for bad in [
            EdaParams { population_size: 0, ..p.clone() },
            EdaParams { learning_rate: 1.5, ..p.clone() },
            EdaParams { dominant_fraction: 0.0, ..p.clone() },
            EdaParams { connectivity_penalty: Some(-1.0), ..p.clone() },
            EdaParams { k_clusters: 0, ..p.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn substreams_differ() {
        let p = EdaParams::default();
        let a: u64 = p.species_rng(0, 0).random();
        let b: u64 = p.species_rng(0, 1).random();
        let c: u64 = p.species_rng(1, 0).random();
        assert!(a != b && a != c && b != c);
        assert_eq!(a, p.species_rng(0, 0).random::<u64>());
    }
}
