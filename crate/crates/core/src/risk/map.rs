use serde::{Deserialize, Serialize};

use super::{estimate_densities, noise_risk, people_risk, property_risk, vehicle_risk, RiskModel};
use crate::error::{Error, Result};
use crate::grid::{layer_altitude, mark_obstacles, CellIndex, GridSpec, OccupancyGrid};
use crate::scenario::UrbanScenario;

/// Weights of the fatality, property and noise components. Must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskWeights {
    pub fatality: f64,
    pub property: f64,
    pub noise: f64,
}

impl RiskWeights {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(fatality: f64, property: f64, noise: f64) -> Result<Self> {
        let w = Self {
            fatality,
            property,
            noise,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.as_array();
        if all.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidWeights(format!("each weight must be in [0, 1], got {all:?}")));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("weights must sum to 1, got {sum}")));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.fatality, self.property, self.noise]
    }
}

impl Default for RiskWeights {
    fn default() -> Self {
        Self {
            fatality: 0.5,
            property: 0.25,
            noise: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Fatality,
    Property,
    Noise,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Fatality, Component::Property, Component::Noise];

    pub fn name(&self) -> &'static str {
        match self {
            Component::Fatality => "fatality",
            Component::Property => "property",
            Component::Noise => "noise",
        }
    }

    fn slot(&self) -> usize {
        *self as usize
    }
}

/// A component field divided by its maximum over unoccupied cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub values: Vec<f64>,
    /// Reciprocal of the maximum.
    pub omega: f64,
}

/// Divides `raw` by its maximum over cells where `occupied` is false.
/// Occupied cells are set to zero.
pub fn normalize_components(component: Component, raw: &[f64], occupied: &[bool]) -> Result<Normalized> {
    let max = raw
        .iter()
        .zip(occupied)
        .filter(|(_, o)| !**o)
        .map(|(v, _)| *v)
        .fold(0.0f64, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::ZeroMaximum(component.name()));
    }
    let omega = 1.0 / max;
    let values = raw
        .iter()
        .zip(occupied)
        .map(|(v, o)| if *o { 0.0 } else { v / max })
        .collect();
    Ok(Normalized { values, omega })
}

/// Per-cell risk components and the weighted total cost over a 3D grid.
///
/// Occupied cells carry an infinite total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskMap {
    spec: GridSpec,
    occupancy: OccupancyGrid,
    raw: [Vec<f64>; 3],
    normalized: [Vec<f64>; 3],
    omega: [f64; 3],
    weights: RiskWeights,
    total: Vec<f64>,
}

impl RiskMap {
    /// Assembles a map from raw component fields, normalizing and weighting
    /// them. All-zero components are left at zero with `omega = 0`.
    pub fn from_components(occupancy: OccupancyGrid, raw: [Vec<f64>; 3], weights: RiskWeights) -> Result<Self> {
        weights.validate()?;
        let spec = *occupancy.spec();
        let n = spec.cell_count();
        if raw.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("component fields must have {n} cells")));
        }
        let mut normalized: [Vec<f64>; 3] = Default::default();
        let mut omega = [0.0; 3];
        for c in Component::ALL {
            let i = c.slot();
            match normalize_components(c, &raw[i], occupancy.flags()) {
                Ok(norm) => {
                    normalized[i] = norm.values;
                    omega[i] = norm.omega;
                }
                Err(Error::ZeroMaximum(_)) => normalized[i] = vec![0.0; n],
                Err(e) => return Err(e),
            }
        }
        Self::from_parts(occupancy, raw, normalized, omega, weights)
    }

    /// Assembles a map from already normalized components.
    pub(crate) fn from_parts(
        occupancy: OccupancyGrid,
        raw: [Vec<f64>; 3],
        normalized: [Vec<f64>; 3],
        omega: [f64; 3],
        weights: RiskWeights,
    ) -> Result<Self> {
        weights.validate()?;
        let spec = *occupancy.spec();
        let n = spec.cell_count();
        if raw.iter().chain(&normalized).any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("component fields must have {n} cells")));
        }
        let w = weights.as_array();
        let total = (0..n)
            .map(|k| {
                if occupancy.flags()[k] {
                    f64::INFINITY
                } else {
                    w[0] * normalized[0][k] + w[1] * normalized[1][k] + w[2] * normalized[2][k]
                }
            })
            .collect();
        Ok(Self {
            spec,
            occupancy,
            raw,
            normalized,
            omega,
            weights,
            total,
        })
    }

    /// A map whose total cost is given directly; used for synthetic planner
    /// inputs. The totals are stored as the fatality component.
    pub fn from_total_costs(occupancy: OccupancyGrid, totals: Vec<f64>) -> Result<Self> {
        let spec = *occupancy.spec();
        if totals.len() != spec.cell_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} costs, got {}",
                spec.cell_count(),
                totals.len()
            )));
        }
        if let Some(v) = totals.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!("cell costs must be finite and >= 0, got {v}")));
        }
        let n = totals.len();
        let total = totals
            .iter()
            .zip(occupancy.flags())
            .map(|(v, o)| if *o { f64::INFINITY } else { *v })
            .collect();
        Ok(Self {
            spec,
            occupancy,
            raw: [totals.clone(), vec![0.0; n], vec![0.0; n]],
            normalized: [totals, vec![0.0; n], vec![0.0; n]],
            omega: [1.0, 0.0, 0.0],
            weights: RiskWeights::new(1.0, 0.0, 0.0)?,
            total,
        })
    }

    /// Every unoccupied cell costs `cost`.
    pub fn uniform(occupancy: OccupancyGrid, cost: f64) -> Result<Self> {
        let n = occupancy.spec().cell_count();
        Self::from_total_costs(occupancy, vec![cost; n])
    }

    /// The same components re-aggregated under different weights.
    pub fn reweighted(&self, weights: RiskWeights) -> Result<Self> {
        Self::from_components(self.occupancy.clone(), self.raw.clone(), weights)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn occupancy(&self) -> &OccupancyGrid {
        &self.occupancy
    }

    pub fn weights(&self) -> RiskWeights {
        self.weights
    }

    pub fn omega(&self, c: Component) -> f64 {
        self.omega[c.slot()]
    }

    pub fn raw(&self, c: Component) -> &[f64] {
        &self.raw[c.slot()]
    }

    pub fn normalized(&self, c: Component) -> &[f64] {
        &self.normalized[c.slot()]
    }

    /// Total cost per cell in flat layout.
    pub fn totals(&self) -> &[f64] {
        &self.total
    }

    #[inline]
    pub fn total(&self, c: CellIndex) -> f64 {
        self.total[self.spec.flat(c)]
    }

    #[inline]
    pub fn is_occupied(&self, c: CellIndex) -> bool {
        self.occupancy.is_occupied(c)
    }

    /// Largest finite total cost.
    pub fn max_finite_total(&self) -> f64 {
        self.total.iter().filter(|v| v.is_finite()).fold(0.0, |a, b| a.max(*b))
    }

    pub fn layer_summary(&self) -> Vec<LayerSummary> {
        let plane = self.spec.footprint_len();
        (0..self.spec.nz)
            .map(|z| {
                let range = z * plane..(z + 1) * plane;
                let free: Vec<usize> = range.filter(|k| !self.occupancy.flags()[*k]).collect();
                let n = free.len().max(1) as f64;
                let mean_of = |v: &[f64]| free.iter().map(|k| v[*k]).sum::<f64>() / n;
                let w = self.weights.as_array();
                LayerSummary {
                    layer: z + 1,
                    altitude_m: (z + 1) as f64 * self.spec.unit_m[2],
                    free_cells: free.len(),
                    mean_total: mean_of(&self.total),
                    max_total: free.iter().map(|k| self.total[*k]).fold(0.0, f64::max),
                    mean_fatality: w[0] * mean_of(&self.normalized[0]),
                    mean_property: w[1] * mean_of(&self.normalized[1]),
                    mean_noise: w[2] * mean_of(&self.normalized[2]),
                }
            })
            .collect()
    }
}

/// Per-layer statistics over unoccupied cells. The component means are
/// weighted contributions to the total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    /// 1-based layer number.
    pub layer: usize,
    pub altitude_m: f64,
    pub free_cells: usize,
    pub mean_total: f64,
    pub max_total: f64,
    pub mean_fatality: f64,
    pub mean_property: f64,
    pub mean_noise: f64,
}

/// Evaluates every risk component on every cell of the scenario's grid,
/// normalizes and aggregates them, and stamps building cells as occupied.
pub fn build_risk_map(scenario: &UrbanScenario, model: &RiskModel, weights: RiskWeights) -> Result<RiskMap> {
    weights.validate()?;
    model.uav.validate()?;
    scenario.validate()?;
    let spec = scenario.grid;
    let occupancy = mark_obstacles(&spec, &scenario.building_heights)?;
    let density = estimate_densities(scenario)?;
    let (mu, sigma) = scenario.building_log_stats();
    let plane = spec.footprint_len();
    let n = spec.cell_count();
    let mut fatality = vec![0.0; n];
    let mut property = vec![0.0; n];
    let mut noise = vec![0.0; n];
    for z in 0..spec.nz {
        let h = layer_altitude(&spec, z)?;
        let prop = property_risk(h, mu, sigma)?;
        let noi = noise_risk(h, &model.noise);
        for g in 0..plane {
            let k = z * plane + g;
            let people = people_risk(&model.uav, density.population[g], h, &scenario.shelter)?;
            let vehicles = vehicle_risk(&model.uav, density.traffic[g], model.vehicle_fatality_rate);
            fatality[k] = people + vehicles;
            property[k] = prop;
            noise[k] = noi;
        }
    }
    RiskMap::from_components(occupancy, [fatality, property, noise], weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::scenario::{generate_scenario, ScenarioGenConfig};

    #[test]
    fn weights_must_sum_to_one() {
        assert!(RiskWeights::new(0.5, 0.25, 0.25).is_ok());
        assert!(RiskWeights::new(0.5, 0.25, 0.2).is_err());
        assert!(RiskWeights::new(1.2, -0.1, -0.1).is_err());
        assert_eq!(RiskWeights::default().as_array(), [0.5, 0.25, 0.25]);
    }

    #[test]
    fn normalization_points() {
        let raw = [5.0; 4];
        let n = normalize_components(Component::Noise, &raw, &[false; 4]).unwrap();
        assert!(n.values.iter().all(|v| *v == 1.0));
        assert_eq!(n.omega, 0.2);

        let raw = [1.0, 4.0, 2.0, 100.0];
        let occ = [false, false, false, true];
        let n = normalize_components(Component::Fatality, &raw, &occ).unwrap();
        assert_eq!(n.values, vec![0.25, 1.0, 0.5, 0.0]);
        assert!(matches!(
            normalize_components(Component::Property, &[0.0; 3], &[false; 3]),
            Err(Error::ZeroMaximum("property"))
        ));
    }

    #[test]
    fn zero_component_is_inert() {
        let spec = GridSpec::new(2, 1, 1, [1.0; 3]).unwrap();
        let occ = OccupancyGrid::empty(spec);
        let map = RiskMap::from_components(occ, [vec![1.0, 2.0], vec![0.0; 2], vec![3.0, 3.0]], RiskWeights::default())
            .unwrap();
        assert_eq!(map.omega(Component::Property), 0.0);
        assert_eq!(map.totals(), &[0.5 * 0.5 + 0.25, 0.5 + 0.25]);
    }

    fn default_map(weights: RiskWeights) -> RiskMap {
        let spec = GridSpec::case_study();
        let s = generate_scenario(&ScenarioGenConfig::for_grid(&spec, 11), &spec).unwrap();
        build_risk_map(&s, &RiskModel::default(), weights).unwrap()
    }

    #[test]
    fn fatality_only_weights_give_normalized_fatality() {
        let map = default_map(RiskWeights::new(1.0, 0.0, 0.0).unwrap());
        for (k, t) in map.totals().iter().enumerate() {
            if map.occupancy().flags()[k] {
                assert!(t.is_infinite());
            } else {
                assert_eq!(*t, map.normalized(Component::Fatality)[k]);
            }
        }
    }

    #[test]
    fn map_is_deterministic() {
        let a = default_map(RiskWeights::default());
        let b = default_map(RiskWeights::default());
        assert_eq!(a, b);
    }

    #[test]
    fn layer_costs_fall_away_from_the_ground() {
        let map = default_map(RiskWeights::default());
        let layers = map.layer_summary();
        assert_eq!(layers.len(), 4);
        // Noise vanishes above 40 m and property damage decays with altitude.
        assert!(layers[0].mean_total > layers[1].mean_total);
        assert!(layers[0].mean_noise > 0.0);
        assert!(layers[1..].iter().all(|l| l.mean_noise == 0.0));
        assert!(layers.windows(2).all(|w| w[0].mean_property > w[1].mean_property));
        assert!(layers.windows(2).all(|w| w[0].mean_fatality < w[1].mean_fatality));
    }
}
