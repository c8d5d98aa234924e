use crate::error::{Error, Result};
use crate::scenario::UrbanScenario;

/// Amenity attraction multiplier at `r_km` from the amenity.
///
/// Equals 1 at the 1 km influence radius, `e` at the amenity itself and
/// keeps decaying below 1 further out.
pub fn gravity_factor(r_km: f64) -> f64 {
    (1.0 - r_km * r_km).exp()
}

/// Per-ground-cell population and traffic densities, both per km^2,
/// indexed `y * nx + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub nx: usize,
    pub ny: usize,
    pub population: Vec<f64>,
    pub traffic: Vec<f64>,
}

impl DensityField {
    pub fn population_at(&self, x: usize, y: usize) -> f64 {
        self.population[y * self.nx + x]
    }

    pub fn traffic_at(&self, x: usize, y: usize) -> f64 {
        self.traffic[y * self.nx + x]
    }
}

/// Scales each district's average densities by the gravity factor of the
/// nearest amenity, measured from the ground centroid of each cell.
pub fn estimate_densities(scenario: &UrbanScenario) -> Result<DensityField> {
    let spec = &scenario.grid;
    let n = spec.footprint_len();
    let mut population = vec![0.0; n];
    let mut traffic = vec![0.0; n];
    for y in 0..spec.ny {
        for x in 0..spec.nx {
            let district = scenario
                .district_at(x, y)
                .ok_or(Error::MissingDistrict { x, y })?;
            let factor = nearest_amenity_factor(scenario, spec.ground_centroid(x, y));
            let i = spec.ground_flat(x, y);
            population[i] = factor * district.pop_avg;
            traffic[i] = factor * district.veh_avg;
        }
    }
    Ok(DensityField {
        nx: spec.nx,
        ny: spec.ny,
        population,
        traffic,
    })
}

fn nearest_amenity_factor(scenario: &UrbanScenario, p: [f64; 2]) -> f64 {
    // Distance is expressed in units of each amenity's influence radius, so
    // the default 1 km radius reproduces the plain kilometer form.
    scenario
        .amenities
        .iter()
        .map(|a| {
            let dx = p[0] - a.x_m;
            let dy = p[1] - a.y_m;
            (dx * dx + dy * dy).sqrt() / (1000.0 * a.influence_radius_km)
        })
        .min_by(|a, b| a.total_cmp(b))
        .map_or(1.0, gravity_factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::scenario::{Amenity, District};
    use approx::assert_relative_eq;

    fn scenario(amenities: Vec<Amenity>) -> UrbanScenario {
        let grid = GridSpec::new(20, 10, 1, [100.0, 100.0, 30.0]).unwrap();
        UrbanScenario {
            name: "t".into(),
            grid,
            districts: vec![
                District {
                    rect: [0, 0, 10, 10],
                    pop_avg: 8358.0,
                    veh_avg: 7120.0,
                },
                District {
                    rect: [10, 0, 20, 10],
                    pop_avg: 7219.0,
                    veh_avg: 7120.0,
                },
            ],
            amenities,
            building_heights: vec![0.0; 200],
            shelter: Default::default(),
        }
    }

    #[test]
    fn factor_points() {
        assert_eq!(gravity_factor(1.0), 1.0);
        assert_eq!(gravity_factor(0.0), std::f64::consts::E);
        assert_relative_eq!(gravity_factor(0.3), 0.91f64.exp(), max_relative = 1e-15);
        assert_relative_eq!(gravity_factor(0.3), 2.4843, epsilon = 1e-4);
    }

    #[test]
    fn density_at_amenity_and_far_away() {
        // Amenity exactly at the centroid of cell (2, 3).
        let s = scenario(vec![Amenity::at(250.0, 350.0)]);
        let d = estimate_densities(&s).unwrap();
        assert_relative_eq!(d.population_at(2, 3), 8358.0 * std::f64::consts::E, max_relative = 1e-14);
        assert_relative_eq!(d.population_at(2, 3), 22719.4, epsilon = 0.1);
        // Cell (19, 9) is more than 1 km away.
        assert!(d.traffic_at(19, 9) <= 7120.0);
        assert!(d.population_at(19, 9) < 7219.0);
    }

    #[test]
    fn no_amenities_gives_district_averages() {
        let s = scenario(vec![]);
        let d = estimate_densities(&s).unwrap();
        assert_eq!(d.population_at(0, 0), 8358.0);
        assert_eq!(d.population_at(15, 5), 7219.0);
        assert!(d.traffic.iter().all(|t| *t == 7120.0));
    }

    #[test]
    fn nearest_amenity_wins() {
        let s = scenario(vec![Amenity::at(250.0, 350.0), Amenity::at(1850.0, 950.0)]);
        let d = estimate_densities(&s).unwrap();
        assert_relative_eq!(d.population_at(18, 9), 7219.0 * std::f64::consts::E, max_relative = 1e-14);
    }

    #[test]
    fn uncovered_cell_is_an_error() {
        let mut s = scenario(vec![]);
        s.districts.pop();
        assert!(matches!(estimate_densities(&s), Err(Error::MissingDistrict { x: 10, y: 0 })));
    }
}
