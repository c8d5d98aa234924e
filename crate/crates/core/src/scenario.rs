//! Urban scenarios: districts with average densities, amenities, building
//! heights and sheltering, plus a seeded generator and the JSON file format.

use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::risk::{ShelterModel, DEFAULT_BUILDING_MU_LOG, DEFAULT_BUILDING_SIGMA_LOG};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// Axis-aligned administrative district with its average densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct District {
    /// Ground cells `[x0, y0, x1, y1)`, half-open.
    pub rect: [usize; 4],
    /// Average population density, people per km^2.
    pub pop_avg: f64,
    /// Average traffic density, vehicles per km^2.
    pub veh_avg: f64,
}

impl District {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        let [x0, y0, x1, y1] = self.rect;
        x >= x0 && x < x1 && y >= y0 && y < y1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amenity {
    pub x_m: f64,
    pub y_m: f64,
    #[serde(default = "default_radius", rename = "radius_km")]
    pub influence_radius_km: f64,
}

fn default_radius() -> f64 {
    1.0
}

impl Amenity {
    pub fn at(x_m: f64, y_m: f64) -> Self {
        Self {
            x_m,
            y_m,
            influence_radius_km: default_radius(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrbanScenario {
    pub name: String,
    pub grid: GridSpec,
    pub districts: Vec<District>,
    pub amenities: Vec<Amenity>,
    /// Building height per ground cell in meters, indexed `y * nx + x`.
    pub building_heights: Vec<f64>,
    pub shelter: ShelterModel,
}

impl UrbanScenario {
    pub fn district_at(&self, x: usize, y: usize) -> Option<&District> {
        self.districts.iter().find(|d| d.contains(x, y))
    }

    /// Log-space mean and standard deviation of the building heights.
    ///
    /// Falls back to the library defaults when there are no buildings, and
    /// keeps the default spread when fewer than two distinct heights exist.
    pub fn building_log_stats(&self) -> (f64, f64) {
        let logs: Vec<f64> = self
            .building_heights
            .iter()
            .filter(|h| **h > 0.0)
            .map(|h| h.ln())
            .collect();
        if logs.is_empty() {
            return (DEFAULT_BUILDING_MU_LOG, DEFAULT_BUILDING_SIGMA_LOG);
        }
        let n = logs.len() as f64;
        let mu = logs.iter().sum::<f64>() / n;
        if logs.len() < 2 {
            return (mu, DEFAULT_BUILDING_SIGMA_LOG);
        }
        let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / (n - 1.0);
        let sigma = var.sqrt();
        if sigma > 1e-9 {
            (mu, sigma)
        } else {
            (mu, DEFAULT_BUILDING_SIGMA_LOG)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let invalid = |loc: String, msg: String| Error::Parse {
            location: loc,
            message: msg,
        };
        if self.building_heights.len() != self.grid.footprint_len() {
            return Err(invalid(
                "buildings.heights".into(),
                format!(
                    "expected {} entries for a {}x{} footprint, found {}",
                    self.grid.footprint_len(),
                    self.grid.nx,
                    self.grid.ny,
                    self.building_heights.len()
                ),
            ));
        }
        if let Some((i, h)) = self
            .building_heights
            .iter()
            .enumerate()
            .find(|(_, h)| !(h.is_finite() && **h >= 0.0))
        {
            return Err(invalid(format!("buildings.heights[{i}]"), format!("height {h} must be >= 0")));
        }
        for (i, d) in self.districts.iter().enumerate() {
            for (name, v) in [("pop_avg", d.pop_avg), ("veh_avg", d.veh_avg)] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(invalid(format!("districts[{i}].{name}"), format!("density {v} must be >= 0")));
                }
            }
            let [x0, y0, x1, y1] = d.rect;
            if x0 >= x1 || y0 >= y1 || x1 > self.grid.nx || y1 > self.grid.ny {
                return Err(invalid(
                    format!("districts[{i}].rect"),
                    format!("{:?} is empty or exceeds the {}x{} footprint", d.rect, self.grid.nx, self.grid.ny),
                ));
            }
        }
        for (i, a) in self.amenities.iter().enumerate() {
            if !(a.influence_radius_km.is_finite() && a.influence_radius_km > 0.0) {
                return Err(invalid(format!("amenities[{i}].radius_km"), "radius must be > 0".into()));
            }
            if !(a.x_m.is_finite() && a.y_m.is_finite()) {
                return Err(invalid(format!("amenities[{i}]"), "coordinates must be finite".into()));
            }
        }
        for y in 0..self.grid.ny {
            for x in 0..self.grid.nx {
                let n = self.districts.iter().filter(|d| d.contains(x, y)).count();
                if n != 1 {
                    return Err(invalid(
                        "districts".into(),
                        format!("ground cell ({x}, {y}) is covered by {n} districts, expected exactly 1"),
                    ));
                }
            }
        }
        self.shelter
            .validate()
            .map_err(|e| invalid("shelter".into(), e.to_string()))?;
        Ok(())
    }
}

/// Parameters of the random urban-pattern generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGenConfig {
    pub rng_seed: u64,
    pub n_districts: usize,
    /// Inclusive range of district population densities, people per km^2.
    pub pop_density_range: [f64; 2],
    pub traffic_density: f64,
    /// Inclusive range of the amenity count.
    pub amenity_count_range: [usize; 2],
    pub building_mu_log: f64,
    pub building_sigma_log: f64,
    /// Fraction of ground cells carrying a building.
    pub building_coverage: f64,
    pub sheltering_coeff: f64,
    /// Ground columns (0-based `[x, y]`) kept free of buildings, typically
    /// the origin and destination columns of planned flights.
    pub keep_clear: Vec<[usize; 2]>,
}

impl Default for ScenarioGenConfig {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            n_districts: 2,
            pop_density_range: [5_000.0, 25_000.0],
            traffic_density: 7_120.0,
            amenity_count_range: [10, 30],
            building_mu_log: DEFAULT_BUILDING_MU_LOG,
            building_sigma_log: DEFAULT_BUILDING_SIGMA_LOG,
            building_coverage: 0.2,
            sheltering_coeff: 0.5,
            keep_clear: Vec::new(),
        }
    }
}

impl ScenarioGenConfig {
    /// Default configuration that keeps the two opposite grid corners clear.
    pub fn for_grid(spec: &GridSpec, seed: u64) -> Self {
        Self {
            rng_seed: seed,
            keep_clear: vec![[0, 0], [spec.nx - 1, spec.ny - 1]],
            ..Self::default()
        }
    }

    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_districts == 0 || self.n_districts > spec.nx {
            return bad(format!("n_districts must be in 1..={}, got {}", spec.nx, self.n_districts));
        }
        let [lo, hi] = self.pop_density_range;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("pop_density_range {:?} is empty or negative", self.pop_density_range));
        }
        if !(self.traffic_density >= 0.0 && self.traffic_density.is_finite()) {
            return bad(format!("traffic_density must be >= 0, got {}", self.traffic_density));
        }
        let [alo, ahi] = self.amenity_count_range;
        if alo > ahi {
            return bad(format!("amenity_count_range {:?} is empty", self.amenity_count_range));
        }
        if !(self.building_sigma_log >= 0.0 && self.building_mu_log.is_finite()) {
            return bad("building log-normal needs finite mu and sigma >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.building_coverage) {
            return bad(format!("building_coverage must be in [0, 1], got {}", self.building_coverage));
        }
        if !(self.sheltering_coeff > 0.0 && self.sheltering_coeff <= 1.0) {
            return bad(format!("sheltering_coeff must be in (0, 1], got {}", self.sheltering_coeff));
        }
        if let Some(c) = self.keep_clear.iter().find(|c| c[0] >= spec.nx || c[1] >= spec.ny) {
            return bad(format!("keep_clear column {c:?} is outside the footprint"));
        }
        Ok(())
    }
}

/// Generates a random urban pattern; a pure function of `(cfg, spec)`.
pub fn generate_scenario(cfg: &ScenarioGenConfig, spec: &GridSpec) -> Result<UrbanScenario> {
    spec.validate()?;
    cfg.validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    // Vertical strips of near-equal width.
    let n = cfg.n_districts;
    let [lo, hi] = cfg.pop_density_range;
    let (lo_i, hi_i) = (lo.ceil() as u64, hi.floor() as u64);
    let districts = (0..n)
        .map(|k| {
            let pop_avg = if lo_i <= hi_i {
                rng.random_range(lo_i..=hi_i) as f64
            } else {
                rng.random_range(lo..=hi)
            };
            District {
                rect: [k * spec.nx / n, 0, (k + 1) * spec.nx / n, spec.ny],
                pop_avg,
                veh_avg: cfg.traffic_density,
            }
        })
        .collect();

    let count = rng.random_range(cfg.amenity_count_range[0]..=cfg.amenity_count_range[1]);
    let width = spec.nx as f64 * spec.unit_m[0];
    let depth = spec.ny as f64 * spec.unit_m[1];
    let amenities = (0..count)
        .map(|_| {
            Amenity::at(
                spec.ground_origin[0] + rng.random::<f64>() * width,
                spec.ground_origin[1] + rng.random::<f64>() * depth,
            )
        })
        .collect();

    let mut building_heights = vec![0.0; spec.footprint_len()];
    let candidates: Vec<usize> = (0..spec.footprint_len())
        .filter(|i| !cfg.keep_clear.iter().any(|c| spec.ground_flat(c[0], c[1]) == *i))
        .collect();
    let built = ((cfg.building_coverage * spec.footprint_len() as f64).round() as usize).min(candidates.len());
    let mut chosen: Vec<usize> = sample(&mut rng, candidates.len(), built).into_iter().collect();
    chosen.sort_unstable();
    let lognormal = if cfg.building_sigma_log > 0.0 {
        Some(
            LogNormal::new(cfg.building_mu_log, cfg.building_sigma_log)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?,
        )
    } else {
        None
    };
    for k in chosen {
        building_heights[candidates[k]] = match &lognormal {
            Some(d) => d.sample(&mut rng),
            None => cfg.building_mu_log.exp(),
        };
    }

    Ok(UrbanScenario {
        name: format!("pattern-{}", cfg.rng_seed),
        grid: *spec,
        districts,
        amenities,
        building_heights,
        shelter: ShelterModel {
            sheltering_coeff: cfg.sheltering_coeff,
            ..ShelterModel::default()
        },
    })
}

// On-disk schema.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    version: u32,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    name: String,
    grid: GridFile,
    districts: Vec<District>,
    #[serde(default)]
    amenities: Vec<Amenity>,
    buildings: BuildingsFile,
    #[serde(default)]
    shelter: ShelterFile,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    nx: usize,
    ny: usize,
    nz: usize,
    unit_m: [f64; 3],
    #[serde(default, skip_serializing_if = "is_zero_origin")]
    ground_origin: [f64; 3],
}

fn is_zero_origin(o: &[f64; 3]) -> bool {
    o.iter().all(|v| *v == 0.0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildingsFile {
    encoding: String,
    heights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShelterFile {
    s_c: f64,
    #[serde(default = "default_alpha_file")]
    alpha_j: f64,
    #[serde(default = "default_beta_file")]
    beta_j: f64,
}

fn default_alpha_file() -> f64 {
    ShelterModel::default().fatality_energy_alpha_j
}

fn default_beta_file() -> f64 {
    ShelterModel::default().fatality_energy_beta_j
}

impl Default for ShelterFile {
    fn default() -> Self {
        let s = ShelterModel::default();
        Self {
            s_c: s.sheltering_coeff,
            alpha_j: s.fatality_energy_alpha_j,
            beta_j: s.fatality_energy_beta_j,
        }
    }
}

const DENSE_ROWMAJOR: &str = "dense-rowmajor";

pub fn scenario_to_json(scn: &UrbanScenario) -> String {
    let file = ScenarioFile {
        version: SCENARIO_SCHEMA_VERSION,
        name: scn.name.clone(),
        grid: GridFile {
            nx: scn.grid.nx,
            ny: scn.grid.ny,
            nz: scn.grid.nz,
            unit_m: scn.grid.unit_m,
            ground_origin: scn.grid.ground_origin,
        },
        districts: scn.districts.clone(),
        amenities: scn.amenities.clone(),
        buildings: BuildingsFile {
            encoding: DENSE_ROWMAJOR.into(),
            heights: scn.building_heights.clone(),
        },
        shelter: ShelterFile {
            s_c: scn.shelter.sheltering_coeff,
            alpha_j: scn.shelter.fatality_energy_alpha_j,
            beta_j: scn.shelter.fatality_energy_beta_j,
        },
    };
    let mut s = serde_json::to_string_pretty(&file).expect("scenario serialization is infallible");
    s.push('\n');
    s
}

pub fn scenario_from_json(text: &str) -> Result<UrbanScenario> {
    // Check the version before the full schema so old files get a clear error.
    #[derive(Deserialize)]
    struct Probe {
        version: Option<u32>,
    }
    let probe: Probe = serde_json::from_str(text).map_err(parse_err)?;
    match probe.version {
        Some(SCENARIO_SCHEMA_VERSION) => {}
        Some(found) => {
            return Err(Error::SchemaVersionMismatch {
                found,
                expected: SCENARIO_SCHEMA_VERSION,
            })
        }
        None => {
            return Err(Error::Parse {
                location: "version".into(),
                message: "missing field `version`".into(),
            })
        }
    }
    let file: ScenarioFile = serde_json::from_str(text).map_err(parse_err)?;
    if file.buildings.encoding != DENSE_ROWMAJOR {
        return Err(Error::Parse {
            location: "buildings.encoding".into(),
            message: format!("unsupported encoding `{}`", file.buildings.encoding),
        });
    }
    let scn = UrbanScenario {
        name: file.name,
        grid: GridSpec {
            nx: file.grid.nx,
            ny: file.grid.ny,
            nz: file.grid.nz,
            unit_m: file.grid.unit_m,
            ground_origin: file.grid.ground_origin,
        },
        districts: file.districts,
        amenities: file.amenities,
        building_heights: file.buildings.heights,
        shelter: ShelterModel {
            sheltering_coeff: file.shelter.s_c,
            fatality_energy_alpha_j: file.shelter.alpha_j,
            fatality_energy_beta_j: file.shelter.beta_j,
        },
    };
    scn.grid.validate().map_err(|e| Error::Parse {
        location: "grid".into(),
        message: e.to_string(),
    })?;
    scn.validate()?;
    Ok(scn)
}

pub(crate) fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<UrbanScenario> {
    let text = std::fs::read_to_string(path)?;
    scenario_from_json(&text)
}

pub fn save_scenario(scn: &UrbanScenario, path: impl AsRef<Path>) -> Result<()> {
    crate::io::write_atomic(path.as_ref(), scenario_to_json(scn).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GridSpec {
        GridSpec::case_study()
    }

    #[test]
    fn same_seed_same_scenario() {
        let cfg = ScenarioGenConfig::for_grid(&spec(), 42);
        let a = generate_scenario(&cfg, &spec()).unwrap();
        let b = generate_scenario(&cfg, &spec()).unwrap();
        assert_eq!(scenario_to_json(&a), scenario_to_json(&b));
        let c = generate_scenario(&ScenarioGenConfig::for_grid(&spec(), 43), &spec()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_scenario_respects_config() {
        for seed in 0..20 {
            let cfg = ScenarioGenConfig::for_grid(&spec(), seed);
            let s = generate_scenario(&cfg, &spec()).unwrap();
            s.validate().unwrap();
            assert_eq!(s.districts.len(), 2);
            for d in &s.districts {
                assert!((5_000.0..=25_000.0).contains(&d.pop_avg));
                assert_eq!(d.pop_avg.fract(), 0.0);
                assert_eq!(d.veh_avg, 7_120.0);
            }
            assert!((10..=30).contains(&s.amenities.len()));
            let built = s.building_heights.iter().filter(|h| **h > 0.0).count();
            assert_eq!(built, 720);
            assert_eq!(s.building_heights[0], 0.0);
            assert_eq!(s.building_heights[3599], 0.0);
        }
    }

    #[test]
    fn degenerate_lognormal_gives_median_height() {
        let cfg = ScenarioGenConfig {
            building_sigma_log: 0.0,
            ..ScenarioGenConfig::for_grid(&spec(), 1)
        };
        let s = generate_scenario(&cfg, &spec()).unwrap();
        let expected = DEFAULT_BUILDING_MU_LOG.exp();
        assert!(s.building_heights.iter().all(|h| *h == 0.0 || *h == expected));
        assert!((expected - 21.046).abs() < 1e-3);
    }

    #[test]
    fn building_log_heights_fit_the_generator() {
        let cfg = ScenarioGenConfig {
            building_coverage: 0.5,
            ..ScenarioGenConfig::for_grid(&spec(), 9)
        };
        let s = generate_scenario(&cfg, &spec()).unwrap();
        let logs: Vec<f64> = s.building_heights.iter().filter(|h| **h > 0.0).map(|h| h.ln()).collect();
        assert!(logs.len() >= 500);
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        let se = cfg.building_sigma_log / (logs.len() as f64).sqrt();
        assert!((mean - cfg.building_mu_log).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn districts_partition_footprint() {
        for n in [1, 2, 3, 7] {
            let cfg = ScenarioGenConfig {
                n_districts: n,
                ..ScenarioGenConfig::for_grid(&spec(), 5)
            };
            let s = generate_scenario(&cfg, &spec()).unwrap();
            for y in 0..60 {
                for x in 0..60 {
                    assert_eq!(s.districts.iter().filter(|d| d.contains(x, y)).count(), 1);
                }
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = ScenarioGenConfig::for_grid(&spec(), 0);
        let cases = [
            ScenarioGenConfig {
                n_districts: 0,
                ..base.clone()
            },
            ScenarioGenConfig {
                pop_density_range: [10.0, 5.0],
                ..base.clone()
            },
            ScenarioGenConfig {
                building_coverage: 1.5,
                ..base.clone()
            },
            ScenarioGenConfig {
                amenity_count_range: [3, 2],
                ..base.clone()
            },
        ];
        for c in cases {
            assert!(matches!(generate_scenario(&c, &spec()), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn file_round_trip() {
        let s = generate_scenario(&ScenarioGenConfig::for_grid(&spec(), 3), &spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        save_scenario(&s, &path).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }

    fn minimal(districts: &str, extra: &str) -> String {
        format!(
            r#"{{"version":1,"grid":{{"nx":2,"ny":1,"nz":1,"unit_m":[100,100,30]}},
            "districts":{districts},
            "buildings":{{"encoding":"dense-rowmajor","heights":[0,10]}}{extra}}}"#
        )
    }

    #[test]
    fn negative_density_names_field() {
        let text = minimal(r#"[{"rect":[0,0,2,1],"pop_avg":-1,"veh_avg":7120}]"#, "");
        match scenario_from_json(&text) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "districts[0].pop_avg"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn optional_fields_default() {
        let text = minimal(r#"[{"rect":[0,0,2,1],"pop_avg":1,"veh_avg":2}]"#, "");
        let s = scenario_from_json(&text).unwrap();
        assert!(s.amenities.is_empty());
        assert_eq!(s.shelter, ShelterModel::default());
    }

    #[test]
    fn schema_errors() {
        let text = minimal(r#"[{"rect":[0,0,2,1],"pop_avg":1,"veh_avg":2}]"#, "").replace("\"version\":1", "\"version\":7");
        assert!(matches!(
            scenario_from_json(&text),
            Err(Error::SchemaVersionMismatch { found: 7, .. })
        ));
        let overlap = minimal(
            r#"[{"rect":[0,0,2,1],"pop_avg":1,"veh_avg":2},{"rect":[1,0,2,1],"pop_avg":1,"veh_avg":2}]"#,
            "",
        );
        assert!(matches!(scenario_from_json(&overlap), Err(Error::Parse { .. })));
        match scenario_from_json("{\"version\":1,\n\"grid\": 5}") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 2")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
