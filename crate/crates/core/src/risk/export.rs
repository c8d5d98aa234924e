use std::path::Path;

use serde::{Deserialize, Serialize};

use super::map::{Component, RiskMap, RiskWeights};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, OccupancyGrid};
use crate::scenario::parse_err;

pub const RISK_MAP_SCHEMA_VERSION: u32 = 1;
const LAYOUT: &str = "flat index = (z * ny + y) * nx + x; x varies fastest, then y, then z; 0-based";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentArrays {
    fatality: Vec<f64>,
    property: Vec<f64>,
    noise: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RiskMapFile {
    version: u32,
    layout: String,
    grid: GridSpec,
    weights: RiskWeights,
    omega: [f64; 3],
    occupied: Vec<bool>,
    raw: ComponentArrays,
    normalized: ComponentArrays,
    /// `null` for occupied cells.
    total: Vec<Option<f64>>,
}

/// Serializes the map with every per-cell array flattened.
pub fn risk_map_to_json(map: &RiskMap) -> String {
    let arrays = |f: &dyn Fn(Component) -> Vec<f64>| ComponentArrays {
        fatality: f(Component::Fatality),
        property: f(Component::Property),
        noise: f(Component::Noise),
    };
    let file = RiskMapFile {
        version: RISK_MAP_SCHEMA_VERSION,
        layout: LAYOUT.into(),
        grid: *map.spec(),
        weights: map.weights(),
        omega: Component::ALL.map(|c| map.omega(c)),
        occupied: map.occupancy().flags().to_vec(),
        raw: arrays(&|c| map.raw(c).to_vec()),
        normalized: arrays(&|c| map.normalized(c).to_vec()),
        total: map.totals().iter().map(|t| t.is_finite().then_some(*t)).collect(),
    };
    let mut s = serde_json::to_string(&file).expect("risk map serializes");
    s.push('\n');
    s
}

/// Inverse of [`risk_map_to_json`]. Totals are checked against the stored
/// weights and normalized components.
pub fn risk_map_from_json(text: &str) -> Result<RiskMap> {
    let file: RiskMapFile = serde_json::from_str(text).map_err(parse_err)?;
    if file.version != RISK_MAP_SCHEMA_VERSION {
        return Err(Error::SchemaVersionMismatch {
            found: file.version,
            expected: RISK_MAP_SCHEMA_VERSION,
        });
    }
    file.grid.validate()?;
    let occupancy = OccupancyGrid::from_flags(file.grid, file.occupied)?;
    let n = file.grid.cell_count();
    if file.total.len() != n {
        return Err(Error::DimensionMismatch(format!("total has {} cells, grid has {n}", file.total.len())));
    }
    let total: Vec<f64> = file.total.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
    let map = RiskMap::from_parts(
        occupancy,
        [file.raw.fatality, file.raw.property, file.raw.noise],
        [file.normalized.fatality, file.normalized.property, file.normalized.noise],
        file.omega,
        file.weights,
    )?;
    if let Some(k) = (0..n).find(|k| map.totals()[*k] != total[*k]) {
        return Err(Error::Parse {
            location: format!("total[{k}]"),
            message: format!(
                "stored total {} disagrees with weighted components {}",
                total[k],
                map.totals()[k]
            ),
        });
    }
    Ok(map)
}

pub fn save_risk_map(map: &RiskMap, path: impl AsRef<Path>) -> Result<()> {
    crate::io::write_atomic(path.as_ref(), risk_map_to_json(map).as_bytes())
}

pub fn load_risk_map(path: impl AsRef<Path>) -> Result<RiskMap> {
    risk_map_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Serialize)]
struct CellRow {
    x: usize,
    y: usize,
    z: usize,
    fatality: f64,
    property: f64,
    noise: f64,
    total: Option<f64>,
}

/// CSV of one layer (`z` 0-based) with 1-based coordinates. Component
/// columns are weighted contributions, so they add up to `total`; occupied
/// cells have an empty total.
pub fn layer_csv(map: &RiskMap, z: usize) -> Result<String> {
    let spec = map.spec();
    crate::grid::layer_altitude(spec, z)?;
    let w = map.weights().as_array();
    let mut out = csv::Writer::from_writer(Vec::new());
    for y in 0..spec.ny {
        for x in 0..spec.nx {
            let k = spec.flat(crate::grid::CellIndex::new(x, y, z));
            let part = |c: Component, i: usize| w[i] * map.normalized(c)[k];
            let t = map.totals()[k];
            out.serialize(CellRow {
                x: x + 1,
                y: y + 1,
                z: z + 1,
                fatality: part(Component::Fatality, 0),
                property: part(Component::Property, 1),
                noise: part(Component::Noise, 2),
                total: t.is_finite().then_some(t),
            })?;
        }
    }
    let bytes = out.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CellIndex;
    use crate::risk::{build_risk_map, RiskModel};
    use crate::scenario::{generate_scenario, ScenarioGenConfig};

    fn small_map() -> RiskMap {
        let spec = GridSpec::new(12, 10, 4, [100.0, 100.0, 30.0]).unwrap();
        let scn = generate_scenario(&ScenarioGenConfig::for_grid(&spec, 3), &spec).unwrap();
        build_risk_map(&scn, &RiskModel::default(), RiskWeights::default()).unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let map = small_map();
        assert!(map.occupancy().occupied_count() > 0);
        let text = risk_map_to_json(&map);
        let back = risk_map_from_json(&text).unwrap();
        assert_eq!(back, map);
        assert_eq!(risk_map_to_json(&back), text);

        let synthetic = RiskMap::from_total_costs(OccupancyGrid::empty(*map.spec()), vec![0.3; 480]).unwrap();
        assert_eq!(risk_map_from_json(&risk_map_to_json(&synthetic)).unwrap(), synthetic);
    }

    #[test]
    fn tampered_total_is_rejected() {
        let map = small_map();
        let mut v: serde_json::Value = serde_json::from_str(&risk_map_to_json(&map)).unwrap();
        let k = map.totals().iter().position(|t| t.is_finite()).unwrap();
        v["total"][k] = serde_json::json!(123.0);
        let err = risk_map_from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location == &format!("total[{k}]")));
        v["version"] = serde_json::json!(9);
        assert!(matches!(
            risk_map_from_json(&v.to_string()),
            Err(Error::SchemaVersionMismatch { found: 9, .. })
        ));
    }

    #[test]
    fn layer_csv_columns_add_up() {
        let map = small_map();
        let text = layer_csv(&map, 0).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,z,fatality,property,noise,total"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 120);
        for row in rows {
            let f: Vec<&str> = row.split(',').collect();
            let c = CellIndex::new(f[0].parse::<usize>().unwrap() - 1, f[1].parse::<usize>().unwrap() - 1, 0);
            if map.is_occupied(c) {
                assert_eq!(f[6], "");
            } else {
                let parts: f64 = f[3..6].iter().map(|v| v.parse::<f64>().unwrap()).sum();
                assert!((parts - f[6].parse::<f64>().unwrap()).abs() < 1e-12);
            }
        }
        assert!(layer_csv(&map, 4).is_err());
    }
}
