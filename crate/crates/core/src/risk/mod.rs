//! Third-party risk cost models: ground fatality (people and vehicles),
//! property damage and noise, plus their aggregation into a [`RiskMap`].

mod density;
mod export;
mod map;

pub use density::{estimate_densities, gravity_factor, DensityField};
pub use export::{layer_csv, load_risk_map, risk_map_from_json, risk_map_to_json, save_risk_map, RISK_MAP_SCHEMA_VERSION};
pub use map::{LayerSummary, build_risk_map, normalize_components, Component, Normalized, RiskMap, RiskWeights};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and reliability parameters of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavModel {
    pub mass_kg: f64,
    /// Drag coefficient.
    pub drag_coeff: f64,
    /// Area swept on the ground by a falling vehicle, m^2.
    pub impact_area_m2: f64,
    pub crash_prob_per_hour: f64,
    pub air_density_kg_m3: f64,
    pub gravity_m_s2: f64,
}

impl Default for UavModel {
    /// DJI Phantom 4.
    fn default() -> Self {
        Self {
            mass_kg: 1.38,
            drag_coeff: 0.3,
            impact_area_m2: 0.0188,
            crash_prob_per_hour: 6.04e-5,
            air_density_kg_m3: 1.225,
            gravity_m_s2: 9.8,
        }
    }
}

impl UavModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass_kg", self.mass_kg),
            ("drag_coeff", self.drag_coeff),
            ("impact_area_m2", self.impact_area_m2),
            ("crash_prob_per_hour", self.crash_prob_per_hour),
            ("air_density_kg_m3", self.air_density_kg_m3),
            ("gravity_m_s2", self.gravity_m_s2),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("uav.{name} must be > 0, got {v}")));
            }
        }
        if self.crash_prob_per_hour >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "uav.crash_prob_per_hour must be < 1, got {}",
                self.crash_prob_per_hour
            )));
        }
        Ok(())
    }

    /// `R_I * S_hit * rho_A`, the quadratic drag constant times two.
    fn drag_area_density(&self) -> f64 {
        self.drag_coeff * self.impact_area_m2 * self.air_density_kg_m3
    }

    pub fn terminal_velocity(&self) -> f64 {
        (2.0 * self.mass_kg * self.gravity_m_s2 / self.drag_area_density()).sqrt()
    }
}

/// Ground impact speed after an unpowered fall of `h_m` meters under
/// quadratic drag.
pub fn impact_velocity(uav: &UavModel, h_m: f64) -> f64 {
    let k = uav.drag_area_density();
    let h = h_m.max(0.0);
    let v2 = 2.0 * uav.mass_kg * uav.gravity_m_s2 / k * (-(-h * k / uav.mass_kg).exp_m1());
    v2.sqrt()
}

/// Kinetic energy at impact in joules.
pub fn impact_energy(uav: &UavModel, h_m: f64) -> f64 {
    let v = impact_velocity(uav, h_m);
    0.5 * uav.mass_kg * v * v
}

/// Sheltering and fatality-energy calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShelterModel {
    /// Sheltering coefficient in `(0, 1]`.
    pub sheltering_coeff: f64,
    /// Impact energy giving 50% fatality at `sheltering_coeff = 0.5`.
    #[serde(default = "default_alpha")]
    pub fatality_energy_alpha_j: f64,
    /// Energy threshold for fatality as sheltering vanishes.
    #[serde(default = "default_beta")]
    pub fatality_energy_beta_j: f64,
}

fn default_alpha() -> f64 {
    1e6
}

fn default_beta() -> f64 {
    100.0
}

impl Default for ShelterModel {
    fn default() -> Self {
        Self {
            sheltering_coeff: 0.5,
            fatality_energy_alpha_j: default_alpha(),
            fatality_energy_beta_j: default_beta(),
        }
    }
}

impl ShelterModel {
    pub fn validate(&self) -> Result<()> {
        let sc = self.sheltering_coeff;
        if !(sc > 0.0 && sc <= 1.0) {
            return Err(Error::InvalidInput(format!("sheltering coefficient must be in (0, 1], got {sc}")));
        }
        let (a, b) = (self.fatality_energy_alpha_j, self.fatality_energy_beta_j);
        if !(b > 0.0 && a > b && a.is_finite()) {
            return Err(Error::InvalidInput(format!("need alpha > beta > 0, got alpha={a}, beta={b}")));
        }
        Ok(())
    }
}

/// Probability that an impact of `energy_j` joules kills a person.
pub fn fatality_rate_person(energy_j: f64, shelter: &ShelterModel) -> Result<f64> {
    if !(energy_j > 0.0) {
        return Err(Error::NonPositiveEnergy(energy_j));
    }
    let a = shelter.fatality_energy_alpha_j;
    let b = shelter.fatality_energy_beta_j;
    let exponent = 1.0 / (4.0 * shelter.sheltering_coeff);
    let r = 1.0 / (1.0 + (a / b).sqrt() * (b / energy_j).powf(exponent));
    Ok(r.clamp(f64::MIN_POSITIVE, 1.0))
}

/// Expected pedestrian fatalities per flight hour over ground with
/// `density_per_km2` people per square kilometer.
pub fn people_risk(uav: &UavModel, density_per_km2: f64, h_m: f64, shelter: &ShelterModel) -> Result<f64> {
    if density_per_km2 == 0.0 {
        return Ok(0.0);
    }
    let rf = fatality_rate_person(impact_energy(uav, h_m), shelter)?;
    let n_hit = uav.impact_area_m2 * density_per_km2 / 1e6;
    Ok(uav.crash_prob_per_hour * n_hit * rf)
}

/// Average fatalities caused by a traffic accident.
pub const DEFAULT_VEHICLE_FATALITY_RATE: f64 = 0.27;

/// Expected fatalities per flight hour from falls onto vehicles.
pub fn vehicle_risk(uav: &UavModel, density_per_km2: f64, accident_fatality_rate: f64) -> f64 {
    let n_hit = uav.impact_area_m2 * density_per_km2 / 1e6;
    uav.crash_prob_per_hour * n_hit * accident_fatality_rate
}

/// Log-normal density of building heights.
pub fn lognormal_pdf(h: f64, mu_log: f64, sigma_log: f64) -> f64 {
    let z = (h.ln() - mu_log) / sigma_log;
    (-0.5 * z * z).exp() / (h * sigma_log * (2.0 * std::f64::consts::PI).sqrt())
}

/// Property damage cost at altitude `h_m`; flat below the median building
/// height `e^mu` and following the log-normal density above it.
pub fn property_risk(h_m: f64, mu_log: f64, sigma_log: f64) -> Result<f64> {
    if !(h_m > 0.0) {
        return Err(Error::NonPositiveHeight(h_m));
    }
    if !(sigma_log > 0.0) {
        return Err(Error::InvalidInput(format!("sigma_log must be > 0, got {sigma_log}")));
    }
    let plateau = mu_log.exp();
    Ok(lognormal_pdf(h_m.max(plateau), mu_log, sigma_log))
}

/// Median log building height used when a scenario has no buildings.
pub const DEFAULT_BUILDING_MU_LOG: f64 = 3.0467;
/// Log-height spread used when it cannot be estimated from the scenario.
pub const DEFAULT_BUILDING_SIGMA_LOG: f64 = 0.5;

/// Spherical-spreading noise exposure below a cut-off altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Horizontal distance from the point below the vehicle (30 ft).
    pub lateral_offset_m: f64,
    pub reference_db: f64,
    /// Altitude at which exposure drops to the 40 dB level.
    pub threshold_height_m: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            lateral_offset_m: 9.144,
            reference_db: 60.0,
            threshold_height_m: 40.0,
        }
    }
}

pub fn noise_risk(h_m: f64, model: &NoiseModel) -> f64 {
    if h_m >= model.threshold_height_m {
        return 0.0;
    }
    let d = model.lateral_offset_m;
    model.reference_db / (h_m * h_m + d * d)
}

/// Parameters shared by every cell of a risk map other than the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct RiskModel {
    pub uav: UavModel,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default = "default_vehicle_rate")]
    pub vehicle_fatality_rate: f64,
}

fn default_vehicle_rate() -> f64 {
    DEFAULT_VEHICLE_FATALITY_RATE
}

impl RiskModel {
    pub fn new(uav: UavModel) -> Self {
        Self {
            uav,
            noise: NoiseModel::default(),
            vehicle_fatality_rate: DEFAULT_VEHICLE_FATALITY_RATE,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Time-domain RK4 integration of the drag ODE until `h` meters fallen.
    fn integrate_fall(uav: &UavModel, h: f64) -> f64 {
        let c = uav.drag_coeff * uav.impact_area_m2 * uav.air_density_kg_m3 / (2.0 * uav.mass_kg);
        let g = uav.gravity_m_s2;
        let accel = |v: f64| g - c * v * v;
        let dt = 1e-4;
        let (mut s, mut v) = (0.0f64, 0.0f64);
        loop {
            let k1v = accel(v);
            let k1s = v;
            let k2v = accel(v + 0.5 * dt * k1v);
            let k2s = v + 0.5 * dt * k1v;
            let k3v = accel(v + 0.5 * dt * k2v);
            let k3s = v + 0.5 * dt * k2v;
            let k4v = accel(v + dt * k3v);
            let k4s = v + dt * k3v;
            let ns = s + dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
            let nv = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if ns >= h {
                let t = (h - s) / (ns - s);
                return v + t * (nv - v);
            }
            s = ns;
            v = nv;
        }
    }

    #[test]
    fn impact_velocity_matches_ode() {
        let uav = UavModel::default();
        for h in [1.0, 10.0, 30.0, 60.0, 120.0] {
            let closed = impact_velocity(&uav, h);
            let numeric = integrate_fall(&uav, h);
            assert!((closed - numeric).abs() / numeric < 1e-4, "h={h}: {closed} vs {numeric}");
        }
    }

    #[test]
    fn impact_velocity_points() {
        let uav = UavModel::default();
        // Frozen from the RK4 oracle above (about 42.0 m/s).
        assert_relative_eq!(impact_velocity(&uav, 120.0), 42.048, epsilon = 1e-3);
        assert_eq!(impact_velocity(&uav, 0.0), 0.0);
        assert_relative_eq!(uav.terminal_velocity(), 62.569, epsilon = 1e-3);
        assert_relative_eq!(impact_velocity(&uav, 1e5), uav.terminal_velocity(), max_relative = 1e-12);
        assert_relative_eq!(impact_energy(&uav, 120.0), 1219.94, epsilon = 0.01);
        assert_eq!(impact_energy(&uav, 0.0), 0.0);
    }

    #[test]
    fn energy_increases_with_height() {
        let uav = UavModel::default();
        let mut prev = 0.0;
        for i in 1..=200 {
            let e = impact_energy(&uav, i as f64);
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn fatality_rate_calibration() {
        let s = ShelterModel::default();
        assert!((fatality_rate_person(1e6, &s).unwrap() - 0.5).abs() < 1e-12);
        assert_relative_eq!(fatality_rate_person(100.0, &s).unwrap(), 1.0 / 101.0, max_relative = 1e-12);
        assert!(fatality_rate_person(1e30, &s).unwrap() > 0.999_999);
        assert!(matches!(fatality_rate_person(0.0, &s), Err(Error::NonPositiveEnergy(_))));
    }

    #[test]
    fn fatality_rate_monotonicity() {
        let mut prev = 0.0;
        for i in 1..100 {
            let e = 10f64.powf(i as f64 * 0.07);
            let r = fatality_rate_person(e, &ShelterModel::default()).unwrap();
            assert!(r > prev && r < 1.0);
            prev = r;
        }
        // Below alpha the rate falls as the coefficient grows.
        let mut prev = 1.0;
        for sc in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let s = ShelterModel {
                sheltering_coeff: sc,
                ..Default::default()
            };
            let r = fatality_rate_person(5e4, &s).unwrap();
            assert!(r < prev, "sc={sc}");
            prev = r;
        }
    }

    #[test]
    fn people_and_vehicle_risk_points() {
        let uav = UavModel::default();
        let s = ShelterModel::default();
        // Step by step: E(120) = 1219.94 J, R_f = 1/(1+100*sqrt(100/E)) = 0.0337489,
        // N_hit = 0.0188 * 8358e-6 = 1.57130e-4.
        let n_hit = 0.0188 * 8358.0 / 1e6;
        let rf = 1.0 / (1.0 + 100.0 * (100.0 / impact_energy(&uav, 120.0)).sqrt());
        assert_relative_eq!(rf, 0.0337489, epsilon = 1e-7);
        let c = people_risk(&uav, 8358.0, 120.0, &s).unwrap();
        assert_relative_eq!(c, 6.04e-5 * n_hit * rf, max_relative = 1e-12);
        assert_relative_eq!(c, 3.2030e-10, max_relative = 1e-4);
        assert_eq!(people_risk(&uav, 0.0, 120.0, &s).unwrap(), 0.0);
        assert_relative_eq!(
            people_risk(&uav, 2.0 * 8358.0, 120.0, &s).unwrap(),
            2.0 * c,
            max_relative = 1e-14
        );

        let v = vehicle_risk(&uav, 7120.0, DEFAULT_VEHICLE_FATALITY_RATE);
        assert_relative_eq!(v, 6.04e-5 * (0.0188 * 7.12e-3) * 0.27, max_relative = 1e-12);
        assert_relative_eq!(v, 2.18292e-9, max_relative = 1e-5);
        assert_eq!(vehicle_risk(&uav, 0.0, 0.27), 0.0);
    }

    #[test]
    fn property_plateau_and_decay() {
        let mu = DEFAULT_BUILDING_MU_LOG;
        let sigma = 0.5;
        assert_relative_eq!(mu.exp(), 21.046, epsilon = 1e-3);
        let top = property_risk(mu.exp(), mu, sigma).unwrap();
        assert_eq!(property_risk(10.0, mu, sigma).unwrap(), top);
        assert_eq!(property_risk(0.5, mu, sigma).unwrap(), top);
        let mut prev = top;
        for h in [22.0, 30.0, 60.0, 90.0, 120.0, 400.0] {
            let c = property_risk(h, mu, sigma).unwrap();
            assert!(c < prev, "h={h}");
            prev = c;
        }
        assert!(matches!(property_risk(0.0, mu, sigma), Err(Error::NonPositiveHeight(_))));
        assert!(property_risk(10.0, mu, 0.0).is_err());
    }

    #[test]
    fn noise_cutoff_and_ratio() {
        let m = NoiseModel::default();
        assert_eq!(noise_risk(40.0, &m), 0.0);
        assert_eq!(noise_risk(120.0, &m), 0.0);
        let d2 = 9.144f64 * 9.144;
        let ratio = noise_risk(30.0, &m) / noise_risk(10.0, &m);
        assert_relative_eq!(ratio, (100.0 + d2) / (900.0 + d2), max_relative = 1e-14);
        assert_relative_eq!(ratio, 0.1866, epsilon = 1e-4);
        let mut prev = f64::INFINITY;
        for i in 1..40 {
            let c = noise_risk(i as f64, &m);
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn validation() {
        assert!(UavModel::default().validate().is_ok());
        let bad = UavModel {
            crash_prob_per_hour: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(ShelterModel {
            sheltering_coeff: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
