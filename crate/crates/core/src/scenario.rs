//! Scenario configuration: the JSON schema, loading with key-path error
//! reporting, and validation into a ready-to-run [`Scenario`].

use serde::{Deserialize, Serialize};

use crate::controller::thresholds_from_valve;
use crate::dynamics::{DragModel, GlideGeometry};
use crate::error::{Error, Result};
use crate::geometry::{displaced_volume, WingParams};
use crate::model::{GliderDesign, PhysicalConstants};
use crate::pneumatics::{Cartridge, GasAccounting, Regulator, SwimBladder, ValveModel, CO2_16G_ENERGY};

const PAPER_DEFAULT_JSON: &str = include_str!("../configs/paper_default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub constants: PhysicalConstants,
    pub glider: GliderConfig,
    pub bladder: BladderConfig,
    #[serde(default)]
    pub valve: ValveModel,
    #[serde(default)]
    pub controller: ControllerConfig,
    pub regulator: Regulator,
    pub cartridge: CartridgeConfig,
    pub pneumatics: PneumaticsConfig,
    pub glide: GlideGeometry,
    pub drag: DragConfig,
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub objective: Objective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GliderConfig {
    pub mass_kg: f64,
    pub hull: HullConfig,
    #[serde(default = "default_added_mass_fraction")]
    pub added_mass_fraction: f64,
}

fn default_added_mass_fraction() -> f64 {
    0.5
}

/// How the hull displacement is specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum HullConfig {
    /// Trim target: net force with the bladder empty, N.
    #[serde(rename = "deflated_net_force_n")]
    DeflatedNetForce(f64),
    /// Explicit displaced volume, m³.
    #[serde(rename = "volume_m3")]
    Volume(f64),
    /// Displaced volume computed from the parametric hull.
    #[serde(rename = "geometry")]
    Geometry(WingParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BladderConfig {
    pub capacity_m3: f64,
    #[serde(default)]
    pub inflation_differential_pa: f64,
}

/// Optional overrides of the valve-derived switching pressures.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_high_pa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_low_pa: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartridgeConfig {
    pub pressure_pa: f64,
    pub volume_m3: f64,
    pub temperature_k: f64,
    #[serde(default = "default_energy")]
    pub energy_j: f64,
}

fn default_energy() -> f64 {
    CO2_16G_ENERGY
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InflationMode {
    /// Linear flow law through regulator and diode.
    #[default]
    Flow,
    /// Bladder fills or empties completely at the switching instant.
    Instantaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PneumaticsConfig {
    #[serde(default)]
    pub mode: InflationMode,
    /// Inflation flow coefficient, m³/(s·Pa).
    pub flow_coefficient: f64,
    /// Vent flow coefficient, m³/(s·Pa).
    pub vent_coefficient: f64,
    #[serde(default)]
    pub gas_accounting: GasAccounting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragConfig {
    pub c_d_a_m2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub dt_s: f64,
    pub max_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Maximise total range, m.
    #[default]
    Range,
    /// Minimise power per distance, mW/m.
    Efficiency,
}

impl ScenarioConfig {
    /// The bundled scenario reproducing the reported pool trials.
    pub fn paper_default() -> Self {
        Self::from_json_str(PAPER_DEFAULT_JSON).expect("bundled paper_default.json is valid")
    }

    pub fn paper_default_json() -> &'static str {
        PAPER_DEFAULT_JSON
    }

    /// Parses JSON, reporting the key path of the first offending field.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Checks field-level invariants without building the scenario.
    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    /// Validates every field and assembles the runnable scenario.
    pub fn build(&self) -> Result<Scenario> {
        let constants = self.constants;
        if let Some(field) = constants.first_invalid_field() {
            return Err(Error::config(format!("constants.{field}"), "must be positive"));
        }

        positive("glider.mass_kg", self.glider.mass_kg)?;
        non_negative("glider.added_mass_fraction", self.glider.added_mass_fraction)?;
        let hull_volume = match &self.glider.hull {
            HullConfig::DeflatedNetForce(f) => {
                finite("glider.hull.deflated_net_force_n", *f)?;
                let v = GliderDesign::trimmed_hull_volume(self.glider.mass_kg, *f, &constants);
                if v <= 0.0 {
                    return Err(Error::config(
                        "glider.hull.deflated_net_force_n",
                        "implies a non-positive hull volume",
                    ));
                }
                v
            }
            HullConfig::Volume(v) => {
                positive("glider.hull.volume_m3", *v)?;
                *v
            }
            HullConfig::Geometry(params) => {
                params
                    .validate()
                    .map_err(|(f, m)| Error::config(format!("glider.hull.geometry.{f}"), m))?;
                displaced_volume(params)
            }
        };

        positive("bladder.capacity_m3", self.bladder.capacity_m3)?;
        non_negative("bladder.inflation_differential_pa", self.bladder.inflation_differential_pa)?;

        self.valve
            .validate()
            .map_err(|(f, m)| Error::config(format!("valve.{f}"), m))?;
        let (p_high, p_low) = match (self.controller.p_high_pa, self.controller.p_low_pa) {
            (Some(hi), Some(lo)) => (hi, lo),
            (hi, lo) => {
                let (vh, vl) = thresholds_from_valve(&self.valve, &constants)?;
                (hi.unwrap_or(vh), lo.unwrap_or(vl))
            }
        };
        finite("controller.p_high_pa", p_high)?;
        finite("controller.p_low_pa", p_low)?;
        if p_high <= p_low {
            return Err(Error::config(
                "controller.p_high_pa",
                format!("must exceed p_low ({p_low} Pa), got {p_high} Pa"),
            ));
        }

        positive("regulator.setpoint", self.regulator.setpoint)?;

        non_negative("cartridge.pressure_pa", self.cartridge.pressure_pa)?;
        non_negative("cartridge.volume_m3", self.cartridge.volume_m3)?;
        positive("cartridge.temperature_k", self.cartridge.temperature_k)?;
        non_negative("cartridge.energy_j", self.cartridge.energy_j)?;

        positive("pneumatics.flow_coefficient", self.pneumatics.flow_coefficient)?;
        positive("pneumatics.vent_coefficient", self.pneumatics.vent_coefficient)?;

        let half_pi = std::f64::consts::FRAC_PI_2;
        for (path, angle) in [("glide.theta", self.glide.theta), ("glide.phi", self.glide.phi)] {
            if !(angle > 0.0 && angle < half_pi) {
                return Err(Error::config(path, format!("must lie in (0, π/2) rad, got {angle}")));
            }
        }
        positive("drag.c_d_a_m2", self.drag.c_d_a_m2)?;

        positive("simulation.dt_s", self.simulation.dt_s)?;
        positive("simulation.max_time_s", self.simulation.max_time_s)?;

        let design = GliderDesign {
            mass: self.glider.mass_kg,
            hull_volume,
            bladder_capacity: self.bladder.capacity_m3,
            added_mass_fraction: self.glider.added_mass_fraction,
            glide: self.glide,
            drag: DragModel {
                c_d_a: self.drag.c_d_a_m2,
                rho: constants.rho_water,
            },
        };
        Ok(Scenario {
            constants,
            design,
            valve: self.valve,
            p_high,
            p_low,
            regulator: self.regulator,
            bladder: SwimBladder::empty(self.bladder.capacity_m3, self.bladder.inflation_differential_pa),
            cartridge: Cartridge::new(
                self.cartridge.pressure_pa,
                self.cartridge.volume_m3,
                self.cartridge.temperature_k,
                self.cartridge.energy_j,
            ),
            inflation: self.pneumatics.mode,
            flow_coefficient: self.pneumatics.flow_coefficient,
            vent_coefficient: self.pneumatics.vent_coefficient,
            accounting: self.pneumatics.gas_accounting,
            dt: self.simulation.dt_s,
            max_time: self.simulation.max_time_s,
            max_cycles: self.simulation.max_cycles,
            objective: self.objective,
        })
    }
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be finite, got {v}")))
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be positive, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be non-negative, got {v}")))
    }
}

/// Validated, fully resolved mission inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub constants: PhysicalConstants,
    pub design: GliderDesign,
    pub valve: ValveModel,
    /// Gauge pressure that triggers inflation, Pa.
    pub p_high: f64,
    /// Gauge pressure that triggers venting, Pa.
    pub p_low: f64,
    pub regulator: Regulator,
    /// Initial (empty) bladder.
    pub bladder: SwimBladder,
    /// Initial (full) cartridge.
    pub cartridge: Cartridge,
    pub inflation: InflationMode,
    pub flow_coefficient: f64,
    pub vent_coefficient: f64,
    pub accounting: GasAccounting,
    pub dt: f64,
    pub max_time: f64,
    pub max_cycles: Option<u64>,
    pub objective: Objective,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_default_loads() {
        let cfg = ScenarioConfig::paper_default();
        let s = cfg.build().unwrap();
        assert!(s.design.deflated_net_force(&s.constants) < 0.0);
        assert_eq!(s.design.mass, 3.722);
        assert_eq!(s.bladder.capacity, 300e-6);
    }

    #[test]
    fn unknown_key_is_rejected_with_path() {
        let mut v: serde_json::Value = serde_json::from_str(ScenarioConfig::paper_default_json()).unwrap();
        v["drag"]["cd"] = serde_json::json!(1.0);
        let err = ScenarioConfig::from_json_str(&v.to_string()).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "drag.cd");
                assert!(message.contains("cd"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_type_reports_nested_path() {
        let mut v: serde_json::Value = serde_json::from_str(ScenarioConfig::paper_default_json()).unwrap();
        v["cartridge"]["volume_m3"] = serde_json::json!("lots");
        let err = ScenarioConfig::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "cartridge.volume_m3"), "{err}");
    }

    #[test]
    fn invalid_value_reports_field() {
        let mut cfg = ScenarioConfig::paper_default();
        cfg.glide.theta = 2.0;
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "glide.theta"), "{err}");

        let mut cfg = ScenarioConfig::paper_default();
        cfg.controller.p_low_pa = Some(50_000.0);
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "controller.p_high_pa"), "{err}");

        let mut cfg = ScenarioConfig::paper_default();
        cfg.glider.hull = HullConfig::Geometry(WingParams { l1: -1.0, ..WingParams::paper_like() });
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "glider.hull.geometry.l1"), "{err}");
    }

    #[test]
    fn thresholds_fall_back_to_valve() {
        let mut cfg = ScenarioConfig::paper_default();
        cfg.controller = ControllerConfig::default();
        cfg.valve.additional_sealed_volume = 1e6;
        let s = cfg.build().unwrap();
        assert!((s.p_high - 10_000.0).abs() < 1.0);
        assert!((s.p_low - 1_000.0).abs() < 1.0);
    }

    #[test]
    fn json_round_trip() {
        let cfg = ScenarioConfig::paper_default();
        let again = ScenarioConfig::from_json_str(&cfg.to_json_pretty()).unwrap();
        assert_eq!(cfg, again);
    }
}
