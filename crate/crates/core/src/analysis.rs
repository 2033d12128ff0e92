//! Closed-form range budget, power figures and the literature comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhysicalConstants;

/// Inputs of the gas-budget range estimate. Pressures are gauge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeModelInput {
    /// Pa
    pub p_cartridge: f64,
    /// m³
    pub v_cartridge: f64,
    /// Inflation differential of the bladder, Pa.
    pub p_swim_bladder: f64,
    /// m³
    pub v_swim_bladder: f64,
    /// Dive depth, m; also the horizontal advance credited per cycle.
    pub depth: f64,
}

/// Which pressure scale the gas budget is charged in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureConvention {
    /// Cartridge and fill pressures taken as gauge values.
    #[default]
    Gauge,
    /// Atmospheric pressure added to both, i.e. a true mole budget.
    Absolute,
}

/// Number of full fills the cartridge holds, times the depth.
///
/// ```text
/// d_total = P_cart / (P_sb + G·d) · V_cart / V_sb · d
/// ```
///
/// `G` is the hydrostatic gradient. Under [`PressureConvention::Absolute`]
/// atmospheric pressure is added to numerator and denominator.
pub fn closed_form_range(
    input: &RangeModelInput,
    constants: &PhysicalConstants,
    convention: PressureConvention,
) -> Result<f64> {
    let RangeModelInput {
        p_cartridge,
        v_cartridge,
        p_swim_bladder,
        v_swim_bladder,
        depth,
    } = *input;
    for (name, v) in [
        ("p_cartridge", p_cartridge),
        ("v_cartridge", v_cartridge),
        ("p_swim_bladder", p_swim_bladder),
        ("depth", depth),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::domain(name, v));
        }
    }
    if !(v_swim_bladder.is_finite() && v_swim_bladder > 0.0) {
        return Err(Error::domain("v_swim_bladder", v_swim_bladder));
    }
    let offset = match convention {
        PressureConvention::Gauge => 0.0,
        PressureConvention::Absolute => constants.p_atm,
    };
    let denominator = p_swim_bladder + constants.hydrostatic_gradient * depth + offset;
    if denominator <= 0.0 {
        return Err(Error::domain("fill pressure", denominator));
    }
    Ok((p_cartridge + offset) / denominator * (v_cartridge / v_swim_bladder) * depth)
}

/// `(power W, efficiency mW/m)` from energy spent over a time and distance.
pub fn power_and_efficiency(total_energy: f64, total_time: f64, total_distance: f64) -> Result<(f64, f64)> {
    if !(total_energy.is_finite() && total_energy >= 0.0) {
        return Err(Error::domain("energy", total_energy));
    }
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(Error::domain("time", total_time));
    }
    if !(total_distance.is_finite() && total_distance > 0.0) {
        return Err(Error::domain("distance", total_distance));
    }
    let power = total_energy / total_time;
    Ok((power, 1000.0 * power / total_distance))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    /// Symmetric uncertainty, same unit.
    pub uncertainty: Option<f64>,
    /// Not reported directly by the source; derived by the compiler of the table.
    pub estimated: bool,
}

impl Quantity {
    const fn reported(value: f64) -> Self {
        Self {
            value,
            uncertainty: None,
            estimated: false,
        }
    }

    const fn estimated(value: f64) -> Self {
        Self {
            value,
            uncertainty: None,
            estimated: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Entry {
    Known(Quantity),
    /// Listed as not applicable.
    NotApplicable,
    /// Listed as unknown.
    Unknown,
}

impl Entry {
    pub fn quantity(&self) -> Option<&Quantity> {
        match self {
            Entry::Known(q) => Some(q),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EfficiencyUnit {
    #[serde(rename = "mW/m")]
    MilliwattPerMetre,
    /// Energy per distance; cannot be turned into mW/m without a duration.
    #[serde(rename = "J/m")]
    JoulePerMetre,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRecord {
    pub system_name: &'static str,
    pub propulsion: &'static str,
    pub power_efficiency: Entry,
    pub efficiency_unit: EfficiencyUnit,
    /// m
    pub gliding_range: Entry,
    /// m
    pub gliding_depth: Entry,
    /// h
    pub deployment_time: Entry,
}

impl EfficiencyRecord {
    /// True when the efficiency can be ranked against mW/m figures.
    pub fn comparable(&self) -> bool {
        self.efficiency_unit == EfficiencyUnit::MilliwattPerMetre
    }

    /// Whether any listed value is an estimate.
    pub fn estimated(&self) -> bool {
        [
            self.power_efficiency,
            self.gliding_range,
            self.gliding_depth,
            self.deployment_time,
        ]
        .iter()
        .any(|e| e.quantity().is_some_and(|q| q.estimated))
    }
}

/// Published comparison of existing systems.
pub fn comparison_table() -> Vec<EfficiencyRecord> {
    use Entry::{Known, NotApplicable, Unknown};

    let mw = EfficiencyUnit::MilliwattPerMetre;
    let r = |v| Known(Quantity::reported(v));
    let e = |v| Known(Quantity::estimated(v));
    vec![
        EfficiencyRecord {
            system_name: "Seaglider",
            propulsion: "Mechanical / Electrical",
            power_efficiency: e(3.84e-4),
            efficiency_unit: mw,
            gliding_range: e(2.826e6),
            gliding_depth: r(1019.0),
            deployment_time: r(3144.0),
        },
        EfficiencyRecord {
            system_name: "Slocum",
            propulsion: "Hybrid gliding propulsion",
            power_efficiency: r(42.8125),
            efficiency_unit: EfficiencyUnit::JoulePerMetre,
            gliding_range: NotApplicable,
            gliding_depth: r(100.0),
            deployment_time: NotApplicable,
        },
        EfficiencyRecord {
            system_name: "Tianjin University",
            propulsion: "Thermal",
            power_efficiency: e(2.0697),
            efficiency_unit: mw,
            gliding_range: r(6.77e5),
            gliding_depth: r(1000.0),
            deployment_time: r(648.0),
        },
        EfficiencyRecord {
            system_name: "Wave Glider",
            propulsion: "Wave and Solar",
            power_efficiency: e(2.16e-2),
            efficiency_unit: mw,
            gliding_range: e(3.982e6),
            gliding_depth: NotApplicable,
            deployment_time: r(5928.0),
        },
        EfficiencyRecord {
            system_name: "Fast Moving Manta Ray",
            propulsion: "Ionic Hydrogel and DEA",
            power_efficiency: e(42.10),
            efficiency_unit: mw,
            gliding_range: e(128.7),
            gliding_depth: Unknown,
            deployment_time: r(3.25),
        },
        EfficiencyRecord {
            system_name: "Wireless Flatfish",
            propulsion: "Thermoelectric Pneumatic Actuator",
            power_efficiency: e(3.236e5),
            efficiency_unit: mw,
            gliding_range: r(72.0),
            gliding_depth: e(10.5),
            deployment_time: r(1.0),
        },
        EfficiencyRecord {
            system_name: "SoFi",
            propulsion: "Hydraulic Pump",
            power_efficiency: e(178.67),
            efficiency_unit: mw,
            gliding_range: Known(Quantity {
                value: 296.8,
                uncertainty: Some(5.1),
                estimated: false,
            }),
            gliding_depth: r(8.1),
            deployment_time: r(0.66),
        },
        EfficiencyRecord {
            system_name: "Our Implementation",
            propulsion: "Fluidic circuit",
            power_efficiency: r(28.0),
            efficiency_unit: mw,
            gliding_range: r(150.0),
            gliding_depth: r(4.0),
            deployment_time: r(0.25),
        },
    ]
}
