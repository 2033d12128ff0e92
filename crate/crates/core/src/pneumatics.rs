//! Bistable valve, swim bladder, regulator and CO₂ cartridge.
//!
//! All gas is treated as ideal and isothermal. Bladder and cartridge keep
//! their inventories in moles so that gas drawn, stored and vented can be
//! reconciled exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PhysicalConstants, GAS_CONSTANT};

/// Hysteretic membrane valve with one chamber sealed at atmospheric pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValveModel {
    /// Intrinsic differential pressure that flips the membrane forward, Pa.
    pub p_snap_through: f64,
    /// Intrinsic differential pressure at which it returns, Pa.
    pub p_snap_back: f64,
    /// Gas volume swept by the membrane between its two states, m³.
    pub membrane_displacement_volume: f64,
    /// Sealed chamber volume of the valve body, m³.
    pub sealed_chamber_volume: f64,
    /// Extra sealed volume attached to the chamber (kinked tubing), m³.
    pub additional_sealed_volume: f64,
    /// m
    pub membrane_thickness: f64,
    /// degrees
    pub opening_angle: f64,
}

/// Base radius assumed for the default membrane, m.
pub const DEFAULT_MEMBRANE_RADIUS: f64 = 0.011;

impl Default for ValveModel {
    fn default() -> Self {
        let opening_angle = 87.5;
        Self {
            p_snap_through: 10_000.0,
            p_snap_back: 1_000.0,
            membrane_displacement_volume: membrane_swept_volume(DEFAULT_MEMBRANE_RADIUS, opening_angle),
            sealed_chamber_volume: 5e-6,
            additional_sealed_volume: 0.0,
            membrane_thickness: 3e-3,
            opening_angle,
        }
    }
}

/// Volume swept by a membrane modelled as a spherical cap of the given base
/// radius whose polar half-angle is half the opening angle. Inverting the
/// cap sweeps twice its volume.
pub fn membrane_swept_volume(base_radius: f64, opening_angle_deg: f64) -> f64 {
    let half = (opening_angle_deg / 2.0).to_radians();
    let sphere_radius = base_radius / half.sin();
    let height = sphere_radius * (1.0 - half.cos());
    let cap = std::f64::consts::PI * height * height * (3.0 * sphere_radius - height) / 3.0;
    2.0 * cap
}

impl ValveModel {
    pub fn total_sealed_volume(&self) -> f64 {
        self.sealed_chamber_volume + self.additional_sealed_volume
    }

    /// Checks the valve invariants, returning the offending field name.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        let finite_nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err((name, format!("must be finite and non-negative, got {v}")))
            }
        };
        finite_nonneg("p_snap_back", self.p_snap_back)?;
        finite_nonneg("membrane_displacement_volume", self.membrane_displacement_volume)?;
        finite_nonneg("sealed_chamber_volume", self.sealed_chamber_volume)?;
        finite_nonneg("additional_sealed_volume", self.additional_sealed_volume)?;
        finite_nonneg("membrane_thickness", self.membrane_thickness)?;
        finite_nonneg("opening_angle", self.opening_angle)?;
        if !(self.p_snap_through.is_finite() && self.p_snap_through > self.p_snap_back) {
            return Err((
                "p_snap_through",
                format!(
                    "must exceed p_snap_back ({}) to leave a hysteresis band, got {}",
                    self.p_snap_back, self.p_snap_through
                ),
            ));
        }
        if self.membrane_displacement_volume >= self.total_sealed_volume() {
            return Err((
                "membrane_displacement_volume",
                "must be smaller than the total sealed volume".into(),
            ));
        }
        Ok(())
    }
}

/// Gauge pressure in the sealed chamber after the membrane has moved by
/// `sign · δ` into it (Boyle's law from atmospheric).
pub fn sealed_back_pressure(valve: &ValveModel, sign: f64, p_atm: f64) -> Result<f64> {
    let sealed = valve.total_sealed_volume();
    let displacement = valve.membrane_displacement_volume;
    if displacement >= sealed {
        return Err(Error::ValveSingularity { displacement, sealed });
    }
    Ok(p_atm * sealed / (sealed - sign * displacement) - p_atm)
}

const THRESHOLD_RTOL: f64 = 1e-9;

/// Root of the membrane balance `applied + hydrostatic - back = intrinsic`
/// for the applied pressure, by bracketed bisection.
fn solve_membrane_balance(intrinsic: f64, hydrostatic: f64, back: f64) -> Result<f64> {
    let residual = |applied: f64| applied + hydrostatic - back - intrinsic;
    let mut span = intrinsic.abs() + hydrostatic.abs() + back.abs() + 1.0;
    let (mut lo, mut hi) = (-span, span);
    while residual(lo) > 0.0 || residual(hi) < 0.0 {
        span *= 2.0;
        lo = -span;
        hi = span;
        if !span.is_finite() {
            return Err(Error::NoConvergence {
                what: "membrane balance bracket",
                iterations: 0,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= THRESHOLD_RTOL * mid.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Pressure that must be applied on the hydrostatic side, on top of the
/// ambient hydrostatic pressure at `depth`, to snap the membrane through.
///
/// Negative values mean the ambient pressure alone already exceeds the
/// threshold.
pub fn snap_through_threshold(valve: &ValveModel, depth: f64, constants: &PhysicalConstants) -> Result<f64> {
    if depth.is_nan() || depth < 0.0 {
        return Err(Error::domain("depth", depth));
    }
    let back = sealed_back_pressure(valve, 1.0, constants.p_atm)?;
    solve_membrane_balance(valve.p_snap_through, constants.gauge_at(depth), back)
}

/// Counterpart of [`snap_through_threshold`] for the return transition; the
/// membrane displacement acts with the opposite sign.
pub fn snap_back_threshold(valve: &ValveModel, depth: f64, constants: &PhysicalConstants) -> Result<f64> {
    if depth.is_nan() || depth < 0.0 {
        return Err(Error::domain("depth", depth));
    }
    let back = sealed_back_pressure(valve, -1.0, constants.p_atm)?;
    solve_membrane_balance(valve.p_snap_back, constants.gauge_at(depth), back)
}

/// Convention for converting pressure·volume into a gas inventory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GasAccounting {
    /// Gas is charged at absolute pressure (physical moles).
    #[default]
    Absolute,
    /// Gas is charged at gauge pressure, matching the closed-form range model.
    Gauge,
}

impl GasAccounting {
    /// Reference pressure added to a gauge pressure to get the pressure used
    /// for mole accounting.
    #[inline]
    pub fn offset(self, constants: &PhysicalConstants) -> f64 {
        match self {
            GasAccounting::Absolute => constants.p_atm,
            GasAccounting::Gauge => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwimBladder {
    /// m³
    pub capacity: f64,
    /// m³
    pub fill_volume: f64,
    /// Gas stored, mol.
    pub moles: f64,
    /// Differential pressure needed to inflate at atmosphere, Pa.
    pub inflation_differential: f64,
}

impl SwimBladder {
    pub fn empty(capacity: f64, inflation_differential: f64) -> Self {
        Self {
            capacity,
            fill_volume: 0.0,
            moles: 0.0,
            inflation_differential,
        }
    }

    /// Internal pressure in the accounting reference of the stored moles.
    pub fn internal_pressure(&self, temperature: f64) -> f64 {
        if self.fill_volume > 0.0 {
            self.moles * GAS_CONSTANT * temperature / self.fill_volume
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cartridge {
    /// Pressure of the stored gas, Pa.
    pub p_cartridge: f64,
    /// m³
    pub v_cartridge: f64,
    /// K
    pub temperature: f64,
    /// mol
    pub initial_moles: f64,
    /// mol
    pub gas_remaining: f64,
    /// Energy of a full cartridge, J.
    pub energy_capacity: f64,
}

/// Stored energy of a 16 g CO₂ cartridge, J.
pub const CO2_16G_ENERGY: f64 = 3820.0;

impl Cartridge {
    pub fn new(p_cartridge: f64, v_cartridge: f64, temperature: f64, energy_capacity: f64) -> Self {
        let initial_moles = p_cartridge * v_cartridge / (GAS_CONSTANT * temperature);
        Self {
            p_cartridge,
            v_cartridge,
            temperature,
            initial_moles,
            gas_remaining: initial_moles,
            energy_capacity,
        }
    }

    pub fn gas_drawn(&self) -> f64 {
        self.initial_moles - self.gas_remaining
    }
}

/// Energy (J) still held by the cartridge; prorated linearly on moles.
pub fn cartridge_energy(cartridge: &Cartridge) -> f64 {
    if cartridge.initial_moles > 0.0 {
        cartridge.energy_capacity * cartridge.gas_remaining / cartridge.initial_moles
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regulator {
    /// Output gauge pressure, Pa.
    pub setpoint: f64,
}

/// Moles needed to move `volume` at accounting pressure `pressure`.
#[inline]
fn moles_for(pressure: f64, volume: f64, temperature: f64) -> f64 {
    pressure * volume / (GAS_CONSTANT * temperature)
}

/// Gauge back pressure the regulator has to overcome at `depth`.
#[inline]
pub fn inflation_back_pressure(bladder: &SwimBladder, depth: f64, constants: &PhysicalConstants) -> f64 {
    constants.gauge_at(depth) + bladder.inflation_differential
}

/// Moles needed to fill the whole bladder from empty at `depth`.
pub fn full_fill_moles(
    bladder: &SwimBladder,
    depth: f64,
    temperature: f64,
    constants: &PhysicalConstants,
    accounting: GasAccounting,
) -> f64 {
    let p = inflation_back_pressure(bladder, depth, constants) + accounting.offset(constants);
    moles_for(p, bladder.capacity, temperature)
}

/// Moves gas from the cartridge into the bladder at accounting pressure
/// `charge_pressure`, adding at most `volume`.
fn transfer(bladder: &mut SwimBladder, cartridge: &mut Cartridge, volume: f64, charge_pressure: f64) {
    let volume = volume.min(bladder.capacity - bladder.fill_volume);
    if volume <= 0.0 || cartridge.gas_remaining <= 0.0 {
        return;
    }
    let wanted = moles_for(charge_pressure, volume, cartridge.temperature);
    let (moles, volume) = if wanted >= cartridge.gas_remaining {
        let moles = cartridge.gas_remaining;
        let volume = if charge_pressure > 0.0 {
            moles * GAS_CONSTANT * cartridge.temperature / charge_pressure
        } else {
            volume
        };
        (moles, volume)
    } else {
        (wanted, volume)
    };
    bladder.fill_volume = (bladder.fill_volume + volume).min(bladder.capacity);
    bladder.moles += moles;
    if moles == cartridge.gas_remaining {
        cartridge.gas_remaining = 0.0;
    } else {
        cartridge.gas_remaining -= moles;
    }
}

/// One step of regulator-driven inflation with a linear flow law.
#[allow(clippy::too_many_arguments)]
pub fn inflate_step(
    bladder: &SwimBladder,
    regulator: &Regulator,
    cartridge: &Cartridge,
    depth: f64,
    dt: f64,
    flow_coefficient: f64,
    constants: &PhysicalConstants,
    accounting: GasAccounting,
) -> Result<(SwimBladder, Cartridge)> {
    if dt.is_nan() || dt < 0.0 {
        return Err(Error::domain("dt", dt));
    }
    let (mut bladder, mut cartridge) = (*bladder, *cartridge);
    let back = inflation_back_pressure(&bladder, depth, constants);
    let drive = regulator.setpoint - back;
    if drive > 0.0 {
        let charge = back + accounting.offset(constants);
        transfer(&mut bladder, &mut cartridge, flow_coefficient * drive * dt, charge);
    }
    Ok((bladder, cartridge))
}

/// Fills the bladder to capacity at once, as far as the cartridge allows.
pub fn inflate_instant(
    bladder: &SwimBladder,
    regulator: &Regulator,
    cartridge: &Cartridge,
    depth: f64,
    constants: &PhysicalConstants,
    accounting: GasAccounting,
) -> (SwimBladder, Cartridge) {
    let (mut bladder, mut cartridge) = (*bladder, *cartridge);
    let back = inflation_back_pressure(&bladder, depth, constants);
    if regulator.setpoint >= back {
        let charge = back + accounting.offset(constants);
        let room = bladder.capacity;
        transfer(&mut bladder, &mut cartridge, room, charge);
    }
    (bladder, cartridge)
}

/// One step of venting through the one-way diode. Returns the updated
/// bladder and the moles released to the water.
pub fn vent_step(
    bladder: &SwimBladder,
    depth: f64,
    dt: f64,
    flow_coefficient: f64,
    temperature: f64,
    constants: &PhysicalConstants,
    accounting: GasAccounting,
) -> Result<(SwimBladder, f64)> {
    if dt.is_nan() || dt < 0.0 {
        return Err(Error::domain("dt", dt));
    }
    let mut bladder = *bladder;
    if bladder.fill_volume <= 0.0 {
        return Ok((bladder, 0.0));
    }
    let ambient = constants.gauge_at(depth) + accounting.offset(constants);
    let drive = bladder.internal_pressure(temperature) - ambient;
    if drive <= 0.0 {
        return Ok((bladder, 0.0));
    }
    let out = flow_coefficient * drive * dt;
    Ok(release(&mut bladder, out))
}

/// Empties the bladder at once.
pub fn vent_instant(bladder: &SwimBladder) -> (SwimBladder, f64) {
    let mut bladder = *bladder;
    let out = bladder.fill_volume;
    release(&mut bladder, out)
}

/// Removes `volume` at the current internal pressure.
fn release(bladder: &mut SwimBladder, volume: f64) -> (SwimBladder, f64) {
    if volume >= bladder.fill_volume {
        let vented = bladder.moles;
        bladder.moles = 0.0;
        bladder.fill_volume = 0.0;
        return (*bladder, vented);
    }
    let vented = bladder.moles * (volume / bladder.fill_volume);
    bladder.moles -= vented;
    bladder.fill_volume -= volume;
    (*bladder, vented)
}
