//! Bang-bang state machine realised by the bistable valve.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhysicalConstants;
use crate::pneumatics::{snap_back_threshold, snap_through_threshold, ValveModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ControllerMode {
    /// Supply line open, bladder filling.
    Inflating,
    /// Supply line kinked, bladder venting through the diode.
    Deflating,
}

impl ControllerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ControllerMode::Inflating => "INFLATING",
            ControllerMode::Deflating => "DEFLATING",
        }
    }
}

impl fmt::Display for ControllerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub mode: ControllerMode,
    p_high: f64,
    p_low: f64,
    pub transition_count: u64,
}

impl ControllerState {
    /// Starts deflated (the glider begins at the surface, about to dive).
    pub fn new(p_high: f64, p_low: f64) -> Result<Self> {
        if !(p_high.is_finite() && p_low.is_finite() && p_high > p_low) {
            return Err(Error::config(
                "controller",
                format!("p_high ({p_high}) must exceed p_low ({p_low})"),
            ));
        }
        Ok(Self {
            mode: ControllerMode::Deflating,
            p_high,
            p_low,
            transition_count: 0,
        })
    }

    pub fn p_high(&self) -> f64 {
        self.p_high
    }

    pub fn p_low(&self) -> f64 {
        self.p_low
    }

    /// Mode after seeing `p_hydro` (gauge, Pa). Both comparisons are inclusive.
    pub fn next_mode(&self, p_hydro: f64) -> ControllerMode {
        match self.mode {
            ControllerMode::Deflating if p_hydro >= self.p_high => ControllerMode::Inflating,
            ControllerMode::Inflating if p_hydro <= self.p_low => ControllerMode::Deflating,
            mode => mode,
        }
    }

    #[must_use]
    pub fn step(&self, p_hydro: f64) -> Self {
        let mode = self.next_mode(p_hydro);
        Self {
            mode,
            transition_count: self.transition_count + u64::from(mode != self.mode),
            ..*self
        }
    }
}

const FIXED_POINT_TOL: f64 = 1.0;
const FIXED_POINT_MAX_ITERS: usize = 100;

/// Hydrostatic pressure at which the valve flips with no extra applied
/// pressure: the fixed point `p = hydro(d(p)) + threshold(d(p))`.
fn in_water_threshold<F>(threshold: F, constants: &PhysicalConstants) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut p = threshold(0.0)?;
    for _ in 0..FIXED_POINT_MAX_ITERS {
        let depth = constants.depth_for_pressure(p).max(0.0);
        let next = constants.gauge_at(depth) + threshold(depth)?;
        if (next - p).abs() < FIXED_POINT_TOL {
            return Ok(next);
        }
        p = next;
    }
    Err(Error::NoConvergence {
        what: "valve threshold fixed point",
        iterations: FIXED_POINT_MAX_ITERS,
    })
}

/// `(p_high, p_low)` for a valve used as a hydrostatic sensor.
pub fn thresholds_from_valve(valve: &ValveModel, constants: &PhysicalConstants) -> Result<(f64, f64)> {
    valve
        .validate()
        .map_err(|(field, msg)| Error::config(format!("valve.{field}"), msg))?;
    let p_high = in_water_threshold(|d| snap_through_threshold(valve, d, constants), constants)?;
    let p_low = in_water_threshold(|d| snap_back_threshold(valve, d, constants), constants)?;
    Ok((p_high, p_low))
}
