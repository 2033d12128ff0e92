//! Quasi-steady point-mass glide model.
//!
//! The glider moves along a straight glide path whose angle depends only on
//! whether it is sinking (θ below horizontal) or rising (φ above). Speed
//! along the path obeys
//!
//! ```text
//! m_eff · dv/dt = F_net − ½ ρ C_D·A · v|v|
//! ```
//!
//! with `v > 0` meaning ascent. Linearising the drag term gives the
//! relaxation time constant `m_eff / (ρ C_D·A |v|)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlideGeometry {
    /// Descent angle below horizontal, rad.
    pub theta: f64,
    /// Ascent angle above horizontal, rad.
    pub phi: f64,
}

impl Default for GlideGeometry {
    /// 8 m of vertical travel per 15 m horizontal, split evenly.
    fn default() -> Self {
        let angle = (8.0f64 / 15.0).atan();
        Self {
            theta: angle,
            phi: angle,
        }
    }
}

impl GlideGeometry {
    pub fn is_valid(&self) -> bool {
        let ok = |a: f64| a > 0.0 && a < std::f64::consts::FRAC_PI_2;
        ok(self.theta) && ok(self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragModel {
    /// Lumped drag area C_D·A, m².
    pub c_d_a: f64,
    /// Fluid density, kg/m³.
    pub rho: f64,
}

impl Default for DragModel {
    fn default() -> Self {
        Self {
            c_d_a: 0.05,
            rho: 1000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KinematicState {
    /// m, positive down
    pub depth: f64,
    /// Horizontal distance travelled, m.
    pub x: f64,
    /// Signed speed along the glide path, m/s; positive when rising.
    pub v_along_path: f64,
}

/// Steady speed at which drag balances `|f_net|`.
pub fn terminal_speed(f_net: f64, drag: &DragModel) -> f64 {
    (2.0 * f_net.abs() / (drag.rho * drag.c_d_a)).sqrt()
}

/// Relaxation time constant at speed `v`.
pub fn time_constant(effective_mass: f64, v: f64, drag: &DragModel) -> f64 {
    effective_mass / (drag.rho * drag.c_d_a * v.abs() + f64::EPSILON)
}

#[derive(Clone, Copy)]
struct Deriv {
    depth: f64,
    x: f64,
    v: f64,
}

#[inline]
fn derivative(v: f64, f_net: f64, geometry: &GlideGeometry, drag: &DragModel, effective_mass: f64) -> Deriv {
    let (sin, cos) = if v >= 0.0 {
        geometry.phi.sin_cos()
    } else {
        geometry.theta.sin_cos()
    };
    let accel = (f_net - 0.5 * drag.rho * drag.c_d_a * v * v.abs()) / effective_mass;
    Deriv {
        depth: -v * sin,
        x: v.abs() * cos,
        v: accel,
    }
}

/// Advances the glider by `dt` with a constant net force using one classical
/// RK4 step. The surface is a hard boundary: a rising glider that reaches it
/// stops there, and a buoyant glider at the surface stays put.
pub fn step_kinematics(
    state: &KinematicState,
    f_net: f64,
    geometry: &GlideGeometry,
    drag: &DragModel,
    effective_mass: f64,
    dt: f64,
) -> KinematicState {
    debug_assert!(dt > 0.0);
    if state.depth <= 0.0 && f_net >= 0.0 && state.v_along_path <= 0.0 {
        return KinematicState {
            depth: 0.0,
            x: state.x,
            v_along_path: 0.0,
        };
    }
    let f = |v: f64| derivative(v, f_net, geometry, drag, effective_mass);
    let k1 = f(state.v_along_path);
    let k2 = f(state.v_along_path + 0.5 * dt * k1.v);
    let k3 = f(state.v_along_path + 0.5 * dt * k2.v);
    let k4 = f(state.v_along_path + dt * k3.v);
    let w = dt / 6.0;
    let mut next = KinematicState {
        depth: state.depth + w * (k1.depth + 2.0 * k2.depth + 2.0 * k3.depth + k4.depth),
        x: state.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        v_along_path: state.v_along_path + w * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
    };
    if next.depth < 0.0 {
        // Back off the part of the ascent that would have been above water.
        next.x = (next.x + next.depth / geometry.phi.tan()).max(state.x);
        next.depth = 0.0;
        next.v_along_path = 0.0;
    }
    next
}
