//! Physical constants, hydrostatics and the static force balance of the glider.
//!
//! Every force is in newtons with upward positive. Pressures are gauge
//! (relative to the atmosphere) unless the name says `absolute`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{DragModel, GlideGeometry};
use crate::error::{Error, Result};

/// Universal gas constant, J/(mol·K).
pub const GAS_CONSTANT: f64 = 8.314_462_618;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Water density, kg/m³.
    pub rho_water: f64,
    /// Gravitational acceleration, m/s².
    pub g: f64,
    /// Gauge pressure increase per metre of depth, Pa/m.
    pub hydrostatic_gradient: f64,
    /// Absolute atmospheric pressure, Pa.
    pub p_atm: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            rho_water: 1000.0,
            g: 9.81,
            hydrostatic_gradient: 10_000.0,
            p_atm: 101_325.0,
        }
    }
}

impl PhysicalConstants {
    /// Returns the name of the first field that is not strictly positive.
    pub fn first_invalid_field(&self) -> Option<&'static str> {
        [
            ("rho_water", self.rho_water),
            ("g", self.g),
            ("hydrostatic_gradient", self.hydrostatic_gradient),
            ("p_atm", self.p_atm),
        ]
        .into_iter()
        .find(|(_, v)| !(v.is_finite() && *v > 0.0))
        .map(|(name, _)| name)
    }

    /// Gauge pressure at `depth` without domain checks. Depth is expected to
    /// be non-negative; the mission loop guarantees it.
    #[inline]
    pub(crate) fn gauge_at(&self, depth: f64) -> f64 {
        self.hydrostatic_gradient * depth
    }

    /// Depth at which the hydrostatic gauge pressure equals `pressure`.
    #[inline]
    pub fn depth_for_pressure(&self, pressure: f64) -> f64 {
        pressure / self.hydrostatic_gradient
    }
}

/// Gauge hydrostatic pressure (Pa) at `depth` metres.
pub fn hydrostatic_pressure(depth: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !depth.is_finite() || depth < 0.0 {
        return Err(Error::domain("depth", depth));
    }
    Ok(constants.gauge_at(depth))
}

/// Buoyant force (N) of `displaced_volume` m³ of water: ρ·g·V.
pub fn bladder_buoyancy_force(displaced_volume: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !displaced_volume.is_finite() || displaced_volume < 0.0 {
        return Err(Error::domain("displaced volume", displaced_volume));
    }
    Ok(displaced_volume * constants.rho_water * constants.g)
}

/// Static force balance on the glider. `f_net` is always
/// `(f_buoyancy_glider - f_gravity_glider) + f_buoyancy_bladder`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBalance {
    f_buoyancy_glider: f64,
    f_gravity_glider: f64,
    f_buoyancy_bladder: f64,
    f_net: f64,
}

impl ForceBalance {
    pub fn new(f_buoyancy_glider: f64, f_gravity_glider: f64, f_buoyancy_bladder: f64) -> Self {
        let f_net = (f_buoyancy_glider - f_gravity_glider) + f_buoyancy_bladder;
        let balance = Self {
            f_buoyancy_glider,
            f_gravity_glider,
            f_buoyancy_bladder,
            f_net,
        };
        assert!(
            balance.f_net.to_bits()
                == ((f_buoyancy_glider - f_gravity_glider) + f_buoyancy_bladder).to_bits()
        );
        balance
    }

    pub fn f_buoyancy_glider(&self) -> f64 {
        self.f_buoyancy_glider
    }

    pub fn f_gravity_glider(&self) -> f64 {
        self.f_gravity_glider
    }

    pub fn f_buoyancy_bladder(&self) -> f64 {
        self.f_buoyancy_bladder
    }

    pub fn f_net(&self) -> f64 {
        self.f_net
    }
}

/// Everything the force balance and the glide model need to know about the
/// vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GliderDesign {
    /// Total dry mass, kg.
    pub mass: f64,
    /// Water displaced by the hull with the bladder empty, m³.
    pub hull_volume: f64,
    /// Maximum bladder volume, m³.
    pub bladder_capacity: f64,
    /// Entrained-water allowance as a fraction of `mass`.
    pub added_mass_fraction: f64,
    pub glide: GlideGeometry,
    pub drag: DragModel,
}

impl GliderDesign {
    /// Hull volume that gives the requested net force with an empty bladder.
    pub fn trimmed_hull_volume(mass: f64, deflated_net_force: f64, constants: &PhysicalConstants) -> f64 {
        (mass * constants.g + deflated_net_force) / (constants.rho_water * constants.g)
    }

    /// Mass used for the speed relaxation dynamics.
    pub fn effective_mass(&self) -> f64 {
        self.mass * (1.0 + self.added_mass_fraction)
    }

    /// Net force with the bladder empty.
    pub fn deflated_net_force(&self, constants: &PhysicalConstants) -> f64 {
        self.force_at(0.0, constants).f_net
    }

    /// Net force with the bladder at capacity.
    pub fn inflated_net_force(&self, constants: &PhysicalConstants) -> f64 {
        self.force_at(self.bladder_capacity, constants).f_net
    }

    #[inline]
    pub(crate) fn force_at(&self, bladder_volume: f64, constants: &PhysicalConstants) -> ForceBalance {
        let rho_g = constants.rho_water * constants.g;
        ForceBalance::new(
            self.hull_volume * rho_g,
            self.mass * constants.g,
            bladder_volume * rho_g,
        )
    }
}

/// Force balance for a given bladder fill.
pub fn net_force(
    design: &GliderDesign,
    bladder_volume: f64,
    constants: &PhysicalConstants,
) -> Result<ForceBalance> {
    if !(0.0..=design.bladder_capacity).contains(&bladder_volume) {
        return Err(Error::domain("bladder volume", bladder_volume));
    }
    Ok(design.force_at(bladder_volume, constants))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(mass: f64, hull_volume: f64) -> GliderDesign {
        GliderDesign {
            mass,
            hull_volume,
            bladder_capacity: 300e-6,
            added_mass_fraction: 0.5,
            glide: GlideGeometry::default(),
            drag: DragModel::default(),
        }
    }

    #[test]
    fn hydrostatic_examples() {
        let c = PhysicalConstants::default();
        assert_eq!(hydrostatic_pressure(0.0, &c).unwrap(), 0.0);
        assert!((hydrostatic_pressure(4.0, &c).unwrap() - 40_000.0).abs() < 1e-9);
        assert!((hydrostatic_pressure(2.5, &c).unwrap() - 25_000.0).abs() < 1e-9);
        assert!(matches!(
            hydrostatic_pressure(-0.1, &c),
            Err(Error::Domain { quantity: "depth", .. })
        ));
    }

    #[test]
    fn bladder_force_examples() {
        let c = PhysicalConstants::default();
        assert_eq!(bladder_buoyancy_force(0.0, &c).unwrap(), 0.0);
        assert!((bladder_buoyancy_force(300e-6, &c).unwrap() - 2.943).abs() < 1e-12);
        assert!((bladder_buoyancy_force(100e-6, &c).unwrap() - 0.981).abs() < 1e-12);
        assert!(bladder_buoyancy_force(-1e-6, &c).is_err());
    }

    #[test]
    fn net_force_examples() {
        let c = PhysicalConstants::default();
        let mass = 3.722;
        let hull = GliderDesign::trimmed_hull_volume(mass, -1.0, &c);
        let d = design(mass, hull);
        let empty = net_force(&d, 0.0, &c).unwrap();
        assert!((empty.f_net() + 1.0).abs() < 1e-12);
        let full = net_force(&d, 300e-6, &c).unwrap();
        assert!((full.f_net() - 1.943).abs() < 1e-12);

        let neutral = design(mass, mass / c.rho_water);
        assert!(net_force(&neutral, 0.0, &c).unwrap().f_net().abs() < 1e-12);

        assert!(net_force(&d, 301e-6, &c).is_err());
        assert!(net_force(&d, -1e-9, &c).is_err());
    }

    #[test]
    fn gravity_and_hull_terms() {
        let c = PhysicalConstants::default();
        let d = design(3.722, 3.7e-3);
        let fb = net_force(&d, 100e-6, &c).unwrap();
        assert!((fb.f_gravity_glider() - 3.722 * 9.81).abs() < 1e-12);
        assert!((fb.f_buoyancy_glider() - 3.7e-3 * 1000.0 * 9.81).abs() < 1e-12);
        assert!((fb.f_buoyancy_bladder() - 0.981).abs() < 1e-12);
    }

    #[test]
    fn invalid_constants_are_named() {
        let c = PhysicalConstants {
            g: 0.0,
            ..Default::default()
        };
        assert_eq!(c.first_invalid_field(), Some("g"));
        assert_eq!(PhysicalConstants::default().first_invalid_field(), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hydrostatic_is_linear(d in 0.0f64..100.0, a in 0.0f64..10.0) {
                let c = PhysicalConstants::default();
                let lhs = hydrostatic_pressure(a * d, &c).unwrap();
                let rhs = a * hydrostatic_pressure(d, &c).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
            }

            #[test]
            fn bladder_force_monotone_and_homogeneous(v in 0.0f64..1e-2, dv in 1e-9f64..1e-3, k in 0.0f64..5.0) {
                let c = PhysicalConstants::default();
                let f = bladder_buoyancy_force(v, &c).unwrap();
                prop_assert!(bladder_buoyancy_force(v + dv, &c).unwrap() > f);
                let fk = bladder_buoyancy_force(k * v, &c).unwrap();
                prop_assert!((fk - k * f).abs() <= 1e-12 * f.max(1.0));
            }

            #[test]
            fn heavy_glider_sinks_at_every_fill(
                hull in 1e-3f64..5e-3,
                excess in 1e-3f64..2.0,
                fill in 0.0f64..=1.0,
            ) {
                let c = PhysicalConstants::default();
                let cap = 300e-6;
                // mass·g strictly above ρ·g·(hull + capacity)
                let mass = c.rho_water * (hull + cap) + excess / c.g;
                let d = GliderDesign { bladder_capacity: cap, ..design(mass, hull) };
                prop_assert!(net_force(&d, fill * cap, &c).unwrap().f_net() < 0.0);
            }
        }
    }
}
