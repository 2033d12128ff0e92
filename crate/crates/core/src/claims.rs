//! Reported performance figures and a checker for simulated missions.

use std::fmt;

use serde::Serialize;

use crate::mission::MissionSummary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Claim {
    pub value: f64,
    pub unit: &'static str,
    pub source: &'static str,
}

/// Figures reported for the built glider and its pool trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceClaims {
    pub max_depth: Claim,
    pub per_cycle_range: Claim,
    pub cycle_time: Claim,
    pub cycles: Claim,
    pub total_range: Claim,
    pub total_time: Claim,
    pub cartridge_energy: Claim,
    pub power: Claim,
    pub efficiency: Claim,
    pub glider_mass: Claim,
    pub hull_volume: Claim,
    pub bladder_count: Claim,
    pub bladder_volume_each: Claim,
}

pub const REFERENCE_CLAIMS: ReferenceClaims = ReferenceClaims {
    max_depth: Claim {
        value: 4.0,
        unit: "m",
        source: "pool trial: dive depth per cycle",
    },
    per_cycle_range: Claim {
        value: 15.0,
        unit: "m",
        source: "pool trial: horizontal travel per cycle",
    },
    cycle_time: Claim {
        value: 90.0,
        unit: "s",
        source: "pool trial: duration of one cycle",
    },
    cycles: Claim {
        value: 10.0,
        unit: "cycles",
        source: "cycles from one 16 g CO2 cartridge",
    },
    total_range: Claim {
        value: 150.0,
        unit: "m",
        source: "maximum travel range on one cartridge",
    },
    total_time: Claim {
        value: 900.0,
        unit: "s",
        source: "total time travelled on one cartridge",
    },
    cartridge_energy: Claim {
        value: 3820.0,
        unit: "J",
        source: "energy stored in a 16 g CO2 cartridge",
    },
    power: Claim {
        value: 4.2,
        unit: "W",
        source: "average power consumption",
    },
    efficiency: Claim {
        value: 28.0,
        unit: "mW/m",
        source: "power efficiency",
    },
    glider_mass: Claim {
        value: 3.722,
        unit: "kg",
        source: "total glider weight",
    },
    hull_volume: Claim {
        value: 3861.12,
        unit: "cm3",
        source: "total glider volume",
    },
    bladder_count: Claim {
        value: 3.0,
        unit: "bladders",
        source: "number of swim bladders",
    },
    bladder_volume_each: Claim {
        value: 100.0,
        unit: "cm3",
        source: "volume of each swim bladder",
    },
};

impl Default for ReferenceClaims {
    fn default() -> Self {
        REFERENCE_CLAIMS
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

impl Tolerance {
    pub fn accepts(self, measured: f64, target: f64) -> bool {
        let err = (measured - target).abs();
        match self {
            Tolerance::Relative(r) => err <= r * target.abs(),
            Tolerance::Absolute(a) => err <= a,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Relative(r) => write!(f, "±{}%", r * 100.0),
            Tolerance::Absolute(a) => write!(f, "±{a}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub max_depth: Tolerance,
    pub per_cycle_range: Tolerance,
    pub cycle_time: Tolerance,
    pub cycles: Tolerance,
    pub total_range: Tolerance,
    pub total_time: Tolerance,
    pub power: Tolerance,
    pub efficiency: Tolerance,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            max_depth: Tolerance::Relative(0.05),
            per_cycle_range: Tolerance::Relative(0.10),
            cycle_time: Tolerance::Relative(0.10),
            cycles: Tolerance::Absolute(1.0),
            total_range: Tolerance::Relative(0.10),
            total_time: Tolerance::Relative(0.10),
            power: Tolerance::Relative(0.02),
            efficiency: Tolerance::Relative(0.02),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimCheck {
    pub name: &'static str,
    pub unit: &'static str,
    pub measured: Option<f64>,
    pub target: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub checks: Vec<ClaimCheck>,
}

impl ClaimReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:>12} {:>10} {:>8} {:>6}  result",
            "claim", "measured", "target", "tol", "unit"
        )?;
        for c in &self.checks {
            let measured = c.measured.map_or_else(|| "-".to_string(), |m| format!("{m:.4}"));
            writeln!(
                f,
                "{:<16} {:>12} {:>10} {:>8} {:>6}  {}",
                c.name,
                measured,
                c.target,
                c.tolerance.to_string(),
                c.unit,
                if c.pass { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Compares a mission summary with the reported figures. Per-cycle values
/// are mission averages. A measurement that cannot be formed (no cycles, no
/// elapsed time) fails.
pub fn verify_claims(summary: &MissionSummary, claims: &ReferenceClaims, tol: &Tolerances) -> ClaimReport {
    let cycles = summary.cycles_completed as f64;
    let per_cycle = |total: f64| (cycles > 0.0).then(|| total / cycles);
    let positive = |v: f64| (v > 0.0).then_some(v);
    let rows = [
        ("max_depth", claims.max_depth, positive(summary.max_depth), tol.max_depth),
        ("per_cycle_range", claims.per_cycle_range, per_cycle(summary.total_range), tol.per_cycle_range),
        ("cycle_time", claims.cycle_time, per_cycle(summary.total_time), tol.cycle_time),
        ("cycles", claims.cycles, positive(cycles), tol.cycles),
        ("total_range", claims.total_range, positive(summary.total_range), tol.total_range),
        ("total_time", claims.total_time, positive(summary.total_time), tol.total_time),
        ("power", claims.power, summary.power_w().and_then(positive), tol.power),
        ("efficiency", claims.efficiency, summary.efficiency_mw_per_m().and_then(positive), tol.efficiency),
    ];
    ClaimReport {
        checks: rows
            .into_iter()
            .map(|(name, claim, measured, tolerance)| ClaimCheck {
                name,
                unit: claim.unit,
                measured,
                target: claim.value,
                tolerance,
                pass: measured.is_some_and(|m| tolerance.accepts(m, claim.value)),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::power_and_efficiency;

    #[test]
    fn empty_summary_fails_everything() {
        let report = verify_claims(&MissionSummary::default(), &REFERENCE_CLAIMS, &Tolerances::default());
        assert_eq!(report.checks.len(), 8);
        assert!(report.checks.iter().all(|c| !c.pass));
    }

    #[test]
    fn reported_totals_pass() {
        let s = MissionSummary {
            cycles_completed: 10,
            total_range: 150.0,
            total_time: 900.0,
            max_depth: 4.0,
            gas_used: 0.0,
            energy_used: 3820.0,
            termination: Default::default(),
        };
        let report = verify_claims(&s, &REFERENCE_CLAIMS, &Tolerances::default());
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn power_follows_from_energy_and_time() {
        let c = REFERENCE_CLAIMS;
        let (p, e) = power_and_efficiency(c.cartridge_energy.value, c.total_time.value, c.total_range.value).unwrap();
        assert!((p - 3820.0 / 900.0).abs() < 1e-12);
        assert!(Tolerance::Relative(0.02).accepts(p, c.power.value));
        assert!(Tolerance::Relative(0.02).accepts(e, c.efficiency.value));
    }

    #[test]
    fn tolerance_edges() {
        assert!(Tolerance::Absolute(1.0).accepts(11.0, 10.0));
        assert!(!Tolerance::Absolute(1.0).accepts(11.5, 10.0));
        assert!(Tolerance::Relative(0.1).accepts(90.0, 100.0));
        assert!(!Tolerance::Relative(0.1).accepts(89.0, 100.0));
    }
}
