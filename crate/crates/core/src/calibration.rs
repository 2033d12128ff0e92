//! Fits the free model parameters of a scenario to observed cycle figures.
//!
//! Three quantities are tuned in turn: the snap-through pressure (sets the
//! nadir), the drag area (sets the cycle period) and the cartridge volume
//! (sets how many complete cycles the gas lasts).

use crate::error::{Error, Result};
use crate::mission::{run_mission, EventKind, MissionSummary, Termination, TrajectoryLog};
use crate::model::GAS_CONSTANT;
use crate::pneumatics::full_fill_moles;
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTarget {
    /// m
    pub nadir: f64,
    /// s
    pub cycle_time: f64,
    pub cycles: u64,
    /// Where the cartridge inventory sits inside the window that allows
    /// exactly `cycles` cycles: 0 is the smallest such inventory, 1 the
    /// largest.
    pub reserve_fraction: f64,
}

impl Default for CalibrationTarget {
    fn default() -> Self {
        Self {
            nadir: 4.0,
            cycle_time: 90.0,
            cycles: 10,
            reserve_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub p_high: f64,
    pub c_d_a: f64,
    pub cartridge_volume: f64,
    pub config: ScenarioConfig,
}

/// Cycles simulated while fitting nadir and period; the first cycle starts
/// from rest at the surface and is excluded from the period.
const PROBE_CYCLES: u64 = 3;
const OUTER_ITERS: usize = 20;
const BISECT_ITERS: usize = 50;
/// Distance kept below the deepest workable snap-through pressure, Pa. Right
/// at the edge the glider hangs near the regulator's reach and the cycle
/// period becomes ill-conditioned.
const EDGE_MARGIN: f64 = 200.0;

fn probe(cfg: &ScenarioConfig, cycles: u64) -> Result<(TrajectoryLog, MissionSummary)> {
    let mut cfg = cfg.clone();
    cfg.simulation.max_cycles = Some(cycles);
    // plenty of gas so only the cycle limit stops the run
    cfg.cartridge.volume_m3 = cfg.cartridge.volume_m3.max(1e-3);
    let s = cfg.build()?;
    run_mission(&s)
}

/// Deepest point reached, or `None` if the glider never comes back.
fn nadir(cfg: &ScenarioConfig) -> Result<Option<f64>> {
    match probe(cfg, PROBE_CYCLES) {
        Ok((_, s)) if s.termination == Termination::MaxCycles => Ok(Some(s.max_depth)),
        Ok(_) | Err(Error::Scenario(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn steady_cycle_time(cfg: &ScenarioConfig) -> Result<Option<f64>> {
    let (log, summary) = match probe(cfg, PROBE_CYCLES) {
        Ok(run) => run,
        Err(Error::Scenario(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    if summary.termination != Termination::MaxCycles {
        return Ok(None);
    }
    let times: Vec<f64> = log
        .rows
        .iter()
        .filter(|r| r.event == Some(EventKind::SnapBack))
        .map(|r| r.t)
        .collect();
    Ok(Some((times[times.len() - 1] - times[0]) / (times.len() - 1) as f64))
}

/// Largest `p_high` whose nadir does not exceed `target` depth.
fn fit_p_high(cfg: &ScenarioConfig, target: f64) -> Result<f64> {
    let p_low = cfg.controller.p_low_pa.unwrap_or(0.0);
    let mut lo = p_low + 1.0;
    let mut hi = cfg.regulator.setpoint - cfg.bladder.inflation_differential_pa;
    let mut trial = cfg.clone();
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        trial.controller.p_high_pa = Some(mid);
        match nadir(&trial)? {
            Some(d) if d <= target => lo = mid,
            _ => hi = mid,
        }
        if hi - lo < 0.01 {
            break;
        }
    }
    Ok(lo)
}

/// Drag area giving the target steady cycle period, by bisection in log
/// space. A larger drag area slows the cycle.
fn fit_c_d_a(cfg: &ScenarioConfig, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (cfg.drag.c_d_a_m2 / 10.0, cfg.drag.c_d_a_m2 * 10.0);
    let mut trial = cfg.clone();
    for _ in 0..BISECT_ITERS {
        let mid = (lo * hi).sqrt();
        trial.drag.c_d_a_m2 = mid;
        match steady_cycle_time(&trial)? {
            Some(t) if t >= target => hi = mid,
            // too fast, or overshoots past the regulator's reach and stalls
            _ => lo = mid,
        }
        if hi / lo < 1.0 + 1e-6 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Cartridge volume whose gas lasts exactly `cycles` complete cycles.
fn fit_cartridge(cfg: &ScenarioConfig, cycles: u64, reserve_fraction: f64) -> Result<f64> {
    let (log, summary) = probe(cfg, cycles)?;
    if summary.cycles_completed != cycles {
        return Err(Error::config("simulation", "calibration run stopped early"));
    }
    let s = cfg.build()?;
    let initial = log.rows[0].cartridge_mol;
    let drawn: Vec<f64> = log
        .rows
        .iter()
        .filter(|r| r.event == Some(EventKind::SnapBack))
        .map(|r| initial - r.cartridge_mol)
        .collect();
    let fill = full_fill_moles(
        &s.bladder,
        s.constants.depth_for_pressure(s.p_high),
        s.cartridge.temperature,
        &s.constants,
        s.accounting,
    );
    let n = drawn.len();
    let before = if n >= 2 { drawn[n - 2] } else { 0.0 };
    let last = drawn[n - 1];
    let moles = before + fill + reserve_fraction.clamp(0.0, 1.0) * (last - before);
    Ok(moles * GAS_CONSTANT * cfg.cartridge.temperature_k / cfg.cartridge.pressure_pa)
}

/// Alternates nadir and period fits until both settle, then sizes the
/// cartridge.
pub fn calibrate(base: &ScenarioConfig, target: &CalibrationTarget) -> Result<Calibration> {
    let mut cfg = base.clone();
    cfg.simulation.max_cycles = None;
    for _ in 0..OUTER_ITERS {
        let p_high = fit_p_high(&cfg, target.nadir)? - EDGE_MARGIN;
        cfg.controller.p_high_pa = Some(p_high);
        let c_d_a = fit_c_d_a(&cfg, target.cycle_time)?;
        let moved = (c_d_a / cfg.drag.c_d_a_m2 - 1.0).abs();
        cfg.drag.c_d_a_m2 = c_d_a;
        if moved < 1e-4 {
            break;
        }
    }
    let p_high = cfg.controller.p_high_pa.expect("set by the fit");
    let volume = fit_cartridge(&cfg, target.cycles, target.reserve_fraction)?;
    cfg.cartridge.volume_m3 = volume;
    cfg.validate()?;
    Ok(Calibration {
        p_high,
        c_d_a: cfg.drag.c_d_a_m2,
        cartridge_volume: volume,
        config: cfg,
    })
}
