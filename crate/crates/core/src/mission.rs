//! Closed-loop mission runner.
//!
//! Each fixed step reads the hydrostatic pressure, lets the valve switch,
//! fills or vents the bladder, recomputes the force balance and advances
//! the glide model. Valve switches inside a step are located by bisection
//! on the sub-step length and logged as their own rows.

use std::fmt;

use crate::controller::{ControllerMode, ControllerState};
use crate::dynamics::{step_kinematics, KinematicState};
use crate::error::{Error, Result, ScenarioError};
use crate::pneumatics::{
    full_fill_moles, inflate_instant, inflate_step, vent_instant, vent_step, Cartridge, SwimBladder,
};
use crate::scenario::{InflationMode, Scenario};

/// Event location tolerance, s.
pub const EVENT_TIME_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    SnapThrough,
    SnapBack,
    Apex,
    Nadir,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::SnapThrough => "SNAP_THROUGH",
            EventKind::SnapBack => "SNAP_BACK",
            EventKind::Apex => "APEX",
            EventKind::Nadir => "NADIR",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "SNAP_THROUGH" => Some(EventKind::SnapThrough),
            "SNAP_BACK" => Some(EventKind::SnapBack),
            "APEX" => Some(EventKind::Apex),
            "NADIR" => Some(EventKind::Nadir),
            _ => None,
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissionState {
    pub t: f64,
    pub kinematics: KinematicState,
    pub controller: ControllerState,
    pub bladder: SwimBladder,
    pub cartridge: Cartridge,
    pub vented_moles: f64,
}

impl MissionState {
    fn initial(s: &Scenario) -> Result<Self> {
        Ok(Self {
            t: 0.0,
            kinematics: KinematicState::default(),
            controller: ControllerState::new(s.p_high, s.p_low)?,
            bladder: s.bladder,
            cartridge: s.cartridge,
            vented_moles: 0.0,
        })
    }

    /// Cartridge + bladder + vented gas, mol.
    pub fn total_moles(&self) -> f64 {
        self.cartridge.gas_remaining + self.bladder.moles + self.vented_moles
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub depth: f64,
    pub x: f64,
    pub v_along_path: f64,
    pub mode: ControllerMode,
    pub bladder_fill: f64,
    pub bladder_moles: f64,
    pub cartridge_mol: f64,
    pub vented_mol: f64,
    /// Gauge hydrostatic pressure, Pa.
    pub p_hydro: f64,
    pub event: Option<EventKind>,
}

impl TrajectoryRow {
    fn from_state(s: &MissionState, scenario: &Scenario, event: Option<EventKind>) -> Self {
        Self {
            t: s.t,
            depth: s.kinematics.depth,
            x: s.kinematics.x,
            v_along_path: s.kinematics.v_along_path,
            mode: s.controller.mode,
            bladder_fill: s.bladder.fill_volume,
            bladder_moles: s.bladder.moles,
            cartridge_mol: s.cartridge.gas_remaining,
            vented_mol: s.vented_moles,
            p_hydro: scenario.constants.gauge_at(s.kinematics.depth),
            event,
        }
    }

    pub fn total_moles(&self) -> f64 {
        self.cartridge_mol + self.bladder_moles + self.vented_mol
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryLog {
    pub rows: Vec<TrajectoryRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Termination {
    /// Not enough gas left for another full inflation.
    CartridgeExhausted,
    #[default]
    MaxTime,
    MaxCycles,
    /// Inflating below the regulator's reach while still sinking.
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::CartridgeExhausted => "cartridge_exhausted",
            Termination::MaxTime => "max_time",
            Termination::MaxCycles => "max_cycles",
            Termination::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MissionSummary {
    pub cycles_completed: u64,
    /// m
    pub total_range: f64,
    /// s
    pub total_time: f64,
    /// m
    pub max_depth: f64,
    /// mol
    pub gas_used: f64,
    /// J
    pub energy_used: f64,
    pub termination: Termination,
}

impl MissionSummary {
    /// Average power, W. `None` when no time has elapsed.
    pub fn power_w(&self) -> Option<f64> {
        (self.total_time > 0.0).then(|| self.energy_used / self.total_time)
    }

    /// Power per distance, mW/m. `None` without elapsed time or range.
    pub fn efficiency_mw_per_m(&self) -> Option<f64> {
        let p = self.power_w()?;
        (self.total_range > 0.0).then(|| 1000.0 * p / self.total_range)
    }
}

/// Rejects configurations that can never complete a cycle.
pub fn check_feasibility(s: &Scenario) -> std::result::Result<(), ScenarioError> {
    let c = &s.constants;
    let deflated = s.design.deflated_net_force(c);
    if deflated >= 0.0 {
        return Err(ScenarioError::NeverDives { f_net: deflated });
    }
    let inflated = s.design.inflated_net_force(c);
    if inflated <= 0.0 {
        return Err(ScenarioError::NeverSurfaces { f_net: inflated });
    }
    if s.p_low < 0.0 {
        return Err(ScenarioError::NeverSnapsBack { p_low: s.p_low });
    }
    let back_pressure = s.p_high + s.bladder.inflation_differential;
    let blocked = match s.inflation {
        InflationMode::Flow => s.regulator.setpoint <= back_pressure,
        InflationMode::Instantaneous => s.regulator.setpoint < back_pressure,
    };
    if blocked {
        return Err(ScenarioError::NeverInflates {
            setpoint: s.regulator.setpoint,
            back_pressure,
        });
    }
    Ok(())
}

struct Runner<'a> {
    s: &'a Scenario,
    effective_mass: f64,
    /// Gas needed for one full inflation at the snap-through depth.
    fill_moles: f64,
    /// Depth below which the regulator cannot push gas into the bladder.
    reach_depth: f64,
}

impl Runner<'_> {
    /// Advances pneumatics and kinematics by `h` with the valve state fixed.
    fn advance(&self, st: &MissionState, h: f64) -> MissionState {
        let s = self.s;
        let c = &s.constants;
        let mut next = *st;
        let depth = st.kinematics.depth;
        if s.inflation == InflationMode::Flow {
            match st.controller.mode {
                ControllerMode::Inflating => {
                    let (b, cart) = inflate_step(
                        &st.bladder,
                        &s.regulator,
                        &st.cartridge,
                        depth,
                        h,
                        s.flow_coefficient,
                        c,
                        s.accounting,
                    )
                    .expect("step length is positive");
                    next.bladder = b;
                    next.cartridge = cart;
                }
                ControllerMode::Deflating => {
                    let (b, out) = vent_step(
                        &st.bladder,
                        depth,
                        h,
                        s.vent_coefficient,
                        st.cartridge.temperature,
                        c,
                        s.accounting,
                    )
                    .expect("step length is positive");
                    next.bladder = b;
                    next.vented_moles += out;
                }
            }
        }
        let f_net = s.design.force_at(next.bladder.fill_volume, c).f_net();
        next.kinematics = step_kinematics(
            &st.kinematics,
            f_net,
            &s.design.glide,
            &s.design.drag,
            self.effective_mass,
            h,
        );
        next.t = st.t + h;
        next
    }

    fn switches(&self, st: &MissionState) -> bool {
        let p = self.s.constants.gauge_at(st.kinematics.depth);
        st.controller.next_mode(p) != st.controller.mode
    }

    /// Applies a valve switch at the current state.
    fn switch(&self, st: &mut MissionState) -> EventKind {
        let s = self.s;
        let p = s.constants.gauge_at(st.kinematics.depth);
        st.controller = st.controller.step(p);
        match st.controller.mode {
            ControllerMode::Inflating => EventKind::SnapThrough,
            ControllerMode::Deflating => EventKind::SnapBack,
        }
    }

    fn fill_instantly(&self, st: &mut MissionState, event: EventKind) {
        let s = self.s;
        match event {
            EventKind::SnapThrough => {
                let (b, cart) = inflate_instant(
                    &st.bladder,
                    &s.regulator,
                    &st.cartridge,
                    st.kinematics.depth,
                    &s.constants,
                    s.accounting,
                );
                st.bladder = b;
                st.cartridge = cart;
            }
            EventKind::SnapBack => {
                let (b, out) = vent_instant(&st.bladder);
                st.bladder = b;
                st.vented_moles += out;
            }
            _ => {}
        }
    }

    /// Termination check right after a valve switch.
    fn after_event(&self, st: &MissionState, event: EventKind) -> Option<Termination> {
        let short_of_gas = st.cartridge.gas_remaining < self.fill_moles;
        match event {
            EventKind::SnapThrough if short_of_gas => Some(Termination::CartridgeExhausted),
            EventKind::SnapBack => {
                let cycles = st.controller.transition_count / 2;
                if self.s.max_cycles.is_some_and(|m| cycles >= m) {
                    Some(Termination::MaxCycles)
                } else if short_of_gas {
                    Some(Termination::CartridgeExhausted)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn stalled(&self, st: &MissionState) -> bool {
        st.controller.mode == ControllerMode::Inflating
            && st.kinematics.depth > self.reach_depth
            && st.kinematics.v_along_path < 0.0
            && self.s.design.force_at(st.bladder.fill_volume, &self.s.constants).f_net() < 0.0
    }
}

fn simulate(s: &Scenario, record: bool) -> Result<(TrajectoryLog, MissionSummary)> {
    check_feasibility(s).map_err(Error::Scenario)?;
    let c = &s.constants;
    let runner = Runner {
        s,
        effective_mass: s.design.effective_mass(),
        fill_moles: full_fill_moles(
            &s.bladder,
            c.depth_for_pressure(s.p_high),
            s.cartridge.temperature,
            c,
            s.accounting,
        ),
        reach_depth: c.depth_for_pressure(s.regulator.setpoint - s.bladder.inflation_differential),
    };

    let mut st = MissionState::initial(s)?;
    let mut rows = Vec::new();
    let mut max_depth = 0.0f64;
    let mut push = |rows: &mut Vec<TrajectoryRow>, st: &MissionState, event: Option<EventKind>| {
        max_depth = max_depth.max(st.kinematics.depth);
        if record || event.is_some() {
            rows.push(TrajectoryRow::from_state(st, s, event));
        }
    };
    push(&mut rows, &st, None);

    let mut k: u64 = 0;
    let termination = 'run: loop {
        let t_grid = (k + 1) as f64 * s.dt;
        let mut event_on_grid = false;
        loop {
            let h = t_grid - st.t;
            let trial = runner.advance(&st, h);
            if !runner.switches(&trial) {
                st = trial;
                st.t = t_grid;
                break;
            }
            let (mut lo, mut hi) = (0.0, h);
            let mut hit = trial;
            while hi - lo > EVENT_TIME_TOL {
                let mid = 0.5 * (lo + hi);
                let cand = runner.advance(&st, mid);
                if runner.switches(&cand) {
                    hi = mid;
                    hit = cand;
                } else {
                    lo = mid;
                }
            }
            let on_grid = hi >= h;
            st = hit;
            if on_grid {
                st.t = t_grid;
            }
            let event = runner.switch(&mut st);
            let term = runner.after_event(&st, event);
            if term.is_none() && s.inflation == InflationMode::Instantaneous {
                runner.fill_instantly(&mut st, event);
            }
            push(&mut rows, &st, Some(event));
            if let Some(term) = term {
                break 'run term;
            }
            if on_grid {
                event_on_grid = true;
                break;
            }
        }
        if !event_on_grid {
            push(&mut rows, &st, None);
        }
        k += 1;
        if runner.stalled(&st) {
            break Termination::Stalled;
        }
        if st.t >= s.max_time {
            break Termination::MaxTime;
        }
    };

    if !record {
        // keep the final state so summaries stay derivable
        if rows.last().map(|r| r.t) != Some(st.t) {
            rows.push(TrajectoryRow::from_state(&st, s, None));
        }
    }

    let gas_used = st.cartridge.gas_drawn();
    let energy_used = if st.cartridge.initial_moles > 0.0 {
        st.cartridge.energy_capacity * gas_used / st.cartridge.initial_moles
    } else {
        0.0
    };
    let summary = MissionSummary {
        cycles_completed: st.controller.transition_count / 2,
        total_range: st.kinematics.x,
        total_time: st.t,
        max_depth,
        gas_used,
        energy_used,
        termination,
    };
    Ok((TrajectoryLog { rows }, summary))
}

/// Runs the mission and returns the full trajectory log and its summary.
pub fn run_mission(scenario: &Scenario) -> Result<(TrajectoryLog, MissionSummary)> {
    simulate(scenario, true)
}

/// Runs the mission keeping only event rows; for objective evaluation.
pub fn run_mission_summary(scenario: &Scenario) -> Result<MissionSummary> {
    simulate(scenario, false).map(|(_, summary)| summary)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEvent {
    pub kind: EventKind,
    pub t: f64,
    pub depth: f64,
}

/// Valve switches plus the deepest point after each snap-through (NADIR)
/// and the shallowest point after each snap-back (APEX), in time order.
pub fn detect_cycle_events(log: &TrajectoryLog) -> Result<Vec<CycleEvent>> {
    if log.rows.is_empty() {
        return Err(Error::domain("trajectory rows", 0.0));
    }
    let switch_idx: Vec<usize> = log
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r.event, Some(EventKind::SnapThrough | EventKind::SnapBack)))
        .map(|(i, _)| i)
        .collect();
    let mut events = Vec::new();
    for (n, &i) in switch_idx.iter().enumerate() {
        let row = &log.rows[i];
        let kind = row.event.expect("filtered on event");
        events.push(CycleEvent {
            kind,
            t: row.t,
            depth: row.depth,
        });
        let end = switch_idx.get(n + 1).copied().unwrap_or(log.rows.len() - 1);
        let segment = &log.rows[i..=end.max(i)];
        let pick = |better: fn(f64, f64) -> bool| {
            segment
                .iter()
                .fold(None::<&TrajectoryRow>, |best, r| match best {
                    Some(b) if !better(r.depth, b.depth) => Some(b),
                    _ => Some(r),
                })
                .expect("segment is non-empty")
        };
        let (extreme_kind, extreme) = match kind {
            EventKind::SnapThrough => (EventKind::Nadir, pick(|a, b| a > b)),
            _ => (EventKind::Apex, pick(|a, b| a < b)),
        };
        events.push(CycleEvent {
            kind: extreme_kind,
            t: extreme.t,
            depth: extreme.depth,
        });
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(events)
}

/// Horizontal advance of each completed cycle (surface to next snap-back).
pub fn per_cycle_ranges(log: &TrajectoryLog) -> Vec<f64> {
    let mut out = Vec::new();
    let mut start = 0.0;
    for r in &log.rows {
        if r.event == Some(EventKind::SnapBack) {
            out.push(r.x - start);
            start = r.x;
        }
    }
    out
}

/// Durations of each completed cycle.
pub fn per_cycle_times(log: &TrajectoryLog) -> Vec<f64> {
    let mut out = Vec::new();
    let mut start = 0.0;
    for r in &log.rows {
        if r.event == Some(EventKind::SnapBack) {
            out.push(r.t - start);
            start = r.t;
        }
    }
    out
}
