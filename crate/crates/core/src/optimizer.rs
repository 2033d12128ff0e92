//! Design-space search driven by the mission simulator.
//!
//! Scores are always maximised: range as is, power per distance negated.
//! Infeasible designs score −∞ so a search can walk through them.

use std::cmp::Ordering;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mission::run_mission_summary;
use crate::output::fmt_sig9;
use crate::scenario::{HullConfig, Objective, Scenario, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    /// m³
    BladderCapacity,
    /// N
    DeflatedNetForce,
    /// Pa
    PHigh,
    /// Pa
    PLow,
    /// Pa
    RegulatorSetpoint,
    /// rad
    Theta,
    /// rad
    Phi,
    /// m²
    DragArea,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::BladderCapacity => "bladder_capacity",
            Param::DeflatedNetForce => "deflated_net_force",
            Param::PHigh => "p_high",
            Param::PLow => "p_low",
            Param::RegulatorSetpoint => "regulator_setpoint",
            Param::Theta => "theta",
            Param::Phi => "phi",
            Param::DragArea => "drag_area",
        }
    }

    fn apply(self, cfg: &mut ScenarioConfig, v: f64) {
        match self {
            Param::BladderCapacity => cfg.bladder.capacity_m3 = v,
            Param::DeflatedNetForce => cfg.glider.hull = HullConfig::DeflatedNetForce(v),
            Param::PHigh => cfg.controller.p_high_pa = Some(v),
            Param::PLow => cfg.controller.p_low_pa = Some(v),
            Param::RegulatorSetpoint => cfg.regulator.setpoint = v,
            Param::Theta => cfg.glide.theta = v,
            Param::Phi => cfg.glide.phi = v,
            Param::DragArea => cfg.drag.c_d_a_m2 = v,
        }
    }

    /// Current value in a built scenario.
    pub fn value_in(self, s: &Scenario) -> f64 {
        match self {
            Param::BladderCapacity => s.bladder.capacity,
            Param::DeflatedNetForce => s.design.deflated_net_force(&s.constants),
            Param::PHigh => s.p_high,
            Param::PLow => s.p_low,
            Param::RegulatorSetpoint => s.regulator.setpoint,
            Param::Theta => s.design.glide.theta,
            Param::Phi => s.design.glide.phi,
            Param::DragArea => s.design.drag.c_d_a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dimension {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpace {
    pub dimensions: Vec<Dimension>,
}

impl DesignSpace {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let space: Self = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(e.path().to_string(), e.into_inner().to_string()))?;
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, d) in self.dimensions.iter().enumerate() {
            if !(d.lower.is_finite() && d.upper.is_finite() && d.lower < d.upper) {
                return Err(Error::config(
                    format!("dimensions[{i}]"),
                    format!("{}: lower ({}) must be below upper ({})", d.param.name(), d.lower, d.upper),
                ));
            }
            if self.dimensions[..i].iter().any(|e| e.param == d.param) {
                return Err(Error::config(format!("dimensions[{i}].param"), "duplicate parameter"));
            }
        }
        if let (Some(hi), Some(lo)) = (self.get(Param::PHigh), self.get(Param::PLow)) {
            if lo.upper >= hi.lower {
                return Err(Error::config(
                    "dimensions",
                    "p_low upper bound must lie below p_high lower bound",
                ));
            }
        }
        Ok(())
    }

    fn get(&self, p: Param) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.param == p)
    }

    pub fn len(&self) -> usize {
        self.dimensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dimensions.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.len()
            && self
                .dimensions
                .iter()
                .zip(x)
                .all(|(d, v)| (d.lower..=d.upper).contains(v))
    }

    /// The base scenario's own parameter values.
    pub fn start_from(&self, base: &ScenarioConfig) -> Result<Candidate> {
        let s = base.build()?;
        Ok(Candidate {
            values: self.dimensions.iter().map(|d| d.param.value_in(&s)).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Objective in its natural unit: m for range, mW/m for efficiency.
    Feasible { objective: f64 },
    Infeasible { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluatedCandidate {
    pub candidate: Candidate,
    pub outcome: Outcome,
    /// Larger is better; −∞ when infeasible.
    pub score: f64,
}

impl EvaluatedCandidate {
    pub fn feasible(&self) -> bool {
        matches!(self.outcome, Outcome::Feasible { .. })
    }

    pub fn objective(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Feasible { objective } => Some(objective),
            Outcome::Infeasible { .. } => None,
        }
    }

    fn infeasible(candidate: Candidate, reason: impl Into<String>) -> Self {
        Self {
            candidate,
            outcome: Outcome::Infeasible { reason: reason.into() },
            score: f64::NEG_INFINITY,
        }
    }
}

/// Simulates one candidate. Out-of-bounds candidates are rejected outright;
/// designs the simulator cannot fly come back infeasible with a reason.
pub fn evaluate(space: &DesignSpace, candidate: &Candidate, base: &ScenarioConfig) -> Result<EvaluatedCandidate> {
    if !space.contains(&candidate.values) {
        return Err(Error::config(
            "candidate",
            format!("{:?} lies outside the design space", candidate.values),
        ));
    }
    let mut cfg = base.clone();
    for (d, v) in space.dimensions.iter().zip(&candidate.values) {
        d.param.apply(&mut cfg, *v);
    }
    let scenario = match cfg.build() {
        Ok(s) => s,
        Err(e) => return Ok(EvaluatedCandidate::infeasible(candidate.clone(), e.to_string())),
    };
    let summary = match run_mission_summary(&scenario) {
        Ok(s) => s,
        Err(Error::Scenario(e)) => return Ok(EvaluatedCandidate::infeasible(candidate.clone(), e.to_string())),
        Err(e) => return Err(e),
    };
    if summary.cycles_completed == 0 {
        return Ok(EvaluatedCandidate::infeasible(candidate.clone(), "zero cycles completed"));
    }
    let (objective, score) = match scenario.objective {
        Objective::Range => (summary.total_range, summary.total_range),
        Objective::Efficiency => match summary.efficiency_mw_per_m() {
            Some(e) => (e, -e),
            None => return Ok(EvaluatedCandidate::infeasible(candidate.clone(), "no distance covered")),
        },
    };
    Ok(EvaluatedCandidate {
        candidate: candidate.clone(),
        outcome: Outcome::Feasible { objective },
        score,
    })
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Best first; equal scores ordered by parameter vector.
pub fn rank(results: &mut [EvaluatedCandidate]) {
    results.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| lexicographic(&a.candidate.values, &b.candidate.values))
    });
}

/// Every grid point, first dimension varying slowest.
pub fn grid_points(space: &DesignSpace, resolution: usize) -> Vec<Candidate> {
    let n = space.len();
    let total = resolution.pow(n as u32);
    let step = |d: &Dimension, i: usize| {
        if i + 1 == resolution {
            d.upper
        } else {
            d.lower + (d.upper - d.lower) * i as f64 / (resolution - 1) as f64
        }
    };
    (0..total)
        .map(|mut k| {
            let mut values = vec![0.0; n];
            for (j, d) in space.dimensions.iter().enumerate().rev() {
                values[j] = step(d, k % resolution);
                k /= resolution;
            }
            Candidate { values }
        })
        .collect()
}

/// Evaluates every candidate on `workers` threads. Output order matches
/// input order whatever the thread count.
pub fn evaluate_all(
    space: &DesignSpace,
    candidates: &[Candidate],
    base: &ScenarioConfig,
    workers: usize,
) -> Result<Vec<EvaluatedCandidate>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    pool.install(|| {
        candidates
            .par_iter()
            .map(|c| evaluate(space, c, base))
            .collect()
    })
}

/// Exhaustive search over a regular grid, returned ranked.
pub fn grid_search(
    space: &DesignSpace,
    resolution: usize,
    base: &ScenarioConfig,
    budget: usize,
    workers: usize,
) -> Result<Vec<EvaluatedCandidate>> {
    space.validate()?;
    if !space.is_empty() && resolution < 2 {
        return Err(Error::config("resolution", "must be at least 2 per swept dimension"));
    }
    let total = (resolution as u128).checked_pow(space.len() as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(Error::config(
            "budget",
            format!("grid has {total} points, budget is {budget}"),
        ));
    }
    let mut results = evaluate_all(space, &grid_points(space, resolution), base, workers)?;
    rank(&mut results);
    Ok(results)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Stop once best and worst vertex scores differ by less than this.
    pub tolerance: f64,
    /// Initial simplex edge as a fraction of each bound's width.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tolerance: 1e-9,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Maximises `f` inside the box `[lower, upper]` with the downhill simplex
/// method. Points are kept in unit-box coordinates and clamped back into
/// the box after every move.
pub fn nelder_mead<F>(f: F, start: &[f64], lower: &[f64], upper: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    assert!(lower.len() == n && upper.len() == n, "bounds must match start");
    let to_x = |u: &[f64]| -> Vec<f64> {
        u.iter()
            .zip(lower.iter().zip(upper))
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect()
    };
    let mut evaluations = 0;
    let mut eval = |u: &[f64]| -> f64 {
        evaluations += 1;
        let v = f(&to_x(u));
        if v.is_nan() { f64::NEG_INFINITY } else { v }
    };
    let clamp = |u: Vec<f64>| -> Vec<f64> { u.into_iter().map(|v| v.clamp(0.0, 1.0)).collect() };

    let u0: Vec<f64> = start
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(x, (lo, hi))| if hi > lo { ((x - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 })
        .collect();
    let around = |eval: &mut dyn FnMut(&[f64]) -> f64, u0: Vec<f64>, f0: f64| {
        let mut simplex = Vec::with_capacity(n + 1);
        for i in 0..n {
            let mut u = u0.clone();
            u[i] = if u[i] + opts.initial_step <= 1.0 { u[i] + opts.initial_step } else { u[i] - opts.initial_step };
            let v = eval(&u);
            simplex.push((u, v));
        }
        simplex.insert(0, (u0, f0));
        simplex
    };
    let f0 = eval(&u0);
    let mut simplex: Vec<(Vec<f64>, f64)> = around(&mut eval, u0, f0);

    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| lexicographic(&a.0, &b.0)));
    };
    let mut iterations = 0;
    let mut converged = false;
    order(&mut simplex);
    while iterations < opts.max_iters {
        let spread = simplex[0].1 - simplex[n].1;
        if n == 0 || (spread.is_finite() && spread.abs() < opts.tolerance) {
            // Projection can flatten the simplex onto a face of the box, so
            // only accept a point that a fresh simplex cannot improve on.
            let (u, f) = simplex.swap_remove(0);
            simplex = around(&mut eval, u, f);
            order(&mut simplex);
            if n == 0 || simplex[0].1 - f < opts.tolerance {
                converged = true;
                break;
            }
            iterations += 1;
            continue;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(u, _)| u[j]).sum::<f64>() / n as f64)
            .collect();
        let toward = |coef: f64, from: &[f64]| -> Vec<f64> {
            clamp(centroid.iter().zip(from).map(|(c, w)| c + coef * (c - w)).collect())
        };
        let worst = simplex[n].0.clone();
        let (f_best, f_second, f_worst) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);

        let xr = toward(REFLECT, &worst);
        let fr = eval(&xr);
        if fr > f_best {
            let xe = toward(REFLECT * EXPAND, &worst);
            let fe = eval(&xe);
            simplex[n] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > f_second {
            simplex[n] = (xr, fr);
        } else {
            let outside = fr > f_worst;
            let xc = if outside {
                toward(REFLECT * CONTRACT, &worst)
            } else {
                toward(-CONTRACT, &worst)
            };
            let fc = eval(&xc);
            if (outside && fc >= fr) || (!outside && fc > f_worst) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let u: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + SHRINK * (v - b)).collect();
                    let v = eval(&u);
                    *vertex = (u, v);
                }
            }
        }
        order(&mut simplex);
    }
    let (u, value) = simplex.swap_remove(0);
    NelderMeadResult {
        x: to_x(&u),
        value,
        iterations,
        evaluations,
        converged,
    }
}

/// Simplex search over the simulator from a feasible start.
pub fn nelder_mead_search(
    space: &DesignSpace,
    start: &Candidate,
    base: &ScenarioConfig,
    opts: &NelderMeadOptions,
) -> Result<EvaluatedCandidate> {
    space.validate()?;
    let first = evaluate(space, start, base)?;
    if let Outcome::Infeasible { reason } = &first.outcome {
        return Err(Error::config("start", format!("start candidate is infeasible: {reason}")));
    }
    let lower: Vec<f64> = space.dimensions.iter().map(|d| d.lower).collect();
    let upper: Vec<f64> = space.dimensions.iter().map(|d| d.upper).collect();
    let score = |x: &[f64]| {
        let c = Candidate { values: x.to_vec() };
        evaluate(space, &c, base).map_or(f64::NEG_INFINITY, |e| e.score)
    };
    let found = nelder_mead(score, &start.values, &lower, &upper, opts);
    let best = evaluate(space, &Candidate { values: found.x }, base)?;
    Ok(if best.score >= first.score { best } else { first })
}

/// Ranked results as CSV: rank, one column per parameter, objective,
/// feasible, reason.
pub fn write_ranked_csv<W: Write>(space: &DesignSpace, results: &[EvaluatedCandidate], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["rank".to_string()];
    header.extend(space.dimensions.iter().map(|d| d.param.name().to_string()));
    header.extend(["objective", "feasible", "reason"].map(String::from));
    w.write_record(&header)?;
    for (i, r) in results.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(r.candidate.values.iter().map(|v| fmt_sig9(*v)));
        match &r.outcome {
            Outcome::Feasible { objective } => row.extend([fmt_sig9(*objective), "true".into(), String::new()]),
            Outcome::Infeasible { reason } => row.extend([String::new(), "false".into(), reason.clone()]),
        }
        w.write_record(&row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ScenarioConfig {
        ScenarioConfig::paper_default()
    }

    fn space(dims: &[(Param, f64, f64)]) -> DesignSpace {
        DesignSpace {
            dimensions: dims
                .iter()
                .map(|&(param, lower, upper)| Dimension { param, lower, upper })
                .collect(),
        }
    }

    #[test]
    fn paper_default_scores_about_150_m() {
        let s = space(&[(Param::DragArea, 0.01, 0.1)]);
        let start = s.start_from(&base()).unwrap();
        let e = evaluate(&s, &start, &base()).unwrap();
        let range = e.objective().unwrap();
        assert!((range - 150.0).abs() / 150.0 < 0.1, "{range}");
    }

    #[test]
    fn buoyant_design_is_infeasible() {
        let s = space(&[(Param::DeflatedNetForce, -1.0, 1.0)]);
        let e = evaluate(&s, &Candidate { values: vec![0.3] }, &base()).unwrap();
        assert_eq!(e.score, f64::NEG_INFINITY);
        match e.outcome {
            Outcome::Infeasible { reason } => assert!(reason.contains("never dives"), "{reason}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_bounds_rejected() {
        let s = space(&[(Param::DeflatedNetForce, -1.0, 1.0)]);
        assert!(evaluate(&s, &Candidate { values: vec![2.0] }, &base()).is_err());
    }

    #[test]
    fn band_must_be_preserved() {
        let s = space(&[(Param::PHigh, 10_000.0, 20_000.0), (Param::PLow, 0.0, 10_000.0)]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn empty_space_is_single_candidate() {
        let r = grid_search(&DesignSpace::default(), 1, &base(), 1, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].candidate.values.is_empty());
    }

    #[test]
    fn grid_corners_are_exact() {
        let s = space(&[(Param::Theta, 0.1, 0.7), (Param::Phi, 0.2, 0.5)]);
        let pts = grid_points(&s, 3);
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0].values, vec![0.1, 0.2]);
        assert_eq!(pts[1].values, vec![0.1, 0.35]);
        assert_eq!(pts[8].values, vec![0.7, 0.5]);
    }

    #[test]
    fn budget_enforced() {
        let s = space(&[(Param::Theta, 0.1, 0.7), (Param::Phi, 0.2, 0.5)]);
        assert!(grid_search(&s, 4, &base(), 15, 1).is_err());
        assert!(grid_search(&s, 1, &base(), 15, 1).is_err());
    }

    #[test]
    fn ties_break_by_parameters() {
        let mk = |v: f64, score: f64| EvaluatedCandidate {
            candidate: Candidate { values: vec![v] },
            outcome: Outcome::Feasible { objective: score },
            score,
        };
        let mut r = vec![mk(3.0, 1.0), mk(1.0, 1.0), mk(2.0, 5.0)];
        rank(&mut r);
        let order: Vec<f64> = r.iter().map(|e| e.candidate.values[0]).collect();
        assert_eq!(order, vec![2.0, 1.0, 3.0]);
    }

    #[test]
    fn simplex_on_quadratic() {
        let opt = [0.3, -1.2, 2.5];
        let f = |x: &[f64]| -x.iter().zip(&opt).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let r = nelder_mead(
            f,
            &[0.0, 0.0, 0.0],
            &[-5.0; 3],
            &[5.0; 3],
            &NelderMeadOptions { tolerance: 1e-14, ..Default::default() },
        );
        for (x, o) in r.x.iter().zip(&opt) {
            assert!((x - o).abs() < 1e-4, "{:?}", r.x);
        }
        assert!(r.iterations <= 200);
    }

    #[test]
    fn simplex_respects_bounds() {
        let f = |x: &[f64]| x[0] + x[1];
        let r = nelder_mead(f, &[0.5, 0.5], &[0.0, 0.0], &[1.0, 2.0], &NelderMeadOptions::default());
        assert!(r.x[0] <= 1.0 && r.x[1] <= 2.0);
        assert!((r.value - 3.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn ranked_csv_layout() {
        let s = space(&[(Param::Theta, 0.1, 0.7)]);
        let r = vec![
            EvaluatedCandidate {
                candidate: Candidate { values: vec![0.5] },
                outcome: Outcome::Feasible { objective: 120.5 },
                score: 120.5,
            },
            EvaluatedCandidate::infeasible(Candidate { values: vec![0.1] }, "zero cycles completed"),
        ];
        let mut buf = Vec::new();
        write_ranked_csv(&s, &r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "rank,theta,objective,feasible,reason\n1,0.5,120.5,true,\n2,0.1,,false,zero cycles completed\n"
        );
    }
}
