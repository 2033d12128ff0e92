//! Trajectory CSV and summary JSON writers.
//!
//! Floats are printed like C's `%.9g`, independent of locale, so files are
//! byte-stable across platforms.

use std::io::{self, Write};

use serde::Serialize;

use crate::mission::{MissionSummary, TrajectoryLog};

pub const TRAJECTORY_HEADER: [&str; 8] = [
    "t_s",
    "depth_m",
    "x_m",
    "mode",
    "bladder_fill_m3",
    "cartridge_mol",
    "p_hydro_kpa",
    "event",
];

/// Formats `v` with nine significant digits, `%.9g` style.
pub fn fmt_sig9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Value as it will read back from a `%.9g` field.
pub fn round_sig9(v: f64) -> f64 {
    fmt_sig9(v).parse().unwrap_or(v)
}

pub fn write_trajectory_csv<W: Write>(log: &TrajectoryLog, out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for r in &log.rows {
        w.write_record([
            fmt_sig9(r.t),
            fmt_sig9(r.depth),
            fmt_sig9(r.x),
            r.mode.as_str().to_string(),
            fmt_sig9(r.bladder_fill),
            fmt_sig9(r.cartridge_mol),
            fmt_sig9(r.p_hydro / 1000.0),
            r.event.map_or_else(String::new, |e| e.as_str().to_string()),
        ])?;
    }
    w.flush()
}

/// Summary file contents; field order is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryJson {
    pub cycles: u64,
    pub range_m: f64,
    pub time_s: f64,
    pub max_depth_m: f64,
    pub energy_j: f64,
    pub power_w: Option<f64>,
    pub efficiency_mw_per_m: Option<f64>,
}

impl From<&MissionSummary> for SummaryJson {
    fn from(s: &MissionSummary) -> Self {
        Self {
            cycles: s.cycles_completed,
            range_m: round_sig9(s.total_range),
            time_s: round_sig9(s.total_time),
            max_depth_m: round_sig9(s.max_depth),
            energy_j: round_sig9(s.energy_used),
            power_w: s.power_w().map(round_sig9),
            efficiency_mw_per_m: s.efficiency_mw_per_m().map(round_sig9),
        }
    }
}

pub fn write_summary_json<W: Write>(summary: &MissionSummary, mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &SummaryJson::from(summary))?;
    out.write_all(b"\n")
}
