use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use glidesim::analysis::{closed_form_range, comparison_table, power_and_efficiency, Entry, PressureConvention, RangeModelInput};
use glidesim::calibration::{calibrate, CalibrationTarget};
use glidesim::claims::{verify_claims, Tolerances, REFERENCE_CLAIMS};
use glidesim::controller::thresholds_from_valve;
use glidesim::geometry::{displaced_volume, wetted_area, write_stl, WingParams};
use glidesim::model::PhysicalConstants;
use glidesim::optimizer::{
    grid_search, nelder_mead_search, rank, write_ranked_csv, DesignSpace, NelderMeadOptions,
};
use glidesim::output::{fmt_sig9, write_summary_json, write_trajectory_csv};
use glidesim::pneumatics::{snap_back_threshold, snap_through_threshold, ValveModel};
use glidesim::{run_mission, Error, ScenarioConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

/// Depths and sealed add-on volumes of the valve characterisation sweep.
const SWEEP_DEPTHS: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 4.0];
const SWEEP_VOLUMES: [f64; 3] = [50e-6, 100e-6, 150e-6];

#[derive(Parser)]
#[command(name = "glidesim", version, about = "Fluidic bang-bang underwater glider simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mission and write the trajectory CSV and summary JSON.
    Simulate {
        /// Scenario JSON file, or `paper_default` for the bundled one.
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: PathBuf,
        /// Override the integration step, s.
        #[arg(long)]
        dt: Option<f64>,
        /// Accepted for scripting symmetry; the simulator uses no randomness.
        #[arg(long)]
        seedless: bool,
    },
    /// Valve switching thresholds at a depth, or the characterisation sweep.
    Valve {
        #[arg(long, default_value_t = 0.0)]
        depth: f64,
        /// Extra volume on the sealed chamber, m³.
        #[arg(long = "v-add", default_value_t = 0.0)]
        v_add: f64,
        /// Emit a CSV over depths 0-4 m and three add-on volumes.
        #[arg(long)]
        sweep: bool,
    },
    /// Closed-form gas-budget range, and power figures.
    Range {
        /// Cartridge pressure, Pa.
        #[arg(long = "p-cartridge")]
        p_cartridge: Option<f64>,
        /// Cartridge volume, m³.
        #[arg(long = "v-cartridge")]
        v_cartridge: Option<f64>,
        /// Bladder inflation differential, Pa.
        #[arg(long = "p-sb", default_value_t = 0.0)]
        p_sb: f64,
        /// Bladder volume, m³.
        #[arg(long = "v-sb")]
        v_sb: Option<f64>,
        /// Dive depth, m.
        #[arg(long)]
        depth: Option<f64>,
        #[arg(long, value_enum, default_value_t = Convention::Gauge)]
        convention: Convention,
        /// Energy spent, J.
        #[arg(long)]
        energy: Option<f64>,
        /// Time taken, s.
        #[arg(long)]
        time: Option<f64>,
        /// Distance covered, m; defaults to the closed-form range.
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Search a design space and write ranked results.
    Optimize {
        #[arg(long)]
        config: String,
        /// Design space JSON file.
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Grid)]
        method: Method,
        #[arg(long)]
        out: PathBuf,
        /// Grid points per dimension.
        #[arg(long, default_value_t = 5)]
        resolution: usize,
        /// Largest grid size accepted.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Worker threads; defaults to GLIDESIM_THREADS or the core count.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long = "max-iters", default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Compare a mission against the reported pool-trial figures.
    Verify {
        #[arg(long, default_value = "paper_default")]
        config: String,
    },
    /// Fit snap-through pressure, drag area and cartridge size to targets.
    Calibrate {
        #[arg(long, default_value = "paper_default")]
        config: String,
        /// Where to write the calibrated scenario JSON.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        nadir: f64,
        #[arg(long = "cycle-time", default_value_t = 90.0)]
        cycle_time: f64,
        #[arg(long, default_value_t = 10)]
        cycles: u64,
    },
    /// Hull volume and wetted area; optional STL export.
    Geometry {
        /// Hull parameter JSON; defaults to the reconstructed hull.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        stl: Option<PathBuf>,
    },
    /// Print the literature comparison table.
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Gauge,
    Absolute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Grid,
    NelderMead,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Scenario(_) => EXIT_INFEASIBLE,
            Error::Config { .. } | Error::Domain { .. } | Error::ValveSingularity { .. } => EXIT_CONFIG,
            Error::NoConvergence { .. } => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: String) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message,
    }
}

fn load_config(arg: &str) -> Result<ScenarioConfig, Failure> {
    if arg == "paper_default" {
        return Ok(ScenarioConfig::paper_default());
    }
    let text = fs::read_to_string(arg).map_err(|e| config_failure(format!("cannot read {arg}: {e}")))?;
    Ok(ScenarioConfig::from_json_str(&text)?)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure {
            code: EXIT_FAILURE,
            message: format!("cannot create {}: {e}", path.display()),
        })
}

fn default_workers() -> usize {
    std::env::var("GLIDESIM_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate {
            config,
            out,
            summary,
            dt,
            seedless: _,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(dt) = dt {
                cfg.simulation.dt_s = dt;
            }
            let scenario = cfg.build()?;
            let (log, result) = run_mission(&scenario)?;
            let mut w = create(&out)?;
            write_trajectory_csv(&log, &mut w)?;
            w.flush()?;
            let mut w = create(&summary)?;
            write_summary_json(&result, &mut w)?;
            w.flush()?;
            eprintln!(
                "{} cycles, {} m in {} s ({})",
                result.cycles_completed,
                fmt_sig9(result.total_range),
                fmt_sig9(result.total_time),
                result.termination.as_str()
            );
            Ok(())
        }
        Command::Valve { depth, v_add, sweep } => valve(depth, v_add, sweep),
        Command::Range {
            p_cartridge,
            v_cartridge,
            p_sb,
            v_sb,
            depth,
            convention,
            energy,
            time,
            distance,
        } => {
            let convention = match convention {
                Convention::Gauge => PressureConvention::Gauge,
                Convention::Absolute => PressureConvention::Absolute,
            };
            let range = match (p_cartridge, v_cartridge, v_sb, depth) {
                (Some(p_cartridge), Some(v_cartridge), Some(v_swim_bladder), Some(depth)) => {
                    let input = RangeModelInput {
                        p_cartridge,
                        v_cartridge,
                        p_swim_bladder: p_sb,
                        v_swim_bladder,
                        depth,
                    };
                    let d = closed_form_range(&input, &PhysicalConstants::default(), convention)?;
                    println!("range_m={}", fmt_sig9(d));
                    Some(d)
                }
                (None, None, None, None) => None,
                _ => {
                    return Err(config_failure(
                        "range needs --p-cartridge, --v-cartridge, --v-sb and --depth together".into(),
                    ))
                }
            };
            match (energy, time) {
                (Some(energy), Some(time)) => {
                    let distance = distance.or(range).ok_or_else(|| {
                        config_failure("power efficiency needs --distance or the range flags".into())
                    })?;
                    let (p, e) = power_and_efficiency(energy, time, distance)?;
                    println!("power_w={}", fmt_sig9(p));
                    println!("efficiency_mw_per_m={}", fmt_sig9(e));
                }
                (None, None) if range.is_some() => {}
                _ => return Err(config_failure("give both --energy and --time".into())),
            }
            Ok(())
        }
        Command::Optimize {
            config,
            space,
            method,
            out,
            resolution,
            budget,
            workers,
            max_iters,
            tolerance,
        } => {
            let cfg = load_config(&config)?;
            let text = fs::read_to_string(&space)
                .map_err(|e| config_failure(format!("cannot read {}: {e}", space.display())))?;
            let space = DesignSpace::from_json_str(&text)?;
            let workers = workers.unwrap_or_else(default_workers);
            let results = match method {
                Method::Grid => grid_search(&space, resolution, &cfg, budget, workers)?,
                Method::NelderMead => {
                    let start = space.start_from(&cfg)?;
                    let first = glidesim::optimizer::evaluate(&space, &start, &cfg)?;
                    let opts = NelderMeadOptions {
                        max_iters,
                        tolerance,
                        ..Default::default()
                    };
                    let best = nelder_mead_search(&space, &start, &cfg, &opts)?;
                    let mut r = vec![best, first];
                    rank(&mut r);
                    r.dedup_by(|a, b| a.candidate == b.candidate);
                    r
                }
            };
            let mut w = create(&out)?;
            write_ranked_csv(&space, &results, &mut w)?;
            w.flush()?;
            if let Some(best) = results.first() {
                eprintln!(
                    "best {:?} -> {}",
                    best.candidate.values,
                    best.objective().map_or_else(|| "infeasible".into(), fmt_sig9)
                );
            }
            Ok(())
        }
        Command::Verify { config } => {
            let scenario = load_config(&config)?.build()?;
            let (_, summary) = run_mission(&scenario)?;
            let report = verify_claims(&summary, &REFERENCE_CLAIMS, &Tolerances::default());
            print!("{report}");
            if report.all_pass() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_FAILURE,
                    message: "some claims are not reproduced".into(),
                })
            }
        }
        Command::Calibrate {
            config,
            out,
            nadir,
            cycle_time,
            cycles,
        } => {
            let base = load_config(&config)?;
            let target = CalibrationTarget {
                nadir,
                cycle_time,
                cycles,
                ..Default::default()
            };
            let fit = calibrate(&base, &target)?;
            println!("p_high_pa={}", fit.p_high);
            println!("c_d_a_m2={}", fit.c_d_a);
            println!("cartridge_volume_m3={}", fit.cartridge_volume);
            fs::write(&out, fit.config.to_json_pretty() + "\n")?;
            Ok(())
        }
        Command::Geometry { params, stl } => {
            let params = match params {
                None => WingParams::paper_like(),
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| config_failure(format!("cannot read {}: {e}", path.display())))?;
                    let p: WingParams = serde_json::from_str(&text).map_err(|e| config_failure(e.to_string()))?;
                    p.validate()
                        .map_err(|(f, m)| config_failure(format!("invalid configuration at `{f}`: {m}")))?;
                    p
                }
            };
            println!("volume_cm3={}", fmt_sig9(displaced_volume(&params) * 1e6));
            println!("wetted_area_m2={}", fmt_sig9(wetted_area(&params)));
            if let Some(path) = stl {
                let mut w = create(&path)?;
                write_stl(&params, &mut w)?;
                w.flush()?;
            }
            Ok(())
        }
        Command::Table => {
            let cell = |e: &Entry| match e {
                Entry::Known(q) => {
                    let mut s = fmt_sig9(q.value);
                    if let Some(u) = q.uncertainty {
                        s += &format!(" ± {}", fmt_sig9(u));
                    }
                    if q.estimated {
                        s += " (est.)";
                    }
                    s
                }
                Entry::NotApplicable => "n/a".into(),
                Entry::Unknown => "unknown".into(),
            };
            println!(
                "{:<24} {:>22} {:>18} {:>10} {:>10}",
                "system", "efficiency", "range m", "depth m", "time h"
            );
            for r in comparison_table() {
                let unit = if r.comparable() { "mW/m" } else { "J/m" };
                println!(
                    "{:<24} {:>22} {:>18} {:>10} {:>10}",
                    r.system_name,
                    format!("{} {unit}", cell(&r.power_efficiency)),
                    cell(&r.gliding_range),
                    cell(&r.gliding_depth),
                    cell(&r.deployment_time)
                );
            }
            Ok(())
        }
    }
}

fn valve(depth: f64, v_add: f64, sweep: bool) -> Result<(), Failure> {
    let c = PhysicalConstants::default();
    let with_volume = |v: f64| ValveModel {
        additional_sealed_volume: v,
        ..ValveModel::default()
    };
    if sweep {
        let stdout = io::stdout();
        let mut w = stdout.lock();
        writeln!(w, "depth_m,v_add_m3,snap_through_kpa,snap_back_kpa")?;
        for &d in &SWEEP_DEPTHS {
            for &v in &SWEEP_VOLUMES {
                let valve = with_volume(v);
                let through = snap_through_threshold(&valve, d, &c)?;
                let back = snap_back_threshold(&valve, d, &c)?;
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt_sig9(d),
                    fmt_sig9(v),
                    fmt_sig9(through / 1000.0),
                    fmt_sig9(back / 1000.0)
                )?;
            }
        }
        return Ok(());
    }
    let valve = with_volume(v_add);
    valve
        .validate()
        .map_err(|(f, m)| config_failure(format!("invalid configuration at `valve.{f}`: {m}")))?;
    let through = snap_through_threshold(&valve, depth, &c)?;
    let back = snap_back_threshold(&valve, depth, &c)?;
    println!("snap_through_pa={}", fmt_sig9(through));
    println!("snap_back_pa={}", fmt_sig9(back));
    let (p_high, p_low) = thresholds_from_valve(&valve, &c)?;
    println!("p_high_pa={}", fmt_sig9(p_high));
    println!("p_low_pa={}", fmt_sig9(p_low));
    Ok(())
}
