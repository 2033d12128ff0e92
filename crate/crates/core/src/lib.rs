//! Simulation and design-space search for a buoyancy-driven underwater
//! glider whose dive cycle is switched by a passive bistable valve.
//!
//! The pieces compose bottom-up: [`model`] holds the force balance,
//! [`pneumatics`] the valve and gas plumbing, [`controller`] the bang-bang
//! state machine, [`dynamics`] the glide kinematics and [`mission`] the
//! closed loop that ties them together.

pub mod error;
pub mod model;
pub mod pneumatics;
pub mod controller;
pub mod dynamics;
pub mod geometry;
pub mod scenario;
pub mod mission;
pub mod calibration;
pub mod analysis;
pub mod optimizer;
pub mod claims;
pub mod output;

pub use error::{Error, Result, ScenarioError};
pub use mission::{run_mission, run_mission_summary, MissionSummary, Termination, TrajectoryLog};
pub use scenario::{Scenario, ScenarioConfig};
