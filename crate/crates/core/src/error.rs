use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} out of domain: {value}")]
    Domain { quantity: &'static str, value: f64 },

    #[error(
        "valve model singular: membrane displacement {displacement} m³ is not smaller than \
         sealed chamber volume {sealed} m³"
    )]
    ValveSingularity { displacement: f64, sealed: f64 },

    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("infeasible scenario: {0}")]
    Scenario(#[from] ScenarioError),

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64) -> Self {
        Error::Domain { quantity, value }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// A physically impossible mission setup. The display string names the
/// invariant that the configuration violates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("never dives: deflated net force must be negative (got {f_net:.6} N)")]
    NeverDives { f_net: f64 },

    #[error("never surfaces: net force with a full bladder must be positive (got {f_net:.6} N)")]
    NeverSurfaces { f_net: f64 },

    #[error(
        "never inflates: regulator setpoint {setpoint:.1} Pa cannot overcome bladder back \
         pressure {back_pressure:.1} Pa at the snap-through depth"
    )]
    NeverInflates { setpoint: f64, back_pressure: f64 },

    #[error("never snaps back: snap-back threshold {p_low:.1} Pa is below surface pressure")]
    NeverSnapsBack { p_low: f64 },
}
