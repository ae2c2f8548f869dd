//! Error type shared by the simulation and analysis modules.

use alloc::string::String;
use core::fmt;

/// Errors produced by model construction, simulation, and analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A spec violated its invariants (non-positive mass, bad limits, ...).
    InvalidSpec(String),
    /// The joint-space mass matrix lost positive-definiteness.
    SingularMassMatrix,
    /// Integration produced a non-finite state at the given time stamp.
    Divergence { time: f64 },
    /// A trace spans zero duration, so ratios over it are undefined.
    DegenerateTrace,
    /// Metrics were requested for a trace with no samples.
    EmptyTrace,
    /// The commanded stance force cannot overcome weight.
    NoLiftoff,
    /// No static equilibrium was found on the searched interval.
    NoEquilibrium(String),
    /// Finite-difference linearization produced non-finite derivatives.
    Linearization(String),
    /// The Gramian integration overflowed; retry with a shorter horizon.
    HorizonOverflow { horizon: f64 },
    /// The Gramian was numerically indefinite.
    IndefiniteGramian,
    /// Every configuration in an aggregate failed.
    AggregateUndefined,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec(msg) => write!(f, "invalid spec: {msg}"),
            Error::SingularMassMatrix => write!(f, "mass matrix is singular"),
            Error::Divergence { time } => {
                write!(f, "simulation diverged (non-finite state) at t = {time}")
            }
            Error::DegenerateTrace => write!(f, "trace spans zero duration"),
            Error::EmptyTrace => write!(f, "trace contains no samples"),
            Error::NoLiftoff => write!(f, "stance force does not exceed weight; no lift-off"),
            Error::NoEquilibrium(msg) => write!(f, "no static equilibrium: {msg}"),
            Error::Linearization(msg) => write!(f, "linearization failed: {msg}"),
            Error::HorizonOverflow { horizon } => write!(
                f,
                "Gramian overflowed over horizon T = {horizon}; use a shorter horizon"
            ),
            Error::IndefiniteGramian => write!(f, "Gramian is numerically indefinite"),
            Error::AggregateUndefined => {
                write!(f, "all configurations failed; aggregate effort undefined")
            }
        }
    }
}

impl core::error::Error for Error {}
