//! Simulation and analysis kernels for a single-track (bicycle-style) robot
//! built from a Bike–Neck–Head link chain.
//!
//! The crate has three layers:
//!
//! * [`dynamics`] and friends: a planar (sagittal) articulated rigid-body
//!   model with penalty ground contact, actuator torque/speed envelopes, and
//!   kinematic/conserved observables. This is the substrate for all jump
//!   studies.
//! * [`jump`]: crouch-to-apogee jump simulation, jump metrics (apex heights,
//!   contact ratio, peak mechanical power), and the morphology design sweeps
//!   (link-mass sensitivity, gear-ratio landscape, gross-scale study).
//! * [`balance`]: a spatial wheelie model pivoting on the rear contact,
//!   finite-difference linearization, finite-horizon controllability
//!   Gramians, and the minimum-control-effort metric used to place the
//!   out-of-plane joint axis.
//!
//! Everything here is pure computation over `f64`: no IO, no clocks, no
//! global state. All operations are deterministic, so repeated calls with
//! identical inputs produce bit-identical results. The companion CLI crate
//! handles configuration files, parallel sweep execution, and CSV/SVG/JSON
//! emission.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod actuator;
pub mod balance;
pub mod dynamics;
pub mod error;
pub mod inertia;
pub mod jump;
pub mod morphology;
pub mod observables;
pub mod state;
pub mod sweep;

pub use actuator::{pd_torque, torque_available, ActuatorSpec};
pub use error::Error;
pub use inertia::{cylinder_inertia, CylinderSpec, LinkInertia};
pub use morphology::{build_morphology, JointSpec, LinkName, MorphologySpec};
pub use state::{ContactReport, PlanarState, SimConfig};
pub use sweep::{PointFailure, SweepAxis, SweepPoint, SweepResult};

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
