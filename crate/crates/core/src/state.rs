//! Simulation state, contact report, and integrator configuration.

use alloc::format;
use nalgebra::SVector;

use crate::{Error, Result};

/// Number of generalized coordinates of the planar model:
/// base x, base z, pitch, mu, q_h.
pub const PLANAR_DOF: usize = 5;

/// Generalized coordinate or velocity vector of the planar model.
pub type GenVec = SVector<f64, PLANAR_DOF>;

/// State of the planar model: Bike base pose, joint positions, velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarState {
    /// Base position x (m), forward.
    pub x: f64,
    /// Base position z (m), up; z = 0 is the axle line at ground level minus
    /// nothing — the ground plane itself is z = 0 in world coordinates.
    pub z: f64,
    /// Bike pitch (rad), positive nose-up.
    pub pitch: f64,
    /// Neck pitch joint (rad).
    pub mu: f64,
    /// Head joint (rad).
    pub q_h: f64,
    pub vx: f64,
    pub vz: f64,
    pub pitch_rate: f64,
    pub mu_rate: f64,
    pub q_h_rate: f64,
    /// Simulation time (s).
    pub time: f64,
}

impl PlanarState {
    /// A state at rest with the given pose.
    pub fn at_rest(x: f64, z: f64, pitch: f64, mu: f64, q_h: f64) -> Self {
        Self {
            x,
            z,
            pitch,
            mu,
            q_h,
            vx: 0.0,
            vz: 0.0,
            pitch_rate: 0.0,
            mu_rate: 0.0,
            q_h_rate: 0.0,
            time: 0.0,
        }
    }

    pub fn position(&self) -> GenVec {
        GenVec::new(self.x, self.z, self.pitch, self.mu, self.q_h)
    }

    pub fn velocity(&self) -> GenVec {
        GenVec::new(self.vx, self.vz, self.pitch_rate, self.mu_rate, self.q_h_rate)
    }

    pub fn set_position(&mut self, q: &GenVec) {
        self.x = q[0];
        self.z = q[1];
        self.pitch = q[2];
        self.mu = q[3];
        self.q_h = q[4];
    }

    pub fn set_velocity(&mut self, v: &GenVec) {
        self.vx = v[0];
        self.vz = v[1];
        self.pitch_rate = v[2];
        self.mu_rate = v[3];
        self.q_h_rate = v[4];
    }

    pub fn is_finite(&self) -> bool {
        self.position().iter().all(|v| v.is_finite())
            && self.velocity().iter().all(|v| v.is_finite())
            && self.time.is_finite()
    }
}

/// Per-wheel ground reaction forces for one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContactReport {
    pub rear_in_contact: bool,
    pub front_in_contact: bool,
    /// Normal force on the rear wheel (N), never negative.
    pub rear_normal: f64,
    /// Normal force on the front wheel (N), never negative.
    pub front_normal: f64,
    /// Tangential force on the rear wheel (N), inside the friction cone.
    pub rear_tangential: f64,
    /// Tangential force on the front wheel (N), inside the friction cone.
    pub front_tangential: f64,
}

impl ContactReport {
    /// No contact on either wheel.
    pub fn airborne() -> Self {
        Self::default()
    }

    pub fn any_contact(&self) -> bool {
        self.rear_in_contact || self.front_in_contact
    }
}

/// Integrator and contact-model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SimConfig {
    /// Integration step (s).
    pub dt: f64,
    /// Gravitational acceleration (m/s^2), positive down.
    pub gravity: f64,
    /// Coulomb friction coefficient at the wheel contacts.
    pub friction_coefficient: f64,
    /// Penalty contact stiffness (N/m).
    pub contact_stiffness: f64,
    /// Penalty contact damping (N s/m), also the tangential viscosity.
    pub contact_damping: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            gravity: 9.81,
            friction_coefficient: 1.0,
            contact_stiffness: 1e5,
            contact_damping: 1e3,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.dt > 1e-2 {
            return Err(Error::InvalidSpec(format!(
                "dt must lie in (0, 1e-2], got {}",
                self.dt
            )));
        }
        if !(self.gravity > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "gravity must be positive, got {}",
                self.gravity
            )));
        }
        if !(self.friction_coefficient >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "friction coefficient must be non-negative, got {}",
                self.friction_coefficient
            )));
        }
        if !(self.contact_stiffness >= 0.0) || !(self.contact_damping >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "contact stiffness/damping must be non-negative, got {} / {}",
                self.contact_stiffness, self.contact_damping
            )));
        }
        Ok(())
    }
}
