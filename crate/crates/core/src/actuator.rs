//! Actuator models: torque/speed envelope, PD control law, and gear-ratio
//! rescaling against fixed motor-side limits.

use alloc::format;
#[allow(unused_imports)] // trait float ops are required for no_std builds
use num_traits::Float as _;

use crate::{Error, Result};

/// A geared actuator (or mechanically coupled pair) driving one joint.
///
/// Torque and speed limits are expressed at the joint output. `count = 2`
/// models a coupled pair: it doubles the available torque and the reflected
/// rotor inertia but leaves the speed limit unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActuatorSpec {
    /// Peak output torque of a single unit at zero speed (N m).
    pub max_output_torque: f64,
    /// No-load output speed (rad/s).
    pub max_output_speed: f64,
    /// Transmission ratio, output:input as a single real (> 1 multiplies torque).
    pub gear_ratio: f64,
    /// Rotor inertia at the motor shaft (kg m^2).
    pub rotor_inertia: f64,
    /// Proportional gain of the joint PD loop (N m / rad).
    pub kp: f64,
    /// Derivative gain of the joint PD loop (N m s / rad).
    pub kd: f64,
    /// 1 for a single unit, 2 for a coupled pair.
    pub count: u8,
}

impl ActuatorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_output_torque > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "actuator max torque must be positive, got {}",
                self.max_output_torque
            )));
        }
        if !(self.max_output_speed > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "actuator max speed must be positive, got {}",
                self.max_output_speed
            )));
        }
        if !(self.gear_ratio > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "gear ratio must be positive, got {}",
                self.gear_ratio
            )));
        }
        if !(self.rotor_inertia >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "rotor inertia must be non-negative, got {}",
                self.rotor_inertia
            )));
        }
        if self.count != 1 && self.count != 2 {
            return Err(Error::InvalidSpec(format!(
                "actuator count must be 1 or 2, got {}",
                self.count
            )));
        }
        if !(self.kp >= 0.0) || !(self.kd >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "PD gains must be non-negative, got kp = {}, kd = {}",
                self.kp, self.kd
            )));
        }
        Ok(())
    }

    /// Reflected inertia seen at the joint: `count * J_rotor * gear_ratio^2`.
    pub fn reflected_inertia(&self) -> f64 {
        f64::from(self.count) * self.rotor_inertia * self.gear_ratio * self.gear_ratio
    }

    /// Rescales the joint-side limits to a new gear ratio while holding the
    /// motor-side limits fixed: torque scales with the ratio, speed inversely.
    /// Rotor inertia lives on the motor shaft and is unchanged; the reflected
    /// inertia therefore grows with the ratio squared.
    pub fn with_gear_ratio(&self, gear_ratio: f64) -> Result<Self> {
        if !(gear_ratio > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "gear ratio must be positive, got {gear_ratio}"
            )));
        }
        let motor_torque = self.max_output_torque / self.gear_ratio;
        let motor_speed = self.max_output_speed * self.gear_ratio;
        Ok(Self {
            max_output_torque: motor_torque * gear_ratio,
            max_output_speed: motor_speed / gear_ratio,
            gear_ratio,
            ..*self
        })
    }

    /// Returns the spec with the given unit count (1 = single, 2 = coupled pair).
    pub fn with_count(&self, count: u8) -> Result<Self> {
        let spec = Self { count, ..*self };
        spec.validate()?;
        Ok(spec)
    }
}

/// Torque magnitude available at the given joint speed.
///
/// Linear derating from peak torque at zero speed to zero at the no-load
/// speed, scaled by the unit count. Always non-negative and sign-agnostic
/// in the speed.
pub fn torque_available(act: &ActuatorSpec, joint_velocity: f64) -> f64 {
    let derate = (1.0 - joint_velocity.abs() / act.max_output_speed).max(0.0);
    f64::from(act.count) * act.max_output_torque * derate
}

/// PD torque toward a position/velocity setpoint, clamped to the envelope.
///
/// `tau = kp (q_des - q) + kd (qd_des - qd)`, then clamped to
/// `+- torque_available(act, qd)`.
pub fn pd_torque(act: &ActuatorSpec, q_des: f64, q: f64, qd_des: f64, qd: f64) -> f64 {
    let raw = act.kp * (q_des - q) + act.kd * (qd_des - qd);
    let limit = torque_available(act, qd);
    raw.clamp(-limit, limit)
}
