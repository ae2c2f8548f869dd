//! Parametric description of the Bike–Neck–Head chain.
//!
//! The model is the locked sagittal representation: the out-of-plane angle is
//! held at zero and the left/right arm pair acts as the single pitch joint
//! `mu`. Joint `q_h` connects the Head to the Neck. Frames and offsets:
//!
//! * Bike frame: origin midway between the wheel centers on the axle line,
//!   x forward, z up. Wheel centers sit at `+- wheelbase / 2` along x.
//! * `mu` mount: offset from the rear axle, expressed in the Bike frame.
//!   The Neck extends from the mount at absolute angle `pitch + mu`.
//! * `q_h` mount: offset from the Neck tip, expressed in the Neck frame.
//!   The Head extends from there at absolute angle `pitch + mu + q_h`.

use alloc::format;

use crate::actuator::ActuatorSpec;
use crate::inertia::{cylinder_inertia, CylinderSpec, LinkInertia};
use crate::{Error, Result};

/// Names of the three links in chain order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LinkName {
    Bike,
    Neck,
    Head,
}

impl LinkName {
    pub const ALL: [LinkName; 3] = [LinkName::Bike, LinkName::Neck, LinkName::Head];
}

/// A revolute joint: position limits plus the mounting offset of its anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointSpec {
    /// Lower position limit (rad).
    pub lower_limit: f64,
    /// Upper position limit (rad).
    pub upper_limit: f64,
    /// Anchor offset (m): for `mu` relative to the rear axle in the Bike
    /// frame, for `q_h` relative to the Neck tip in the Neck frame.
    pub mount: [f64; 2],
}

impl JointSpec {
    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.lower_limit < self.upper_limit) {
            return Err(Error::InvalidSpec(format!(
                "joint {name}: lower limit {} must be below upper limit {}",
                self.lower_limit, self.upper_limit
            )));
        }
        if !self.mount[0].is_finite() || !self.mount[1].is_finite() {
            return Err(Error::InvalidSpec(format!("joint {name}: non-finite mount")));
        }
        Ok(())
    }

    /// Clamps a position into the limit interval.
    pub fn clamp(&self, q: f64) -> f64 {
        q.clamp(self.lower_limit, self.upper_limit)
    }

    pub fn contains(&self, q: f64) -> bool {
        q >= self.lower_limit && q <= self.upper_limit
    }
}

/// Full parametric morphology: link cylinders, joints, actuators, and the
/// running-gear geometry, together with the gross scale.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MorphologySpec {
    pub bike: CylinderSpec,
    pub neck: CylinderSpec,
    pub head: CylinderSpec,
    pub mu_joint: JointSpec,
    pub q_h_joint: JointSpec,
    pub mu_actuator: ActuatorSpec,
    pub q_h_actuator: ActuatorSpec,
    /// Wheel radius (m); both wheels share it.
    pub wheel_radius: f64,
    /// Distance between the wheel centers (m).
    pub wheelbase: f64,
    /// Gross scale; 1.0 corresponds to a Neck length of 1 m.
    pub scale: f64,
}

impl MorphologySpec {
    /// The as-built robot: 23.5 kg total, 0.4 m Neck, catalogue actuators.
    ///
    /// In the locked sagittal representation the left/right arm motors (two
    /// AK10-9 at 297:22, 72 N m and 29.4 rad/s each) act in unison on `mu`,
    /// so that joint carries a coupled pair; `q_h` carries the coupled
    /// AK10-9 pair at 450:22 (218 N m combined, 19.4 rad/s). Rotor inertia
    /// is a 1e-4 kg m^2 placeholder per motor.
    pub fn nominal() -> Self {
        Self {
            bike: CylinderSpec {
                length: 0.5,
                radius: 0.06,
                mass: 6.0,
            },
            neck: CylinderSpec {
                length: 0.4,
                radius: 0.04,
                mass: 1.5,
            },
            head: CylinderSpec {
                length: 0.2,
                radius: 0.10,
                mass: 16.0,
            },
            mu_joint: JointSpec {
                lower_limit: 0.20,
                upper_limit: 2.80,
                mount: [0.176, 0.06],
            },
            q_h_joint: JointSpec {
                lower_limit: -2.90,
                upper_limit: 2.90,
                mount: [0.0, 0.0],
            },
            mu_actuator: ActuatorSpec {
                max_output_torque: 72.0,
                max_output_speed: 29.4,
                gear_ratio: 297.0 / 22.0,
                rotor_inertia: 1e-4,
                kp: 500.0,
                kd: 8.0,
                count: 2,
            },
            q_h_actuator: ActuatorSpec {
                max_output_torque: 109.0,
                max_output_speed: 19.4,
                gear_ratio: 450.0 / 22.0,
                rotor_inertia: 1e-4,
                kp: 800.0,
                kd: 12.0,
                count: 2,
            },
            wheel_radius: 0.14,
            wheelbase: 0.5,
            scale: 0.4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bike.validate()?;
        self.neck.validate()?;
        self.head.validate()?;
        self.mu_joint.validate("mu")?;
        self.q_h_joint.validate("q_h")?;
        self.mu_actuator.validate()?;
        self.q_h_actuator.validate()?;
        if !(self.wheel_radius > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "wheel radius must be positive, got {}",
                self.wheel_radius
            )));
        }
        if !(self.wheelbase > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "wheelbase must be positive, got {}",
                self.wheelbase
            )));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    pub fn link(&self, name: LinkName) -> &CylinderSpec {
        match name {
            LinkName::Bike => &self.bike,
            LinkName::Neck => &self.neck,
            LinkName::Head => &self.head,
        }
    }

    pub fn link_mut(&mut self, name: LinkName) -> &mut CylinderSpec {
        match name {
            LinkName::Bike => &mut self.bike,
            LinkName::Neck => &mut self.neck,
            LinkName::Head => &mut self.head,
        }
    }

    /// Sum of the link masses (kg).
    pub fn total_mass(&self) -> f64 {
        self.bike.mass + self.neck.mass + self.head.mass
    }

    /// Derived mass properties for one link.
    pub fn link_inertia(&self, name: LinkName) -> Result<LinkInertia> {
        cylinder_inertia(self.link(name))
    }
}

/// Rescales a morphology by the given factor.
///
/// All lengths (link lengths, wheel radius, wheelbase, mounting offsets)
/// multiply by the factor. Link radii and material density are held fixed,
/// so masses scale with length. Actuators are off-the-shelf units and do not
/// scale. Derived inertias follow from the cylinder model.
pub fn build_morphology(base: &MorphologySpec, scale: f64) -> Result<MorphologySpec> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "scale factor must be positive, got {scale}"
        )));
    }
    let scale_cylinder = |c: &CylinderSpec| CylinderSpec {
        length: c.length * scale,
        radius: c.radius,
        mass: c.mass * scale,
    };
    let scale_joint = |j: &JointSpec| JointSpec {
        mount: [j.mount[0] * scale, j.mount[1] * scale],
        ..*j
    };
    let spec = MorphologySpec {
        bike: scale_cylinder(&base.bike),
        neck: scale_cylinder(&base.neck),
        head: scale_cylinder(&base.head),
        mu_joint: scale_joint(&base.mu_joint),
        q_h_joint: scale_joint(&base.q_h_joint),
        mu_actuator: base.mu_actuator,
        q_h_actuator: base.q_h_actuator,
        wheel_radius: base.wheel_radius * scale,
        wheelbase: base.wheelbase * scale,
        scale: base.scale * scale,
    };
    spec.validate()?;
    Ok(spec)
}
