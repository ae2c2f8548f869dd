//! Cylinder link approximation: every link is a solid cylinder of uniform
//! density, so its mass properties follow from length, radius, and mass.

use alloc::format;

use crate::{Error, Result};

/// Geometry and mass of a solid-cylinder link.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CylinderSpec {
    /// Length along the link axis (m).
    pub length: f64,
    /// Cylinder radius (m). Zero is the slender-rod limit.
    pub radius: f64,
    /// Total mass (kg).
    pub mass: f64,
}

impl CylinderSpec {
    pub fn new(length: f64, radius: f64, mass: f64) -> Result<Self> {
        let spec = Self {
            length,
            radius,
            mass,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "cylinder length must be positive, got {}",
                self.length
            )));
        }
        if !(self.radius >= 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "cylinder radius must be non-negative, got {}",
                self.radius
            )));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "cylinder mass must be positive, got {}",
                self.mass
            )));
        }
        Ok(())
    }
}

/// Mass properties of a link derived from its cylinder geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinkInertia {
    /// Link mass (kg).
    pub mass: f64,
    /// Center of mass along the link axis, measured from the proximal joint (m).
    pub com_offset: f64,
    /// Moment of inertia about the transverse axis through the CoM (kg m^2).
    pub inertia_about_com: f64,
}

/// Mass properties of a uniform solid cylinder about its transverse axis.
///
/// `I = m (L^2 / 12 + r^2 / 4)` with the CoM at mid-length.
pub fn cylinder_inertia(spec: &CylinderSpec) -> Result<LinkInertia> {
    spec.validate()?;
    Ok(LinkInertia {
        mass: spec.mass,
        com_offset: spec.length / 2.0,
        inertia_about_com: spec.mass
            * (spec.length * spec.length / 12.0 + spec.radius * spec.radius / 4.0),
    })
}
