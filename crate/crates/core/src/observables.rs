//! Kinematic and conserved observables of the planar model.

use nalgebra::Vector2;

use crate::dynamics::ChainKinematics;
use crate::morphology::MorphologySpec;
use crate::state::PlanarState;

/// Whole-body CoM and rear-wheel clearance geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KinematicObservables {
    /// Whole-body center of mass (m).
    pub p_com: [f64; 2],
    /// Height of the whole-body CoM (m).
    pub h_com: f64,
    /// Lowest point of the rear wheel (m).
    pub p_clearance: [f64; 2],
    /// Height of the rear wheel's lowest point (m).
    pub h_clearance: f64,
}

/// Energy- and momentum-level observables.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConservedQuantities {
    /// Kinetic plus gravitational potential energy, datum at h_com = 0 (J).
    pub mechanical_energy: f64,
    /// Angular momentum about the whole-body CoM (kg m^2/s).
    pub centroidal_angular_momentum: f64,
    /// Instantaneous composite inertia about the pitch axis through the CoM
    /// (kg m^2).
    pub centroidal_inertia_pitch: f64,
}

/// Velocity of the whole-body CoM (m/s).
pub fn com_velocity(m: &MorphologySpec, s: &PlanarState) -> [f64; 2] {
    let kin = ChainKinematics::compute(m, s).expect("valid morphology");
    let velocity = s.velocity();
    let total: f64 = kin.masses.iter().sum();
    let mut v = Vector2::zeros();
    for i in 0..3 {
        v += kin.masses[i] * (kin.jacs[i] * velocity);
    }
    v /= total;
    [v.x, v.y]
}

/// CoM position and rear-wheel clearance of the current state.
pub fn kinematic_observables(m: &MorphologySpec, s: &PlanarState) -> KinematicObservables {
    let kin = ChainKinematics::compute(m, s).expect("valid morphology");
    let total: f64 = kin.masses.iter().sum();
    let mut com = Vector2::zeros();
    for i in 0..3 {
        com += kin.masses[i] * kin.coms[i];
    }
    com /= total;
    let clearance = kin.wheel_centers[0] - Vector2::new(0.0, m.wheel_radius);
    KinematicObservables {
        p_com: [com.x, com.y],
        h_com: com.y,
        p_clearance: [clearance.x, clearance.y],
        h_clearance: clearance.y,
    }
}

/// Mechanical energy, centroidal angular momentum, and centroidal pitch
/// inertia at the given gravity.
///
/// Momentum and inertia are taken about the whole-body CoM and count the
/// link bodies; the geared rotors enter the energy through their reflected
/// inertia but carry no link-level momentum in this model.
pub fn conserved_quantities(
    m: &MorphologySpec,
    s: &PlanarState,
    gravity: f64,
) -> ConservedQuantities {
    let kin = ChainKinematics::compute(m, s).expect("valid morphology");
    let velocity = s.velocity();
    let total: f64 = kin.masses.iter().sum();

    let mut com = Vector2::zeros();
    let mut com_vel = Vector2::zeros();
    for i in 0..3 {
        com += kin.masses[i] * kin.coms[i];
        com_vel += kin.masses[i] * (kin.jacs[i] * velocity);
    }
    com /= total;
    com_vel /= total;

    let mut kinetic = 0.0;
    let mut momentum = 0.0;
    let mut inertia = 0.0;
    for i in 0..3 {
        let v = kin.jacs[i] * velocity;
        kinetic += 0.5 * kin.masses[i] * v.norm_squared()
            + 0.5 * kin.inertias[i] * kin.rates[i] * kin.rates[i];
        let r = kin.coms[i] - com;
        let v_rel = v - com_vel;
        momentum +=
            kin.inertias[i] * kin.rates[i] + kin.masses[i] * (r.x * v_rel.y - r.y * v_rel.x);
        inertia += kin.inertias[i] + kin.masses[i] * r.norm_squared();
    }
    kinetic += 0.5 * m.mu_actuator.reflected_inertia() * s.mu_rate * s.mu_rate;
    kinetic += 0.5 * m.q_h_actuator.reflected_inertia() * s.q_h_rate * s.q_h_rate;

    ConservedQuantities {
        mechanical_energy: kinetic + total * gravity * com.y,
        centroidal_angular_momentum: momentum,
        centroidal_inertia_pitch: inertia,
    }
}
