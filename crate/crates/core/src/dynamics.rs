//! Planar articulated dynamics of the Bike–Neck–Head chain with penalty
//! ground contact.
//!
//! Generalized coordinates `q = (x, z, pitch, mu, q_h)`: the floating Bike
//! base plus the two chain joints. Link orientations are linear in `q`
//! (Bike: `pitch`, Neck: `pitch + mu`, Head: `pitch + mu + q_h`), so the
//! equations of motion assemble from CoM Jacobians:
//!
//! `M(q) qdd + h(q, qd) = tau + J_c^T f_c`
//!
//! with `M = sum_i (m_i J_i^T J_i + I_i e_i e_i^T)` plus the reflected rotor
//! inertia on the actuated diagonal, and `h` collecting centripetal and
//! gravity terms. The integrator is semi-implicit Euler; ground contact is a
//! spring-damper normal force with the tangential force clipped to the
//! Coulomb cone. Joint limits are enforced by clamping with the violating
//! velocity zeroed.

use nalgebra::{Matrix2x5, SMatrix, Vector2};
#[allow(unused_imports)] // trait float ops are required for no_std builds
use num_traits::Float as _;

use crate::morphology::MorphologySpec;
use crate::state::{ContactReport, GenVec, PlanarState, SimConfig, PLANAR_DOF};
use crate::{Error, Result};

type Mat5 = SMatrix<f64, PLANAR_DOF, PLANAR_DOF>;
type Jac = Matrix2x5<f64>;

fn rot(angle: f64, v: Vector2<f64>) -> Vector2<f64> {
    let (s, c) = angle.sin_cos();
    Vector2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

fn perp(v: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

/// Joint torques applied by the actuators (N m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointTorques {
    pub mu: f64,
    pub q_h: f64,
}

/// Per-body kinematic quantities of the chain at one state.
pub(crate) struct ChainKinematics {
    /// CoM positions: Bike, Neck, Head.
    pub coms: [Vector2<f64>; 3],
    /// CoM velocity Jacobians.
    pub jacs: [Jac; 3],
    /// Velocity-product CoM accelerations (`qdd = 0`).
    pub bias_acc: [Vector2<f64>; 3],
    /// Link masses.
    pub masses: [f64; 3],
    /// Link inertias about their CoMs.
    pub inertias: [f64; 3],
    /// Absolute link angular rates.
    pub rates: [f64; 3],
    /// Wheel centers: rear, front.
    pub wheel_centers: [Vector2<f64>; 2],
    /// Wheel-center velocity Jacobians: rear, front.
    pub wheel_jacs: [Jac; 2],
}

impl ChainKinematics {
    pub fn compute(m: &MorphologySpec, s: &PlanarState) -> Result<Self> {
        let base = Vector2::new(s.x, s.z);
        let th = s.pitch;
        let a2 = th + s.mu;
        let a3 = a2 + s.q_h;
        let w1 = s.pitch_rate;
        let w2 = w1 + s.mu_rate;
        let w3 = w2 + s.q_h_rate;

        let bike = m.link_inertia(crate::LinkName::Bike)?;
        let neck = m.link_inertia(crate::LinkName::Neck)?;
        let head = m.link_inertia(crate::LinkName::Head)?;

        let half_base = m.wheelbase / 2.0;
        // Bike cylinder runs from the rear axle along +x.
        let bike_com_local = Vector2::new(-half_base + bike.com_offset, 0.0);
        // Neck mount, relative to the rear axle.
        let mount_local = Vector2::new(
            -half_base + m.mu_joint.mount[0],
            m.mu_joint.mount[1],
        );
        let neck_com_local = Vector2::new(neck.com_offset, 0.0);
        // Head anchor in the Neck frame: Neck tip plus the q_h mount offset.
        let head_anchor_local = Vector2::new(
            m.neck.length + m.q_h_joint.mount[0],
            m.q_h_joint.mount[1],
        );
        let head_com_local = Vector2::new(head.com_offset, 0.0);

        let r_bike = rot(th, bike_com_local);
        let r_mount = rot(th, mount_local);
        let r_neck = rot(a2, neck_com_local);
        let r_anchor = rot(a2, head_anchor_local);
        let r_head = rot(a3, head_com_local);

        let p1 = base + r_bike;
        let p2 = base + r_mount + r_neck;
        let p3 = base + r_mount + r_anchor + r_head;

        let mut j1 = Jac::zeros();
        let mut j2 = Jac::zeros();
        let mut j3 = Jac::zeros();
        for j in [&mut j1, &mut j2, &mut j3] {
            j[(0, 0)] = 1.0;
            j[(1, 1)] = 1.0;
        }
        j1.set_column(2, &perp(r_bike));
        j2.set_column(2, &perp(r_mount + r_neck));
        j2.set_column(3, &perp(r_neck));
        j3.set_column(2, &perp(r_mount + r_anchor + r_head));
        j3.set_column(3, &perp(r_anchor + r_head));
        j3.set_column(4, &perp(r_head));

        let b1 = -(w1 * w1) * r_bike;
        let b2 = -(w1 * w1) * r_mount - (w2 * w2) * r_neck;
        let b3 = -(w1 * w1) * r_mount - (w2 * w2) * r_anchor - (w3 * w3) * r_head;

        let rear_local = Vector2::new(-half_base, 0.0);
        let front_local = Vector2::new(half_base, 0.0);
        let r_rear = rot(th, rear_local);
        let r_front = rot(th, front_local);
        let mut jw_rear = Jac::zeros();
        let mut jw_front = Jac::zeros();
        for j in [&mut jw_rear, &mut jw_front] {
            j[(0, 0)] = 1.0;
            j[(1, 1)] = 1.0;
        }
        jw_rear.set_column(2, &perp(r_rear));
        jw_front.set_column(2, &perp(r_front));

        Ok(Self {
            coms: [p1, p2, p3],
            jacs: [j1, j2, j3],
            bias_acc: [b1, b2, b3],
            masses: [bike.mass, neck.mass, head.mass],
            inertias: [
                bike.inertia_about_com,
                neck.inertia_about_com,
                head.inertia_about_com,
            ],
            rates: [w1, w2, w3],
            wheel_centers: [base + r_rear, base + r_front],
            wheel_jacs: [jw_rear, jw_front],
        })
    }

    /// Angular selector of body `i`: which coordinates feed its orientation.
    fn angular_selector(i: usize) -> GenVec {
        let mut e = GenVec::zeros();
        e[2] = 1.0;
        if i >= 1 {
            e[3] = 1.0;
        }
        if i >= 2 {
            e[4] = 1.0;
        }
        e
    }
}

/// Joint-space mass matrix, including reflected rotor inertia.
pub fn mass_matrix(m: &MorphologySpec, s: &PlanarState) -> Result<Mat5> {
    let kin = ChainKinematics::compute(m, s)?;
    Ok(assemble_mass_matrix(m, &kin))
}

fn assemble_mass_matrix(m: &MorphologySpec, kin: &ChainKinematics) -> Mat5 {
    let mut mass = Mat5::zeros();
    for i in 0..3 {
        mass += kin.masses[i] * kin.jacs[i].transpose() * kin.jacs[i];
        let e = ChainKinematics::angular_selector(i);
        mass += kin.inertias[i] * e * e.transpose();
    }
    mass[(3, 3)] += m.mu_actuator.reflected_inertia();
    mass[(4, 4)] += m.q_h_actuator.reflected_inertia();
    mass
}

/// Centripetal plus gravity bias `h(q, qd)` of the manipulator equation.
fn assemble_bias(kin: &ChainKinematics, gravity: f64) -> GenVec {
    let g_vec = Vector2::new(0.0, -gravity);
    let mut h = GenVec::zeros();
    for i in 0..3 {
        h += kin.masses[i] * kin.jacs[i].transpose() * (kin.bias_acc[i] - g_vec);
    }
    h
}

/// Generalized forces from the per-wheel contact forces.
fn contact_generalized_forces(kin: &ChainKinematics, contacts: &ContactReport) -> GenVec {
    let rear = Vector2::new(contacts.rear_tangential, contacts.rear_normal);
    let front = Vector2::new(contacts.front_tangential, contacts.front_normal);
    kin.wheel_jacs[0].transpose() * rear + kin.wheel_jacs[1].transpose() * front
}

/// Forward dynamics: accelerations of the base and joints.
///
/// The contact forces are taken as given (already resolved by the caller),
/// and the joint torques are assumed envelope-clamped.
pub fn forward_dynamics_planar(
    m: &MorphologySpec,
    s: &PlanarState,
    torques: &JointTorques,
    contacts: &ContactReport,
    cfg: &SimConfig,
) -> Result<GenVec> {
    let kin = ChainKinematics::compute(m, s)?;
    let mass = assemble_mass_matrix(m, &kin);
    let h = assemble_bias(&kin, cfg.gravity);
    let mut rhs = contact_generalized_forces(&kin, contacts) - h;
    rhs[3] += torques.mu;
    rhs[4] += torques.q_h;
    let chol = mass.cholesky().ok_or(Error::SingularMassMatrix)?;
    Ok(chol.solve(&rhs))
}

/// Resolves the penalty contact forces for the current state.
///
/// Penetration of a wheel's lowest point below the ground plane produces a
/// spring-damper normal force (never negative); the tangential force is
/// viscous, clipped to the friction cone.
pub fn resolve_contacts(m: &MorphologySpec, s: &PlanarState, cfg: &SimConfig) -> ContactReport {
    let kin = match ChainKinematics::compute(m, s) {
        Ok(kin) => kin,
        Err(_) => return ContactReport::airborne(),
    };
    let velocity = s.velocity();
    let wheel = |idx: usize| -> (bool, f64, f64) {
        let center = kin.wheel_centers[idx];
        let vel = kin.wheel_jacs[idx] * velocity;
        let penetration = m.wheel_radius - center.y;
        if penetration <= 0.0 {
            return (false, 0.0, 0.0);
        }
        let normal =
            (cfg.contact_stiffness * penetration + cfg.contact_damping * (-vel.y)).max(0.0);
        if normal <= 0.0 {
            return (false, 0.0, 0.0);
        }
        let cone = cfg.friction_coefficient * normal;
        let tangential = (-cfg.contact_damping * vel.x).clamp(-cone, cone);
        (true, normal, tangential)
    };
    let (rear_in_contact, rear_normal, rear_tangential) = wheel(0);
    let (front_in_contact, front_normal, front_tangential) = wheel(1);
    ContactReport {
        rear_in_contact,
        front_in_contact,
        rear_normal,
        front_normal,
        rear_tangential,
        front_tangential,
    }
}

/// One semi-implicit Euler step: velocities from accelerations, then
/// positions from the new velocities, then joint-limit clamping.
///
/// Returns the new state together with the contact forces that acted during
/// the step.
pub fn step(
    m: &MorphologySpec,
    s: &PlanarState,
    torques: &JointTorques,
    cfg: &SimConfig,
) -> Result<(PlanarState, ContactReport)> {
    step_inner(m, s, torques, cfg, false)
}

/// Same as [`step`] but with both chain joints held rigid.
///
/// The constraint forces that freeze the joints are resolved exactly, so the
/// remaining base motion is that of the composite rigid body. Joint torques
/// would be absorbed by the lock and are therefore not accepted. Used for
/// conservation diagnostics of flight phases.
pub fn step_locked_joints(
    m: &MorphologySpec,
    s: &PlanarState,
    cfg: &SimConfig,
) -> Result<(PlanarState, ContactReport)> {
    step_inner(m, s, &JointTorques::default(), cfg, true)
}

fn step_inner(
    m: &MorphologySpec,
    s: &PlanarState,
    torques: &JointTorques,
    cfg: &SimConfig,
    lock_joints: bool,
) -> Result<(PlanarState, ContactReport)> {
    if !(cfg.dt > 0.0) || cfg.dt > 1e-2 {
        return Err(Error::InvalidSpec(alloc::format!(
            "dt must lie in (0, 1e-2], got {}",
            cfg.dt
        )));
    }
    let contacts = resolve_contacts(m, s, cfg);
    let qdd = if lock_joints {
        let kin = ChainKinematics::compute(m, s)?;
        let mass = assemble_mass_matrix(m, &kin);
        let rhs = contact_generalized_forces(&kin, &contacts) - assemble_bias(&kin, cfg.gravity);
        // Base block only; the joints carry whatever constraint force holds
        // them still.
        let mass_bb = mass.fixed_view::<3, 3>(0, 0).into_owned();
        let rhs_b = rhs.fixed_rows::<3>(0).into_owned();
        let chol = mass_bb.cholesky().ok_or(Error::SingularMassMatrix)?;
        let acc_b = chol.solve(&rhs_b);
        let mut qdd = GenVec::zeros();
        qdd.fixed_rows_mut::<3>(0).copy_from(&acc_b);
        qdd
    } else {
        forward_dynamics_planar(m, s, torques, &contacts, cfg)?
    };

    let mut next = *s;
    let v_new = s.velocity() + qdd * cfg.dt;
    next.set_velocity(&v_new);
    let q_new = s.position() + v_new * cfg.dt;
    next.set_position(&q_new);
    next.time = s.time + cfg.dt;

    // Joint limits: pin the position, zero the inward velocity component.
    if next.mu < m.mu_joint.lower_limit {
        next.mu = m.mu_joint.lower_limit;
        next.mu_rate = next.mu_rate.max(0.0);
    } else if next.mu > m.mu_joint.upper_limit {
        next.mu = m.mu_joint.upper_limit;
        next.mu_rate = next.mu_rate.min(0.0);
    }
    if next.q_h < m.q_h_joint.lower_limit {
        next.q_h = m.q_h_joint.lower_limit;
        next.q_h_rate = next.q_h_rate.max(0.0);
    } else if next.q_h > m.q_h_joint.upper_limit {
        next.q_h = m.q_h_joint.upper_limit;
        next.q_h_rate = next.q_h_rate.min(0.0);
    }

    if !next.is_finite() {
        return Err(Error::Divergence { time: next.time });
    }
    Ok((next, contacts))
}
