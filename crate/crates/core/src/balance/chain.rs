//! Minimal articulated-tree dynamics over revolute joints.
//!
//! Each body attaches to its parent through one revolute joint (axis and
//! anchor expressed in the parent frame), so the tree has exactly one
//! generalized coordinate per body. Mass matrix and bias forces assemble
//! from CoM Jacobians with the full gyroscopic terms:
//!
//! `M(q) qdd + h(q, qd) = Q_gravity + tau`
//!
//! Body frames share their origin with the joint anchor; CoM offsets and
//! inertia tensors are given in the body frame. Massless frames are allowed
//! as intermediate bodies.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Unit, Vector3};

use crate::{Error, Result};

/// One body of the tree plus the revolute joint connecting it to its parent.
#[derive(Debug, Clone)]
pub struct ChainBody {
    /// Parent body index; `None` roots the body to the world.
    pub parent: Option<usize>,
    /// Joint axis, unit length, in the parent frame.
    pub axis: Vector3<f64>,
    /// Joint anchor in the parent frame (the body frame origin).
    pub anchor: Vector3<f64>,
    /// Body mass (kg); zero for pure frames.
    pub mass: f64,
    /// CoM offset in the body frame (m).
    pub com: Vector3<f64>,
    /// Inertia tensor about the CoM, in the body frame (kg m^2).
    pub inertia: Matrix3<f64>,
}

/// Articulated tree; bodies are stored parent-before-child.
#[derive(Debug, Clone)]
pub struct Chain {
    bodies: Vec<ChainBody>,
}

struct FrameState {
    rot: Rotation3<f64>,
    origin: Vector3<f64>,
    omega: Vector3<f64>,
    v_origin: Vector3<f64>,
    alpha_bias: Vector3<f64>,
    a_origin_bias: Vector3<f64>,
    axis_world: Vector3<f64>,
    com_world: Vector3<f64>,
    v_com: Vector3<f64>,
    a_com_bias: Vector3<f64>,
}

/// Assembled dynamics quantities at one `(q, qd)`.
pub struct ChainDynamics {
    pub mass_matrix: DMatrix<f64>,
    /// Centripetal/Coriolis/gyroscopic bias forces.
    pub bias: DVector<f64>,
    /// Generalized gravity forces (right-hand side).
    pub gravity: DVector<f64>,
    /// World CoM of the whole tree.
    pub com: Vector3<f64>,
    /// Total mass.
    pub total_mass: f64,
}

impl Chain {
    pub fn new(bodies: Vec<ChainBody>) -> Result<Self> {
        for (i, body) in bodies.iter().enumerate() {
            if let Some(p) = body.parent {
                if p >= i {
                    return Err(Error::InvalidSpec(alloc::format!(
                        "body {i} references parent {p}; bodies must be parent-ordered"
                    )));
                }
            }
            let norm = body.axis.norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidSpec(alloc::format!(
                    "body {i} joint axis has norm {norm}, expected 1"
                )));
            }
            if !(body.mass >= 0.0) {
                return Err(Error::InvalidSpec(alloc::format!(
                    "body {i} has negative mass {}",
                    body.mass
                )));
            }
        }
        Ok(Self { bodies })
    }

    pub fn dof(&self) -> usize {
        self.bodies.len()
    }

    fn frames(&self, q: &DVector<f64>, qd: &DVector<f64>) -> Vec<FrameState> {
        let mut frames: Vec<FrameState> = Vec::with_capacity(self.bodies.len());
        for (i, body) in self.bodies.iter().enumerate() {
            let (p_rot, p_origin, p_omega, p_v, p_alpha, p_acc) = match body.parent {
                Some(p) => {
                    let f = &frames[p];
                    (
                        f.rot,
                        f.origin,
                        f.omega,
                        f.v_origin,
                        f.alpha_bias,
                        f.a_origin_bias,
                    )
                }
                None => (
                    Rotation3::identity(),
                    Vector3::zeros(),
                    Vector3::zeros(),
                    Vector3::zeros(),
                    Vector3::zeros(),
                    Vector3::zeros(),
                ),
            };
            let axis_world = p_rot * body.axis;
            let r_anchor = p_rot * body.anchor;
            let origin = p_origin + r_anchor;
            let rot = p_rot * Rotation3::from_axis_angle(&Unit::new_unchecked(body.axis), q[i]);
            let omega = p_omega + qd[i] * axis_world;
            let v_origin = p_v + p_omega.cross(&r_anchor);
            let alpha_bias = p_alpha + p_omega.cross(&(qd[i] * axis_world));
            let a_origin_bias =
                p_acc + p_alpha.cross(&r_anchor) + p_omega.cross(&p_omega.cross(&r_anchor));
            let r_com = rot * body.com;
            let com_world = origin + r_com;
            let v_com = v_origin + omega.cross(&r_com);
            let a_com_bias =
                a_origin_bias + alpha_bias.cross(&r_com) + omega.cross(&omega.cross(&r_com));
            frames.push(FrameState {
                rot,
                origin,
                omega,
                v_origin,
                alpha_bias,
                a_origin_bias,
                axis_world,
                com_world,
                v_com,
                a_com_bias,
            });
        }
        frames
    }

    /// World CoM positions of every body at configuration `q`.
    pub fn body_coms(&self, q: &DVector<f64>) -> Vec<Vector3<f64>> {
        let qd = DVector::zeros(self.dof());
        self.frames(q, &qd).iter().map(|f| f.com_world).collect()
    }

    /// Whole-tree CoM at configuration `q`.
    pub fn com(&self, q: &DVector<f64>) -> Vector3<f64> {
        let mut com = Vector3::zeros();
        let mut total = 0.0;
        for (body, p) in self.bodies.iter().zip(self.body_coms(q)) {
            com += body.mass * p;
            total += body.mass;
        }
        com / total
    }

    /// Mass matrix, bias, and gravity forces at `(q, qd)`.
    pub fn dynamics(
        &self,
        q: &DVector<f64>,
        qd: &DVector<f64>,
        gravity: f64,
    ) -> Result<ChainDynamics> {
        let n = self.dof();
        debug_assert_eq!(q.len(), n);
        debug_assert_eq!(qd.len(), n);
        let frames = self.frames(q, qd);
        let g_vec = Vector3::new(0.0, 0.0, -gravity);

        let mut mass_matrix = DMatrix::<f64>::zeros(n, n);
        let mut bias = DVector::<f64>::zeros(n);
        let mut grav = DVector::<f64>::zeros(n);
        let mut com = Vector3::zeros();
        let mut total_mass = 0.0;

        // Per-body Jacobian columns: ancestors of i, including i itself.
        let mut ancestors: Vec<usize> = Vec::with_capacity(n);
        for (i, body) in self.bodies.iter().enumerate() {
            if body.mass == 0.0 && body.inertia == Matrix3::zeros() {
                continue;
            }
            ancestors.clear();
            let mut k = Some(i);
            while let Some(idx) = k {
                ancestors.push(idx);
                k = self.bodies[idx].parent;
            }

            let f = &frames[i];
            let inertia_world =
                f.rot.matrix() * self.bodies[i].inertia * f.rot.matrix().transpose();
            let gyro = inertia_world * f.alpha_bias + f.omega.cross(&(inertia_world * f.omega));
            let inertial_force = self.bodies[i].mass * f.a_com_bias;
            let grav_force = self.bodies[i].mass * g_vec;

            // Column data for each contributing joint.
            let mut jv_cols: Vec<(usize, Vector3<f64>, Vector3<f64>)> =
                Vec::with_capacity(ancestors.len());
            for &k in &ancestors {
                let fk = &frames[k];
                let jv = fk.axis_world.cross(&(f.com_world - fk.origin));
                jv_cols.push((k, jv, fk.axis_world));
            }

            for &(k, jv_k, jw_k) in &jv_cols {
                bias[k] += jv_k.dot(&inertial_force) + jw_k.dot(&gyro);
                grav[k] += jv_k.dot(&grav_force);
                for &(l, jv_l, jw_l) in &jv_cols {
                    if l > k {
                        continue;
                    }
                    let m_kl = self.bodies[i].mass * jv_k.dot(&jv_l)
                        + jw_k.dot(&(inertia_world * jw_l));
                    mass_matrix[(k, l)] += m_kl;
                    if l != k {
                        mass_matrix[(l, k)] += m_kl;
                    }
                }
            }

            com += self.bodies[i].mass * f.com_world;
            total_mass += self.bodies[i].mass;
        }

        Ok(ChainDynamics {
            mass_matrix,
            bias,
            gravity: grav,
            com: com / total_mass,
            total_mass,
        })
    }

    /// Forward dynamics: `qdd = M^-1 (tau + Q_gravity - h)`.
    pub fn accelerations(
        &self,
        q: &DVector<f64>,
        qd: &DVector<f64>,
        tau: &DVector<f64>,
        gravity: f64,
    ) -> Result<DVector<f64>> {
        let dyn_ = self.dynamics(q, qd, gravity)?;
        let rhs = tau + dyn_.gravity - dyn_.bias;
        dyn_.mass_matrix
            .cholesky()
            .map(|c| c.solve(&rhs))
            .ok_or(Error::SingularMassMatrix)
    }

    /// Kinetic plus potential energy at `(q, qd)`; used by conservation tests.
    pub fn energy(&self, q: &DVector<f64>, qd: &DVector<f64>, gravity: f64) -> f64 {
        let frames = self.frames(q, qd);
        let mut e = 0.0;
        for (body, f) in self.bodies.iter().zip(&frames) {
            let inertia_world = f.rot.matrix() * body.inertia * f.rot.matrix().transpose();
            e += 0.5 * body.mass * f.v_com.norm_squared()
                + 0.5 * f.omega.dot(&(inertia_world * f.omega))
                + body.mass * gravity * f.com_world.z;
        }
        e
    }
}
