//! Lateral-balance analysis on the rear wheel.
//!
//! The wheelie model pins the rear contact point as a frictionless pivot
//! (roll and pitch, yaw omitted) and adds a wheel-spin coordinate whose
//! drive torque reacts in the pitch plane. The chain above the Bike runs
//! through the out-of-plane joint `phi` (axis fixed at angle `psi_hat` in
//! the Bike sagittal plane), the Neck pitch joint `mu`, and the Head joint
//! `q_h`; an optional second out-of-plane joint `zeta` models the extra-DoF
//! morphology variant.
//!
//! Coordinate order: `roll, pitch, spin, phi, [zeta,] mu, q_h`.
//! Input order (actuated joints): `spin, phi, [zeta,] mu, q_h`.

pub mod chain;
pub mod effort;
pub mod gramian;
pub mod linearize;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use nalgebra::{DVector, Matrix3, Vector3};
#[allow(unused_imports)] // trait float ops are required for no_std builds
use num_traits::Float as _;

use crate::morphology::MorphologySpec;
use crate::{Error, Result};
use chain::{Chain, ChainBody};

pub use effort::{aggregate_effort, dof_comparison, psi_sweep, DofComparison, EffortResult, PsiSweep};
pub use gramian::{finite_horizon_gramian, local_effort_metric, min_control_energy};
pub use linearize::{linearize, linearize_system, ControlledSystem, LinearizedSystem};

/// Fraction of the Bike link mass carved out as the rear wheel body.
const WHEEL_MASS_FRACTION: f64 = 0.2;

/// Second out-of-plane joint for the 6-DoF morphology variant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExtraDof {
    /// Fixed axis angle of the alternative out-of-plane joint (rad),
    /// measured like `psi_hat` in the local sagittal plane.
    pub zeta_hat: f64,
}

/// Wheelie balance model: morphology plus the out-of-plane joint layout.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WheelieModel {
    pub morphology: MorphologySpec,
    /// Fixed angle of the `phi` joint axis in the Bike sagittal plane (rad),
    /// measured from the Bike x axis.
    pub psi_hat: f64,
    /// Optional extra out-of-plane joint (6-DoF variant).
    pub extra_dof: Option<ExtraDof>,
}

impl WheelieModel {
    pub fn new(morphology: MorphologySpec, psi_hat: f64) -> Result<Self> {
        let model = Self {
            morphology,
            psi_hat,
            extra_dof: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_extra_dof(mut self, zeta_hat: f64) -> Self {
        self.extra_dof = Some(ExtraDof { zeta_hat });
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.morphology.validate()?;
        if !(self.psi_hat >= -core::f64::consts::FRAC_PI_2
            && self.psi_hat <= core::f64::consts::FRAC_PI_2)
        {
            return Err(Error::InvalidSpec(alloc::format!(
                "psi_hat must lie in [-pi/2, pi/2], got {}",
                self.psi_hat
            )));
        }
        Ok(())
    }

    /// Number of generalized coordinates.
    pub fn coord_dim(&self) -> usize {
        if self.extra_dof.is_some() {
            7
        } else {
            6
        }
    }

    /// Number of torque inputs (every joint except roll and pitch).
    pub fn input_dim(&self) -> usize {
        self.coord_dim() - 2
    }

    /// State dimension: coordinates plus velocities.
    pub fn state_dim(&self) -> usize {
        2 * self.coord_dim()
    }

    /// Coordinate labels in order.
    pub fn coord_labels(&self) -> Vec<String> {
        let mut labels = alloc::vec![
            "roll".to_string(),
            "pitch".to_string(),
            "spin".to_string(),
            "phi".to_string(),
        ];
        if self.extra_dof.is_some() {
            labels.push("zeta".to_string());
        }
        labels.push("mu".to_string());
        labels.push("q_h".to_string());
        labels
    }

    /// Builds the articulated tree for the current layout.
    ///
    /// Sagittal joints use the `-y` axis so positive pitch/mu/q_h tip the
    /// chain nose-up, matching the planar model's sign convention.
    pub(crate) fn chain(&self) -> Result<Chain> {
        let m = &self.morphology;
        let bike_inertia = m.link_inertia(crate::LinkName::Bike)?;
        let neck_inertia = m.link_inertia(crate::LinkName::Neck)?;
        let head_inertia = m.link_inertia(crate::LinkName::Head)?;

        let wheel_mass = WHEEL_MASS_FRACTION * m.bike.mass;
        let frame_mass = m.bike.mass - wheel_mass;
        // Cylinder inertia rescaled to the frame's share of the Bike mass.
        let frame_fraction = frame_mass / m.bike.mass;
        let r_w = m.wheel_radius;

        let cylinder_tensor = |inertia: &crate::LinkInertia, radius: f64, scale: f64| {
            let transverse = inertia.inertia_about_com * scale;
            let axial = 0.5 * inertia.mass * scale * radius * radius;
            Matrix3::from_diagonal(&Vector3::new(axial, transverse, transverse))
        };

        let sagittal = Vector3::new(0.0, -1.0, 0.0);
        let out_of_plane = |angle: f64| Vector3::new(angle.cos(), 0.0, angle.sin());
        let mount = Vector3::new(m.mu_joint.mount[0], 0.0, m.mu_joint.mount[1]);
        let head_anchor = Vector3::new(
            m.neck.length + m.q_h_joint.mount[0],
            0.0,
            m.q_h_joint.mount[1],
        );

        let mut bodies = alloc::vec![
            // Roll about the world x axis through the contact point.
            ChainBody {
                parent: None,
                axis: Vector3::new(1.0, 0.0, 0.0),
                anchor: Vector3::zeros(),
                mass: 0.0,
                com: Vector3::zeros(),
                inertia: Matrix3::zeros(),
            },
            // Pitch about the axle, one wheel radius above the contact.
            // Carries the Bike frame (cylinder from the axle along +x).
            ChainBody {
                parent: Some(0),
                axis: sagittal,
                anchor: Vector3::new(0.0, 0.0, r_w),
                mass: frame_mass,
                com: Vector3::new(bike_inertia.com_offset, 0.0, 0.0),
                inertia: cylinder_tensor(&bike_inertia, m.bike.radius, frame_fraction),
            },
            // Rear wheel: a disk spinning about the axle.
            ChainBody {
                parent: Some(1),
                axis: sagittal,
                anchor: Vector3::zeros(),
                mass: wheel_mass,
                com: Vector3::zeros(),
                inertia: Matrix3::from_diagonal(&Vector3::new(
                    0.25 * wheel_mass * r_w * r_w,
                    0.5 * wheel_mass * r_w * r_w,
                    0.25 * wheel_mass * r_w * r_w,
                )),
            },
            // Out-of-plane joint phi at the Neck mount, axis at psi_hat.
            ChainBody {
                parent: Some(1),
                axis: out_of_plane(self.psi_hat),
                anchor: mount,
                mass: 0.0,
                com: Vector3::zeros(),
                inertia: Matrix3::zeros(),
            },
        ];
        let mut upper_parent = 3;
        if let Some(extra) = self.extra_dof {
            bodies.push(ChainBody {
                parent: Some(3),
                axis: out_of_plane(extra.zeta_hat),
                anchor: Vector3::zeros(),
                mass: 0.0,
                com: Vector3::zeros(),
                inertia: Matrix3::zeros(),
            });
            upper_parent = 4;
        }
        // Neck through mu, then Head through q_h.
        bodies.push(ChainBody {
            parent: Some(upper_parent),
            axis: sagittal,
            anchor: Vector3::zeros(),
            mass: m.neck.mass,
            com: Vector3::new(neck_inertia.com_offset, 0.0, 0.0),
            inertia: cylinder_tensor(&neck_inertia, m.neck.radius, 1.0),
        });
        bodies.push(ChainBody {
            parent: Some(bodies.len() - 1),
            axis: sagittal,
            anchor: head_anchor,
            mass: m.head.mass,
            com: Vector3::new(head_inertia.com_offset, 0.0, 0.0),
            inertia: cylinder_tensor(&head_inertia, m.head.radius, 1.0),
        });
        Chain::new(bodies)
    }

    /// Maps an input vector onto generalized torques (roll and pitch are
    /// unactuated).
    fn input_to_generalized(&self, u: &DVector<f64>) -> DVector<f64> {
        let n = self.coord_dim();
        let mut tau = DVector::zeros(n);
        for (j, value) in u.iter().enumerate() {
            tau[2 + j] = *value;
        }
        tau
    }
}

/// A statically balanced wheelie pose: the whole-body CoM sits over the
/// contact point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WheelieConfig {
    pub pitch: f64,
    pub mu: f64,
    pub q_h: f64,
    /// Pivot location on the ground plane.
    pub contact: [f64; 3],
}

impl WheelieConfig {
    /// Full state vector (positions then velocities, velocities zero).
    pub fn to_state(&self, model: &WheelieModel) -> DVector<f64> {
        let n = model.coord_dim();
        let mut x = DVector::zeros(2 * n);
        x[1] = self.pitch;
        x[n - 2] = self.mu;
        x[n - 1] = self.q_h;
        x
    }
}

/// Time derivative of the wheelie state under the given joint torques.
///
/// `x = (q, qd)`, `u` in input order. The spin coordinate's torque reacts on
/// the Bike in the pitch plane through the shared axle axis.
pub fn wheelie_forward_dynamics(
    model: &WheelieModel,
    x: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = model.coord_dim();
    if x.len() != 2 * n || u.len() != model.input_dim() {
        return Err(Error::InvalidSpec(alloc::format!(
            "state/input dims {}/{} do not match model dims {}/{}",
            x.len(),
            u.len(),
            2 * n,
            model.input_dim()
        )));
    }
    let chain = model.chain()?;
    let q = x.rows(0, n).into_owned();
    let qd = x.rows(n, n).into_owned();
    let tau = model.input_to_generalized(u);
    let qdd = chain.accelerations(&q, &qd, &tau, 9.81)?;
    let mut dx = DVector::zeros(2 * n);
    dx.rows_mut(0, n).copy_from(&qd);
    dx.rows_mut(n, n).copy_from(&qdd);
    Ok(dx)
}

/// Holding torques that cancel gravity on the actuated joints at a config.
///
/// At a config with the CoM over the contact, gravity exerts no moment on
/// the unactuated pivot directions, so with these torques the whole state is
/// an equilibrium of the forced dynamics.
pub fn gravity_compensation(model: &WheelieModel, config: &WheelieConfig) -> Result<DVector<f64>> {
    let chain = model.chain()?;
    let n = model.coord_dim();
    let x = config.to_state(model);
    let q = x.rows(0, n).into_owned();
    let qd = DVector::zeros(n);
    let dyn_ = chain.dynamics(&q, &qd, 9.81)?;
    let mut u = DVector::zeros(model.input_dim());
    for j in 0..model.input_dim() {
        u[j] = -dyn_.gravity[2 + j];
    }
    Ok(u)
}

/// Horizontal CoM offset from the contact point at a candidate pose.
fn com_x_at(model: &WheelieModel, pitch: f64, mu: f64, q_h: f64) -> Result<f64> {
    let chain = model.chain()?;
    let n = model.coord_dim();
    let config = WheelieConfig {
        pitch,
        mu,
        q_h,
        contact: [0.0; 3],
    };
    let x = config.to_state(model);
    let q = x.rows(0, n).into_owned();
    Ok(chain.com(&q).x)
}

/// Searches a pitch/q_h grid for statically balanced wheelie poses.
///
/// For each grid point, `mu` is solved by bisection so the whole-body CoM
/// projects onto the contact point; candidates violating joint limits or
/// failing the static re-check are rejected. Errors with a diagnostic when
/// the whole grid yields nothing.
pub fn find_static_configs(
    model: &WheelieModel,
    pitch_grid: &[f64],
    q_h_values: &[f64],
) -> Result<Vec<WheelieConfig>> {
    model.validate()?;
    if pitch_grid.is_empty() || q_h_values.is_empty() {
        return Err(Error::InvalidSpec(String::from(
            "equilibrium search needs a non-empty grid",
        )));
    }
    let limits = model.morphology.mu_joint;
    let mut configs = Vec::new();
    for &pitch in pitch_grid {
        for &q_h in q_h_values {
            if !model.morphology.q_h_joint.contains(q_h) {
                continue;
            }
            let mut lo = limits.lower_limit;
            let mut hi = limits.upper_limit;
            let f_lo = com_x_at(model, pitch, lo, q_h)?;
            let f_hi = com_x_at(model, pitch, hi, q_h)?;
            if f_lo == 0.0 {
                hi = lo;
            } else if f_hi == 0.0 {
                lo = hi;
            } else if f_lo.signum() == f_hi.signum() {
                continue;
            }
            for _ in 0..90 {
                let mid = 0.5 * (lo + hi);
                let f_mid = com_x_at(model, pitch, mid, q_h)?;
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if f_mid.signum() == f_lo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            let mu = 0.5 * (lo + hi);
            let config = WheelieConfig {
                pitch,
                mu,
                q_h,
                contact: [0.0; 3],
            };
            // Static re-check: compensated dynamics must rest at the config.
            let u_star = gravity_compensation(model, &config)?;
            let x = config.to_state(model);
            let dx = wheelie_forward_dynamics(model, &x, &u_star)?;
            let n = model.coord_dim();
            let accel_norm = dx.rows(n, n).norm();
            if accel_norm < 1e-6 {
                configs.push(config);
            }
        }
    }
    if configs.is_empty() {
        return Err(Error::NoEquilibrium(alloc::format!(
            "no balanced pose over {} pitch x {} q_h grid points within mu limits [{}, {}]",
            pitch_grid.len(),
            q_h_values.len(),
            limits.lower_limit,
            limits.upper_limit
        )));
    }
    Ok(configs)
}

/// Default pitch grid spanning the feasible wheelie window.
pub fn default_pitch_grid() -> Vec<f64> {
    crate::sweep::linspace(0.55, 1.15, 5)
}

/// Geometric axis angle at which the `phi` axis line intersects the rear
/// axle, wrapped to `[-pi/2, pi/2]`.
pub fn psi_star(model: &WheelieModel) -> f64 {
    let mount = model.morphology.mu_joint.mount;
    let mut angle = mount[1].atan2(mount[0]);
    if angle > core::f64::consts::FRAC_PI_2 {
        angle -= core::f64::consts::PI;
    } else if angle < -core::f64::consts::FRAC_PI_2 {
        angle += core::f64::consts::PI;
    }
    angle
}
