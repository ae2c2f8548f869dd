//! Crouch-to-apogee jump simulation and the jump metrics.
//!
//! A jump starts from a statically settled crouch with both wheels grounded.
//! The controller tracks a crouch-to-extend ramp (or applies bang-bang
//! extension torque), always clamped by the actuator envelope. The trace
//! runs until the whole-body CoM tops out in flight, or until a timeout if
//! the robot never lifts off.

pub mod sweeps;

use alloc::vec::Vec;
#[allow(unused_imports)] // trait float ops are required for no_std builds
use num_traits::Float as _;

use crate::actuator::{pd_torque, torque_available};
use crate::dynamics::{forward_dynamics_planar, resolve_contacts, step, JointTorques};
use crate::morphology::MorphologySpec;
use crate::observables::{
    com_velocity, conserved_quantities, kinematic_observables, ConservedQuantities,
    KinematicObservables,
};
use crate::state::{ContactReport, PlanarState, SimConfig};
use crate::{Error, Result};

pub use sweeps::{
    default_gear_grids, default_mass_grid, default_scale_grid, gear_ratio_landscape,
    mass_sensitivity_sweep, scale_study, CouplingVariant, GearSweep, MassSweep, ScaleSweep,
};

/// Joint-space configuration of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointConfig {
    pub mu: f64,
    pub q_h: f64,
}

/// How the extension torque is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExtensionMode {
    /// Full available torque toward the extend configuration.
    BangBang,
    /// PD tracking of a linear crouch-to-extend ramp.
    PdTrackedRamp,
}

/// Jump excitation: crouch and extend configurations plus timing.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExtensionPolicy {
    pub mode: ExtensionMode,
    pub crouch: JointConfig,
    pub extend: JointConfig,
    /// Time at which the extension starts (s); the crouch is held before it.
    pub trigger_time: f64,
    /// Ramp length for PD tracking (s); ignored in bang-bang mode.
    pub ramp_duration: f64,
}

impl ExtensionPolicy {
    /// Nominal policy for a morphology: crouch folded, extend upright.
    pub fn nominal(m: &MorphologySpec) -> Self {
        let crouch = JointConfig { mu: 0.30, q_h: 2.40 };
        let extend = JointConfig { mu: 1.55, q_h: 0.30 };
        Self {
            mode: ExtensionMode::PdTrackedRamp,
            crouch: clamp_config(m, crouch),
            extend: clamp_config(m, extend),
            trigger_time: 0.05,
            ramp_duration: 0.20,
        }
    }

    pub fn validate(&self, m: &MorphologySpec) -> Result<()> {
        for (name, config) in [("crouch", self.crouch), ("extend", self.extend)] {
            if !m.mu_joint.contains(config.mu) || !m.q_h_joint.contains(config.q_h) {
                return Err(Error::InvalidSpec(alloc::format!(
                    "{name} configuration ({}, {}) violates joint limits",
                    config.mu,
                    config.q_h
                )));
            }
        }
        if self.mode == ExtensionMode::PdTrackedRamp && !(self.ramp_duration > 0.0) {
            return Err(Error::InvalidSpec(alloc::format!(
                "ramp duration must be positive, got {}",
                self.ramp_duration
            )));
        }
        if !(self.trigger_time >= 0.0) {
            return Err(Error::InvalidSpec(alloc::format!(
                "trigger time must be non-negative, got {}",
                self.trigger_time
            )));
        }
        Ok(())
    }
}

fn clamp_config(m: &MorphologySpec, c: JointConfig) -> JointConfig {
    JointConfig {
        mu: m.mu_joint.clamp(c.mu),
        q_h: m.q_h_joint.clamp(c.q_h),
    }
}

/// One recorded instant of a jump.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JumpSample {
    pub state: PlanarState,
    pub contacts: ContactReport,
    pub torques: JointTorques,
    pub kinematics: KinematicObservables,
    pub conserved: ConservedQuantities,
    /// Vertical velocity of the whole-body CoM (m/s).
    pub com_vz: f64,
}

/// Time-stamped record of a simulated jump.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JumpTrace {
    pub samples: Vec<JumpSample>,
    /// Motion onset: first sample where a joint speed exceeds 1e-3 rad/s
    /// out of the settled crouch (s).
    pub t0: f64,
    /// First sample with both wheels out of contact; `None` if the robot
    /// never lifts off.
    pub t_liftoff: Option<f64>,
    /// CoM apogee time, refined by linear interpolation of the CoM vertical
    /// velocity; `None` for a no-lift-off trace.
    pub t_apogee: Option<f64>,
}

impl JumpTrace {
    pub fn lifted_off(&self) -> bool {
        self.t_liftoff.is_some()
    }
}

/// Joint-speed threshold that marks motion onset out of the crouch (rad/s).
const MOTION_ONSET_SPEED: f64 = 1e-3;
/// Simulated time allowed past the trigger before declaring no lift-off (s).
const NO_LIFTOFF_TIMEOUT: f64 = 3.0;
/// Hard cap on a single jump simulation (s past the trigger).
const HARD_TIMEOUT: f64 = 5.0;
/// Continuous airborne time required before an unloading counts as
/// lift-off rather than contact flutter (s).
const LIFTOFF_DEBOUNCE: f64 = 0.02;
/// CoM descent below the trace maximum that ends the simulation (m). Large
/// enough that a stutter launch (brief touch and re-launch) does not end
/// the trace before the real flight.
const APOGEE_DESCENT: f64 = 0.05;
/// Minimum lift-off-to-apogee time for a trace to count as real flight in
/// the profile search (s).
const MIN_REAL_FLIGHT: f64 = 0.03;
/// Stance pitch regulation gains on the `mu` drive. Open-loop extension
/// tips the robot over once the stance outlasts the tipping timescale, so
/// the jump controller leans the Neck drive against base pitch while any
/// wheel is grounded.
const STANCE_PITCH_KP: f64 = 400.0;
const STANCE_PITCH_KD: f64 = 60.0;

/// Fraction of the ramp over which the Neck drive completes.
const MU_RAMP_END: f64 = 0.7;
/// Ramp fraction at which the Head starts unfolding.
const QH_RAMP_START: f64 = 0.5;

/// Pitch-regulation torque for the `mu` drive during stance.
///
/// Full regulation holds the base level through the crouch and the Neck
/// drive, then fades out over the Head-snap phase: slow heavy stances need
/// it to avoid tipping over, while the launch impulse needs the whole `mu`
/// envelope (and naturally carries some pitch).
fn stance_stabilization(p: &ExtensionPolicy, s: &PlanarState, _t: f64, grounded: bool) -> f64 {
    if !grounded {
        return 0.0;
    }
    let span = p.extend.q_h - p.crouch.q_h;
    let snap_progress = if span.abs() > 1e-9 {
        ((s.q_h - p.crouch.q_h) / span).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (1.0 - snap_progress) * (STANCE_PITCH_KP * s.pitch + STANCE_PITCH_KD * s.pitch_rate)
}

/// Torques commanded by the policy at trace time `t`.
fn policy_torques(
    m: &MorphologySpec,
    p: &ExtensionPolicy,
    s: &PlanarState,
    t: f64,
    grounded: bool,
) -> JointTorques {
    let (mu_target, qh_target, mu_rate, qh_rate) = if t < p.trigger_time {
        (p.crouch.mu, p.crouch.q_h, 0.0, 0.0)
    } else {
        match p.mode {
            ExtensionMode::PdTrackedRamp => {
                // The Neck drive leads and the Head unfolds late; slamming
                // both together pitches the robot onto its front wheel
                // instead of launching it.
                let alpha = ((t - p.trigger_time) / p.ramp_duration).clamp(0.0, 1.0);
                let mu_phase = (alpha / MU_RAMP_END).min(1.0);
                let qh_phase = ((alpha - QH_RAMP_START) / (1.0 - QH_RAMP_START)).clamp(0.0, 1.0);
                let mu = p.crouch.mu + mu_phase * (p.extend.mu - p.crouch.mu);
                let qh = p.crouch.q_h + qh_phase * (p.extend.q_h - p.crouch.q_h);
                let mu_rate = if mu_phase < 1.0 {
                    (p.extend.mu - p.crouch.mu) / (MU_RAMP_END * p.ramp_duration)
                } else {
                    0.0
                };
                let qh_rate = if qh_phase > 0.0 && qh_phase < 1.0 {
                    (p.extend.q_h - p.crouch.q_h) / ((1.0 - QH_RAMP_START) * p.ramp_duration)
                } else {
                    0.0
                };
                (mu, qh, mu_rate, qh_rate)
            }
            ExtensionMode::BangBang => (p.extend.mu, p.extend.q_h, 0.0, 0.0),
        }
    };
    let stab = stance_stabilization(p, s, t, grounded);
    let mix_mu = |ramp_torque: f64| {
        let limit = torque_available(&m.mu_actuator, s.mu_rate);
        (ramp_torque + stab).clamp(-limit, limit)
    };
    match p.mode {
        ExtensionMode::PdTrackedRamp => JointTorques {
            mu: mix_mu(pd_torque(&m.mu_actuator, mu_target, s.mu, mu_rate, s.mu_rate)),
            q_h: pd_torque(&m.q_h_actuator, qh_target, s.q_h, qh_rate, s.q_h_rate),
        },
        ExtensionMode::BangBang => {
            // Full envelope toward the target; PD once the drive direction
            // has carried the joint there (never bang back on overshoot).
            let bang = |act: &crate::ActuatorSpec, target: f64, from: f64, q: f64, qd: f64| {
                let direction = (target - from).signum();
                let remaining = (target - q) * direction;
                if t >= p.trigger_time && remaining > 0.02 {
                    direction * torque_available(act, qd)
                } else {
                    pd_torque(act, target, q, 0.0, qd)
                }
            };
            JointTorques {
                mu: mix_mu(bang(&m.mu_actuator, mu_target, p.crouch.mu, s.mu, s.mu_rate)),
                q_h: bang(&m.q_h_actuator, qh_target, p.crouch.q_h, s.q_h, s.q_h_rate),
            }
        }
    }
}

/// Residual used by the crouch statics solve: accelerations of the z, pitch,
/// mu, and q_h coordinates under PD hold (the x equation balances trivially
/// at rest).
fn statics_residual(
    m: &MorphologySpec,
    cfg: &SimConfig,
    crouch: JointConfig,
    y: &nalgebra::Vector4<f64>,
) -> Result<nalgebra::Vector4<f64>> {
    let s = PlanarState::at_rest(0.0, y[0], y[1], y[2], y[3]);
    // Match the jump controller at t = 0 (crouch hold plus pitch
    // regulation) so the settled state is exactly its equilibrium.
    let hold_policy = ExtensionPolicy {
        mode: ExtensionMode::PdTrackedRamp,
        crouch,
        extend: crouch,
        trigger_time: 1.0,
        ramp_duration: 1.0,
    };
    let stab = stance_stabilization(&hold_policy, &s, 0.0, true);
    let limit = torque_available(&m.mu_actuator, 0.0);
    let torques = JointTorques {
        mu: (pd_torque(&m.mu_actuator, crouch.mu, s.mu, 0.0, 0.0) + stab).clamp(-limit, limit),
        q_h: pd_torque(&m.q_h_actuator, crouch.q_h, s.q_h, 0.0, 0.0),
    };
    let contacts = resolve_contacts(m, &s, cfg);
    let qdd = forward_dynamics_planar(m, &s, &torques, &contacts, cfg)?;
    Ok(nalgebra::Vector4::new(qdd[1], qdd[2], qdd[3], qdd[4]))
}

/// Finds the settled crouch: both wheels grounded, PD holding the crouch
/// targets, all accelerations zero.
///
/// Newton iteration on (z, pitch, mu, q_h); if it does not converge (for
/// example when the actuators cannot hold the crouch at all), falls back to
/// simulating the hold until motion decays or a deadline passes.
pub fn settle_crouch(
    m: &MorphologySpec,
    policy: &ExtensionPolicy,
    cfg: &SimConfig,
) -> Result<PlanarState> {
    let weight = m.total_mass() * cfg.gravity;
    let droop = if cfg.contact_stiffness > 0.0 {
        weight / (2.0 * cfg.contact_stiffness)
    } else {
        0.0
    };
    let mut y = nalgebra::Vector4::new(
        m.wheel_radius - droop,
        0.0,
        policy.crouch.mu,
        policy.crouch.q_h,
    );

    let mut converged = false;
    for _ in 0..60 {
        let r = statics_residual(m, cfg, policy.crouch, &y)?;
        if r.norm() < 1e-9 {
            converged = true;
            break;
        }
        // Finite-difference Jacobian of the 4-vector residual.
        let mut jac = nalgebra::Matrix4::<f64>::zeros();
        for c in 0..4 {
            let eps = 1e-7 * (1.0 + y[c].abs());
            let mut hi = y;
            let mut lo = y;
            hi[c] += eps;
            lo[c] -= eps;
            let d = (statics_residual(m, cfg, policy.crouch, &hi)?
                - statics_residual(m, cfg, policy.crouch, &lo)?)
                / (2.0 * eps);
            jac.set_column(c, &d);
        }
        let Some(delta) = jac.lu().solve(&r) else {
            break;
        };
        // Conservative step limit keeps the iteration on the contact branch.
        let scale = (0.05 / delta.norm()).min(1.0);
        y -= delta * scale;
        if !y.iter().all(|v| v.is_finite()) {
            break;
        }
    }

    if converged {
        let residual = statics_residual(m, cfg, policy.crouch, &y)?;
        if residual.norm() < 1e-6 {
            let mut s = PlanarState::at_rest(0.0, y[0], y[1], y[2], y[3]);
            let grounded = resolve_contacts(m, &s, cfg);
            if grounded.rear_in_contact && grounded.front_in_contact {
                s.time = 0.0;
                return Ok(s);
            }
        }
    }

    // Fallback: drop from touch-down height and hold the crouch until quiet.
    let mut s = PlanarState::at_rest(0.0, m.wheel_radius - droop, 0.0, policy.crouch.mu, policy.crouch.q_h);
    let settle_steps = (1.5 / cfg.dt) as usize;
    for _ in 0..settle_steps {
        let torques = JointTorques {
            mu: pd_torque(&m.mu_actuator, policy.crouch.mu, s.mu, 0.0, s.mu_rate),
            q_h: pd_torque(&m.q_h_actuator, policy.crouch.q_h, s.q_h, 0.0, s.q_h_rate),
        };
        let (next, _) = step(m, &s, &torques, cfg)?;
        s = next;
        let speed = s.velocity().norm();
        if speed < 1e-6 && s.time > 0.2 {
            break;
        }
    }
    s.time = 0.0;
    // Leave any residual creep in place; motion onset detection tolerates it.
    s.vx = 0.0;
    s.vz = 0.0;
    s.pitch_rate = 0.0;
    s.mu_rate = 0.0;
    s.q_h_rate = 0.0;
    Ok(s)
}

fn make_sample(
    m: &MorphologySpec,
    s: &PlanarState,
    contacts: ContactReport,
    torques: JointTorques,
    gravity: f64,
) -> JumpSample {
    JumpSample {
        state: *s,
        contacts,
        torques,
        kinematics: kinematic_observables(m, s),
        conserved: conserved_quantities(m, s, gravity),
        com_vz: com_velocity(m, s)[1],
    }
}

/// Simulates one jump from a settled crouch to the CoM apogee.
///
/// If the robot never leaves the ground within the timeout the trace is
/// returned with `t_liftoff = None` (a no-lift-off result, not an error).
pub fn simulate_jump(
    m: &MorphologySpec,
    policy: &ExtensionPolicy,
    cfg: &SimConfig,
) -> Result<JumpTrace> {
    m.validate()?;
    cfg.validate()?;
    policy.validate(m)?;

    let mut s = settle_crouch(m, policy, cfg)?;
    let mut samples = Vec::new();
    let mut t0: Option<f64> = None;

    let first_contacts = resolve_contacts(m, &s, cfg);
    let first_torques = policy_torques(m, policy, &s, 0.0, first_contacts.any_contact());
    samples.push(make_sample(m, &s, first_contacts, first_torques, cfg.gravity));

    let soft_deadline = policy.trigger_time + NO_LIFTOFF_TIMEOUT;
    let hard_deadline = policy.trigger_time + HARD_TIMEOUT;

    let mut grounded = first_contacts.any_contact();
    // Current contiguous airborne stretch, confirmed lift-off, and the
    // running CoM maximum with its (velocity-refined) time stamp.
    let mut streak_start: Option<f64> = None;
    let mut t_liftoff: Option<f64> = None;
    let mut peak_t = samples[0].state.time;
    let mut peak_h = samples[0].kinematics.h_com;
    let mut prev_vz = samples[0].com_vz;

    loop {
        let torques = policy_torques(m, policy, &s, s.time, grounded);
        let (next, contacts) = step(m, &s, &torques, cfg)?;
        grounded = contacts.any_contact();
        s = next;
        let sample = make_sample(m, &s, contacts, torques, cfg.gravity);

        if t0.is_none()
            && (sample.state.mu_rate.abs() > MOTION_ONSET_SPEED
                || sample.state.q_h_rate.abs() > MOTION_ONSET_SPEED)
        {
            t0 = Some(sample.state.time);
        }

        let t = sample.state.time;
        if grounded {
            streak_start = None;
        } else {
            let start = *streak_start.get_or_insert(t);
            if t_liftoff.is_none() && t - start >= LIFTOFF_DEBOUNCE {
                t_liftoff = Some(start);
            }
        }
        if sample.kinematics.h_com > peak_h {
            peak_h = sample.kinematics.h_com;
            peak_t = t;
            if !grounded && prev_vz > 0.0 && sample.com_vz <= 0.0 {
                // Refine the apex instant from the velocity zero crossing.
                let dt_frac = prev_vz / (prev_vz - sample.com_vz);
                peak_t = t - cfg.dt + dt_frac * cfg.dt;
            }
        }
        prev_vz = sample.com_vz;
        samples.push(sample);

        // The jump is over once the CoM has clearly passed its apex after a
        // confirmed lift-off.
        if t_liftoff.is_some() && peak_h - sample.kinematics.h_com > APOGEE_DESCENT {
            break;
        }
        if t_liftoff.is_none() && s.time >= soft_deadline {
            break;
        }
        if s.time >= hard_deadline {
            break;
        }
    }

    let t_apogee = t_liftoff.map(|lift| peak_t.max(lift));
    Ok(JumpTrace {
        samples,
        t0: t0.unwrap_or(0.0),
        t_liftoff,
        t_apogee,
    })
}

/// Proportion of the jump (motion onset to apogee) spent in ground contact.
///
/// A trace without lift-off has contact ratio 1 by convention.
pub fn contact_ratio(trace: &JumpTrace) -> Result<f64> {
    let Some(t_liftoff) = trace.t_liftoff else {
        return Ok(1.0);
    };
    let t_apogee = trace.t_apogee.unwrap_or(t_liftoff);
    if !(t_apogee > trace.t0) {
        return Err(Error::DegenerateTrace);
    }
    Ok((t_liftoff - trace.t0) / (t_apogee - trace.t0))
}

/// Scalar metrics of one jump.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JumpMetrics {
    /// Peak whole-body CoM height over the trace (m).
    pub max_h_com: f64,
    /// Peak rear-wheel clearance over the trace (m).
    pub max_h_clearance: f64,
    /// Contact ratio in (0, 1]; 1 means no lift-off.
    pub contact_ratio: f64,
    /// Peak total mechanical power `sum_i |tau_i qd_i|` (W).
    pub peak_mechanical_power: f64,
}

/// Maxima over the trace samples plus the contact ratio.
pub fn jump_metrics(trace: &JumpTrace) -> Result<JumpMetrics> {
    if trace.samples.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut max_h_com = f64::NEG_INFINITY;
    let mut max_h_clearance = f64::NEG_INFINITY;
    let mut peak_power = 0.0f64;
    for sample in &trace.samples {
        max_h_com = max_h_com.max(sample.kinematics.h_com);
        max_h_clearance = max_h_clearance.max(sample.kinematics.h_clearance);
        let power = (sample.torques.mu * sample.state.mu_rate).abs()
            + (sample.torques.q_h * sample.state.q_h_rate).abs();
        peak_power = peak_power.max(power);
    }
    Ok(JumpMetrics {
        max_h_com,
        max_h_clearance,
        contact_ratio: contact_ratio(trace)?,
        peak_mechanical_power: peak_power,
    })
}

/// Time of the peak mechanical power sample (s).
pub fn peak_power_time(trace: &JumpTrace) -> Option<f64> {
    trace
        .samples
        .iter()
        .map(|s| {
            (
                s.state.time,
                (s.torques.mu * s.state.mu_rate).abs() + (s.torques.q_h * s.state.q_h_rate).abs(),
            )
        })
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite power"))
        .map(|(t, _)| t)
}

/// Closed-form point-mass jump: constant stance force over a stroke, then
/// ballistic flight.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointMassJump {
    pub v_liftoff: f64,
    pub apex_gain: f64,
    pub contact_ratio: f64,
}

/// Analytic reference for a vertical point-mass jump.
///
/// `a = F/m - g`, `v = sqrt(2 a s)`, `apex = v^2 / 2g`, `c = 1 / (1 + a/g)`.
pub fn point_mass_oracle(
    m_total: f64,
    stance_force: f64,
    stroke: f64,
    gravity: f64,
) -> Result<PointMassJump> {
    if !(m_total > 0.0) || !(stroke > 0.0) || !(gravity > 0.0) {
        return Err(Error::InvalidSpec(alloc::format!(
            "point-mass oracle needs positive mass/stroke/gravity, got {m_total}/{stroke}/{gravity}"
        )));
    }
    let accel = stance_force / m_total - gravity;
    if !(accel > 0.0) {
        return Err(Error::NoLiftoff);
    }
    let v = (2.0 * accel * stroke).sqrt();
    Ok(PointMassJump {
        v_liftoff: v,
        apex_gain: v * v / (2.0 * gravity),
        contact_ratio: 1.0 / (1.0 + accel / gravity),
    })
}

/// Grid of candidate extension policies for the inner profile search.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolicySearchSpace {
    pub mode: ExtensionMode,
    pub crouch_options: Vec<JointConfig>,
    pub extend_options: Vec<JointConfig>,
    pub ramp_durations: Vec<f64>,
    pub trigger_time: f64,
}

impl PolicySearchSpace {
    /// Default search: the nominal crouch/extend pair over a dense ramp
    /// grid. A single extension posture keeps the winning policy's posture
    /// continuous across neighboring sweep points, so design-study curves
    /// reflect the morphology rather than controller switching.
    pub fn default_for(m: &MorphologySpec) -> Self {
        let nominal = ExtensionPolicy::nominal(m);
        Self {
            mode: ExtensionMode::PdTrackedRamp,
            crouch_options: alloc::vec![nominal.crouch],
            extend_options: alloc::vec![nominal.extend],
            ramp_durations: alloc::vec![0.10, 0.13, 0.16, 0.20, 0.25, 0.31, 0.40],
            trigger_time: nominal.trigger_time,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.crouch_options.is_empty()
            || self.extend_options.is_empty()
            || self.ramp_durations.is_empty()
    }

    /// Policies in deterministic grid order (crouch, extend, ramp nested).
    pub fn policies(&self) -> impl Iterator<Item = ExtensionPolicy> + '_ {
        self.crouch_options.iter().flat_map(move |&crouch| {
            self.extend_options.iter().flat_map(move |&extend| {
                self.ramp_durations.iter().map(move |&ramp_duration| ExtensionPolicy {
                    mode: self.mode,
                    crouch,
                    extend,
                    trigger_time: self.trigger_time,
                    ramp_duration,
                })
            })
        })
    }
}

/// Pitch magnitude beyond which a jump counts as tipping over rather than
/// jumping (rad). Clearance gained by somersaulting the rear wheel upward
/// is not an obstacle-clearing jump.
pub const PITCH_VALIDITY_BOUND: f64 = 1.2;

/// Which jump metric the inner profile search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum JumpObjective {
    /// Peak whole-body CoM height (the jump-height studies).
    ComHeight,
    /// Peak rear-wheel clearance (the obstacle-clearing studies).
    Clearance,
}

impl JumpObjective {
    fn score(self, metrics: &JumpMetrics) -> f64 {
        match self {
            JumpObjective::ComHeight => metrics.max_h_com,
            JumpObjective::Clearance => metrics.max_h_clearance,
        }
    }
}

/// What the best policy in a search actually did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum JumpClass {
    /// Tipped past the pitch bound; no upright outcome exists.
    TippedOnly,
    /// Stayed upright but never achieved real flight.
    Grounded,
    /// An upright jump with real flight.
    CleanFlight,
}

fn max_abs_pitch(trace: &JumpTrace) -> f64 {
    trace
        .samples
        .iter()
        .map(|s| s.state.pitch.abs())
        .fold(0.0, f64::max)
}

/// Grid search over the policy space, maximizing peak rear-wheel clearance.
///
/// Candidates rank in three classes: an upright lift-off beats an upright
/// no-lift-off, which beats anything that tips past
/// [`PITCH_VALIDITY_BOUND`] (a vault over the front wheel raises the rear
/// wheel without clearing anything). Within a class the peak clearance
/// decides, with ties keeping the earliest grid point. If no candidate
/// produces an upright jump the best-effort result is still returned so
/// sweeps can record it.
pub fn optimize_extension_profile(
    m: &MorphologySpec,
    cfg: &SimConfig,
    search: &PolicySearchSpace,
) -> Result<(ExtensionPolicy, JumpMetrics)> {
    optimize_profile_for(m, cfg, search, JumpObjective::Clearance)
        .map(|(policy, metrics, _)| (policy, metrics))
}

/// [`optimize_extension_profile`] with an explicit objective, also
/// reporting what the winning policy achieved; the design sweeps align the
/// inner objective with the metric each study records.
pub fn optimize_profile_for(
    m: &MorphologySpec,
    cfg: &SimConfig,
    search: &PolicySearchSpace,
    objective: JumpObjective,
) -> Result<(ExtensionPolicy, JumpMetrics, JumpClass)> {
    if search.is_empty() {
        return Err(Error::InvalidSpec(
            alloc::string::String::from("empty policy search space"),
        ));
    }
    let mut best: Option<(ExtensionPolicy, JumpMetrics, u8)> = None;
    for policy in search.policies() {
        let trace = simulate_jump(m, &policy, cfg)?;
        let metrics = jump_metrics(&trace)?;
        let upright = max_abs_pitch(&trace) <= PITCH_VALIDITY_BOUND;
        let rest_clearance = trace
            .samples
            .first()
            .map(|s| s.kinematics.h_clearance)
            .unwrap_or(0.0);
        // Raising the rear wheel without ever getting airborne is a vault
        // over the front wheel, not a jump.
        let vault =
            !trace.lifted_off() && metrics.max_h_clearance > rest_clearance + 0.25 * m.wheel_radius;
        // A real jump shows actual flight: the apogee arrives some time
        // after lift-off. Marginal hops whose CoM peaks at the moment of
        // lift-off rank with the non-jumps.
        let flew = match (trace.t_liftoff, trace.t_apogee) {
            (Some(lift), Some(apogee)) => apogee - lift >= MIN_REAL_FLIGHT,
            _ => false,
        };
        let class = match (upright, flew, vault) {
            (true, true, _) => 2u8,
            (true, false, false) => 1,
            _ => 0,
        };
        let better = match &best {
            None => true,
            Some((_, current, current_class)) => {
                if class != *current_class {
                    class > *current_class
                } else if class == 2 {
                    objective.score(&metrics) > objective.score(current)
                } else {
                    // Among non-jumps prefer the quietest trace.
                    metrics.max_h_clearance < current.max_h_clearance
                }
            }
        };
        if better {
            best = Some((policy, metrics, class));
        }
    }
    let (policy, metrics, class) = best.expect("non-empty search space");
    let class = match class {
        2 => JumpClass::CleanFlight,
        1 => JumpClass::Grounded,
        _ => JumpClass::TippedOnly,
    };
    Ok((policy, metrics, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn nominal() -> MorphologySpec {
        MorphologySpec::nominal()
    }

    #[test]
    fn contact_ratio_direct_formula() {
        let trace = JumpTrace {
            samples: Vec::new(),
            t0: 0.0,
            t_liftoff: Some(0.2),
            t_apogee: Some(0.5),
        };
        assert_relative_eq!(contact_ratio(&trace).unwrap(), 0.4);
    }

    #[test]
    fn contact_ratio_no_liftoff_is_one() {
        let trace = JumpTrace {
            samples: Vec::new(),
            t0: 0.0,
            t_liftoff: None,
            t_apogee: None,
        };
        assert_relative_eq!(contact_ratio(&trace).unwrap(), 1.0);
    }

    #[test]
    fn contact_ratio_degenerate_trace() {
        let trace = JumpTrace {
            samples: Vec::new(),
            t0: 0.5,
            t_liftoff: Some(0.5),
            t_apogee: Some(0.5),
        };
        assert!(matches!(contact_ratio(&trace), Err(Error::DegenerateTrace)));
    }

    #[test]
    fn point_mass_oracle_closed_forms() {
        // a = g gives c = 1/2.
        let g = 9.81;
        let jump = point_mass_oracle(10.0, 2.0 * 10.0 * g, 0.3, g).unwrap();
        assert_relative_eq!(jump.contact_ratio, 0.5, epsilon = 1e-12);
        // The published-mass case: F = 2 m g over a 0.3 m stroke.
        let jump = point_mass_oracle(23.5, 2.0 * 23.5 * g, 0.3, g).unwrap();
        assert_relative_eq!(jump.v_liftoff, (2.0 * g * 0.3).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(jump.v_liftoff, 2.426, epsilon = 1e-3);
        assert_relative_eq!(jump.apex_gain, 0.300, epsilon = 1e-12);
    }

    #[test]
    fn point_mass_oracle_rejects_weak_force() {
        let g = 9.81;
        assert!(matches!(
            point_mass_oracle(23.5, 23.5 * g, 0.3, g),
            Err(Error::NoLiftoff)
        ));
    }

    #[test]
    fn settled_crouch_is_static() {
        let m = nominal();
        let cfg = SimConfig::default();
        let policy = ExtensionPolicy::nominal(&m);
        let s = settle_crouch(&m, &policy, &cfg).unwrap();
        let r = statics_residual(
            &m,
            &cfg,
            policy.crouch,
            &nalgebra::Vector4::new(s.z, s.pitch, s.mu, s.q_h),
        )
        .unwrap();
        assert!(r.norm() < 1e-6, "crouch residual {}", r.norm());
        let contacts = resolve_contacts(&m, &s, &cfg);
        assert!(contacts.rear_in_contact && contacts.front_in_contact);
    }

    #[test]
    fn nominal_jump_lifts_off() {
        let m = nominal();
        let cfg = SimConfig::default();
        let policy = ExtensionPolicy::nominal(&m);
        let trace = simulate_jump(&m, &policy, &cfg).unwrap();
        assert!(trace.lifted_off(), "nominal morphology must jump");
        let metrics = jump_metrics(&trace).unwrap();
        assert!(metrics.max_h_clearance > 0.0);
        assert!(metrics.contact_ratio > 0.0 && metrics.contact_ratio < 1.0);
        // Timing invariants.
        let t_liftoff = trace.t_liftoff.unwrap();
        let t_apogee = trace.t_apogee.unwrap();
        assert!(trace.t0 <= t_liftoff && t_liftoff <= t_apogee);
        // Peak power comes before lift-off.
        let t_peak = peak_power_time(&trace).unwrap();
        assert!(t_peak >= trace.t0 && t_peak <= t_liftoff);
    }

    #[test]
    fn powerless_actuators_never_lift_off() {
        let mut m = nominal();
        // Effectively zero strength (the spec floor keeps torque positive).
        m.mu_actuator.max_output_torque = 1e-6;
        m.q_h_actuator.max_output_torque = 1e-6;
        let cfg = SimConfig::default();
        let policy = ExtensionPolicy::nominal(&m);
        let trace = simulate_jump(&m, &policy, &cfg).unwrap();
        assert!(!trace.lifted_off());
        assert_relative_eq!(contact_ratio(&trace).unwrap(), 1.0);
    }

    #[test]
    fn static_trace_metrics() {
        let m = nominal();
        let cfg = SimConfig::default();
        let s = PlanarState::at_rest(0.0, 0.5, 0.0, 1.0, 0.5);
        let sample = make_sample(
            &m,
            &s,
            ContactReport::airborne(),
            JointTorques::default(),
            cfg.gravity,
        );
        let trace = JumpTrace {
            samples: alloc::vec![sample],
            t0: 0.0,
            t_liftoff: None,
            t_apogee: None,
        };
        let metrics = jump_metrics(&trace).unwrap();
        assert_relative_eq!(metrics.max_h_com, sample.kinematics.h_com);
        assert_relative_eq!(metrics.peak_mechanical_power, 0.0);
    }

    #[test]
    fn empty_trace_is_an_error() {
        let trace = JumpTrace {
            samples: Vec::new(),
            t0: 0.0,
            t_liftoff: None,
            t_apogee: None,
        };
        assert!(matches!(jump_metrics(&trace), Err(Error::EmptyTrace)));
    }

    #[test]
    fn single_point_search_returns_that_policy() {
        let m = nominal();
        let cfg = SimConfig::default();
        let nominal_policy = ExtensionPolicy::nominal(&m);
        let search = PolicySearchSpace {
            mode: nominal_policy.mode,
            crouch_options: alloc::vec![nominal_policy.crouch],
            extend_options: alloc::vec![nominal_policy.extend],
            ramp_durations: alloc::vec![nominal_policy.ramp_duration],
            trigger_time: nominal_policy.trigger_time,
        };
        let (policy, _) = optimize_extension_profile(&m, &cfg, &search).unwrap();
        assert_eq!(policy, nominal_policy);
    }

    #[test]
    fn stronger_extension_wins_search() {
        let m = nominal();
        let cfg = SimConfig::default();
        let nominal_policy = ExtensionPolicy::nominal(&m);
        // A feeble partial extension against the nominal full extension.
        let weak = JointConfig {
            mu: nominal_policy.crouch.mu + 0.05,
            q_h: nominal_policy.crouch.q_h - 0.05,
        };
        let search = PolicySearchSpace {
            mode: nominal_policy.mode,
            crouch_options: alloc::vec![nominal_policy.crouch],
            extend_options: alloc::vec![weak, nominal_policy.extend],
            ramp_durations: alloc::vec![nominal_policy.ramp_duration],
            trigger_time: nominal_policy.trigger_time,
        };
        let (policy, metrics) = optimize_extension_profile(&m, &cfg, &search).unwrap();
        assert_eq!(policy.extend, nominal_policy.extend);
        assert!(metrics.max_h_clearance > 0.0);
    }

    #[test]
    fn tie_break_keeps_first_grid_point() {
        let m = nominal();
        let cfg = SimConfig::default();
        let nominal_policy = ExtensionPolicy::nominal(&m);
        // Identical duplicated candidates: the first must win.
        let search = PolicySearchSpace {
            mode: nominal_policy.mode,
            crouch_options: alloc::vec![nominal_policy.crouch],
            extend_options: alloc::vec![nominal_policy.extend, nominal_policy.extend],
            ramp_durations: alloc::vec![nominal_policy.ramp_duration],
            trigger_time: nominal_policy.trigger_time,
        };
        let policies: Vec<_> = search.policies().collect();
        assert_eq!(policies.len(), 2);
        let (policy, _) = optimize_extension_profile(&m, &cfg, &search).unwrap();
        assert_eq!(policy, policies[0]);
    }
}
