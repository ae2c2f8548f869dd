//! Morphology design sweeps built on the jump simulator.
//!
//! Each sweep re-optimizes the extension profile per design point, so the
//! grids compare morphologies at their best achievable jump rather than
//! under a controller tuned for the nominal design. Every point records the
//! same metric columns:
//!
//! `max_h_com, max_h_clearance, contact_ratio, peak_power, ramp_duration`

use alloc::string::{String, ToString};
use crate::sweep::PointFailure;
use alloc::vec;
use alloc::vec::Vec;

use crate::jump::{optimize_profile_for, JumpClass, JumpObjective, PolicySearchSpace};
use crate::morphology::{build_morphology, LinkName, MorphologySpec};
use crate::state::SimConfig;
use crate::sweep::{GridStudy, SweepAxis, SweepPoint, SweepResult};

/// Default gear-ratio grids for the landscape study: multiplicative grids
/// through the selected design point (297:22, 450:22). The `mu` axis starts
/// above the weak-gear region where no upright jump exists at all.
pub fn default_gear_grids() -> (Vec<f64>, Vec<f64>) {
    let alpha_star = 297.0 / 22.0;
    let beta_star = 450.0 / 22.0;
    let mut alpha = Vec::with_capacity(15);
    for i in 0..15i32 {
        let step = (i - 7) as f64 / 7.0;
        let factor = if step < 0.0 {
            num_traits::Float::powf(2.1f64, step)
        } else {
            num_traits::Float::powf(4.5f64, step)
        };
        alpha.push(alpha_star * factor);
    }
    let beta = (0..15i32)
        .map(|i| beta_star * num_traits::Float::powf(6.0f64, (i - 7) as f64 / 7.0))
        .collect();
    (alpha, beta)
}

/// Default absolute-scale grid for the gross-scale study; spans the window
/// where the fixed actuators still produce upright jumps, with the built
/// 0.4 scale on the grid.
pub fn default_scale_grid() -> Vec<f64> {
    crate::sweep::linspace(0.28, 0.52, 9)
}

/// Default link-mass grid: +-2 kg around the nominal mass (points at
/// non-positive masses are reported as invalid-spec failures).
pub fn default_mass_grid(m: &MorphologySpec, link: LinkName) -> Vec<f64> {
    let nominal = m.link(link).mass;
    crate::sweep::linspace(nominal - 2.0, nominal + 2.0, 9)
}

pub(crate) fn metric_names() -> Vec<String> {
    vec![
        "max_h_com".to_string(),
        "max_h_clearance".to_string(),
        "contact_ratio".to_string(),
        "peak_power".to_string(),
        "ramp_duration".to_string(),
    ]
}

fn eval_morphology(
    m: &MorphologySpec,
    cfg: &SimConfig,
    search: &PolicySearchSpace,
    objective: JumpObjective,
) -> SweepPoint {
    match optimize_profile_for(m, cfg, search, objective) {
        // A design point where every candidate tips over has no jump to
        // report; record it as a typed failure instead of somersault
        // numbers.
        Ok((_, _, JumpClass::TippedOnly)) => SweepPoint::Failed(PointFailure::Other {
            message: String::from("no upright jump in the policy search space"),
        }),
        Ok((policy, metrics, _)) => SweepPoint::Metrics(vec![
            metrics.max_h_com,
            metrics.max_h_clearance,
            metrics.contact_ratio,
            metrics.peak_mechanical_power,
            policy.ramp_duration,
        ]),
        Err(err) => SweepPoint::Failed(err.into()),
    }
}

fn link_axis_name(link: LinkName) -> &'static str {
    match link {
        LinkName::Bike => "bike_mass",
        LinkName::Neck => "neck_mass",
        LinkName::Head => "head_mass",
    }
}

/// Link-mass sensitivity sweep: one link's mass varies at fixed geometry
/// while the other links stay at their nominal values.
#[derive(Debug, Clone)]
pub struct MassSweep {
    pub base: MorphologySpec,
    pub link: LinkName,
    pub masses: Vec<f64>,
    pub cfg: SimConfig,
    pub search: PolicySearchSpace,
}

impl MassSweep {
    pub fn new(base: MorphologySpec, link: LinkName, masses: Vec<f64>, cfg: SimConfig) -> Self {
        let search = PolicySearchSpace::default_for(&base);
        Self {
            base,
            link,
            masses,
            cfg,
            search,
        }
    }
}

impl GridStudy for MassSweep {
    fn num_points(&self) -> usize {
        self.masses.len()
    }

    fn eval_point(&self, idx: usize) -> SweepPoint {
        let mut m = self.base.clone();
        m.link_mut(self.link).mass = self.masses[idx];
        eval_morphology(&m, &self.cfg, &self.search, JumpObjective::ComHeight)
    }

    fn assemble(&self, points: Vec<SweepPoint>) -> SweepResult {
        SweepResult {
            axes: vec![SweepAxis {
                name: link_axis_name(self.link).to_string(),
                values: self.masses.clone(),
            }],
            metric_names: metric_names(),
            points,
            fixed: vec![
                ("nominal_mass".to_string(), self.base.link(self.link).mass),
                ("scale".to_string(), self.base.scale),
            ],
        }
    }
}

/// Varies one link's mass over a grid, rebuilding its inertia from the
/// cylinder model at fixed geometry and re-optimizing the jump per point.
pub fn mass_sensitivity_sweep(
    m: &MorphologySpec,
    link: LinkName,
    mass_grid: Vec<f64>,
    cfg: &SimConfig,
) -> SweepResult {
    MassSweep::new(m.clone(), link, mass_grid, *cfg).run()
}

/// Two-dimensional gear-ratio landscape over the `mu` and `q_h` drives.
///
/// Each point rescales the joint-side torque/speed limits against the fixed
/// motor-side limits (torque grows with the ratio, speed shrinks, reflected
/// inertia grows with the square) and re-optimizes the extension profile.
#[derive(Debug, Clone)]
pub struct GearSweep {
    pub base: MorphologySpec,
    pub gr_alpha: Vec<f64>,
    pub gr_beta: Vec<f64>,
    pub cfg: SimConfig,
    pub search: PolicySearchSpace,
}

impl GearSweep {
    pub fn new(base: MorphologySpec, gr_alpha: Vec<f64>, gr_beta: Vec<f64>, cfg: SimConfig) -> Self {
        let search = PolicySearchSpace::default_for(&base);
        Self {
            base,
            gr_alpha,
            gr_beta,
            cfg,
            search,
        }
    }
}

impl GridStudy for GearSweep {
    fn num_points(&self) -> usize {
        self.gr_alpha.len() * self.gr_beta.len()
    }

    fn eval_point(&self, idx: usize) -> SweepPoint {
        let i_alpha = idx / self.gr_beta.len();
        let i_beta = idx % self.gr_beta.len();
        let mut m = self.base.clone();
        m.mu_actuator = match m.mu_actuator.with_gear_ratio(self.gr_alpha[i_alpha]) {
            Ok(act) => act,
            Err(err) => return SweepPoint::Failed(err.into()),
        };
        m.q_h_actuator = match m.q_h_actuator.with_gear_ratio(self.gr_beta[i_beta]) {
            Ok(act) => act,
            Err(err) => return SweepPoint::Failed(err.into()),
        };
        eval_morphology(&m, &self.cfg, &self.search, JumpObjective::ComHeight)
    }

    fn assemble(&self, points: Vec<SweepPoint>) -> SweepResult {
        SweepResult {
            axes: vec![
                SweepAxis {
                    name: "gr_alpha".to_string(),
                    values: self.gr_alpha.clone(),
                },
                SweepAxis {
                    name: "gr_beta".to_string(),
                    values: self.gr_beta.clone(),
                },
            ],
            metric_names: metric_names(),
            points,
            fixed: vec![
                (
                    "selected_gr_alpha".to_string(),
                    self.base.mu_actuator.gear_ratio,
                ),
                (
                    "selected_gr_beta".to_string(),
                    self.base.q_h_actuator.gear_ratio,
                ),
            ],
        }
    }
}

/// Jump-height landscape over the two gear ratios.
pub fn gear_ratio_landscape(
    m: &MorphologySpec,
    gr_alpha_grid: Vec<f64>,
    gr_beta_grid: Vec<f64>,
    cfg: &SimConfig,
) -> SweepResult {
    GearSweep::new(m.clone(), gr_alpha_grid, gr_beta_grid, *cfg).run()
}

/// Whether the `q_h` drive is a single unit or a coupled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CouplingVariant {
    Single,
    Coupled,
}

impl CouplingVariant {
    pub fn count(self) -> u8 {
        match self {
            CouplingVariant::Single => 1,
            CouplingVariant::Coupled => 2,
        }
    }
}

/// Gross-scale study: rebuilds the morphology at each absolute scale (1.0
/// corresponds to a 1 m Neck), sets the `q_h` drive coupling, and records
/// the clearance and contact-ratio trade-off.
///
/// The extension profile is optimized once at the base scale and then
/// applied under dynamic similarity (ramp time stretched with sqrt(scale)),
/// so every size runs a dynamically equivalent controller and the curves
/// compare morphologies alone.
#[derive(Debug, Clone)]
pub struct ScaleSweep {
    pub base: MorphologySpec,
    pub scales: Vec<f64>,
    pub coupling: CouplingVariant,
    pub cfg: SimConfig,
    pub search: PolicySearchSpace,
}

impl ScaleSweep {
    pub fn new(
        base: MorphologySpec,
        scales: Vec<f64>,
        coupling: CouplingVariant,
        cfg: SimConfig,
    ) -> Self {
        let search = PolicySearchSpace::default_for(&base);
        Self {
            base,
            scales,
            coupling,
            cfg,
            search,
        }
    }

    /// The base-scale profile that the sweep stretches across sizes.
    fn base_policy(&self) -> crate::Result<crate::jump::ExtensionPolicy> {
        let mut base = self.base.clone();
        base.q_h_actuator = base.q_h_actuator.with_count(self.coupling.count())?;
        // The CoM-height winner is the upright vertical-jump family; the
        // clearance winner tends to ride the pitch bound and tips over
        // sooner as the robot grows.
        optimize_profile_for(&base, &self.cfg, &self.search, JumpObjective::ComHeight)
            .map(|(policy, _, _)| policy)
    }
}

impl GridStudy for ScaleSweep {
    fn num_points(&self) -> usize {
        self.scales.len()
    }

    fn eval_point(&self, idx: usize) -> SweepPoint {
        // Grid values are absolute scales; rebuild relative to the base.
        let factor = self.scales[idx] / self.base.scale;
        let mut m = match build_morphology(&self.base, factor) {
            Ok(m) => m,
            Err(err) => return SweepPoint::Failed(err.into()),
        };
        m.q_h_actuator = match m.q_h_actuator.with_count(self.coupling.count()) {
            Ok(act) => act,
            Err(err) => return SweepPoint::Failed(err.into()),
        };
        let mut policy = match self.base_policy() {
            Ok(policy) => policy,
            Err(err) => return SweepPoint::Failed(err.into()),
        };
        policy.ramp_duration *= num_traits::Float::sqrt(factor);
        let search = PolicySearchSpace {
            mode: policy.mode,
            crouch_options: alloc::vec![policy.crouch],
            extend_options: alloc::vec![policy.extend],
            ramp_durations: alloc::vec![policy.ramp_duration],
            trigger_time: policy.trigger_time,
        };
        eval_morphology(&m, &self.cfg, &search, JumpObjective::Clearance)
    }

    fn assemble(&self, points: Vec<SweepPoint>) -> SweepResult {
        SweepResult {
            axes: vec![SweepAxis {
                name: "scale".to_string(),
                values: self.scales.clone(),
            }],
            metric_names: metric_names(),
            points,
            fixed: vec![
                ("nominal_scale".to_string(), self.base.scale),
                (
                    "coupled".to_string(),
                    f64::from(self.coupling.count() - 1),
                ),
            ],
        }
    }
}

/// Clearance height and contact ratio as functions of gross robot scale.
pub fn scale_study(
    m: &MorphologySpec,
    scale_grid: Vec<f64>,
    coupling: CouplingVariant,
    cfg: &SimConfig,
) -> SweepResult {
    ScaleSweep::new(m.clone(), scale_grid, coupling, *cfg).run()
}
