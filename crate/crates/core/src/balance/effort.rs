//! Aggregate minimum-control-effort metric over balanced configurations,
//! the out-of-plane axis-orientation sweep, and the extra-DoF comparison.

use alloc::string::ToString;
use alloc::vec::Vec;

use super::gramian::{default_gramian_steps, local_effort_metric};
use super::linearize::{linearize, DEFAULT_EPS};
use super::{psi_star, WheelieConfig, WheelieModel};
use crate::sweep::{GridStudy, PointFailure, SweepAxis, SweepPoint, SweepResult};
use crate::{Error, Result};

/// Default Gramian horizon for the balance studies (s).
///
/// The wheelie linearizations carry unstable poles up to ~12 rad/s, so the
/// horizon must keep `e^{2 lambda T}` within f64's dynamic range for the
/// weak posture directions to stay resolvable. 0.6 s is long enough for the
/// balance physics to dominate the metric and short enough that the
/// feasible-axis region of the sweep stays numerically defined.
pub const DEFAULT_EFFORT_HORIZON: f64 = 0.6;

/// Default horizon for the extra-DoF comparison (s). The 14-state variant
/// spreads the Gramian spectrum wider than the 12-state model, so it needs
/// a shorter horizon to keep every configuration resolvable.
pub const DOF_COMPARISON_HORIZON: f64 = 0.4;

/// Per-configuration effort, or why it is undefined.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LocalEffort {
    Value(f64),
    Failed(PointFailure),
}

impl LocalEffort {
    pub fn value(&self) -> Option<f64> {
        match self {
            LocalEffort::Value(v) => Some(*v),
            LocalEffort::Failed(_) => None,
        }
    }
}

/// Aggregate effort over a configuration set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EffortResult {
    /// Local effort per configuration, in input order.
    pub xi_local: Vec<LocalEffort>,
    /// Sum of the defined local efforts.
    pub xi_aggregate: f64,
    /// Gramian horizon (s).
    pub horizon: f64,
}

impl EffortResult {
    pub fn defined_count(&self) -> usize {
        self.xi_local.iter().filter(|x| x.value().is_some()).count()
    }
}

/// Sums the local effort metric over the configurations.
///
/// Uncontrollable configurations (infinite local effort) are recorded as
/// failures and excluded from the sum. Errors only when every configuration
/// fails.
pub fn aggregate_effort(
    model: &WheelieModel,
    configs: &[WheelieConfig],
    horizon: f64,
) -> Result<EffortResult> {
    if configs.is_empty() {
        return Err(Error::InvalidSpec(alloc::string::String::from(
            "aggregate effort needs at least one configuration",
        )));
    }
    let steps = default_gramian_steps(horizon);
    let mut xi_local = Vec::with_capacity(configs.len());
    let mut sum = 0.0;
    let mut defined = 0usize;
    for config in configs {
        let local = linearize(model, config, DEFAULT_EPS)
            .and_then(|sys| local_effort_metric(&sys, horizon, steps));
        match local {
            Ok(value) if value.is_finite() => {
                sum += value;
                defined += 1;
                xi_local.push(LocalEffort::Value(value));
            }
            Ok(_) => xi_local.push(LocalEffort::Failed(PointFailure::Uncontrollable)),
            Err(err) => xi_local.push(LocalEffort::Failed(err.into())),
        }
    }
    if defined == 0 {
        return Err(Error::AggregateUndefined);
    }
    Ok(EffortResult {
        xi_local,
        xi_aggregate: sum,
        horizon,
    })
}

/// Axis-orientation sweep of the out-of-plane joint.
#[derive(Debug, Clone)]
pub struct PsiSweep {
    pub model: WheelieModel,
    pub psi_grid: Vec<f64>,
    pub configs: Vec<WheelieConfig>,
    pub horizon: f64,
}

impl GridStudy for PsiSweep {
    fn num_points(&self) -> usize {
        self.psi_grid.len()
    }

    fn eval_point(&self, idx: usize) -> SweepPoint {
        let mut model = self.model.clone();
        model.psi_hat = self.psi_grid[idx];
        match aggregate_effort(&model, &self.configs, self.horizon) {
            // Sums over different configuration subsets are not comparable
            // across the axis grid, so a point with any undefined local term
            // is marked failed rather than reported with a biased-low sum.
            Ok(result) if result.defined_count() == self.configs.len() => {
                SweepPoint::Metrics(alloc::vec![
                    result.xi_aggregate,
                    result.defined_count() as f64,
                ])
            }
            Ok(_) => SweepPoint::Failed(PointFailure::Uncontrollable),
            Err(err) => SweepPoint::Failed(err.into()),
        }
    }

    fn assemble(&self, points: Vec<SweepPoint>) -> SweepResult {
        SweepResult {
            axes: alloc::vec![SweepAxis {
                name: "psi_hat".to_string(),
                values: self.psi_grid.clone(),
            }],
            metric_names: alloc::vec![
                "xi_aggregate".to_string(),
                "defined_configs".to_string(),
            ],
            points,
            fixed: alloc::vec![
                ("psi_star".to_string(), psi_star(&self.model)),
                ("horizon".to_string(), self.horizon),
                ("num_configs".to_string(), self.configs.len() as f64),
            ],
        }
    }
}

/// Aggregate effort as a function of the `phi` axis angle.
///
/// The balanced configurations are geometry-only (taken at `phi = 0`), so
/// one configuration set serves every axis angle. The result's fixed
/// snapshot carries the geometric reference angle `psi_star` at which the
/// axis line meets the rear axle.
pub fn psi_sweep(
    model: &WheelieModel,
    psi_grid: Vec<f64>,
    configs: Vec<WheelieConfig>,
    horizon: f64,
) -> SweepResult {
    PsiSweep {
        model: model.clone(),
        psi_grid,
        configs,
        horizon,
    }
    .run()
}

/// Effort of the as-built morphology against the extra-DoF variant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DofComparison {
    pub xi_5dof: f64,
    pub xi_6dof: f64,
    /// `xi_6dof / xi_5dof`.
    pub ratio: f64,
}

/// Compares aggregate effort without and with the extra out-of-plane joint
/// at matched configurations.
///
/// The 5-DoF model simply lacks the extra coordinate; the 6-DoF model adds
/// it (axis angle from the model's `extra_dof`). Both use the same balanced
/// poses, which remain equilibria because the extra axis lies in the
/// sagittal plane.
pub fn dof_comparison(
    model: &WheelieModel,
    configs: &[WheelieConfig],
    horizon: f64,
) -> Result<DofComparison> {
    let Some(_) = model.extra_dof else {
        return Err(Error::InvalidSpec(alloc::string::String::from(
            "dof_comparison needs a model with the extra DoF configured",
        )));
    };
    let mut five = model.clone();
    five.extra_dof = None;
    let six = model.clone();
    let xi_5dof = aggregate_effort(&five, configs, horizon)?.xi_aggregate;
    let xi_6dof = aggregate_effort(&six, configs, horizon)?.xi_aggregate;
    Ok(DofComparison {
        xi_5dof,
        xi_6dof,
        ratio: xi_6dof / xi_5dof,
    })
}
