//! Grid-sweep result container shared by the jump and balance studies.
//!
//! A sweep evaluates a pure function over a dense grid of design parameters.
//! Points are addressed row-major over the axis grids, each point holding
//! either its metric values or a typed failure. Evaluation order never
//! affects the stored layout, so parallel runners can fill pre-assigned
//! slots and reproduce sequential output exactly.

use alloc::string::String;
use alloc::vec::Vec;

use crate::Error;

/// One design-parameter axis of a sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Why a grid point failed to produce metrics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PointFailure {
    /// The simulation produced a non-finite state.
    Divergence { time: f64 },
    /// No static equilibrium exists at this design point.
    NoEquilibrium,
    /// The linearized system is uncontrollable and the effort is unbounded.
    Uncontrollable,
    /// The design point itself violates spec invariants.
    InvalidSpec { message: String },
    /// Any other per-point error.
    Other { message: String },
}

impl From<Error> for PointFailure {
    fn from(err: Error) -> Self {
        match err {
            Error::Divergence { time } => PointFailure::Divergence { time },
            Error::NoEquilibrium(_) | Error::AggregateUndefined => PointFailure::NoEquilibrium,
            Error::IndefiniteGramian => PointFailure::Uncontrollable,
            Error::InvalidSpec(message) => PointFailure::InvalidSpec { message },
            other => PointFailure::Other {
                message: alloc::format!("{other}"),
            },
        }
    }
}

/// Metric values or a failure marker for one grid point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum SweepPoint {
    Metrics(Vec<f64>),
    Failed(PointFailure),
}

impl SweepPoint {
    pub fn metrics(&self) -> Option<&[f64]> {
        match self {
            SweepPoint::Metrics(v) => Some(v),
            SweepPoint::Failed(_) => None,
        }
    }

    pub fn metric(&self, idx: usize) -> Option<f64> {
        self.metrics().and_then(|v| v.get(idx)).copied()
    }
}

/// Dense grid of design-parameter values mapped to scalar metrics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    pub metric_names: Vec<String>,
    /// Row-major over the axis grids: the last axis varies fastest.
    pub points: Vec<SweepPoint>,
    /// Snapshot of parameters held fixed during the sweep.
    pub fixed: Vec<(String, f64)>,
}

impl SweepResult {
    /// Total number of grid points.
    pub fn grid_len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Flat index of a multi-dimensional grid coordinate.
    pub fn flat_index(&self, indices: &[usize]) -> usize {
        debug_assert_eq!(indices.len(), self.axes.len());
        let mut idx = 0;
        for (axis, &i) in self.axes.iter().zip(indices) {
            debug_assert!(i < axis.values.len());
            idx = idx * axis.values.len() + i;
        }
        idx
    }

    /// Axis values at a flat index, slowest axis first.
    pub fn coords(&self, mut flat: usize) -> Vec<f64> {
        let mut rev = Vec::with_capacity(self.axes.len());
        for axis in self.axes.iter().rev() {
            let n = axis.values.len();
            rev.push(axis.values[flat % n]);
            flat /= n;
        }
        rev.reverse();
        rev
    }

    /// Column of one metric over the whole grid, `None` at failed points.
    pub fn metric_column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.metric_names.iter().position(|n| n == name)?;
        Some(self.points.iter().map(|p| p.metric(idx)).collect())
    }

    pub fn failure_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| matches!(p, SweepPoint::Failed(_)))
            .count()
    }

    /// Shape invariant: the value array matches the grid.
    pub fn validate_shape(&self) -> crate::Result<()> {
        if self.points.len() != self.grid_len() {
            return Err(Error::InvalidSpec(alloc::format!(
                "sweep holds {} points for a {}-point grid",
                self.points.len(),
                self.grid_len()
            )));
        }
        for p in &self.points {
            if let SweepPoint::Metrics(v) = p {
                if v.len() != self.metric_names.len() {
                    return Err(Error::InvalidSpec(alloc::format!(
                        "point carries {} metrics, expected {}",
                        v.len(),
                        self.metric_names.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A sweep whose points can be evaluated independently (and in parallel).
///
/// `eval_point` must be a pure function of `self` and the index; runners
/// gather outcomes into pre-assigned slots so the assembled result is
/// identical no matter the evaluation order.
pub trait GridStudy: Sync {
    fn num_points(&self) -> usize;
    fn eval_point(&self, idx: usize) -> SweepPoint;
    fn assemble(&self, points: Vec<SweepPoint>) -> SweepResult;

    /// Sequential evaluation of every point.
    fn run(&self) -> SweepResult {
        let points = (0..self.num_points()).map(|i| self.eval_point(i)).collect();
        self.assemble(points)
    }
}

/// Evenly spaced grid with exact endpoints.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return alloc::vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
            }
        })
        .collect()
}
