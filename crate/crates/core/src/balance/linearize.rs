//! Finite-difference linearization of controlled dynamics.

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use super::{gravity_compensation, wheelie_forward_dynamics, WheelieConfig, WheelieModel};
use crate::{Error, Result};

/// Anything with a state derivative `f(x, u)`.
pub trait ControlledSystem {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn derivative(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>>;
}

/// LTI approximation `dx = A x + B u` about an operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// The configuration this linearization was taken at.
    pub config: WheelieConfig,
    /// Human-readable state component names, position block first.
    pub state_labels: Vec<String>,
}

impl LinearizedSystem {
    /// Wraps raw matrices (test systems, external models).
    pub fn from_matrices(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || b.nrows() != a.nrows() {
            return Err(Error::InvalidSpec(alloc::format!(
                "A is {}x{}, B is {}x{}; need square A with matching B",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        Ok(Self {
            a,
            b,
            config: WheelieConfig::default(),
            state_labels: Vec::new(),
        })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// Plain-text serialization for external verification.
    ///
    /// Header lines (`#`-prefixed) carry the dimensions and the state
    /// ordering; the `A` block then holds n rows of n entries and the `B`
    /// block n rows of m entries, row-major, space-separated.
    pub fn to_matrix_text(&self) -> String {
        use core::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "# n {} m {}", self.state_dim(), self.input_dim());
        let _ = writeln!(out, "# states {}", self.state_labels.join(" "));
        let _ = writeln!(
            out,
            "# config pitch {} mu {} q_h {}",
            self.config.pitch, self.config.mu, self.config.q_h
        );
        for block in ["A", "B"] {
            let matrix = if block == "A" { &self.a } else { &self.b };
            let _ = writeln!(out, "# {block}");
            for i in 0..matrix.nrows() {
                let row: Vec<String> = (0..matrix.ncols())
                    .map(|j| alloc::format!("{:.17e}", matrix[(i, j)]))
                    .collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }
}

/// Central finite differences of `sys` about `(x0, u0)`.
///
/// Steps are scaled per component: `eps * (1 + |x_i|)`.
pub fn linearize_system<S: ControlledSystem>(
    sys: &S,
    x0: &DVector<f64>,
    u0: &DVector<f64>,
    eps: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !(eps > 0.0) {
        return Err(Error::Linearization(alloc::format!(
            "perturbation must be positive, got {eps}"
        )));
    }
    let n = sys.state_dim();
    let m = sys.input_dim();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, m);
    for i in 0..n {
        let h = eps * (1.0 + x0[i].abs());
        let mut hi = x0.clone();
        let mut lo = x0.clone();
        hi[i] += h;
        lo[i] -= h;
        let column = (sys.derivative(&hi, u0)? - sys.derivative(&lo, u0)?) / (2.0 * h);
        a.set_column(i, &column);
    }
    for j in 0..m {
        let h = eps * (1.0 + u0[j].abs());
        let mut hi = u0.clone();
        let mut lo = u0.clone();
        hi[j] += h;
        lo[j] -= h;
        let column = (sys.derivative(x0, &hi)? - sys.derivative(x0, &lo)?) / (2.0 * h);
        b.set_column(j, &column);
    }
    if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Linearization(String::from(
            "non-finite derivative entries",
        )));
    }
    Ok((a, b))
}

struct CompensatedWheelie<'a> {
    model: &'a WheelieModel,
    u_star: DVector<f64>,
}

impl ControlledSystem for CompensatedWheelie<'_> {
    fn state_dim(&self) -> usize {
        self.model.state_dim()
    }

    fn input_dim(&self) -> usize {
        self.model.input_dim()
    }

    fn derivative(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>> {
        wheelie_forward_dynamics(self.model, x, &(u + &self.u_star))
    }
}

/// Default finite-difference perturbation.
pub const DEFAULT_EPS: f64 = 1e-6;

/// Linearizes the wheelie dynamics about a balanced configuration.
///
/// The configuration's gravity-compensating holding torques define the
/// operating input, so the deviation input `u = 0` is an equilibrium; `A`
/// and `B` describe the dynamics of deviations from the held pose.
pub fn linearize(
    model: &WheelieModel,
    config: &WheelieConfig,
    eps: f64,
) -> Result<LinearizedSystem> {
    let u_star = gravity_compensation(model, config)?;
    let sys = CompensatedWheelie { model, u_star };
    let x0 = config.to_state(model);
    let u0 = DVector::zeros(model.input_dim());
    let (a, b) = linearize_system(&sys, &x0, &u0, eps)?;
    let mut state_labels: Vec<String> = model.coord_labels();
    let rates: Vec<String> = state_labels
        .iter()
        .map(|l| alloc::format!("{l}_rate"))
        .collect();
    state_labels.extend(rates);
    Ok(LinearizedSystem {
        a,
        b,
        config: *config,
        state_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::{default_pitch_grid, find_static_configs};
    use crate::MorphologySpec;
    use approx::assert_relative_eq;

    struct MockLinear {
        a: DMatrix<f64>,
        b: DMatrix<f64>,
    }

    impl ControlledSystem for MockLinear {
        fn state_dim(&self) -> usize {
            self.a.nrows()
        }
        fn input_dim(&self) -> usize {
            self.b.ncols()
        }
        fn derivative(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>> {
            Ok(&self.a * x + &self.b * u)
        }
    }

    #[test]
    fn recovers_linear_system_exactly() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.2, -2.0, -0.1, 0.5, 0.3, 0.0, -1.0]);
        let b = DMatrix::from_row_slice(3, 2, &[0.0, 1.0, 1.0, 0.0, 0.5, -0.5]);
        let sys = MockLinear {
            a: a.clone(),
            b: b.clone(),
        };
        let x0 = DVector::from_vec(alloc::vec![0.4, -0.2, 1.1]);
        let u0 = DVector::zeros(2);
        let (a_fd, b_fd) = linearize_system(&sys, &x0, &u0, DEFAULT_EPS).unwrap();
        assert!((a_fd - a).amax() < 1e-8);
        assert!((b_fd - b).amax() < 1e-8);
    }

    #[test]
    fn inverted_pendulum_eigenvalues() {
        // A point mass on a massless rod pivoting at the contact: the
        // linearized poles are +-sqrt(g / L_eff) with L_eff = I / (m l).
        use crate::balance::chain::{Chain, ChainBody};
        use nalgebra::{Matrix3, Vector3};

        struct PendulumSystem {
            chain: Chain,
        }
        impl ControlledSystem for PendulumSystem {
            fn state_dim(&self) -> usize {
                2
            }
            fn input_dim(&self) -> usize {
                1
            }
            fn derivative(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>> {
                let q = DVector::from_vec(alloc::vec![x[0]]);
                let qd = DVector::from_vec(alloc::vec![x[1]]);
                let qdd = self.chain.accelerations(&q, &qd, u, 9.81)?;
                Ok(DVector::from_vec(alloc::vec![x[1], qdd[0]]))
            }
        }

        let length = 0.7;
        let chain = Chain::new(alloc::vec![ChainBody {
            parent: None,
            axis: Vector3::new(0.0, -1.0, 0.0),
            anchor: Vector3::zeros(),
            mass: 3.0,
            com: Vector3::new(length, 0.0, 0.0),
            inertia: Matrix3::zeros(),
        }])
        .unwrap();
        let sys = PendulumSystem { chain };
        // Upright: the rod along +z means q = pi/2 in this convention.
        let x0 = DVector::from_vec(alloc::vec![core::f64::consts::FRAC_PI_2, 0.0]);
        let u0 = DVector::zeros(1);
        let (a, _b) = linearize_system(&sys, &x0, &u0, DEFAULT_EPS).unwrap();
        let sigma = (9.81f64 / length).sqrt();
        let eigen = a.complex_eigenvalues();
        let mut reals: alloc::vec::Vec<f64> = eigen.iter().map(|c| c.re).collect();
        reals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_relative_eq!(reals[0], -sigma, max_relative = 1e-5);
        assert_relative_eq!(reals[1], sigma, max_relative = 1e-5);
    }

    #[test]
    fn step_size_robustness() {
        let model = crate::balance::WheelieModel::new(MorphologySpec::nominal(), 0.33).unwrap();
        let configs = find_static_configs(&model, &default_pitch_grid(), &[1.3]).unwrap();
        let config = configs[0];
        let sys1 = linearize(&model, &config, 1e-6).unwrap();
        let sys2 = linearize(&model, &config, 2e-6).unwrap();
        let scale = sys1.a.amax().max(1.0);
        assert!(
            (&sys1.a - &sys2.a).amax() / scale < 1e-6,
            "A drifted {} under step doubling",
            (&sys1.a - &sys2.a).amax() / scale
        );
        assert!((&sys1.b - &sys2.b).amax() / sys1.b.amax() < 1e-6);
    }

    #[test]
    fn wheelie_linearization_is_unstable_and_controllable_shape() {
        let model = crate::balance::WheelieModel::new(MorphologySpec::nominal(), 0.33).unwrap();
        let configs = find_static_configs(&model, &default_pitch_grid(), &[1.3]).unwrap();
        let sys = linearize(&model, &configs[0], DEFAULT_EPS).unwrap();
        assert_eq!(sys.state_dim(), 12);
        assert_eq!(sys.input_dim(), 4);
        assert_eq!(sys.state_labels.len(), 12);
        // An inverted-pendulum-like plant has at least one unstable pole.
        let max_real = sys
            .a
            .complex_eigenvalues()
            .iter()
            .map(|c| c.re)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_real > 0.5, "expected an unstable pole, got {max_real}");
    }
}
