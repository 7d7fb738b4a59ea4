//! Port-Hamiltonian descriptor systems
//!
//! ```text
//! E ẋ = (J − R) x + (G − P) u
//!   y = (G + P)ᵀ x + (S + N) u
//! ```
//!
//! with `E = Eᵀ ⪰ 0`, `J`, `N` skew and `W = [[R, P], [Pᵀ, S]] ⪰ 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{classify_definiteness, spectral_norm, sym_skew_split, Mat, ToleranceConfig, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct PHSystem {
    pub e: Mat,
    pub j: Mat,
    pub r: Mat,
    pub g: Mat,
    pub p: Mat,
    pub s: Mat,
    pub n: Mat,
}

/// Proportional state feedback `u = F x + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedback(pub Mat);

impl Feedback {
    pub fn zeros(m: usize, n: usize) -> Self {
        Self(Mat::zeros(m, n))
    }

    pub fn matrix(&self) -> &Mat {
        &self.0
    }
}

fn expect_shape(name: &str, m: &Mat, rows: usize, cols: usize) -> Result<()> {
    if m.shape() == (rows, cols) {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            m.nrows(),
            m.ncols()
        )))
    }
}

impl PHSystem {
    pub fn new(e: Mat, j: Mat, r: Mat, g: Mat, p: Mat, s: Mat, n: Mat) -> Result<Self> {
        let sys = Self { e, j, r, g, p, s, n };
        sys.check_shapes()?;
        Ok(sys)
    }

    /// Builds a system from the feedthrough `D`, splitting it into `S` and `N`.
    pub fn from_feedthrough(e: Mat, j: Mat, r: Mat, g: Mat, p: Mat, d: &Mat) -> Result<Self> {
        let (s, n) = sym_skew_split(d)?;
        Self::new(e, j, r, g, p, s, n)
    }

    /// Scalar (n = m = 1) system, handy for worked examples.
    #[allow(clippy::too_many_arguments)]
    pub fn scalar(e: f64, j: f64, r: f64, g: f64, p: f64, s: f64, n: f64) -> Self {
        let one = |x| Mat::from_element(1, 1, x);
        Self {
            e: one(e),
            j: one(j),
            r: one(r),
            g: one(g),
            p: one(p),
            s: one(s),
            n: one(n),
        }
    }

    pub fn check_shapes(&self) -> Result<()> {
        let n = self.e.nrows();
        let m = self.g.ncols();
        expect_shape("E", &self.e, n, n)?;
        expect_shape("J", &self.j, n, n)?;
        expect_shape("R", &self.r, n, n)?;
        expect_shape("G", &self.g, n, m)?;
        expect_shape("P", &self.p, n, m)?;
        expect_shape("S", &self.s, m, m)?;
        expect_shape("N", &self.n, m, m)
    }

    pub fn state_dim(&self) -> usize {
        self.e.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.g.ncols()
    }

    pub fn feedthrough(&self) -> Mat {
        &self.s + &self.n
    }

    /// `J − R`, the constant part of the system pencil `sE − (J − R)`.
    pub fn a(&self) -> Mat {
        &self.j - &self.r
    }

    /// `G − P`, the input matrix of the state equation.
    pub fn b(&self) -> Mat {
        &self.g - &self.p
    }

    /// `W = [[R, P], [Pᵀ, S]]`.
    pub fn dissipation_matrix(&self) -> Result<Mat> {
        self.check_shapes()?;
        let (n, m) = (self.state_dim(), self.input_dim());
        let mut w = Mat::zeros(n + m, n + m);
        w.view_mut((0, 0), (n, n)).copy_from(&self.r);
        w.view_mut((0, n), (n, m)).copy_from(&self.p);
        w.view_mut((n, 0), (m, n)).copy_from(&self.p.transpose());
        w.view_mut((n, n), (m, m)).copy_from(&self.s);
        Ok(w)
    }

    /// `H(x) = ½ xᵀ E x`.
    pub fn hamiltonian(&self, x: &Vector) -> Result<f64> {
        if x.len() != self.state_dim() {
            return Err(Error::ShapeMismatch(format!(
                "state vector has length {}, expected {}",
                x.len(),
                self.state_dim()
            )));
        }
        Ok(0.5 * x.dot(&(&self.e * x)))
    }

    /// `y = (G + P)ᵀ x + (S + N) u`.
    pub fn output(&self, x: &Vector, u: &Vector) -> Vector {
        (&self.g + &self.p).transpose() * x + self.feedthrough() * u
    }

    /// Closed loop under `u = F x + v`. The result is not revalidated: it is
    /// port-Hamiltonian only for admissible `F`.
    pub fn apply_feedback(&self, fb: &Feedback) -> Result<PHSystem> {
        self.check_shapes()?;
        expect_shape("F", &fb.0, self.input_dim(), self.state_dim())?;
        let f = &fb.0;
        let bf = self.b() * f;
        let bf_t = bf.transpose();
        let half_fd = f.transpose() * self.feedthrough().transpose() * 0.5;
        Ok(PHSystem {
            e: self.e.clone(),
            j: &self.j + (&bf - &bf_t) * 0.5,
            r: &self.r - (&bf + &bf_t) * 0.5,
            g: &self.g + &half_fd,
            p: &self.p + &half_fd,
            s: self.s.clone(),
            n: self.n.clone(),
        })
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> Result<ValidationReport> {
        self.check_shapes()?;
        let rel = |m: &Mat| tol.psd_tol * spectral_norm(m).max(1.0);
        let asym = |m: &Mat, sign: f64| (m + m.transpose() * sign).norm();

        let e_sym = asym(&self.e, -1.0);
        let e_def = classify_definiteness(&self.e, tol)?;
        let j_skew = asym(&self.j, 1.0);
        let n_skew = asym(&self.n, 1.0);
        let s_sym = asym(&self.s, -1.0);
        let w_def = classify_definiteness(&self.dissipation_matrix()?, tol)?;

        let checks = vec![
            ConstraintCheck::new("E symmetric", e_sym, e_sym <= rel(&self.e)),
            ConstraintCheck::new("E positive semidefinite", e_def.min_eigenvalue, e_def.is_psd()),
            ConstraintCheck::new("J skew-symmetric", j_skew, j_skew <= rel(&self.j)),
            ConstraintCheck::new("N skew-symmetric", n_skew, n_skew <= rel(&self.n)),
            ConstraintCheck::new("S symmetric", s_sym, s_sym <= rel(&self.s)),
            ConstraintCheck::new("W positive semidefinite", w_def.min_eigenvalue, w_def.is_psd()),
        ];
        let passed = checks.iter().all(|c| c.passed);
        Ok(ValidationReport {
            passed,
            checks,
            psd_tol: tol.psd_tol,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub constraint: String,
    /// Violation norm for symmetry constraints, smallest eigenvalue for definiteness ones.
    pub margin: f64,
    pub passed: bool,
}

impl ConstraintCheck {
    fn new(constraint: &str, margin: f64, passed: bool) -> Self {
        Self {
            constraint: constraint.to_string(),
            margin,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<ConstraintCheck>,
    pub psd_tol: f64,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Sampled solution on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vector>,
    pub u: Vec<Vector>,
    pub y: Vec<Vector>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn check_against(&self, sys: &PHSystem) -> Result<()> {
        let k = self.t.len();
        if self.x.len() != k || self.u.len() != k || self.y.len() != k {
            return Err(Error::ShapeMismatch("trajectory sample counts differ".into()));
        }
        let (n, m) = (sys.state_dim(), sys.input_dim());
        let bad = self.x.iter().any(|x| x.len() != n)
            || self.u.iter().any(|u| u.len() != m)
            || self.y.iter().any(|y| y.len() != m);
        if bad {
            return Err(Error::ShapeMismatch("trajectory sample dimensions do not match the system".into()));
        }
        if self.t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Malformed("time grid is not strictly increasing".into()));
        }
        Ok(())
    }

    pub fn hamiltonian_series(&self, sys: &PHSystem) -> Result<Vec<f64>> {
        self.x.iter().map(|x| sys.hamiltonian(x)).collect()
    }
}

/// Largest violation of `dH/dt = −zᵀ W z + yᵀu`, `z = (x, u)`, over interior grid
/// points, with `dH/dt` from central differences.
pub fn power_balance_residual(sys: &PHSystem, traj: &Trajectory) -> Result<f64> {
    traj.check_against(sys)?;
    if traj.len() < 3 {
        return Err(Error::GridTooShort { points: traj.len() });
    }
    let w = sys.dissipation_matrix()?;
    let h = traj.hamiltonian_series(sys)?;
    let mut worst: f64 = 0.0;
    for k in 1..traj.len() - 1 {
        let dh = (h[k + 1] - h[k - 1]) / (traj.t[k + 1] - traj.t[k - 1]);
        let z = Vector::from_iterator(
            traj.x[k].len() + traj.u[k].len(),
            traj.x[k].iter().chain(traj.u[k].iter()).copied(),
        );
        let dissipated = z.dot(&(&w * &z));
        let supplied = traj.y[k].dot(&traj.u[k]);
        worst = worst.max((dh + dissipated - supplied).abs());
    }
    Ok(worst)
}

/// Checks `H(x(t₂)) − H(x(t₁)) ≤ ∫ yᵀu dτ` over every pair of grid points, with
/// the supply integrated by the trapezoid rule.
///
/// The slack is `(psd_tol + Δt_max) · (1 + max|H| + ∫|yᵀu|)`: the integrator and
/// the quadrature are both first-order consistent with the continuous inequality.
pub fn dissipation_inequality_check(sys: &PHSystem, traj: &Trajectory, tol: &ToleranceConfig) -> Result<bool> {
    traj.check_against(sys)?;
    if traj.len() < 3 {
        return Err(Error::GridTooShort { points: traj.len() });
    }
    let h = traj.hamiltonian_series(sys)?;
    let supply: Vec<f64> = traj.y.iter().zip(&traj.u).map(|(y, u)| y.dot(u)).collect();
    let mut cumulative = vec![0.0; traj.len()];
    let mut abs_total = 0.0;
    let mut dt_max: f64 = 0.0;
    for k in 1..traj.len() {
        let dt = traj.t[k] - traj.t[k - 1];
        dt_max = dt_max.max(dt);
        cumulative[k] = cumulative[k - 1] + 0.5 * dt * (supply[k] + supply[k - 1]);
        abs_total += 0.5 * dt * (supply[k].abs() + supply[k - 1].abs());
    }
    let h_max = h.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let slack = (tol.psd_tol + dt_max) * (1.0 + h_max + abs_total);

    // H(t₂) − S(t₂) ≤ H(t₁) − S(t₁) + slack for all t₁ < t₂.
    let mut best_earlier = h[0] - cumulative[0];
    for k in 1..traj.len() {
        let g = h[k] - cumulative[k];
        if g - best_earlier > slack {
            return Ok(false);
        }
        best_earlier = best_earlier.min(g);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn validate_examples() {
        let zero = PHSystem::scalar(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(zero.validate(&tol()).unwrap().passed);

        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0);
        let rep = sys.validate(&tol()).unwrap();
        assert!(rep.passed);
        let w = rep.checks.iter().find(|c| c.constraint.starts_with('W')).unwrap();
        assert_abs_diff_eq!(w.margin, 1.0, epsilon = 1e-15);

        let bad = PHSystem::scalar(0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0);
        let rep = bad.validate(&tol()).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.failures().next().unwrap().constraint, "W positive semidefinite");
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        let mut sys = PHSystem::scalar(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        sys.g = Mat::zeros(2, 1);
        assert!(matches!(sys.validate(&tol()), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn dissipation_matrix_blocks() {
        let sys = PHSystem::scalar(0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0);
        assert_eq!(sys.dissipation_matrix().unwrap(), Mat::identity(2, 2));
        let zero = PHSystem::scalar(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(zero.dissipation_matrix().unwrap(), Mat::zeros(2, 2));
        let sys = PHSystem::scalar(0.0, 0.0, 2.0, 0.0, 1.0, 1.0, 0.0);
        assert_eq!(
            sys.dissipation_matrix().unwrap(),
            Mat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])
        );
    }

    #[test]
    fn hamiltonian_examples() {
        let mut sys = PHSystem::scalar(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        sys.e = Mat::identity(2, 2);
        sys.j = Mat::zeros(2, 2);
        sys.r = Mat::zeros(2, 2);
        sys.g = Mat::zeros(2, 1);
        sys.p = Mat::zeros(2, 1);
        assert_eq!(sys.hamiltonian(&Vector::from_vec(vec![1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(sys.hamiltonian(&Vector::zeros(2)).unwrap(), 0.0);
        sys.e = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        assert_eq!(sys.hamiltonian(&Vector::from_vec(vec![3.0, 5.0])).unwrap(), 9.0);
        assert!(sys.hamiltonian(&Vector::zeros(3)).is_err());
    }

    #[test]
    fn feedback_examples() {
        let sys = PHSystem::scalar(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(sys.apply_feedback(&Feedback::zeros(1, 1)).unwrap(), sys);

        let cl = sys.apply_feedback(&Feedback(Mat::from_element(1, 1, -2.0))).unwrap();
        assert_eq!(cl.j[(0, 0)], 0.0);
        assert_eq!(cl.r[(0, 0)], 2.0);
        assert_eq!(cl.g[(0, 0)], 1.0);
        assert_eq!(cl.p[(0, 0)], 0.0);

        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0);
        let cl = sys.apply_feedback(&Feedback(Mat::from_element(1, 1, -2.0))).unwrap();
        assert_eq!(cl.r[(0, 0)], 3.0);
        assert_eq!(cl.p[(0, 0)], -1.0);
        assert_eq!(cl.g[(0, 0)], 0.0);
    }

    #[test]
    fn feedback_shape_checked() {
        let sys = PHSystem::scalar(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        assert!(sys.apply_feedback(&Feedback::zeros(2, 1)).is_err());
    }

    fn constant_traj(sys: &PHSystem, x: f64, u: f64, k: usize) -> Trajectory {
        let xv = Vector::from_element(1, x);
        let uv = Vector::from_element(1, u);
        let y = sys.output(&xv, &uv);
        Trajectory {
            t: (0..k).map(|i| i as f64 * 0.1).collect(),
            x: vec![xv; k],
            u: vec![uv; k],
            y: vec![y; k],
        }
    }

    #[test]
    fn power_balance_on_constant_trajectories() {
        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0);
        let traj = constant_traj(&sys, 0.0, 0.0, 5);
        assert_eq!(power_balance_residual(&sys, &traj).unwrap(), 0.0);

        let conserved = PHSystem::scalar(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let traj = constant_traj(&conserved, 3.0, 0.0, 5);
        assert_eq!(power_balance_residual(&conserved, &traj).unwrap(), 0.0);

        let short = constant_traj(&sys, 0.0, 0.0, 2);
        assert!(matches!(power_balance_residual(&sys, &short), Err(Error::GridTooShort { points: 2 })));
    }

    #[test]
    fn dissipation_inequality_detects_energy_injection() {
        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        let traj = constant_traj(&sys, 0.0, 0.0, 6);
        assert!(dissipation_inequality_check(&sys, &traj, &tol()).unwrap());

        // Exact decaying solution of ẋ = −x under zero input.
        let mut traj = constant_traj(&sys, 1.0, 0.0, 50);
        for (k, x) in traj.x.iter_mut().enumerate() {
            x[0] = (-(k as f64) * 0.1).exp();
        }
        for (y, x) in traj.y.iter_mut().zip(&traj.x) {
            *y = sys.output(x, &Vector::zeros(1));
        }
        assert!(dissipation_inequality_check(&sys, &traj, &tol()).unwrap());
        traj.x[30][0] = 2.0;
        assert!(!dissipation_inequality_check(&sys, &traj, &tol()).unwrap());
    }
}
