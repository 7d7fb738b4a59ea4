//! Implicit Euler integration of index-one closed loops.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{left_nullspace_basis, pseudo_inverse, Mat, ToleranceConfig, Vector};
use crate::model::{Feedback, PHSystem, Trajectory};
use crate::pencil::pencil_report;

/// Piecewise-constant input: `values[i]` holds on `[breaks[i], breaks[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSignal {
    pub breaks: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl InputSignal {
    pub fn constant(v: &[f64]) -> Self {
        Self {
            breaks: vec![0.0],
            values: vec![v.to_vec()],
        }
    }

    pub fn zero(m: usize) -> Self {
        Self::constant(&vec![0.0; m])
    }

    pub fn piecewise(breaks: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != values.len() {
            return Err(Error::Malformed("input needs one value per breakpoint".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Malformed("input breakpoints must increase".into()));
        }
        let m = values[0].len();
        if values.iter().any(|v| v.len() != m) {
            return Err(Error::Malformed("input values have differing lengths".into()));
        }
        Ok(Self { breaks, values })
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn at(&self, t: f64) -> Vector {
        let i = self.breaks.partition_point(|b| *b <= t).saturating_sub(1);
        Vector::from_column_slice(&self.values[i])
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub closed_loop: PHSystem,
    pub trajectory: Trajectory,
    /// Initial state actually used after projection onto the constraints.
    pub x0: Vector,
    /// `‖x̂₀ − x₀‖`; zero when `x₀` was already consistent.
    pub projection_distance: f64,
}

fn require_index_one(sys: &PHSystem, tol: &ToleranceConfig) -> Result<()> {
    let rep = pencil_report(&sys.e, &sys.a(), tol)?;
    if rep.is_index_at_most_one() {
        Ok(())
    } else {
        Err(Error::NotIndexOne)
    }
}

/// Closest `x̂₀` to `x₀` satisfying the algebraic constraints `Zᵀ(Ax + Bv) = 0`,
/// `Z` spanning the left nullspace of `E`.
pub fn consistent_projection_with_input(
    closed: &PHSystem,
    x0: &Vector,
    v0: &Vector,
    tol: &ToleranceConfig,
) -> Result<Vector> {
    closed.check_shapes()?;
    if x0.len() != closed.state_dim() || v0.len() != closed.input_dim() {
        return Err(Error::ShapeMismatch("initial state or input has the wrong length".into()));
    }
    require_index_one(closed, tol)?;
    let z = left_nullspace_basis(&closed.e, tol);
    if z.ncols() == 0 {
        return Ok(x0.clone());
    }
    let c = z.transpose() * closed.a();
    let d = z.transpose() * closed.b() * v0;
    let residual = &c * x0 + d;
    let scale = c.norm().max(1.0) * x0.norm().max(1.0);
    if residual.norm() <= 1e-14 * scale {
        return Ok(x0.clone());
    }
    Ok(x0 - pseudo_inverse(&c, tol) * residual)
}

/// [`consistent_projection_with_input`] with `v = 0`.
pub fn consistent_projection(closed: &PHSystem, x0: &Vector, tol: &ToleranceConfig) -> Result<Vector> {
    consistent_projection_with_input(closed, x0, &Vector::zeros(closed.input_dim()), tol)
}

/// Integrates `E ẋ = (J̃ − R̃)x + (G̃ − P̃)v` with implicit Euler on the grid `0, dt, …, T`.
pub fn simulate_closed_loop(
    sys: &PHSystem,
    f: &Feedback,
    x0: &Vector,
    input: &InputSignal,
    t_end: f64,
    dt: f64,
    tol: &ToleranceConfig,
) -> Result<Simulation> {
    if !(dt.is_finite() && dt > 0.0 && t_end.is_finite() && t_end >= dt) {
        return Err(Error::Malformed(format!("need 0 < dt ≤ T, got dt = {dt}, T = {t_end}")));
    }
    let closed = sys.apply_feedback(f)?;
    if input.dim() != closed.input_dim() {
        return Err(Error::ShapeMismatch(format!(
            "input has {} channels, system has {}",
            input.dim(),
            closed.input_dim()
        )));
    }
    let x_start = consistent_projection_with_input(&closed, x0, &input.at(0.0), tol)?;
    let projection_distance = (&x_start - x0).norm();

    let a = closed.a();
    let b = closed.b();
    let step: Mat = &closed.e - &a * dt;
    let lu = step.clone().lu();
    let singular = lu.u().diagonal().iter().any(|d| d.abs() <= f64::EPSILON * step.norm().max(1.0));
    if singular {
        return Err(Error::SolveFailure { t: 0.0 });
    }

    let steps = (t_end / dt).round() as usize;
    let mut traj = Trajectory {
        t: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        y: Vec::with_capacity(steps + 1),
    };
    let mut x = x_start.clone();
    for k in 0..=steps {
        let t = k as f64 * dt;
        let v = input.at(t);
        traj.y.push(closed.output(&x, &v));
        traj.t.push(t);
        traj.x.push(x.clone());
        traj.u.push(v.clone());
        if k == steps {
            break;
        }
        let rhs = &closed.e * &x + &b * &v * dt;
        x = lu.solve(&rhs).ok_or(Error::SolveFailure { t })?;
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::SolveFailure { t: t + dt });
        }
    }
    Ok(Simulation {
        closed_loop: closed,
        trajectory: traj,
        x0: x_start,
        projection_distance,
    })
}

/// Writes `t,x1..xn,u1..um,y1..ym,H`, one row per grid point.
pub fn write_trajectory_csv<W: Write>(sys: &PHSystem, traj: &Trajectory, out: W) -> Result<()> {
    let (n, m) = (sys.state_dim(), sys.input_dim());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=m).map(|i| format!("u{i}")));
    header.extend((1..=m).map(|i| format!("y{i}")));
    header.push("H".into());
    w.write_record(&header)?;
    for k in 0..traj.len() {
        let mut row = vec![traj.t[k]];
        row.extend(traj.x[k].iter());
        row.extend(traj.u[k].iter());
        row.extend(traj.y[k].iter());
        row.push(sys.hamiltonian(&traj.x[k])?);
        w.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}
