//! Seeded random port-Hamiltonian systems and brute-force oracles.

use nalgebra::{linalg::QR, DMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block_diag, classify_definiteness, complex_singular_values, sym, Mat, ToleranceConfig};
use crate::model::{Feedback, PHSystem};
use crate::synthesis::compress_feedthrough;

/// Structural targets for [`random_ph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Knobs {
    /// `rank E`; `None` means `n`.
    pub rank_e: Option<usize>,
    /// `rank W`; `None` means full rank on the part not fixed by other knobs.
    pub rank_w: Option<usize>,
    /// Adds an undamped, unreachable oscillator (so the stabilizability test fails).
    pub force_axis_modes: bool,
    /// Adds a direction in the common nullspace of `E`, `J`, `R`.
    pub force_singular: bool,
    /// Forces `S ≻ 0`.
    pub s_definite: bool,
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn random_skew(rng: &mut impl Rng, n: usize) -> Mat {
    let a = gaussian(rng, n, n);
    (&a - a.transpose()) * 0.5
}

/// Haar-distributed orthogonal matrix.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Mat {
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    let qr = QR::new(gaussian(rng, n, n));
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Symmetric positive definite matrix with eigenvalues in `[lo, hi]`.
pub fn random_spd(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Mat {
    let q = random_orthogonal(rng, n);
    let d = Mat::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| rng.random_range(lo..=hi)));
    sym(&(&q * d * q.transpose()))
}

fn infeasible(msg: String) -> Error {
    Error::InfeasibleKnobs(msg)
}

/// Seeded random pH descriptor system.
pub fn random_ph(n: usize, m: usize, seed: u64, knobs: &Knobs) -> Result<PHSystem> {
    let axis = if knobs.force_axis_modes { 2 } else { 0 };
    let sing = usize::from(knobs.force_singular);
    if n < axis + sing {
        return Err(infeasible(format!(
            "n = {n} cannot hold {axis} oscillator states and {sing} singular direction(s)"
        )));
    }
    let core = n - axis - sing;
    let rank_e = knobs.rank_e.unwrap_or(n - sing);
    if rank_e > n - sing || rank_e < axis {
        return Err(infeasible(format!(
            "rank_E = {rank_e} must lie in [{axis}, {}]",
            n - sing
        )));
    }
    let core_rank_e = rank_e - axis;
    let rank_w = knobs.rank_w.unwrap_or(core + m);
    if rank_w > core + m {
        return Err(infeasible(format!(
            "rank_W = {rank_w} exceeds the {} dimensions left by the other knobs",
            core + m
        )));
    }
    if knobs.s_definite && rank_w < m {
        return Err(infeasible(format!("S positive definite needs rank_W ≥ m = {m}, got {rank_w}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let qe = random_orthogonal(&mut rng, core);
    let mut lam = nalgebra::DVector::zeros(core);
    for i in 0..core_rank_e {
        lam[i] = rng.random_range(0.5..2.0);
    }
    let e_core = sym(&(&qe * Mat::from_diagonal(&lam) * qe.transpose()));
    let j_core = random_skew(&mut rng, core);

    let mut l = gaussian(&mut rng, core + m, rank_w) * 0.7;
    if knobs.s_definite {
        for i in 0..m {
            l[(core + i, i)] += 1.0;
        }
    }
    let w = sym(&(&l * l.transpose()));
    let r_core = w.view((0, 0), (core, core)).into_owned();
    let p_core = w.view((0, core), (core, m)).into_owned();
    let s = w.view((core, core), (m, m)).into_owned();
    let g_core = gaussian(&mut rng, core, m);
    let n_mat = random_skew(&mut rng, m);

    // Append the oscillator (E₂ = I, J₂ = [[0, ω], [−ω, 0]]) and the singular direction.
    let omega: f64 = rng.random_range(0.5..2.0);
    let mut e_osc = Mat::zeros(axis, axis);
    let mut j_osc = Mat::zeros(axis, axis);
    if axis == 2 {
        e_osc.fill_with_identity();
        j_osc[(0, 1)] = omega;
        j_osc[(1, 0)] = -omega;
    }
    let zs = Mat::zeros(sing, sing);
    let e = block_diag(&[&e_core, &e_osc, &zs]);
    let j = block_diag(&[&j_core, &j_osc, &zs]);
    let r = block_diag(&[&r_core, &Mat::zeros(axis, axis), &zs]);
    let mut g = Mat::zeros(n, m);
    g.view_mut((0, 0), (core, m)).copy_from(&g_core);
    if sing == 1 {
        let row = gaussian(&mut rng, 1, m);
        g.view_mut((n - 1, 0), (1, m)).copy_from(&row);
    }
    let mut p = Mat::zeros(n, m);
    p.view_mut((0, 0), (core, m)).copy_from(&p_core);

    let q = random_orthogonal(&mut rng, n);
    let qt = q.transpose();
    let sys = PHSystem::new(
        sym(&(&q * e * &qt)),
        {
            let x = &q * j * &qt;
            (&x - x.transpose()) * 0.5
        },
        sym(&(&q * r * &qt)),
        &q * g,
        &q * p,
        s,
        n_mat,
    )?;
    Ok(sys)
}

/// Rank of `[iωE − A, B]` by complex SVD at each grid point; true iff full row rank everywhere.
pub fn brute_force_rank_on_axis(e: &Mat, a: &Mat, b: &Mat, omega_grid: &[f64]) -> bool {
    brute_force_min_sigma(e, a, b, omega_grid) > brute_force_threshold(e, a, b)
}

/// Relative cutoff used by [`brute_force_rank_on_axis`].
pub const BRUTE_FORCE_RTOL: f64 = 1e-9;

pub fn brute_force_threshold(e: &Mat, a: &Mat, b: &Mat) -> f64 {
    let scale = e.norm().max(a.norm()).max(b.norm()).max(1.0);
    BRUTE_FORCE_RTOL * scale
}

/// Smallest `σ_n([iωE − A, B])` over the grid.
pub fn brute_force_min_sigma(e: &Mat, a: &Mat, b: &Mat, omega_grid: &[f64]) -> f64 {
    let n = e.nrows();
    let k = b.ncols();
    if n == 0 {
        return f64::INFINITY;
    }
    let mut worst = f64::INFINITY;
    for &w in omega_grid {
        let s = Complex64::new(0.0, w);
        let mut m = DMatrix::<Complex64>::zeros(n, n + k);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = s * e[(i, j)] - a[(i, j)];
            }
            for j in 0..k {
                m[(i, n + j)] = Complex64::new(b[(i, j)], 0.0);
            }
        }
        let v = complex_singular_values(&m);
        let sigma_n = v.get(n - 1).copied().unwrap_or(0.0);
        worst = worst.min(sigma_n);
    }
    worst
}

/// Scales `f` by `1, ½, ¼, …` until the closed loop keeps `W̃ ⪰ 0`; falls back to `F = 0`.
pub fn backtrack_admissible(sys: &PHSystem, f: &Mat, tol: &ToleranceConfig) -> Result<Feedback> {
    let mut t = 1.0;
    for _ in 0..40 {
        let fb = Feedback(f * t);
        let w = sys.apply_feedback(&fb)?.dissipation_matrix()?;
        if classify_definiteness(&w, tol)?.is_psd() {
            return Ok(fb);
        }
        t *= 0.5;
    }
    Ok(Feedback::zeros(sys.input_dim(), sys.state_dim()))
}

/// Random feedback keeping the closed loop port-Hamiltonian.
///
/// Mixes three families: unstructured Gaussian directions, damping injection
/// `−κ(G − P)ᵀ`, and feedbacks whose `S`-range part cancels the port coupling
/// while the rest is random. Each is scaled back until admissible.
pub fn random_admissible_feedback(sys: &PHSystem, rng: &mut impl Rng, tol: &ToleranceConfig) -> Result<Feedback> {
    let (n, m) = (sys.state_dim(), sys.input_dim());
    let scale: f64 = 10f64.powf(rng.random_range(-1.0..1.5));
    let f = match rng.random_range(0..3) {
        0 => gaussian(rng, m, n) * scale,
        1 => -sys.b().transpose() * scale + gaussian(rng, m, n) * (0.1 * scale),
        _ => {
            let c = compress_feedthrough(&sys.s, &sys.n, tol)?;
            let d_hat = c.d_hat();
            let bu = sys.b() * &c.u;
            let Some(bd) = d_hat.clone().transpose().lu().solve(&bu.transpose()) else {
                return backtrack_admissible(sys, &(gaussian(rng, m, n) * scale), tol);
            };
            let b_blocks = bd.transpose();
            let b1 = b_blocks.columns(0, c.m1).into_owned();
            let p1 = (&sys.p * &c.u).columns(0, c.m1).into_owned();
            let f1 = -(&b1 * &c.s11 + &p1).transpose() * 2.0;
            let b3 = b_blocks.columns(c.m1 + c.m2, c.m3).into_owned();
            let f3 = -b3.transpose() * scale + gaussian(rng, c.m3, n) * (0.3 * scale);
            let stacked = crate::linalg::vstack(&[&f1, &Mat::zeros(c.m2, n), &f3]);
            match d_hat.lu().solve(&stacked) {
                Some(x) => &c.u * x,
                None => gaussian(rng, m, n) * scale,
            }
        }
    };
    backtrack_admissible(sys, &f, tol)
}

/// `F = −Q Bᵀ + N_B H` with `Q ≻ 0` and `N_B` spanning `𝒩(B)`: every such `F`
/// satisfies `R − ½(BF + FᵀBᵀ) = R + BQBᵀ`.
pub fn random_rank_preserving_feedback(b: &Mat, n: usize, rng: &mut impl Rng, tol: &ToleranceConfig) -> Mat {
    let m = b.ncols();
    let q = random_spd(rng, m, 0.2, 3.0);
    let nb = crate::linalg::nullspace_basis(b, tol);
    let h = gaussian(rng, nb.ncols(), n);
    -q * b.transpose() + nb * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::singular_common_nullspace;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn default_knobs_validate() {
        let sys = random_ph(3, 2, 7, &Knobs::default()).unwrap();
        assert!(sys.validate(&tol()).unwrap().passed);
    }

    #[test]
    fn deterministic_per_seed() {
        let k = Knobs {
            rank_e: Some(2),
            ..Knobs::default()
        };
        assert_eq!(random_ph(4, 2, 11, &k).unwrap(), random_ph(4, 2, 11, &k).unwrap());
        assert_ne!(random_ph(4, 2, 11, &k).unwrap(), random_ph(4, 2, 12, &k).unwrap());
    }

    #[test]
    fn singular_knob() {
        let k = Knobs {
            force_singular: true,
            ..Knobs::default()
        };
        let sys = random_ph(4, 2, 3, &k).unwrap();
        assert!(singular_common_nullspace(&sys, &tol()).unwrap());
    }

    #[test]
    fn s_definite_knob() {
        let k = Knobs {
            s_definite: true,
            rank_w: Some(3),
            ..Knobs::default()
        };
        let sys = random_ph(3, 2, 5, &k).unwrap();
        assert!(classify_definiteness(&sys.s, &tol()).unwrap().is_pd());
    }

    #[test]
    fn infeasible_knobs() {
        let k = Knobs {
            rank_e: Some(5),
            ..Knobs::default()
        };
        assert!(matches!(random_ph(3, 1, 0, &k), Err(Error::InfeasibleKnobs(_))));
        let k = Knobs {
            force_axis_modes: true,
            force_singular: true,
            ..Knobs::default()
        };
        assert!(matches!(random_ph(2, 1, 0, &k), Err(Error::InfeasibleKnobs(_))));
        let k = Knobs {
            s_definite: true,
            rank_w: Some(1),
            ..Knobs::default()
        };
        assert!(matches!(random_ph(3, 2, 0, &k), Err(Error::InfeasibleKnobs(_))));
    }

    #[test]
    fn brute_force_examples() {
        let one = Mat::from_element(1, 1, 1.0);
        let zero = Mat::zeros(1, 1);
        let grid = [-1.0, 0.0, 1.0];
        assert!(brute_force_rank_on_axis(&one, &zero, &one, &grid));
        assert!(!brute_force_rank_on_axis(&one, &zero, &Mat::zeros(1, 0), &grid));
        assert!(brute_force_rank_on_axis(&one, &(-&one), &Mat::zeros(1, 0), &grid));
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = random_orthogonal(&mut rng, 5);
        assert!((q.transpose() * &q - Mat::identity(5, 5)).norm() < 1e-13);
    }
}
