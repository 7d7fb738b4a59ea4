//! Staircase reduction of rectangular pencils `sE − A`.
//!
//! Two deflation passes with orthogonal row and column compressions:
//! the first peels off right minimal indices and the infinite structure,
//! the second (on the transposed remainder) peels off left minimal indices.
//! What is left is a square pencil with invertible `E` carrying exactly the
//! finite eigenvalues.

use nalgebra::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{checked_rank, right_svd, spectral_norm, Mat, ToleranceConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerSummary {
    pub rows: usize,
    pub cols: usize,
    pub normal_rank: usize,
    pub finite_eigenvalues: Vec<Complex64>,
    /// One entry per Jordan block at infinity, largest first.
    pub infinite_block_sizes: Vec<usize>,
    /// Column minimal indices (ε blocks), ascending.
    pub right_minimal_indices: Vec<usize>,
    /// Row minimal indices (η blocks), ascending.
    pub left_minimal_indices: Vec<usize>,
}

impl KroneckerSummary {
    pub fn is_regular(&self) -> bool {
        self.rows == self.cols && self.right_minimal_indices.is_empty() && self.left_minimal_indices.is_empty()
    }

    /// Size of the largest infinite Jordan block; `None` for singular pencils.
    pub fn index(&self) -> Option<usize> {
        self.is_regular()
            .then(|| self.infinite_block_sizes.first().copied().unwrap_or(0))
    }

    /// Row and column counts implied by the block structure.
    pub fn accounted_dimensions(&self) -> (usize, usize) {
        let inf: usize = self.infinite_block_sizes.iter().sum();
        let fin = self.finite_eigenvalues.len();
        let eps_rows: usize = self.right_minimal_indices.iter().sum();
        let eps_cols: usize = self.right_minimal_indices.iter().map(|e| e + 1).sum();
        let eta_rows: usize = self.left_minimal_indices.iter().map(|e| e + 1).sum();
        let eta_cols: usize = self.left_minimal_indices.iter().sum();
        (inf + fin + eps_rows + eta_rows, inf + fin + eps_cols + eta_cols)
    }
}

/// Full staircase output including the deflated regular part.
#[derive(Debug, Clone)]
pub struct Staircase {
    pub summary: KroneckerSummary,
    /// `E` block of the finite regular part (square, invertible).
    pub regular_e: Mat,
    pub regular_a: Mat,
}

struct Deflation {
    /// `(ν_i, ρ_i)`: nullity of the E-block and rank of the A-columns over that nullspace.
    steps: Vec<(usize, usize)>,
    e: Mat,
    a: Mat,
}

fn deflate(mut e: Mat, mut a: Mat, thr_e: f64, thr_a: f64, pass: &str) -> Result<Deflation> {
    let mut steps = Vec::new();
    loop {
        let (p, q) = e.shape();
        if q == 0 {
            break;
        }
        let col = right_svd(&e);
        let rank_e = checked_rank(&col.sigma, thr_e, &format!("{pass} step {}: E column compression", steps.len() + 1))?;
        let nu = q - rank_e;
        if nu == 0 {
            break;
        }
        let v_range = col.v.columns(0, rank_e).into_owned();
        let a_null = &a * col.v.columns(rank_e, nu);
        let row = right_svd(&a_null.transpose());
        let rho = checked_rank(&row.sigma, thr_a, &format!("{pass} step {}: A row compression", steps.len() + 1))?;
        let u_rest = row.v.columns(rho, p - rho).transpose();
        e = &u_rest * &e * &v_range;
        a = &u_rest * &a * &v_range;
        steps.push((nu, rho));
    }
    Ok(Deflation { steps, e, a })
}

/// Splits a deflation sequence into (minimal indices, infinite block sizes).
fn decode(steps: &[(usize, usize)], stage: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut minimal = Vec::new();
    let mut infinite = Vec::new();
    for (i, &(nu, rho)) in steps.iter().enumerate() {
        let next_nu = steps.get(i + 1).map_or(0, |s| s.0);
        if rho > nu || next_nu > rho {
            return Err(Error::ToleranceBreakdown {
                stage: format!("{stage}: inconsistent staircase widths {steps:?}"),
                sigma: f64::NAN,
                threshold: f64::NAN,
            });
        }
        minimal.extend(std::iter::repeat_n(i, nu - rho));
        infinite.extend(std::iter::repeat_n(i + 1, rho - next_nu));
    }
    Ok((minimal, infinite))
}

fn eigenvalues_of(m: &Mat) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalBreakdown("Schur iteration did not converge".into()))?;
    let mut eig: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(eig)
}

/// Staircase reduction returning the deflated regular part alongside the summary.
pub fn staircase(a: &Mat, e: &Mat, tol: &ToleranceConfig) -> Result<Staircase> {
    if a.shape() != e.shape() {
        return Err(Error::ShapeMismatch(format!(
            "pencil blocks differ: A is {:?}, E is {:?}",
            a.shape(),
            e.shape()
        )));
    }
    let (rows, cols) = e.shape();
    // Every stage is judged against the scale of the original pencil, never the sub-block.
    let thr_e = tol.rank_threshold(rows, cols, spectral_norm(e));
    let thr_a = tol.rank_threshold(rows, cols, spectral_norm(a));

    let first = deflate(e.clone(), a.clone(), thr_e, thr_a, "right/infinite pass")?;
    let (right, mut infinite) = decode(&first.steps, "right/infinite pass")?;

    let second = deflate(
        first.e.transpose(),
        first.a.transpose(),
        thr_e,
        thr_a,
        "left pass",
    )?;
    let (left, stray_infinite) = decode(&second.steps, "left pass")?;
    infinite.extend(stray_infinite);
    infinite.sort_unstable_by(|x, y| y.cmp(x));

    let regular_e = second.e.transpose();
    let regular_a = second.a.transpose();
    if !regular_e.is_square() {
        return Err(Error::ToleranceBreakdown {
            stage: format!("regular part extraction left a {:?} remainder", regular_e.shape()),
            sigma: f64::NAN,
            threshold: thr_e,
        });
    }
    let e_inv = crate::linalg::inverse(&regular_e)
        .ok_or_else(|| Error::NumericalBreakdown("regular part has singular E".into()))?;
    let finite_eigenvalues = eigenvalues_of(&(e_inv * &regular_a))?;

    let summary = KroneckerSummary {
        rows,
        cols,
        normal_rank: cols - right.len(),
        finite_eigenvalues,
        infinite_block_sizes: infinite,
        right_minimal_indices: right,
        left_minimal_indices: left,
    };
    Ok(Staircase {
        summary,
        regular_e,
        regular_a,
    })
}

/// Kronecker structure of `sE − A` (rectangular allowed).
pub fn kronecker_staircase(a: &Mat, e: &Mat, tol: &ToleranceConfig) -> Result<KroneckerSummary> {
    staircase(a, e, tol).map(|s| s.summary)
}
