//! Tolerance-aware dense linear algebra.
//!
//! Every rank, nullspace and definiteness decision in the crate goes through
//! this module so that a single [`ToleranceConfig`] governs all of them.
//! Matrices with zero rows or columns are ordinary values here: the
//! synthesis routines produce empty blocks on perfectly valid inputs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real dense matrix used for every coefficient block.
pub type Mat = DMatrix<f64>;
/// Real dense column vector.
pub type Vector = DVector<f64>;

/// Thresholds used for all finite-precision decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative singular-value cutoff: `σᵢ > rank_rtol · σ_max · max(rows, cols)` counts.
    pub rank_rtol: f64,
    /// Eigenvalue band for semidefiniteness, relative to the spectral norm.
    pub psd_tol: f64,
    /// `|Re λ| ≤ axis_tol` classifies an eigenvalue as lying on the imaginary axis.
    pub axis_tol: f64,
    /// Required `-Re λ` for an asymptotically stable verdict.
    pub stability_margin: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rtol: 1e-10,
            psd_tol: 1e-10,
            axis_tol: 1e-8,
            stability_margin: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.rank_rtol,
            self.psd_tol,
            self.axis_tol,
            self.stability_margin,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "tolerances must be positive and finite: {self:?}"
            )))
        }
    }

    /// Absolute rank threshold for a `rows × cols` matrix of spectral norm `scale`.
    pub fn rank_threshold(&self, rows: usize, cols: usize, scale: f64) -> f64 {
        self.rank_rtol * scale * rows.max(cols) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
    NegativeSemidefinite,
    NegativeDefinite,
}

/// Definiteness verdict together with the extreme eigenvalues it was derived from.
///
/// An empty (0×0) matrix is vacuously positive definite with both extremes reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessClass {
    pub class: Definiteness,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl DefinitenessClass {
    pub fn is_psd(&self) -> bool {
        matches!(
            self.class,
            Definiteness::PositiveDefinite | Definiteness::PositiveSemidefinite
        )
    }

    pub fn is_pd(&self) -> bool {
        self.class == Definiteness::PositiveDefinite
    }
}

/// Singular values (descending, zero-padded to `cols`) with a full set of right singular vectors.
#[derive(Debug, Clone)]
pub struct RightSvd {
    pub sigma: Vec<f64>,
    pub v: Mat,
}

fn to_faer(m: &Mat) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigen-decomposition of the Gram matrix `MᵀM`, used only if the SVD iteration fails.
fn gram_svd(m: &Mat) -> (Vec<f64>, Mat) {
    let (vals, vecs) = symmetric_eigen(&(m.transpose() * m));
    let q = m.ncols();
    let sigma = vals.iter().rev().map(|l| l.max(0.0).sqrt()).collect();
    let v = Mat::from_fn(q, q, |i, j| vecs[(i, q - 1 - j)]);
    (sigma, v)
}

/// SVD exposing a complete orthonormal basis of the column space of `Mᵀ` plus its complement.
pub fn right_svd(m: &Mat) -> RightSvd {
    let (p, q) = m.shape();
    if q == 0 {
        return RightSvd {
            sigma: Vec::new(),
            v: Mat::zeros(0, 0),
        };
    }
    if p == 0 || m.iter().all(|x| *x == 0.0) {
        return RightSvd {
            sigma: vec![0.0; q],
            v: Mat::identity(q, q),
        };
    }
    match to_faer(m).svd() {
        Ok(svd) => {
            let s = svd.S().column_vector();
            let mut sigma: Vec<f64> = (0..s.nrows()).map(|i| s[i]).collect();
            sigma.resize(q, 0.0);
            RightSvd {
                sigma,
                v: from_faer(svd.V()),
            }
        }
        Err(_) => {
            let (sigma, v) = gram_svd(m);
            RightSvd { sigma, v }
        }
    }
}

/// Singular values in descending order (length `min(rows, cols)`).
pub fn singular_values(m: &Mat) -> Vec<f64> {
    let (p, q) = m.shape();
    if p == 0 || q == 0 {
        return Vec::new();
    }
    match to_faer(m).singular_values() {
        Ok(s) => s,
        Err(_) => {
            let mut s = gram_svd(m).0;
            s.truncate(p.min(q));
            s
        }
    }
}

/// Fallback for [`complex_singular_values`]: the Hermitian Gram matrix `MᴴM`
/// embedded as a real symmetric matrix of twice the size, whose eigenvalues
/// come in equal pairs.
fn complex_gram_singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let (p, q) = m.shape();
    let g = m.adjoint() * m;
    let big = Mat::from_fn(2 * q, 2 * q, |i, j| {
        let z = g[(i % q, j % q)];
        match (i < q, j < q) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let vals = symmetric_eigen(&big).0;
    let mut s: Vec<f64> = vals.iter().rev().step_by(2).map(|l| l.max(0.0).sqrt()).collect();
    s.truncate(p.min(q));
    s
}

/// Singular values of a complex matrix, descending.
pub fn complex_singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let (p, q) = m.shape();
    if p == 0 || q == 0 {
        return Vec::new();
    }
    let fm = faer::Mat::<faer::c64>::from_fn(p, q, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    match fm.singular_values() {
        Ok(s) => s,
        Err(_) => complex_gram_singular_values(m),
    }
}

pub fn spectral_norm(m: &Mat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

fn relative_threshold(m: &Mat, tol: &ToleranceConfig) -> f64 {
    let (p, q) = m.shape();
    tol.rank_threshold(p, q, spectral_norm(m))
}

fn count_above(sigma: &[f64], threshold: f64) -> usize {
    sigma.iter().filter(|s| **s > threshold).count()
}

pub fn numerical_rank(m: &Mat, tol: &ToleranceConfig) -> usize {
    let sigma = singular_values(m);
    let thr = tol.rank_threshold(m.nrows(), m.ncols(), sigma.first().copied().unwrap_or(0.0));
    count_above(&sigma, thr)
}

/// Rank against an absolute threshold, refusing when a singular value sits
/// within a factor of ten of the cutoff.
pub fn checked_rank(sigma: &[f64], threshold: f64, stage: &str) -> Result<usize> {
    if threshold > 0.0 {
        if let Some(&s) = sigma
            .iter()
            .find(|s| **s >= threshold / 10.0 && **s <= threshold * 10.0)
        {
            return Err(Error::ToleranceBreakdown {
                stage: stage.to_string(),
                sigma: s,
                threshold,
            });
        }
    }
    Ok(count_above(sigma, threshold))
}

/// Orthonormal basis of the numerical right nullspace (`cols − rank` columns).
pub fn nullspace_basis(m: &Mat, tol: &ToleranceConfig) -> Mat {
    let q = m.ncols();
    let thr = relative_threshold(m, tol);
    let svd = right_svd(m);
    let r = count_above(&svd.sigma, thr);
    svd.v.columns(r, q - r).into_owned()
}

/// Orthonormal basis of the numerical column space (`rank` columns).
pub fn range_basis(m: &Mat, tol: &ToleranceConfig) -> Mat {
    let thr = relative_threshold(m, tol);
    let svd = right_svd(&m.transpose());
    let r = count_above(&svd.sigma, thr);
    svd.v.columns(0, r).into_owned()
}

/// Orthonormal basis of the numerical left nullspace, as columns.
pub fn left_nullspace_basis(m: &Mat, tol: &ToleranceConfig) -> Mat {
    nullspace_basis(&m.transpose(), tol)
}

/// Orthonormal basis of the orthogonal complement of `span(q)` for a column-orthonormal `q`.
pub fn orthogonal_complement(q: &Mat) -> Mat {
    let n = q.nrows();
    let k = q.ncols();
    if k == 0 {
        return Mat::identity(n, n);
    }
    let svd = right_svd(&q.transpose());
    // q has orthonormal columns, so exactly k singular values are ~1.
    let r = count_above(&svd.sigma, 0.5).min(k);
    svd.v.columns(r, n - r).into_owned()
}

pub fn pseudo_inverse(m: &Mat, tol: &ToleranceConfig) -> Mat {
    let (p, q) = m.shape();
    if p == 0 || q == 0 {
        return Mat::zeros(q, p);
    }
    let svd = right_svd(m);
    let thr = tol.rank_threshold(p, q, svd.sigma[0]);
    let mut out = Mat::zeros(q, p);
    for (i, s) in svd.sigma.iter().enumerate().take_while(|(_, s)| **s > thr) {
        let v = svd.v.column(i);
        let u = m * v / *s;
        out += v * u.transpose() / *s;
    }
    out
}

pub fn sym(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

fn ensure_square(m: &Mat) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Eigenvalues (ascending) and eigenvectors of the symmetric part of `m`.
pub fn symmetric_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(sym(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub fn classify_definiteness(m: &Mat, tol: &ToleranceConfig) -> Result<DefinitenessClass> {
    ensure_square(m)?;
    let (vals, _) = symmetric_eigen(m);
    let (Some(&lo), Some(&hi)) = (vals.first(), vals.last()) else {
        return Ok(DefinitenessClass {
            class: Definiteness::PositiveDefinite,
            min_eigenvalue: 0.0,
            max_eigenvalue: 0.0,
        });
    };
    let band = tol.psd_tol * lo.abs().max(hi.abs());
    let class = if lo > band {
        Definiteness::PositiveDefinite
    } else if lo >= -band {
        Definiteness::PositiveSemidefinite
    } else if hi < -band {
        Definiteness::NegativeDefinite
    } else if hi <= band {
        Definiteness::NegativeSemidefinite
    } else {
        Definiteness::Indefinite
    };
    Ok(DefinitenessClass {
        class,
        min_eigenvalue: lo,
        max_eigenvalue: hi,
    })
}

/// Symmetric PSD square root with eigenvalues clipped at zero.
pub fn psd_sqrt(m: &Mat, tol: &ToleranceConfig) -> Result<Mat> {
    ensure_square(m)?;
    let scale = spectral_norm(m);
    let asym = (m - m.transpose()).norm();
    if asym > tol.psd_tol * scale.max(1.0) {
        return Err(Error::NotSymmetric { violation: asym });
    }
    let (vals, vecs) = symmetric_eigen(m);
    if let Some(&lo) = vals.first() {
        if lo < -tol.psd_tol * scale {
            return Err(Error::NotPsd { min_eigenvalue: lo });
        }
    }
    let roots = Vector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0).sqrt()));
    let root = &vecs * Mat::from_diagonal(&roots) * vecs.transpose();
    Ok(sym(&root))
}

/// Splits `D` into its symmetric part `(D+Dᵀ)/2` and skew part `(D−Dᵀ)/2`.
pub fn sym_skew_split(d: &Mat) -> Result<(Mat, Mat)> {
    ensure_square(d)?;
    let dt = d.transpose();
    Ok(((d + &dt) * 0.5, (d - &dt) * 0.5))
}

pub fn hstack(blocks: &[&Mat]) -> Mat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, c), (rows, b.ncols())).copy_from(*b);
        c += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&Mat]) -> Mat {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(*b);
        r += b.nrows();
    }
    out
}

pub fn block_diag(blocks: &[&Mat]) -> Mat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Copy of the `rows × cols` block starting at `(r0, c0)`.
pub fn block(m: &Mat, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
    m.view((r0, c0), (rows, cols)).into_owned()
}

/// Inverse of a square matrix via LU; `None` when numerically singular.
pub fn inverse(m: &Mat) -> Option<Mat> {
    if m.nrows() == 0 {
        return Some(Mat::zeros(0, 0));
    }
    m.clone().try_inverse()
}
