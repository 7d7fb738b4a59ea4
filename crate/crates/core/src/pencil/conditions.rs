//! Rank conditions deciding when structure-preserving feedback exists.
//!
//! "For all s on the imaginary axis" conditions are decided exactly: the rank
//! of `[sE − A, B]` can only drop at finite eigenvalues of the rectangular
//! pencil, so it suffices to locate those and measure their distance to the axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::staircase::kronecker_staircase;
use crate::error::{Error, Result};
use crate::linalg::{
    classify_definiteness, hstack, inverse, nullspace_basis, numerical_rank, pseudo_inverse, range_basis,
    spectral_norm, sym, vstack, Mat, ToleranceConfig,
};
use crate::model::PHSystem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRankVerdict {
    pub holds: bool,
    /// Points of the imaginary axis (within `axis_tol`) where the rank drops.
    /// A normal-rank deficient pencil drops everywhere; `s = 0` is reported.
    pub witnesses: Vec<Complex64>,
    pub normal_rank_deficient: bool,
    pub axis_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankVerdict {
    pub holds: bool,
    pub rank: usize,
    pub required: usize,
    pub rank_rtol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Con2Verdict {
    pub holds: bool,
    pub s_positive_definite: bool,
    pub s_min_eigenvalue: f64,
    /// Smallest eigenvalue of the passivity matrix; absent when `S + N` is singular.
    pub condition_min_eigenvalue: Option<f64>,
    pub psd_tol: f64,
}

/// Decides `rank(sE − A) = rows` for every `s` on the imaginary axis, for rectangular `E`, `A`.
pub fn axis_full_row_rank(e: &Mat, a: &Mat, tol: &ToleranceConfig) -> Result<AxisRankVerdict> {
    let k = kronecker_staircase(a, e, tol)?;
    if k.normal_rank < e.nrows() {
        return Ok(AxisRankVerdict {
            holds: false,
            witnesses: vec![Complex64::new(0.0, 0.0)],
            normal_rank_deficient: true,
            axis_tol: tol.axis_tol,
        });
    }
    let witnesses: Vec<Complex64> = k
        .finite_eigenvalues
        .into_iter()
        .filter(|l| l.re.abs() <= tol.axis_tol)
        .collect();
    Ok(AxisRankVerdict {
        holds: witnesses.is_empty(),
        witnesses,
        normal_rank_deficient: false,
        axis_tol: tol.axis_tol,
    })
}

/// `rank [sE − A, B] = n` for all `s ∈ iℝ`.
pub fn imaginary_axis_full_rank(e: &Mat, a: &Mat, b: &Mat, tol: &ToleranceConfig) -> Result<AxisRankVerdict> {
    let n = e.nrows();
    if !e.is_square() || a.shape() != e.shape() || b.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "axis rank test needs E, A n×n and B n×k; got {:?}, {:?}, {:?}",
            e.shape(),
            a.shape(),
            b.shape()
        )));
    }
    let e_aug = hstack(&[e, &Mat::zeros(n, b.ncols())]);
    let a_aug = hstack(&[a, &(-b)]);
    axis_full_row_rank(&e_aug, &a_aug, tol)
}

/// Whether `E`, `J`, `R` share a nullspace direction, which for pH data is
/// equivalent to singularity of `sE − (J − R)`.
pub fn singular_common_nullspace(sys: &PHSystem, tol: &ToleranceConfig) -> Result<bool> {
    sys.check_shapes()?;
    let stacked = vstack(&[&sys.e, &sys.j, &sys.r]);
    Ok(numerical_rank(&stacked, tol) < sys.state_dim())
}

fn check_lemma1_blocks(r: &Mat, n1: usize, tol: &ToleranceConfig) -> Result<()> {
    let n = r.nrows();
    if n1 > n {
        return Err(Error::HypothesisViolated(format!("block size {n1} exceeds dimension {n}")));
    }
    let n2 = n - n1;
    let off = r.view((0, n1), (n, n2)).norm() + r.view((n1, 0), (n2, n1)).norm();
    if off > tol.psd_tol * spectral_norm(r).max(1.0) {
        return Err(Error::HypothesisViolated(format!(
            "R is not of the form diag(R11, 0): trailing blocks have norm {off:.3e}"
        )));
    }
    let r11 = r.view((0, 0), (n1, n1)).into_owned();
    if !classify_definiteness(&r11, tol)?.is_pd() {
        return Err(Error::HypothesisViolated("R11 is not positive definite".into()));
    }
    Ok(())
}

/// Stability test for `R = diag(R₁₁, 0)`, `R₁₁ ≻ 0`: the pencil's finite
/// eigenvalues lie in the open left half-plane iff
/// `rank [sE₁₂ᵀ + J₁₂ᵀ, sE₂₂ − J₂₂] = n₂` on the imaginary axis.
pub fn lemma1_stability_condition(e: &Mat, j: &Mat, r: &Mat, n1: usize, tol: &ToleranceConfig) -> Result<bool> {
    check_lemma1_blocks(r, n1, tol)?;
    let n = e.nrows();
    let n2 = n - n1;
    if n2 == 0 {
        return Ok(true);
    }
    // Row block 2 of E is [E₁₂ᵀ, E₂₂]; of J it is [−J₁₂ᵀ, J₂₂].
    let e_rows = e.view((n1, 0), (n2, n)).into_owned();
    let j_rows = j.view((n1, 0), (n2, n)).into_owned();
    Ok(axis_full_row_rank(&e_rows, &j_rows, tol)?.holds)
}

/// `J − R` nonsingular iff `rank [−J₁₂ᵀ, J₂₂] = n₂` under the same block hypothesis.
pub fn lemma1_nonsingularity_condition(j: &Mat, r: &Mat, n1: usize, tol: &ToleranceConfig) -> Result<bool> {
    check_lemma1_blocks(r, n1, tol)?;
    let n = j.nrows();
    let n2 = n - n1;
    Ok(numerical_rank(&j.view((n1, 0), (n2, n)).into_owned(), tol) == n2)
}

/// `B₁ = (G − P)(S + N)⁺ 𝓡(S)` and `B₃ = (G − P) 𝒩(S + N)`.
pub fn feedthrough_input_blocks(sys: &PHSystem, tol: &ToleranceConfig) -> Result<(Mat, Mat)> {
    sys.check_shapes()?;
    let b = sys.b();
    let d = sys.feedthrough();
    let b1 = &b * pseudo_inverse(&d, tol) * range_basis(&sys.s, tol);
    let b3 = &b * nullspace_basis(&d, tol);
    Ok((b1, b3))
}

/// `rank [sE − (J − R), B₁, B₃] = n` on the imaginary axis.
pub fn condition_con1(sys: &PHSystem, tol: &ToleranceConfig) -> Result<AxisRankVerdict> {
    let (b1, b3) = feedthrough_input_blocks(sys, tol)?;
    imaginary_axis_full_rank(&sys.e, &sys.a(), &hstack(&[&b1, &b3]), tol)
}

/// `rank [E, (J − R)𝒩(E), B₁, B₃] = n`.
pub fn condition_con1_2(sys: &PHSystem, tol: &ToleranceConfig) -> Result<RankVerdict> {
    let (b1, b3) = feedthrough_input_blocks(sys, tol)?;
    condition_index_con(&sys.e, &sys.a(), &hstack(&[&b1, &b3]), tol)
}

/// `rank [E, A𝒩(E), B] = n`.
pub fn condition_index_con(e: &Mat, a: &Mat, b: &Mat, tol: &ToleranceConfig) -> Result<RankVerdict> {
    let n = e.nrows();
    if !e.is_square() || a.shape() != e.shape() || b.nrows() != n {
        return Err(Error::ShapeMismatch("index condition needs E, A n×n and B n×k".into()));
    }
    let a_null = a * nullspace_basis(e, tol);
    let rank = numerical_rank(&hstack(&[e, &a_null, b]), tol);
    Ok(RankVerdict {
        holds: rank == n,
        rank,
        required: n,
        rank_rtol: tol.rank_rtol,
    })
}

/// Strict-passivity existence test: `S ≻ 0` and
/// `R + ½(G − P)(S + N)⁻¹(G + P)ᵀ + ½(G + P)(S + N)⁻ᵀ(G − P)ᵀ ≻ 0`.
pub fn condition_con2(sys: &PHSystem, tol: &ToleranceConfig) -> Result<Con2Verdict> {
    sys.check_shapes()?;
    let s_class = classify_definiteness(&sys.s, tol)?;
    let mut verdict = Con2Verdict {
        holds: false,
        s_positive_definite: s_class.is_pd(),
        s_min_eigenvalue: s_class.min_eigenvalue,
        condition_min_eigenvalue: None,
        psd_tol: tol.psd_tol,
    };
    if !s_class.is_pd() {
        return Ok(verdict);
    }
    let Some(d_inv) = inverse(&sys.feedthrough()) else {
        return Ok(verdict);
    };
    let bm = sys.b();
    let gp = &sys.g + &sys.p;
    let half = (&bm * &d_inv * gp.transpose()) * 0.5;
    let matrix = sym(&(&sys.r + &half + half.transpose()));
    let class = classify_definiteness(&matrix, tol)?;
    verdict.condition_min_eigenvalue = Some(class.min_eigenvalue);
    verdict.holds = class.is_pd();
    Ok(verdict)
}
