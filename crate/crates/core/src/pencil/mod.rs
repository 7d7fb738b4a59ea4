//! Structural analysis of matrix pencils `sE − A`.

mod conditions;
mod staircase;

pub use conditions::{
    axis_full_row_rank, condition_con1, condition_con1_2, condition_con2, condition_index_con,
    feedthrough_input_blocks, imaginary_axis_full_rank, lemma1_nonsingularity_condition,
    lemma1_stability_condition, singular_common_nullspace, AxisRankVerdict, Con2Verdict, RankVerdict,
};
pub use staircase::{kronecker_staircase, staircase, KroneckerSummary, Staircase};


use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, ToleranceConfig};

/// Relative distance below which computed eigenvalues are counted as one multiple root.
pub const EIGEN_CLUSTER_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityClass {
    AsymptoticallyStable,
    StableNotAsymptotic,
    Unstable,
    Singular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilReport {
    pub regular: bool,
    /// Largest infinite Jordan block; absent for singular pencils.
    pub index: Option<usize>,
    pub finite_eigenvalues: Vec<Complex64>,
    pub rank_e: usize,
    pub stability_class: StabilityClass,
    /// `max Re λ` over the finite spectrum; absent when it is empty.
    pub spectral_abscissa: Option<f64>,
    /// `min |Re λ|` over the finite spectrum; absent when it is empty.
    pub axis_distance: Option<f64>,
    pub kronecker: KroneckerSummary,
    pub tolerances: ToleranceConfig,
}

impl PencilReport {
    pub fn is_index_at_most_one(&self) -> bool {
        self.regular && self.index.is_some_and(|i| i <= 1)
    }
}

/// Groups eigenvalues lying within [`EIGEN_CLUSTER_RTOL`] of each other.
fn clusters(eigs: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &l in eigs {
        let hit = groups.iter_mut().find(|g| {
            let c = g[0];
            (c - l).norm() <= EIGEN_CLUSTER_RTOL * c.norm().max(l.norm()).max(1.0)
        });
        match hit {
            Some(g) => g.push(l),
            None => groups.push(vec![l]),
        }
    }
    groups
}

/// `dim ker(λE − A)` on the regular part, by complex SVD.
fn geometric_multiplicity(e: &Mat, a: &Mat, lambda: Complex64) -> usize {
    let n = e.nrows();
    let pencil = DMatrix::from_fn(n, n, |i, j| lambda * e[(i, j)] - Complex64::new(a[(i, j)], 0.0));
    let sv = crate::linalg::complex_singular_values(&pencil);
    let smax = sv.first().copied().unwrap_or(0.0);
    let scale = smax.max(crate::linalg::spectral_norm(e)).max(crate::linalg::spectral_norm(a));
    sv.iter().filter(|s| **s <= EIGEN_CLUSTER_RTOL * scale * n as f64).count()
}

fn classify(stair: &Staircase, tol: &ToleranceConfig) -> StabilityClass {
    if !stair.summary.is_regular() {
        return StabilityClass::Singular;
    }
    let eigs = &stair.summary.finite_eigenvalues;
    if eigs.iter().any(|l| l.re > tol.axis_tol) {
        return StabilityClass::Unstable;
    }
    if eigs.iter().all(|l| l.re <= -tol.stability_margin) {
        return StabilityClass::AsymptoticallyStable;
    }
    let on_axis: Vec<Complex64> = eigs.iter().copied().filter(|l| l.re.abs() <= tol.axis_tol).collect();
    for group in clusters(&on_axis) {
        let mean = group.iter().sum::<Complex64>() / group.len() as f64;
        let geo = geometric_multiplicity(&stair.regular_e, &stair.regular_a, mean);
        if geo < group.len() {
            return StabilityClass::Unstable;
        }
    }
    StabilityClass::StableNotAsymptotic
}

pub fn pencil_report(e: &Mat, a: &Mat, tol: &ToleranceConfig) -> Result<PencilReport> {
    if !e.is_square() || e.shape() != a.shape() {
        return Err(Error::ShapeMismatch(format!(
            "pencil report needs square blocks of equal size, got E {:?} and A {:?}",
            e.shape(),
            a.shape()
        )));
    }
    let stair = staircase(a, e, tol)?;
    let stability_class = classify(&stair, tol);
    let eigs = &stair.summary.finite_eigenvalues;
    let spectral_abscissa = eigs.iter().map(|l| l.re).reduce(f64::max);
    let axis_distance = eigs.iter().map(|l| l.re.abs()).reduce(f64::min);
    Ok(PencilReport {
        regular: stair.summary.is_regular(),
        index: stair.summary.index(),
        finite_eigenvalues: eigs.clone(),
        rank_e: crate::linalg::numerical_rank(e, tol),
        stability_class,
        spectral_abscissa,
        axis_distance,
        kronecker: stair.summary,
        tolerances: *tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn scalar(x: f64) -> Mat {
        Mat::from_element(1, 1, x)
    }

    #[test]
    fn report_examples() {
        let r = pencil_report(&scalar(1.0), &scalar(-2.0), &tol()).unwrap();
        assert!(r.regular);
        assert_eq!(r.index, Some(0));
        assert_eq!(r.finite_eigenvalues.len(), 1);
        assert_abs_diff_eq!(r.finite_eigenvalues[0].re, -2.0, epsilon = 1e-15);
        assert_eq!(r.stability_class, StabilityClass::AsymptoticallyStable);

        let r = pencil_report(&scalar(1.0), &scalar(0.0), &tol()).unwrap();
        assert_eq!(r.stability_class, StabilityClass::StableNotAsymptotic);

        let e = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let a = Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let r = pencil_report(&e, &a, &tol()).unwrap();
        assert!(r.regular);
        assert_eq!(r.index, Some(2));
        assert!(r.finite_eigenvalues.is_empty());
        assert_eq!(r.spectral_abscissa, None);
    }

    #[test]
    fn jordan_block_on_axis_is_unstable() {
        let a = Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = pencil_report(&Mat::identity(2, 2), &a, &tol()).unwrap();
        assert_eq!(r.stability_class, StabilityClass::Unstable);
    }

    #[test]
    fn double_oscillator_is_semisimple() {
        let osc = Mat::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]);
        let a = crate::linalg::block_diag(&[&osc, &osc]);
        let r = pencil_report(&Mat::identity(4, 4), &a, &tol()).unwrap();
        assert_eq!(r.stability_class, StabilityClass::StableNotAsymptotic);
    }

    #[test]
    fn positive_eigenvalue_is_unstable() {
        let r = pencil_report(&scalar(1.0), &scalar(0.5), &tol()).unwrap();
        assert_eq!(r.stability_class, StabilityClass::Unstable);
    }

    #[test]
    fn singular_pencil_is_flagged() {
        let r = pencil_report(&scalar(0.0), &scalar(0.0), &tol()).unwrap();
        assert!(!r.regular);
        assert_eq!(r.stability_class, StabilityClass::Singular);
        assert_eq!(r.index, None);
    }
}
