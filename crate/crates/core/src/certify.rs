//! Independent closed-loop certification.
//!
//! Verdicts are recomputed from the closed-loop matrices; nothing produced by
//! the synthesis step is trusted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{classify_definiteness, spectral_norm, Mat, ToleranceConfig};
use crate::model::{Feedback, PHSystem};
use crate::pencil::{pencil_report, StabilityClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    Stabilize,
    Passify,
}

/// A yes/no verdict with the quantity it was decided from and the tolerance used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    /// Written as `null` when infinite, since JSON has no infinities.
    #[serde(deserialize_with = "margin_or_neg_infinity")]
    pub margin: f64,
    pub tolerance: f64,
}

fn margin_or_neg_infinity<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub goal: Goal,
    /// `W̃ ⪰ 0`; margin is `λ_min(W̃)`, tolerance the relative PSD band.
    pub ph_structure: Verdict,
    /// `‖W̃‖₂`, for relative readings of the margins.
    pub w_norm: f64,
    pub regular: bool,
    /// Largest infinite Jordan block; absent when the pencil is singular.
    pub index: Option<usize>,
    pub index_at_most_one: bool,
    pub spectrum: Vec<Complex64>,
    /// Margin is the spectral abscissa (`−∞` for an empty finite spectrum).
    pub asymptotically_stable: Verdict,
    pub stability_class: StabilityClass,
    /// `W̃ ≻ 0`; margin is `λ_min(W̃)`.
    pub strictly_passive: Verdict,
    /// All properties required by the goal hold.
    pub passed: bool,
    pub tolerances: ToleranceConfig,
}

impl CertReport {
    /// Names of the goal's properties that fail.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.ph_structure.holds {
            out.push("closed loop is not port-Hamiltonian");
        }
        if !self.regular {
            out.push("closed-loop pencil is singular");
        }
        if self.regular && !self.index_at_most_one {
            out.push("closed-loop index exceeds one");
        }
        match self.goal {
            Goal::Stabilize if !self.asymptotically_stable.holds => {
                out.push("closed loop is not asymptotically stable")
            }
            Goal::Passify if !self.strictly_passive.holds => out.push("closed loop is not strictly passive"),
            _ => {}
        }
        out
    }
}

pub fn certify_closed_loop(sys: &PHSystem, f: &Feedback, goal: Goal, tol: &ToleranceConfig) -> Result<CertReport> {
    let closed = sys.apply_feedback(f)?;
    certify_system(&closed, goal, tol)
}

/// Certifies a system that is already in closed-loop form.
pub fn certify_system(closed: &PHSystem, goal: Goal, tol: &ToleranceConfig) -> Result<CertReport> {
    closed.check_shapes()?;
    let w = closed.dissipation_matrix()?;
    let w_class = classify_definiteness(&w, tol)?;
    let pencil = pencil_report(&closed.e, &closed.a(), tol)?;
    let index_at_most_one = pencil.is_index_at_most_one();
    let stable = pencil.stability_class == StabilityClass::AsymptoticallyStable;

    let ph_structure = Verdict {
        holds: w_class.is_psd(),
        margin: w_class.min_eigenvalue,
        tolerance: tol.psd_tol,
    };
    let strictly_passive = Verdict {
        holds: w_class.is_pd(),
        margin: w_class.min_eigenvalue,
        tolerance: tol.psd_tol,
    };
    let asymptotically_stable = Verdict {
        holds: stable,
        margin: pencil.spectral_abscissa.unwrap_or(f64::NEG_INFINITY),
        tolerance: tol.stability_margin,
    };
    let goal_property = match goal {
        Goal::Stabilize => stable,
        Goal::Passify => strictly_passive.holds,
    };
    Ok(CertReport {
        goal,
        ph_structure,
        w_norm: spectral_norm(&w),
        regular: pencil.regular,
        index: pencil.index,
        index_at_most_one,
        spectrum: pencil.finite_eigenvalues,
        asymptotically_stable,
        stability_class: pencil.stability_class,
        strictly_passive,
        passed: ph_structure.holds && pencil.regular && index_at_most_one && goal_property,
        tolerances: *tol,
    })
}

/// `λ_min(W̃)` of the closed loop, a shortcut for sampling harnesses.
pub fn closed_loop_min_eigenvalue(sys: &PHSystem, f: &Mat) -> Result<(f64, f64)> {
    let w = sys.apply_feedback(&Feedback(f.clone()))?.dissipation_matrix()?;
    let lo = crate::linalg::symmetric_eigen(&w).0.first().copied().unwrap_or(0.0);
    Ok((lo, spectral_norm(&w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn passify_scalar_example() {
        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0);
        let rep = certify_closed_loop(&sys, &Feedback(Mat::from_element(1, 1, -2.0)), Goal::Passify, &tol()).unwrap();
        assert!(rep.strictly_passive.holds);
        assert!(rep.passed);
        assert_abs_diff_eq!(rep.strictly_passive.margin, 2.0 - 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn stabilize_scalar_example() {
        let sys = PHSystem::scalar(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        let rep =
            certify_closed_loop(&sys, &Feedback(Mat::from_element(1, 1, -2.0)), Goal::Stabilize, &tol()).unwrap();
        assert!(rep.ph_structure.holds && rep.regular && rep.asymptotically_stable.holds);
        assert_eq!(rep.index, Some(0));
        assert_eq!(rep.spectrum.len(), 1);
        assert_abs_diff_eq!(rep.spectrum[0].re, -2.0, epsilon = 1e-14);
        assert!(rep.passed);
    }

    #[test]
    fn axis_eigenvalue_is_not_stable() {
        let sys = PHSystem::scalar(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        let rep = certify_closed_loop(&sys, &Feedback::zeros(1, 1), Goal::Stabilize, &tol()).unwrap();
        assert!(!rep.asymptotically_stable.holds);
        assert!(!rep.passed);
        assert_eq!(rep.failures(), vec!["closed loop is not asymptotically stable"]);
    }

    #[test]
    fn empty_spectrum_round_trips() {
        let sys = PHSystem::scalar(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        let rep = certify_closed_loop(&sys, &Feedback::zeros(1, 1), Goal::Stabilize, &tol()).unwrap();
        assert_eq!(rep.asymptotically_stable.margin, f64::NEG_INFINITY);
        let back: CertReport = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        assert_eq!(back, rep);
    }
}
