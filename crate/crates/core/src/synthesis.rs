//! Structure-preserving state feedback.
//!
//! [`synthesize_stabilizing`] builds `F` such that the closed loop is port-Hamiltonian,
//! regular, of index at most one and asymptotically stable. [`synthesize_passifying`]
//! builds `F` making the closed loop strictly passive.

use nalgebra::linalg::QR;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    block, checked_rank, classify_definiteness, hstack, inverse, numerical_rank, orthogonal_complement, psd_sqrt,
    range_basis, nullspace_basis, right_svd, singular_values, spectral_norm, sym, symmetric_eigen, vstack, Mat,
    ToleranceConfig,
};
use crate::model::{Feedback, PHSystem};
use crate::pencil::{condition_con1, condition_con1_2, condition_con2};

/// Relative residual allowed for the identities recorded in a [`SynthesisTrace`].
pub const TRACE_RTOL: f64 = 1e-8;

/// Orthogonal compression `Uᵀ(S + N)U = [[D₁₁, D₁₂, 0], [−D₁₂ᵀ, D₂₂, 0], [0, 0, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DCompression {
    pub u: Mat,
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub d11: Mat,
    pub d12: Mat,
    pub d22: Mat,
    pub s11: Mat,
    /// `Uᵀ(S + N)U` as computed.
    pub compressed: Mat,
}

impl DCompression {
    /// `D̂ = [[D₁₁, D₁₂, 0], [−D₁₂ᵀ, D₂₂, 0], [0, 0, I]]`.
    pub fn d_hat(&self) -> Mat {
        let k = self.m1 + self.m2;
        let mut d = Mat::identity(k + self.m3, k + self.m3);
        d.view_mut((0, 0), (k, k)).copy_from(&self.compressed.view((0, 0), (k, k)));
        d
    }

    pub fn u1(&self) -> Mat {
        self.u.columns(0, self.m1).into_owned()
    }

    pub fn u3(&self) -> Mat {
        self.u.columns(self.m1 + self.m2, self.m3).into_owned()
    }
}

fn skew_violation(m: &Mat) -> f64 {
    (m + m.transpose()).norm()
}

pub fn compress_feedthrough(s: &Mat, n: &Mat, tol: &ToleranceConfig) -> Result<DCompression> {
    if !s.is_square() || s.shape() != n.shape() {
        return Err(Error::ShapeMismatch(format!(
            "S is {:?} and N is {:?}; both must be m×m",
            s.shape(),
            n.shape()
        )));
    }
    let m = s.nrows();
    let asym = (s - s.transpose()).norm();
    if asym > tol.psd_tol * spectral_norm(s).max(1.0) {
        return Err(Error::NotSymmetric { violation: asym });
    }
    let s_class = classify_definiteness(s, tol)?;
    if !s_class.is_psd() {
        return Err(Error::NotPsd {
            min_eigenvalue: s_class.min_eigenvalue,
        });
    }
    let skew = skew_violation(n);
    if skew > tol.psd_tol * spectral_norm(n).max(1.0) {
        return Err(Error::NotSkew { violation: skew });
    }

    let d = s + n;
    let u1 = range_basis(s, tol);
    let u3 = nullspace_basis(&d, tol);
    let (m1, m3) = (u1.ncols(), u3.ncols());
    if m1 + m3 > m {
        return Err(Error::NumericalBreakdown(format!(
            "range of S ({m1}) and nullspace of S + N ({m3}) overlap in dimension {m}"
        )));
    }
    // 𝒩(S + N) ⊂ 𝒩(S) ⟂ 𝓡(S); a QR pass removes the roundoff between the two.
    let (q13, u2) = if m1 + m3 == 0 {
        (Mat::zeros(m, 0), Mat::identity(m, m))
    } else {
        let q = QR::new(hstack(&[&u1, &u3])).q();
        let comp = orthogonal_complement(&q);
        (q, comp)
    };
    let m2 = u2.ncols();
    let u = hstack(&[
        &q13.columns(0, m1).into_owned(),
        &u2,
        &q13.columns(m1, m3).into_owned(),
    ]);
    let compressed = u.transpose() * &d * &u;
    let d11 = block(&compressed, 0, 0, m1, m1);
    let d12 = block(&compressed, 0, m1, m1, m2);
    let d22 = block(&compressed, m1, m1, m2, m2);
    let s11 = sym(&(u.columns(0, m1).transpose() * s * u.columns(0, m1)));
    Ok(DCompression {
        u,
        m1,
        m2,
        m3,
        d11,
        d12,
        d22,
        s11,
        compressed,
    })
}

/// One numerically checked identity of the stabilizing construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Every intermediate object of the stabilizing construction.
#[derive(Debug, Clone)]
pub struct SynthesisTrace {
    pub compression: DCompression,
    /// 2-norm condition number of `D̂`.
    pub d_hat_condition: f64,
    pub b1: Mat,
    pub b2: Mat,
    pub b3: Mat,
    pub p1: Mat,
    pub p2: Mat,
    pub p3: Mat,
    pub f1: Mat,
    pub f2: Mat,
    pub f3: Mat,
    pub z: Mat,
    pub v1: Mat,
    pub v3: Mat,
    /// `μ₁..μ₄`.
    pub mu: [usize; 4],
    pub r11: Mat,
    pub r12: Mat,
    pub r22: Mat,
    pub b12: Mat,
    /// `P₁₁..P₁₄`.
    pub p_blocks: [Mat; 4],
    /// `P̂₁₁..P̂₁₄`.
    pub p_hat: [Mat; 4],
    pub f31: Mat,
    pub f32: Mat,
    pub f33: Mat,
    pub f34: Mat,
    pub beta: f64,
    pub margin: f64,
    pub feedback: Mat,
    /// Scale used for the rank decisions of the compression stages.
    pub scale: f64,
    /// Symmetrized open-loop `R`.
    pub r: Mat,
    /// `R̃` of the closed loop.
    pub r_tilde: Mat,
    /// `rank [R, B₁, B₃]` as computed from the open-loop data.
    pub rank_r_b: usize,
}

impl SynthesisTrace {
    fn offsets(&self) -> [usize; 5] {
        let [a, b, c, d] = self.mu;
        [0, a, a + b, a + b + c, a + b + c + d]
    }

    /// Recomputes every identity the construction relies on.
    pub fn identity_checks(&self, tol: &ToleranceConfig) -> Vec<IdentityCheck> {
        let n = self.z.nrows();
        let [mu1, mu2, mu3, _] = self.mu;
        let off = self.offsets();
        let z_norm = spectral_norm(&self.z).max(1.0);
        let thr = |scale: f64| TRACE_RTOL * scale.max(1.0) * (n.max(1) as f64);
        let mut out = Vec::new();
        let mut push = |name: &str, residual: f64, threshold: f64| {
            out.push(IdentityCheck {
                identity: name.into(),
                residual,
                threshold,
                passed: residual <= threshold,
            });
        };
        // An empty block is vacuously definite.
        let push_strict = |name: &str, min_eig: Option<f64>| IdentityCheck {
            identity: name.into(),
            residual: min_eig.map_or(0.0, |l| -l),
            threshold: 0.0,
            passed: min_eig.is_none_or(|l| l > 0.0),
        };

        let s_scale = self.scale.max(spectral_norm(&self.p1));
        push("P2 = 0", self.p2.norm(), thr(s_scale));
        push("P3 = 0", self.p3.norm(), thr(s_scale));

        let m3 = self.b3.ncols();
        let mut zb3_target = Mat::zeros(n, m3);
        zb3_target.view_mut((0, 0), (mu1, mu1)).fill_with_identity();
        let zb3 = &self.z * &self.b3 * &self.v3;
        let zscale = z_norm * z_norm * self.scale;
        push("Z B3 V3 staircase", (&zb3 - zb3_target).norm(), thr(zscale));

        let m1 = self.b1.ncols();
        let s_half = psd_sqrt(&self.compression.s11, tol).unwrap_or_else(|_| Mat::zeros(m1, m1));
        let zb1 = &self.z * &self.b1 * &s_half * &self.v1;
        let mut zb1_target = Mat::zeros(n, m1);
        zb1_target.view_mut((mu1, 0), (mu2, mu2)).fill_with_identity();
        zb1_target.view_mut((0, mu2), (mu1, m1 - mu2)).copy_from(&self.b12);
        push("Z B1 S11^1/2 V1 staircase", (&zb1 - zb1_target).norm(), thr(zscale));

        let zrz = &self.z * &self.r * self.z.transpose();
        let mut off_blocks = 0.0f64;
        let rows = |k: usize| off[k]..off[k + 1];
        for (i, j) in [(0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (3, 3)] {
            let (ri, rj) = (rows(i), rows(j));
            off_blocks = off_blocks.max(zrz.view((ri.start, rj.start), (ri.len(), rj.len())).norm());
        }
        let i3 = zrz.view((off[2], off[2]), (mu3, mu3)).into_owned() - Mat::identity(mu3, mu3);
        push("Z R Z^T staircase", off_blocks.max(i3.norm()), thr(zscale));

        push("B12 P^14 = 0", (&self.b12 * &self.p_hat[3]).norm(), thr(zscale));
        push("P14 = 0", self.p_blocks[3].norm(), thr(zscale));

        let a1 = vstack(&[
            &hstack(&[
                &(&self.r22
                    + &self.p_blocks[1]
                    + self.p_blocks[1].transpose()
                    + Mat::identity(mu2, mu2) * 2.0),
                &self.p_blocks[2],
            ]),
            &hstack(&[&self.p_blocks[2].transpose(), &Mat::identity(mu3, mu3)]),
        ]);
        let a1_check = push_strict("A1 block positive definite", symmetric_eigen(&a1).0.first().copied());

        let rank_rt = numerical_rank(&self.r_tilde, tol);
        let expected = mu1 + mu2 + mu3;
        let mismatch = (rank_rt as f64 - expected as f64).abs() + (self.rank_r_b as f64 - expected as f64).abs();
        push("rank R~ = mu1+mu2+mu3 = rank [R B1 B3]", mismatch, 0.0);
        out.push(a1_check);
        out
    }

    pub fn identities_hold(&self, tol: &ToleranceConfig) -> bool {
        self.identity_checks(tol).iter().all(|c| c.passed)
    }
}

fn breakdown(e: Error) -> Error {
    match e {
        Error::ToleranceBreakdown {
            stage,
            sigma,
            threshold,
        } => Error::NumericalBreakdown(format!(
            "{stage}: singular value {sigma:.3e} too close to threshold {threshold:.3e}"
        )),
        other => other,
    }
}

/// Left singular pairs of `m` matching the given right singular vectors: `m V[:, :k] Σ⁻¹`.
fn left_vectors(m: &Mat, v: &Mat, sigma: &[f64], k: usize) -> Mat {
    let mut l = m * v.columns(0, k);
    for (j, s) in sigma.iter().take(k).enumerate() {
        l.column_mut(j).unscale_mut(*s);
    }
    l
}

fn solve(a: &Mat, rhs: &Mat, what: &str) -> Result<Mat> {
    if a.nrows() == 0 {
        return Ok(Mat::zeros(0, rhs.ncols()));
    }
    a.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::NumericalBreakdown(format!("{what} is singular")))
}

fn condition_number(m: &Mat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(hi), Some(lo)) if *lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// The stabilizing construction without checking its hypotheses.
///
/// When the rank conditions fail the result is still a well-defined matrix,
/// but nothing is claimed about the closed loop.
pub fn stabilizing_feedback_unchecked(
    sys: &PHSystem,
    tol: &ToleranceConfig,
    margin: f64,
) -> Result<(Feedback, SynthesisTrace)> {
    sys.check_shapes()?;
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::Malformed(format!("margin must be positive, got {margin}")));
    }
    let n = sys.state_dim();
    let comp = compress_feedthrough(&sys.s, &sys.n, tol)?;
    let (m1, m2, m3) = (comp.m1, comp.m2, comp.m3);
    let d_hat = comp.d_hat();
    let d_hat_condition = condition_number(&d_hat);

    // [B₁ B₂ B₃] = (G − P) U D̂⁻¹, computed as a solve with D̂ᵀ.
    let bu = sys.b() * &comp.u;
    let b_blocks = solve(&d_hat.transpose(), &bu.transpose(), "D̂")?.transpose();
    let b1 = b_blocks.columns(0, m1).into_owned();
    let b2 = b_blocks.columns(m1, m2).into_owned();
    let b3 = b_blocks.columns(m1 + m2, m3).into_owned();
    let pu = &sys.p * &comp.u;
    let p1 = pu.columns(0, m1).into_owned();
    let p2 = pu.columns(m1, m2).into_owned();
    let p3 = pu.columns(m1 + m2, m3).into_owned();

    let f1 = -(&b1 * &comp.s11 + &p1).transpose() * 2.0;
    let f2 = Mat::zeros(m2, n);

    let s_half = psd_sqrt(&comp.s11, tol)?;
    let s_half_inv = inverse(&s_half).ok_or_else(|| Error::NumericalBreakdown("S11 is singular".into()))?;
    let b1s = &b1 * &s_half;
    let r = sym(&sys.r);

    let scale = spectral_norm(&r).max(spectral_norm(&b1s)).max(spectral_norm(&b3));
    let thr = tol.rank_threshold(n, n + m1 + m3, scale);

    // (a) Column compression of B₃.
    let svd3 = right_svd(&b3);
    let mu1 = checked_rank(&svd3.sigma, thr, "compression of B3").map_err(breakdown)?;
    let v3 = svd3.v;
    let l3 = left_vectors(&b3, &v3, &svd3.sigma, mu1);
    let z_lower = orthogonal_complement(&l3).transpose();
    let mut z_a = l3.transpose();
    for (i, s) in svd3.sigma.iter().take(mu1).enumerate() {
        z_a.row_mut(i).unscale_mut(*s);
    }

    // (b) Compression of B₁S₁₁^{1/2} within the left nullspace of B₃.
    let w = &z_lower * &b1s;
    let svd1 = right_svd(&w);
    let mu2 = checked_rank(&svd1.sigma, thr, "compression of B1 S11^1/2").map_err(breakdown)?;
    let v1 = svd1.v;
    let l1 = left_vectors(&w, &v1, &svd1.sigma, mu2);
    let mut z_b = l1.transpose() * &z_lower;
    for (i, s) in svd1.sigma.iter().take(mu2).enumerate() {
        z_b.row_mut(i).unscale_mut(*s);
    }
    let z_t = orthogonal_complement(&l1).transpose() * &z_lower;
    let x = &z_a * &b1s * v1.columns(0, mu2);
    z_a -= &x * &z_b;

    // (c) Congruence compression of R on the remaining rows.
    let r_t = sym(&(&z_t * &r * z_t.transpose()));
    let (vals, vecs) = symmetric_eigen(&r_t);
    let desc: Vec<f64> = vals.iter().rev().map(|v| v.max(0.0)).collect();
    let mu3 = checked_rank(&desc, thr, "compression of R").map_err(breakdown)?;
    let t = z_t.nrows();
    let mu4 = t - mu3;
    let mut z_c = Mat::zeros(mu3, n);
    for (k, lam) in desc.iter().take(mu3).enumerate() {
        let row = vecs.column(t - 1 - k).transpose() * &z_t / lam.sqrt();
        z_c.set_row(k, &row);
    }
    let mut z_d = Mat::zeros(mu4, n);
    for k in 0..mu4 {
        z_d.set_row(k, &(vecs.column(k).transpose() * &z_t));
    }
    let mut z_top = vstack(&[&z_a, &z_b]);
    let cross = &z_top * &r * z_c.transpose();
    z_top -= &cross * &z_c;
    let z = vstack(&[&z_top, &z_c, &z_d]);

    let zrz = sym(&(&z * &r * z.transpose()));
    let r11 = block(&zrz, 0, 0, mu1, mu1);
    let r12 = block(&zrz, 0, mu1, mu1, mu2);
    let r22 = block(&zrz, mu1, mu1, mu2, mu2);
    let zb1 = &z * &b1s * &v1;
    let b12 = block(&zb1, 0, mu2, mu1, m1 - mu2);

    let pm = v1.transpose() * &s_half_inv * p1.transpose() * z.transpose();
    let col_off = [0, mu1, mu1 + mu2, mu1 + mu2 + mu3];
    let widths = [mu1, mu2, mu3, mu4];
    let p_blocks: [Mat; 4] = std::array::from_fn(|k| block(&pm, 0, col_off[k], mu2, widths[k]));
    let p_hat: [Mat; 4] = std::array::from_fn(|k| block(&pm, mu2, col_off[k], m1 - mu2, widths[k]));

    let f32 = (&r12 + &b12 * &p_hat[1] + p_blocks[0].transpose()) * 2.0;
    let f33 = &b12 * &p_hat[2] * 2.0;
    let f34 = Mat::zeros(mu1, mu4);
    let bp = &b12 * &p_hat[0];
    let m11 = sym(&(&r11 + &bp + bp.transpose() + &b12 * b12.transpose()));
    let lam = symmetric_eigen(&m11).0.first().copied().unwrap_or(0.0);
    let beta = margin + (-lam).max(0.0);
    let f31 = Mat::identity(mu1, mu1) * (-2.0 * beta);

    let f_hat = vstack(&[
        &hstack(&[&f31, &f32, &f33, &f34]),
        &Mat::zeros(m3 - mu1, n),
    ]);
    // F₃ = V₃ F̂ Z⁻ᵀ.
    let f3 = &v3 * solve(&z, &f_hat.transpose(), "Z")?.transpose();
    let stacked = vstack(&[&f1, &f2, &f3]);
    let feedback = &comp.u * solve(&d_hat, &stacked, "D̂")?;

    let closed = sys.apply_feedback(&Feedback(feedback.clone()))?;
    let rank_r_b = numerical_rank(&hstack(&[&r, &b1, &b3]), tol);

    let trace = SynthesisTrace {
        compression: comp,
        d_hat_condition,
        b1,
        b2,
        b3,
        p1,
        p2,
        p3,
        f1,
        f2,
        f3,
        z,
        v1,
        v3,
        mu: [mu1, mu2, mu3, mu4],
        r11,
        r12,
        r22,
        b12,
        p_blocks,
        p_hat,
        f31,
        f32,
        f33,
        f34,
        beta,
        margin,
        feedback: feedback.clone(),
        scale,
        r,
        r_tilde: closed.r,
        rank_r_b,
    };
    Ok((Feedback(feedback), trace))
}

/// Feedback making the closed loop port-Hamiltonian, regular, of index at most
/// one and asymptotically stable. Refuses when no such feedback exists.
pub fn synthesize_stabilizing(
    sys: &PHSystem,
    tol: &ToleranceConfig,
    margin: f64,
) -> Result<(Feedback, SynthesisTrace)> {
    let c1 = condition_con1(sys, tol)?;
    if !c1.holds {
        return Err(Error::ConditionsNotMet {
            reason: "rank [sE - (J - R), B1, B3] drops on the imaginary axis".into(),
            witnesses: c1.witnesses,
        });
    }
    let c12 = condition_con1_2(sys, tol)?;
    if !c12.holds {
        return Err(Error::ConditionsNotMet {
            reason: format!(
                "rank [E, (J - R) null(E), B1, B3] = {} < {}",
                c12.rank, c12.required
            ),
            witnesses: Vec::new(),
        });
    }
    stabilizing_feedback_unchecked(sys, tol, margin)
}

/// `F = −(S + N)⁻¹(G + P)ᵀ − (S + N)⁻ᵀ(G − P)ᵀ`, requiring only that `S + N` is invertible.
pub fn passifying_feedback_unchecked(sys: &PHSystem) -> Result<Feedback> {
    sys.check_shapes()?;
    let d = sys.feedthrough();
    let gp = (&sys.g + &sys.p).transpose();
    let gm = sys.b().transpose();
    let a = solve(&d, &gp, "S + N")?;
    let b = solve(&d.transpose(), &gm, "(S + N)ᵀ")?;
    Ok(Feedback(-(a + b)))
}

/// Feedback making the closed loop strictly passive. Refuses when none exists.
pub fn synthesize_passifying(sys: &PHSystem, tol: &ToleranceConfig) -> Result<Feedback> {
    let verdict = condition_con2(sys, tol)?;
    if !verdict.s_positive_definite {
        return Err(Error::ConditionsNotMet {
            reason: format!(
                "S not positive definite (smallest eigenvalue {:.6e})",
                verdict.s_min_eigenvalue
            ),
            witnesses: Vec::new(),
        });
    }
    if !verdict.holds {
        return Err(Error::ConditionsNotMet {
            reason: format!(
                "R + sym((G - P)(S + N)^-1 (G + P)^T) not positive definite (smallest eigenvalue {:.6e})",
                verdict.condition_min_eigenvalue.unwrap_or(f64::NAN)
            ),
            witnesses: Vec::new(),
        });
    }
    passifying_feedback_unchecked(sys)
}

/// `R̃ = R − ½(BF + FᵀBᵀ) ⪰ 0` and `rank R̃ = rank [R, B]`.
pub fn lemma2_feedback_admissible(r: &Mat, b: &Mat, f: &Mat, tol: &ToleranceConfig) -> Result<bool> {
    let n = r.nrows();
    if !r.is_square() || b.nrows() != n || f.shape() != (b.ncols(), n) {
        return Err(Error::ShapeMismatch(format!(
            "R {:?}, B {:?}, F {:?} are not compatible",
            r.shape(),
            b.shape(),
            f.shape()
        )));
    }
    let bf = b * f;
    let r_tilde = sym(&(r - (&bf + bf.transpose()) * 0.5));
    if !classify_definiteness(&r_tilde, tol)?.is_psd() {
        return Ok(false);
    }
    Ok(numerical_rank(&r_tilde, tol) == numerical_rank(&hstack(&[r, b]), tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn one(x: f64) -> Mat {
        Mat::from_element(1, 1, x)
    }

    #[test]
    fn compression_examples() {
        let c = compress_feedthrough(&one(1.0), &one(0.0), &tol()).unwrap();
        assert_eq!((c.m1, c.m2, c.m3), (1, 0, 0));
        assert_abs_diff_eq!(c.u[(0, 0)].abs(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.s11[(0, 0)], 1.0, epsilon = 1e-15);

        let c = compress_feedthrough(&one(0.0), &one(0.0), &tol()).unwrap();
        assert_eq!((c.m1, c.m2, c.m3), (0, 0, 1));

        let n = Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let c = compress_feedthrough(&Mat::zeros(2, 2), &n, &tol()).unwrap();
        assert_eq!((c.m1, c.m2, c.m3), (0, 2, 0));
        let back = &c.u * &c.d22 * c.u.transpose();
        assert!((back - n).norm() < 1e-14);
    }

    #[test]
    fn compression_rejects_bad_input() {
        assert!(matches!(
            compress_feedthrough(&one(-1.0), &one(0.0), &tol()),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            compress_feedthrough(&one(1.0), &one(1.0), &tol()),
            Err(Error::NotSkew { .. })
        ));
    }

    #[test]
    fn scalar_stabilizing_example() {
        let sys = PHSystem::scalar(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        let (f, trace) = synthesize_stabilizing(&sys, &tol(), 1.0).unwrap();
        assert_abs_diff_eq!(f.0[(0, 0)], -2.0, epsilon = 1e-14);
        assert_eq!(trace.mu, [1, 0, 0, 0]);
        assert_abs_diff_eq!(trace.beta, 1.0, epsilon = 1e-15);
        let closed = sys.apply_feedback(&f).unwrap();
        assert_abs_diff_eq!(closed.r[(0, 0)], 2.0, epsilon = 1e-14);
        assert!(trace.identities_hold(&tol()));
    }

    #[test]
    fn stabilizing_refuses_without_input() {
        let sys = PHSystem::scalar(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        match synthesize_stabilizing(&sys, &tol(), 1.0) {
            Err(Error::ConditionsNotMet { witnesses, .. }) => {
                assert_eq!(witnesses.len(), 1);
                assert!(witnesses[0].norm() < 1e-14);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn damping_alone_needs_no_input_action() {
        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        let (f, trace) = synthesize_stabilizing(&sys, &tol(), 1.0).unwrap();
        assert_eq!(trace.mu, [0, 0, 1, 0]);
        assert!((sys.b() * &f.0).norm() < 1e-15);
    }

    #[test]
    fn scalar_passifying_example() {
        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0);
        let f = synthesize_passifying(&sys, &tol()).unwrap();
        assert_abs_diff_eq!(f.0[(0, 0)], -2.0, epsilon = 1e-15);
        let w = sys.apply_feedback(&f).unwrap().dissipation_matrix().unwrap();
        let expected = Mat::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 1.0]);
        assert!((w - expected).norm() < 1e-14);
    }

    #[test]
    fn passifying_refusals_and_trivial_case() {
        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        match synthesize_passifying(&sys, &tol()) {
            Err(Error::ConditionsNotMet { reason, .. }) => assert!(reason.contains("S not positive definite")),
            other => panic!("expected refusal, got {other:?}"),
        }
        let sys = PHSystem::scalar(1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0);
        let f = synthesize_passifying(&sys, &tol()).unwrap();
        assert_eq!(f.0[(0, 0)], 0.0);
    }

    #[test]
    fn lemma2_examples() {
        assert!(lemma2_feedback_admissible(&one(0.0), &one(1.0), &one(-2.0), &tol()).unwrap());
        assert!(!lemma2_feedback_admissible(&one(0.0), &one(1.0), &one(0.0), &tol()).unwrap());
        assert!(lemma2_feedback_admissible(&one(1.0), &one(0.0), &one(0.0), &tol()).unwrap());
        assert!(matches!(
            lemma2_feedback_admissible(&one(1.0), &Mat::zeros(2, 1), &one(0.0), &tol()),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
