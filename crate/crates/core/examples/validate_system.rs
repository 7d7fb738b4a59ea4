//! Build a small descriptor system by hand and check its structure.

use ph_feedback::linalg::{Mat, ToleranceConfig};
use ph_feedback::PHSystem;

fn main() -> ph_feedback::Result<()> {
    // A mass with a damper and an algebraic constraint: E is singular.
    let e = Mat::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let j = Mat::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0]);
    let r = Mat::from_diagonal(&nalgebra::DVector::from_column_slice(&[0.0, 0.5, 0.0]));
    let g = Mat::from_column_slice(3, 1, &[0.0, 1.0, 0.0]);
    let p = Mat::zeros(3, 1);
    let sys = PHSystem::new(e, j, r, g, p, Mat::zeros(1, 1), Mat::zeros(1, 1))?;

    let report = sys.validate(&ToleranceConfig::default())?;
    for check in &report.checks {
        println!("{:<28} margin {:+.3e}  {}", check.constraint, check.margin, if check.passed { "ok" } else { "FAIL" });
    }
    println!("port-Hamiltonian: {}", report.passed);

    let mut broken = sys.clone();
    broken.r[(1, 1)] = -0.5;
    let report = broken.validate(&ToleranceConfig::default())?;
    println!("after flipping the damper sign: {}", report.passed);
    for f in report.failures() {
        println!("  violated: {}", f.constraint);
    }
    Ok(())
}
