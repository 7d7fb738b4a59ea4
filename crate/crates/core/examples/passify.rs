//! Strict passivation with the closed-form feedback.

use ph_feedback::generators::{random_ph, Knobs};
use ph_feedback::linalg::{symmetric_eigen, ToleranceConfig};
use ph_feedback::pencil::condition_con2;
use ph_feedback::{synthesize_passifying, PHSystem};

fn main() -> ph_feedback::Result<()> {
    let tol = ToleranceConfig::default();

    let scalar = PHSystem::scalar(1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0);
    let f = synthesize_passifying(&scalar, &tol)?;
    let w = scalar.apply_feedback(&f)?.dissipation_matrix()?;
    println!("scalar: F = {}, eig(W) = {:?}", f.0[(0, 0)], symmetric_eigen(&w).0);

    for seed in 0..6 {
        let sys = random_ph(4, 2, seed, &Knobs { s_definite: true, rank_w: Some(2 + seed as usize % 4), ..Knobs::default() })?;
        let verdict = condition_con2(&sys, &tol)?;
        match synthesize_passifying(&sys, &tol) {
            Ok(f) => {
                let w = sys.apply_feedback(&f)?.dissipation_matrix()?;
                println!("seed {seed}: condition holds, lambda_min(W) = {:.4}", symmetric_eigen(&w).0[0]);
            }
            Err(e) => println!(
                "seed {seed}: refused ({e}); condition eigenvalue {:?}",
                verdict.condition_min_eigenvalue
            ),
        }
    }
    Ok(())
}
