//! Synthesize a stabilizing feedback and certify it independently.

use ph_feedback::generators::{random_ph, Knobs};
use ph_feedback::linalg::ToleranceConfig;
use ph_feedback::{certify_closed_loop, pencil_report, synthesize_stabilizing, Goal};

fn main() -> ph_feedback::Result<()> {
    let tol = ToleranceConfig::default();
    let knobs = Knobs { rank_e: Some(3), rank_w: Some(2), ..Knobs::default() };
    let sys = random_ph(5, 2, 4, &knobs)?;

    let open = pencil_report(&sys.e, &sys.a(), &tol)?;
    println!("open loop: {:?}, abscissa {:?}, index {:?}", open.stability_class, open.spectral_abscissa, open.index);

    let (f, trace) = synthesize_stabilizing(&sys, &tol, 1.0)?;
    println!("block sizes {:?}, beta {:.3}", trace.mu, trace.beta);
    for check in trace.identity_checks(&tol) {
        println!("  {:<40} {:.2e} <= {:.2e}", check.identity, check.residual, check.threshold);
    }
    println!("F =\n{:.4}", f.0);

    let cert = certify_closed_loop(&sys, &f, Goal::Stabilize, &tol)?;
    println!(
        "closed loop: lambda_min(W) {:.3e}, index {:?}, abscissa {:.4}, passed {}",
        cert.ph_structure.margin, cert.index, cert.asymptotically_stable.margin, cert.passed
    );

    // An undamped mode that no input reaches cannot be stabilized.
    let stuck = random_ph(4, 1, 4, &Knobs { force_axis_modes: true, ..Knobs::default() })?;
    match synthesize_stabilizing(&stuck, &tol, 1.0) {
        Err(ph_feedback::Error::ConditionsNotMet { reason, witnesses }) => {
            println!("refused: {reason}; witnesses {witnesses:?}")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
