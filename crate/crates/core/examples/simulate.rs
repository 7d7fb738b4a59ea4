//! Simulate a stabilized closed loop and check the energy balance.

use ph_feedback::generators::{random_ph, Knobs};
use ph_feedback::linalg::{ToleranceConfig, Vector};
use ph_feedback::model::{dissipation_inequality_check, power_balance_residual};
use ph_feedback::sim::write_trajectory_csv;
use ph_feedback::{simulate_closed_loop, synthesize_stabilizing, InputSignal};

fn main() -> ph_feedback::Result<()> {
    let tol = ToleranceConfig::default();
    let sys = random_ph(4, 2, 4, &Knobs { rank_e: Some(3), ..Knobs::default() })?;
    let (f, _) = synthesize_stabilizing(&sys, &tol, 1.0)?;
    let x0 = Vector::from_column_slice(&[1.0, -0.5, 0.25, 2.0]);

    for (label, input) in [
        ("free response", InputSignal::zero(2)),
        ("step input", InputSignal::piecewise(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![1.0, -1.0]])?),
    ] {
        println!("{label}");
        for dt in [1e-2, 5e-3, 2.5e-3] {
            let sim = simulate_closed_loop(&sys, &f, &x0, &input, 3.0, dt, &tol)?;
            let h = sim.trajectory.hamiltonian_series(&sim.closed_loop)?;
            println!(
                "  dt {dt:<7} H(0) {:.4} H(T) {:.4}  residual {:.3e}  dissipative {}  projected by {:.2e}",
                h[0],
                h[h.len() - 1],
                power_balance_residual(&sim.closed_loop, &sim.trajectory)?,
                dissipation_inequality_check(&sim.closed_loop, &sim.trajectory, &tol)?,
                sim.projection_distance
            );
        }
    }

    let sim = simulate_closed_loop(&sys, &f, &x0, &InputSignal::zero(2), 0.05, 1e-2, &tol)?;
    write_trajectory_csv(&sim.closed_loop, &sim.trajectory, std::io::stdout())?;
    Ok(())
}
