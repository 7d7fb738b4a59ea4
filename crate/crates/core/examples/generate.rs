//! Seeded generation with structural knobs, and the brute-force axis oracle.

use ph_feedback::generators::{brute_force_rank_on_axis, random_ph, Knobs};
use ph_feedback::linalg::{hstack, ToleranceConfig};
use ph_feedback::pencil::{feedthrough_input_blocks, imaginary_axis_full_rank, pencil_report};

fn main() -> ph_feedback::Result<()> {
    let tol = ToleranceConfig::default();
    let grid: Vec<f64> = (-10..=10).map(f64::from).collect();
    let knobs = [
        Knobs::default(),
        Knobs { rank_e: Some(1), rank_w: Some(1), ..Knobs::default() },
        Knobs { force_axis_modes: true, rank_e: Some(3), ..Knobs::default() },
        Knobs { force_singular: true, ..Knobs::default() },
    ];
    for k in &knobs {
        let sys = random_ph(5, 2, 99, k)?;
        assert_eq!(sys, random_ph(5, 2, 99, k)?);
        let rep = pencil_report(&sys.e, &sys.a(), &tol)?;
        let (b1, b3) = feedthrough_input_blocks(&sys, &tol)?;
        let b = hstack(&[&b1, &b3]);
        let verdict = imaginary_axis_full_rank(&sys.e, &sys.a(), &b, &tol)?;
        let mut samples = grid.clone();
        samples.extend(verdict.witnesses.iter().map(|w| w.im));
        println!(
            "{k:?}\n  regular {} index {:?} | axis rank: staircase {} brute force {}",
            rep.regular,
            rep.index,
            verdict.holds,
            brute_force_rank_on_axis(&sys.e, &sys.a(), &b, &samples)
        );
    }
    match random_ph(2, 1, 0, &Knobs { force_axis_modes: true, force_singular: true, ..Knobs::default() }) {
        Err(e) => println!("infeasible knobs are rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
