//! Kronecker structure and feedback existence conditions for generated systems.

use ph_feedback::generators::{random_ph, Knobs};
use ph_feedback::linalg::ToleranceConfig;
use ph_feedback::pencil::{condition_con1, condition_con1_2, condition_con2, pencil_report, singular_common_nullspace};

fn main() -> ph_feedback::Result<()> {
    let tol = ToleranceConfig::default();
    let cases = [
        ("generic", Knobs::default()),
        ("rank E = 2", Knobs { rank_e: Some(2), ..Knobs::default() }),
        ("undamped oscillator", Knobs { force_axis_modes: true, ..Knobs::default() }),
        ("common nullspace", Knobs { force_singular: true, ..Knobs::default() }),
        ("S > 0", Knobs { s_definite: true, ..Knobs::default() }),
    ];
    for (label, knobs) in cases {
        let sys = random_ph(5, 2, 17, &knobs)?;
        let rep = pencil_report(&sys.e, &sys.a(), &tol)?;
        println!("{label}");
        println!(
            "  regular {}, index {:?}, rank E {}, {:?}, abscissa {:?}",
            rep.regular, rep.index, rep.rank_e, rep.stability_class, rep.spectral_abscissa
        );
        println!("  common nullspace of E, J, R: {}", singular_common_nullspace(&sys, &tol)?);
        let c1 = condition_con1(&sys, &tol)?;
        let c12 = condition_con1_2(&sys, &tol)?;
        let c2 = condition_con2(&sys, &tol)?;
        println!(
            "  axis rank {} ({} witnesses), rank at infinity {}/{}, passivity {}",
            c1.holds,
            c1.witnesses.len(),
            c12.rank,
            c12.required,
            c2.holds
        );
    }
    Ok(())
}
