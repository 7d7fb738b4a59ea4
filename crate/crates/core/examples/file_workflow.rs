//! The file-based workflow behind the `phfb` binary: generate, save, load,
//! stabilize, and certify the saved feedback.

use ph_feedback::generators::{random_ph, Knobs};
use ph_feedback::io::{load_feedback, load_system, save_feedback, save_system, Metadata};
use ph_feedback::linalg::ToleranceConfig;
use ph_feedback::{certify_closed_loop, synthesize_stabilizing, Goal};

fn main() -> ph_feedback::Result<()> {
    let dir = std::env::temp_dir().join(format!("phfb-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let tol = ToleranceConfig::default();

    let knobs = Knobs { rank_e: Some(2), ..Knobs::default() };
    let sys = random_ph(3, 1, 5, &knobs)?;
    let meta = Metadata { name: Some("demo".into()), seed: Some(5), knobs: Some(knobs) };
    let sys_path = dir.join("system.json");
    save_system(&sys_path, &sys, Some(meta))?;

    let (loaded, meta) = load_system(&sys_path)?;
    println!("loaded {:?} (n = {}, m = {})", meta.and_then(|m| m.name), loaded.state_dim(), loaded.input_dim());

    let (f, _) = synthesize_stabilizing(&loaded, &tol, 1.0)?;
    let f_path = dir.join("feedback.json");
    save_feedback(&f_path, &f)?;
    let f = load_feedback(&f_path)?;
    let cert = certify_closed_loop(&loaded, &f, Goal::Stabilize, &tol)?;
    println!("certified from files: {} {:?}", cert.passed, cert.failures());

    // The same steps through the command-line entry point.
    let run = |args: &[&str]| ph_feedback::cli::run(std::iter::once("phfb").chain(args.iter().copied()));
    let sys_s = sys_path.to_string_lossy().into_owned();
    let f_s = f_path.to_string_lossy().into_owned();
    let out = dir.join("cert.json").to_string_lossy().into_owned();
    let code = run(&["certify", "--input", &sys_s, "--feedback", &f_s, "--output", &out]);
    println!("phfb certify exit code {code}");

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
