//! Command-line front end. Exit codes: 0 success, 1 conditions or certificate
//! failed (report still written), 2 malformed input or numerical breakdown.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certify::{certify_closed_loop, Goal};
use crate::error::{Error, Result};
use crate::generators::{random_ph, Knobs};
use crate::io::{
    load_feedback, load_system, save_feedback, save_system, to_json, AnalysisReport, FeedbackFile, Metadata,
    SimulationReport, SynthesisReport,
};
use crate::linalg::{nullspace_basis, vstack, ToleranceConfig, Vector};
use crate::model::{dissipation_inequality_check, power_balance_residual, Feedback, PHSystem};
use crate::pencil::{condition_con1, condition_con1_2, condition_con2, pencil_report, singular_common_nullspace};
use crate::sim::{simulate_closed_loop, write_trajectory_csv, InputSignal};
use crate::synthesis::{synthesize_passifying, synthesize_stabilizing};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "phfb", version, about = "Structure-preserving feedback for port-Hamiltonian descriptor systems")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TolArgs {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long = "tol", global = true)]
    rank_rtol: Option<f64>,
    /// Distance to the imaginary axis treated as zero.
    #[arg(long, global = true)]
    axis_tol: Option<f64>,
    /// Relative eigenvalue band for semidefiniteness.
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
}

impl TolArgs {
    fn config(&self) -> Result<ToleranceConfig> {
        let mut t = ToleranceConfig::default();
        if let Some(v) = self.rank_rtol {
            t.rank_rtol = v;
        }
        if let Some(v) = self.axis_tol {
            t.axis_tol = v;
        }
        if let Some(v) = self.psd_tol {
            t.psd_tol = v;
        }
        t.validate()?;
        Ok(t)
    }
}

#[derive(Debug, Args)]
struct Io {
    /// System file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GoalArg {
    Stabilize,
    Passify,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the structural constraints of a system.
    Validate(Io),
    /// Pencil structure and feedback existence conditions.
    Analyze(Io),
    /// Synthesize and certify a stabilizing feedback.
    Stabilize {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1.0)]
        margin: f64,
        /// Where to write the feedback matrix.
        #[arg(long)]
        feedback_out: Option<PathBuf>,
    },
    /// Synthesize and certify a strictly passivating feedback.
    Passify {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        feedback_out: Option<PathBuf>,
    },
    /// Certify a given feedback.
    Certify {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        feedback: PathBuf,
        #[arg(long, value_enum, default_value = "stabilize")]
        goal: GoalArg,
    },
    /// Simulate the closed loop with implicit Euler.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        /// Trajectory CSV destination; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Simulation report destination; standard error when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Feedback file; zero feedback when omitted.
        #[arg(long)]
        feedback: Option<PathBuf>,
        /// Initial state, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Constant input, comma separated; zero when omitted.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long = "T")]
        t_end: f64,
        #[arg(long)]
        dt: f64,
    },
    /// Generate a random system.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rank_e: Option<usize>,
        #[arg(long)]
        rank_w: Option<usize>,
        #[arg(long)]
        axis_modes: bool,
        #[arg(long)]
        singular: bool,
        #[arg(long)]
        s_definite: bool,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_vector(name: &str, text: &str, len: usize) -> Result<Vector> {
    let values: std::result::Result<Vec<f64>, _> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect();
    let values = values.map_err(|e| Error::Malformed(format!("--{name}: {e}")))?;
    if values.len() != len {
        return Err(Error::Malformed(format!(
            "--{name} has {} entries, expected {len}",
            values.len()
        )));
    }
    Ok(Vector::from_vec(values))
}

fn status(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn analyze(sys: &PHSystem, tol: &ToleranceConfig) -> Result<AnalysisReport> {
    let singular = singular_common_nullspace(sys, tol)?;
    let witness = singular.then(|| {
        let k = nullspace_basis(&vstack(&[&sys.e, &sys.j, &sys.r]), tol);
        k.column(0).iter().copied().collect()
    });
    Ok(AnalysisReport {
        pencil: pencil_report(&sys.e, &sys.a(), tol)?,
        singular_common_nullspace: singular,
        common_nullspace_witness: witness,
        con1: condition_con1(sys, tol)?,
        con1_2: condition_con1_2(sys, tol)?,
        con2: condition_con2(sys, tol)?,
    })
}

fn refusal(e: Error) -> Result<SynthesisReport> {
    match e {
        Error::ConditionsNotMet { reason, witnesses } => Ok(SynthesisReport {
            status: format!("conditions not met: {reason}"),
            feedback: None,
            certification: None,
            block_sizes: None,
            beta: None,
            identity_checks: Vec::new(),
            witnesses,
        }),
        other => Err(other),
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let tol = cli.tol.config()?;
    match cli.command {
        Command::Validate(io) => {
            let (sys, _) = load_system(&io.input)?;
            let rep = sys.validate(&tol)?;
            emit(io.output.as_deref(), &to_json(&rep)?)?;
            for f in rep.failures() {
                eprintln!("constraint failed: {} (margin {:.6e})", f.constraint, f.margin);
            }
            Ok(status(rep.passed))
        }
        Command::Analyze(io) => {
            let (sys, _) = load_system(&io.input)?;
            let rep = analyze(&sys, &tol)?;
            emit(io.output.as_deref(), &to_json(&rep)?)?;
            Ok(EXIT_OK)
        }
        Command::Stabilize {
            io,
            margin,
            feedback_out,
        } => {
            let (sys, _) = load_system(&io.input)?;
            let report = match synthesize_stabilizing(&sys, &tol, margin) {
                Ok((f, trace)) => {
                    let cert = certify_closed_loop(&sys, &f, Goal::Stabilize, &tol)?;
                    if let Some(p) = &feedback_out {
                        save_feedback(p, &f)?;
                    }
                    SynthesisReport {
                        status: if cert.passed { "certified" } else { "certification failed" }.into(),
                        feedback: Some(FeedbackFile::from_feedback(&f)),
                        certification: Some(cert),
                        block_sizes: Some(trace.mu),
                        beta: Some(trace.beta),
                        identity_checks: trace.identity_checks(&tol),
                        witnesses: Vec::new(),
                    }
                }
                Err(e) => refusal(e)?,
            };
            finish_synthesis(io.output.as_deref(), report)
        }
        Command::Passify { io, feedback_out } => {
            let (sys, _) = load_system(&io.input)?;
            let report = match synthesize_passifying(&sys, &tol) {
                Ok(f) => {
                    let cert = certify_closed_loop(&sys, &f, Goal::Passify, &tol)?;
                    if let Some(p) = &feedback_out {
                        save_feedback(p, &f)?;
                    }
                    SynthesisReport {
                        status: if cert.passed { "certified" } else { "certification failed" }.into(),
                        feedback: Some(FeedbackFile::from_feedback(&f)),
                        certification: Some(cert),
                        block_sizes: None,
                        beta: None,
                        identity_checks: Vec::new(),
                        witnesses: Vec::new(),
                    }
                }
                Err(e) => refusal(e)?,
            };
            finish_synthesis(io.output.as_deref(), report)
        }
        Command::Certify { io, feedback, goal } => {
            let (sys, _) = load_system(&io.input)?;
            let f = load_feedback(&feedback)?;
            let goal = match goal {
                GoalArg::Stabilize => Goal::Stabilize,
                GoalArg::Passify => Goal::Passify,
            };
            let cert = certify_closed_loop(&sys, &f, goal, &tol)?;
            emit(io.output.as_deref(), &to_json(&cert)?)?;
            for msg in cert.failures() {
                eprintln!("{msg}");
            }
            Ok(status(cert.passed))
        }
        Command::Simulate {
            input,
            output,
            report,
            feedback,
            x0,
            u,
            t_end,
            dt,
        } => {
            let (sys, _) = load_system(&input)?;
            let (n, m) = (sys.state_dim(), sys.input_dim());
            let f = match feedback {
                Some(p) => load_feedback(&p)?,
                None => Feedback::zeros(m, n),
            };
            let x0 = parse_vector("x0", &x0, n)?;
            let v = match u {
                Some(text) => parse_vector("u", &text, m)?,
                None => Vector::zeros(m),
            };
            let sim = simulate_closed_loop(&sys, &f, &x0, &InputSignal::constant(v.as_slice()), t_end, dt, &tol)?;
            let mut csv = Vec::new();
            write_trajectory_csv(&sim.closed_loop, &sim.trajectory, &mut csv)?;
            emit(output.as_deref(), &String::from_utf8_lossy(&csv))?;
            let residual = power_balance_residual(&sim.closed_loop, &sim.trajectory)?;
            let dissipative = dissipation_inequality_check(&sim.closed_loop, &sim.trajectory, &tol)?;
            let rep = SimulationReport {
                steps: sim.trajectory.len() - 1,
                dt,
                t_end,
                projection_distance: sim.projection_distance,
                x0_used: sim.x0.iter().copied().collect(),
                power_balance_residual: residual,
                dissipation_inequality: dissipative,
                psd_tol: tol.psd_tol,
            };
            match report {
                Some(p) => fs::write(p, to_json(&rep)?)?,
                None => eprint!("{}", to_json(&rep)?),
            }
            Ok(status(dissipative))
        }
        Command::Gen {
            n,
            m,
            seed,
            rank_e,
            rank_w,
            axis_modes,
            singular,
            s_definite,
            name,
            output,
        } => {
            let knobs = Knobs {
                rank_e,
                rank_w,
                force_axis_modes: axis_modes,
                force_singular: singular,
                s_definite,
            };
            let sys = random_ph(n, m, seed, &knobs)?;
            let meta = Metadata {
                name,
                seed: Some(seed),
                knobs: Some(knobs),
            };
            match output {
                Some(p) => save_system(&p, &sys, Some(meta))?,
                None => emit(None, &to_json(&crate::io::SystemFile::from_system(&sys, Some(meta)))?)?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn finish_synthesis(output: Option<&Path>, report: SynthesisReport) -> Result<i32> {
    emit(output, &to_json(&report)?)?;
    let certified = report.certification.as_ref().is_some_and(|c| c.passed);
    if !certified {
        eprintln!("{}", report.status);
        if let Some(c) = &report.certification {
            for msg in c.failures() {
                eprintln!("{msg}");
            }
        }
    }
    Ok(status(certified))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
