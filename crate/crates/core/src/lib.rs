//! Structure-preserving state feedback for port-Hamiltonian descriptor systems
//!
//! ```text
//! E ẋ = (J − R) x + (G − P) u
//!   y = (G + P)ᵀ x + (S + N) u
//! ```
//!
//! The crate decides whether a feedback `u = F x + v` exists that keeps the
//! closed loop port-Hamiltonian while making it regular, of index at most one and
//! asymptotically stable (or strictly passive), constructs such an `F`, and
//! certifies the result independently.
//!
//! ```
//! use ph_feedback::generators::{random_ph, Knobs};
//! use ph_feedback::{certify_closed_loop, synthesize_stabilizing, Goal, ToleranceConfig};
//!
//! let tol = ToleranceConfig::default();
//! let sys = random_ph(5, 2, 4, &Knobs { rank_e: Some(3), ..Knobs::default() })?;
//! let (f, trace) = synthesize_stabilizing(&sys, &tol, 1.0)?;
//! assert!(trace.identities_hold(&tol));
//! assert!(certify_closed_loop(&sys, &f, Goal::Stabilize, &tol)?.passed);
//! # Ok::<(), ph_feedback::Error>(())
//! ```

pub mod certify;
pub mod cli;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod model;
pub mod pencil;
pub mod sim;
pub mod synthesis;

pub use certify::{certify_closed_loop, CertReport, Goal};
pub use error::{Error, Result};
pub use linalg::{Mat, ToleranceConfig, Vector};
pub use model::{Feedback, PHSystem, Trajectory};
pub use pencil::{pencil_report, PencilReport, StabilityClass};
pub use sim::{simulate_closed_loop, InputSignal};
pub use synthesis::{synthesize_passifying, synthesize_stabilizing};
