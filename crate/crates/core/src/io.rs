//! JSON system and feedback files, and the report documents written by the CLI.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certify::CertReport;
use crate::error::{Error, Result};
use crate::generators::Knobs;
use crate::linalg::Mat;
use crate::model::{Feedback, PHSystem};
use crate::pencil::{AxisRankVerdict, Con2Verdict, PencilReport, RankVerdict};
use crate::synthesis::IdentityCheck;

pub type Rows = Vec<Vec<f64>>;

pub fn to_rows(m: &Mat) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Builds a `rows × cols` matrix, checking every row length.
pub fn from_rows(name: &str, rows: &Rows, nrows: usize, ncols: usize) -> Result<Mat> {
    if rows.len() != nrows {
        return Err(Error::Malformed(format!("{name} has {} rows, expected {nrows}", rows.len())));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::Malformed(format!(
            "{name} row {i} has {} entries, expected {ncols}",
            r.len()
        )));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Malformed(format!("{name} contains a non-finite entry")));
    }
    Ok(Mat::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knobs: Option<Knobs>,
}

/// On-disk system: the feedthrough is stored as `D = S + N` and split on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "E")]
    pub e: Rows,
    #[serde(rename = "J")]
    pub j: Rows,
    #[serde(rename = "R")]
    pub r: Rows,
    #[serde(rename = "G")]
    pub g: Rows,
    #[serde(rename = "P")]
    pub p: Rows,
    #[serde(rename = "D")]
    pub d: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl SystemFile {
    pub fn from_system(sys: &PHSystem, metadata: Option<Metadata>) -> Self {
        Self {
            n: sys.state_dim(),
            m: sys.input_dim(),
            e: to_rows(&sys.e),
            j: to_rows(&sys.j),
            r: to_rows(&sys.r),
            g: to_rows(&sys.g),
            p: to_rows(&sys.p),
            d: to_rows(&sys.feedthrough()),
            metadata,
        }
    }

    pub fn to_system(&self) -> Result<PHSystem> {
        let (n, m) = (self.n, self.m);
        PHSystem::from_feedthrough(
            from_rows("E", &self.e, n, n)?,
            from_rows("J", &self.j, n, n)?,
            from_rows("R", &self.r, n, n)?,
            from_rows("G", &self.g, n, m)?,
            from_rows("P", &self.p, n, m)?,
            &from_rows("D", &self.d, m, m)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackFile {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "F")]
    pub f: Rows,
}

impl FeedbackFile {
    pub fn from_feedback(f: &Feedback) -> Self {
        Self {
            m: f.0.nrows(),
            n: f.0.ncols(),
            f: to_rows(&f.0),
        }
    }

    pub fn to_feedback(&self) -> Result<Feedback> {
        Ok(Feedback(from_rows("F", &self.f, self.m, self.n)?))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn load_system(path: &Path) -> Result<(PHSystem, Option<Metadata>)> {
    let file: SystemFile = read_json(path)?;
    let sys = file.to_system()?;
    Ok((sys, file.metadata))
}

pub fn save_system(path: &Path, sys: &PHSystem, metadata: Option<Metadata>) -> Result<()> {
    fs::write(path, to_json(&SystemFile::from_system(sys, metadata))?)?;
    Ok(())
}

pub fn load_feedback(path: &Path) -> Result<Feedback> {
    read_json::<FeedbackFile>(path)?.to_feedback()
}

pub fn save_feedback(path: &Path, f: &Feedback) -> Result<()> {
    fs::write(path, to_json(&FeedbackFile::from_feedback(f))?)?;
    Ok(())
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub pencil: PencilReport,
    pub singular_common_nullspace: bool,
    /// A vector in the common nullspace of `E`, `J`, `R`, when one exists.
    pub common_nullspace_witness: Option<Vec<f64>>,
    pub con1: AxisRankVerdict,
    pub con1_2: RankVerdict,
    pub con2: Con2Verdict,
}

/// Output of `stabilize` and `passify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub status: String,
    pub feedback: Option<FeedbackFile>,
    pub certification: Option<CertReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_sizes: Option<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub identity_checks: Vec<IdentityCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<num_complex::Complex64>,
}

/// Output of `simulate` (the trajectory itself goes to CSV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub steps: usize,
    pub dt: f64,
    pub t_end: f64,
    pub projection_distance: f64,
    pub x0_used: Vec<f64>,
    pub power_balance_residual: f64,
    pub dissipation_inequality: bool,
    pub psd_tol: f64,
}
