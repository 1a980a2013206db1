//! Problem files (JSON) and solution tables (CSV).
//!
//! A problem file looks like
//!
//! ```json
//! {"version": 1, "alpha": 0.5, "beta": 0.75, "lambda": 1, "c0": 1, "gamma": 0.25,
//!  "f": "abs(x)/((99+t^2)*(1+abs(x)))", "bounds": {"L": 0.01},
//!  "grid": {"n": 4096, "q": 3}}
//! ```
//!
//! `version`, `gamma`, `bounds` and `grid` are optional. Unknown keys are rejected.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::expr::{parse, ParseError};
use crate::hadamard::{Endpoint, GridFunction, DEFAULT_GRADING, DEFAULT_NODES};
use crate::langevin::ProblemSpec;
use crate::solvability::GrowthBounds;
use crate::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    #[serde(rename = "L1", default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    #[serde(rename = "L2", default, skip_serializing_if = "Option::is_none")]
    pub l2: Option<f64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    #[serde(default = "default_nodes")]
    pub n: usize,
    #[serde(default = "default_grading")]
    pub q: f64,
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

fn default_grading() -> f64 {
    DEFAULT_GRADING
}

impl Default for GridFile {
    fn default() -> Self {
        Self {
            n: DEFAULT_NODES,
            q: DEFAULT_GRADING,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub c0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridFile>,
}

#[derive(Debug, ThisError)]
pub enum ProblemFileError {
    #[error("malformed problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported problem file version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("in f: {source}\n{underline}")]
    Expression { source: ParseError, underline: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// A validated problem file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ProblemSpec,
    /// `None` when the file has no `bounds` object or it is empty.
    pub bounds: Option<GrowthBounds>,
    pub grid: GridFile,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, ProblemFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<Problem, ProblemFileError> {
        if let Some(v) = self.version {
            if v != FORMAT_VERSION {
                return Err(ProblemFileError::Version(v));
            }
        }
        let f = parse(&self.f).map_err(|e| ProblemFileError::Expression {
            underline: e.span.underline(&self.f),
            source: e,
        })?;
        let spec = ProblemSpec::new(self.alpha, self.beta, self.lambda, self.c0, self.gamma, f)?;
        let bounds = match &self.bounds {
            Some(b) => {
                let b = GrowthBounds::user(b.l1, b.l2, b.l)?;
                (!b.is_empty()).then_some(b)
            }
            None => None,
        };
        let grid = self.grid.unwrap_or_default();
        crate::hadamard::LogGrid::new(grid.n, grid.q)?;
        Ok(Problem { spec, bounds, grid })
    }
}

pub fn read_problem(text: &str) -> Result<Problem, ProblemFileError> {
    ProblemFile::from_json(text)?.validate()
}

/// Renders x as `t,u,x,weighted_x` rows, one per node, with 17 significant
/// digits. On a singular endpoint the first row carries `inf`/`-inf` in the
/// x column and the finite weighted limit in the last.
pub fn solution_csv(x: &GridFunction, warning: Option<&str>) -> String {
    let grid = x.grid();
    let weighted = x.weighted_values();
    let mut out = String::with_capacity(80 * grid.len() + 128);
    let _ = writeln!(out, "# hadamard-langevin solution v{FORMAT_VERSION} gamma={:.16e}", x.gamma());
    if let Some(w) = warning {
        for line in w.lines() {
            let _ = writeln!(out, "# WARNING: {line}");
        }
    }
    if let Endpoint::Singular { exponent, coeff } = x.endpoint() {
        let _ = writeln!(
            out,
            "# first node singular: x ~ {coeff:.16e} * u^(-{exponent:.16e})"
        );
    }
    out.push_str("t,u,x,weighted_x\n");
    for (i, ((&t, &u), &v)) in grid.t().iter().zip(grid.u()).zip(x.values()).enumerate() {
        let _ = writeln!(out, "{t:.16e},{u:.16e},{v:.16e},{:.16e}", weighted[i]);
    }
    out
}
