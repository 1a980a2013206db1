//! The solution operator of the Langevin problem and its Picard iteration.
//!
//! With u = ln t, K(s) = s^{α−1} E_{α,α}(λ s^α) and σ = f(t, x),
//!
//! ```text
//! (Hx)(u) = c0 u^{α−1} E_{α,α}(λu^α) + ∫_0^u K(u − v) g(v) dv,
//! g(v)    = (I^β σ)(v) − J v^{β−1}/Γ(β),   J = ∫_0^1 (1 − v)^{β−1} σ(v) dv.
//! ```
//!
//! The J part is integrated in closed form,
//! ∫_0^u K(u−v) v^{β−1}/Γ(β) dv = u^{α+β−1} E_{α,α+β}(λu^α),
//! so only the regular part I^β σ goes through quadrature.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::expr::Expr;
use crate::hadamard::{
    derivative_with, first_derivative, weighted_norm, Endpoint, FullIntervalWeights, GridFunction, LogGrid,
    MlKernelWeights, VolterraWeights,
};
use crate::special::{gamma, MittagLefflerSeries, MlParams, Z_MAX};
use crate::{param_error, Error};

/// Data of the boundary-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub c0: f64,
    pub gamma: f64,
    pub f: Expr,
}

impl ProblemSpec {
    /// `gamma = None` selects the default weight 1 − α.
    pub fn new(
        alpha: f64,
        beta: f64,
        lambda: f64,
        c0: f64,
        gamma: Option<f64>,
        f: Expr,
    ) -> Result<Self, Error> {
        let spec = Self {
            alpha,
            beta,
            lambda,
            c0,
            gamma: gamma.unwrap_or(1.0 - alpha),
            f,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(param_error(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(param_error(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        if !(self.lambda > 0.0 && self.lambda <= Z_MAX) {
            return Err(param_error(format!(
                "lambda must lie in (0, {Z_MAX}], got {}",
                self.lambda
            )));
        }
        if !self.c0.is_finite() {
            return Err(param_error("c0 must be finite"));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(param_error(format!(
                "gamma must lie in [0, 1), got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// The three pieces of Hx: c0 times the homogeneous mode, −J times the
/// closed-form boundary mode, and the quadrature part y.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionParts {
    pub c0: f64,
    pub j: f64,
    pub y: Vec<f64>,
}

impl SolutionParts {
    pub fn minus(&self, other: &SolutionParts) -> SolutionParts {
        SolutionParts {
            c0: self.c0 - other.c0,
            j: self.j - other.j,
            y: self.y.iter().zip(&other.y).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Samples of g = I^β σ − J u^{β−1}/Γ(β).
#[derive(Debug, Clone, PartialEq)]
pub struct BracketField {
    /// I^β σ at every node.
    pub psi: Vec<f64>,
    /// ∫_0^1 (1 − v)^{β−1} σ(v) dv.
    pub j: f64,
    /// g at every node; g[0] is not defined for β < 1 and holds NaN.
    pub g: Vec<f64>,
}

impl BracketField {
    /// g(e), zero by construction of J.
    pub fn at_end(&self) -> f64 {
        *self.g.last().unwrap()
    }
}

/// Precomputed quadrature for one problem on one grid.
#[derive(Debug, Clone)]
pub struct LangevinOperator {
    spec: ProblemSpec,
    grid: Arc<LogGrid>,
    i_beta: VolterraWeights,
    full: FullIntervalWeights,
    ml: MlKernelWeights,
    homogeneous: Vec<f64>,
    boundary_mode: Vec<f64>,
    gamma_beta: f64,
}

impl LangevinOperator {
    pub fn new(spec: ProblemSpec, grid: Arc<LogGrid>) -> Result<Self, Error> {
        spec.validate()?;
        let (a, b, lam) = (spec.alpha, spec.beta, spec.lambda);
        let i_beta = VolterraWeights::new(grid.clone(), b)?;
        let full = FullIntervalWeights::new(grid.clone(), b)?;
        let ml = MlKernelWeights::new(grid.clone(), a, lam)?;
        let e_aa = MittagLefflerSeries::new(MlParams::new(a, a)?, lam);
        let e_ab = MittagLefflerSeries::new(MlParams::new(a, a + b)?, lam);
        let mut homogeneous = vec![0.0; grid.len()];
        let mut boundary_mode = vec![0.0; grid.len()];
        for (j, &u) in grid.u().iter().enumerate().skip(1) {
            let z = lam * u.powf(a);
            homogeneous[j] = u.powf(a - 1.0) * e_aa.eval(z)?.value;
            boundary_mode[j] = u.powf(a + b - 1.0) * e_ab.eval(z)?.value;
        }
        Ok(Self {
            gamma_beta: gamma(b)?,
            spec,
            grid,
            i_beta,
            full,
            ml,
            homogeneous,
            boundary_mode,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    /// Parts of the homogeneous solution (f frozen to 0).
    pub fn homogeneous_parts(&self) -> SolutionParts {
        SolutionParts {
            c0: self.spec.c0,
            j: 0.0,
            y: vec![0.0; self.grid.len()],
        }
    }

    /// Builds the grid function c0·h − J·b + y with its endpoint behaviour.
    pub fn assemble(&self, parts: &SolutionParts) -> Result<GridFunction, Error> {
        let (a, b) = (self.spec.alpha, self.spec.beta);
        let mut values: Vec<f64> = (0..self.grid.len())
            .map(|i| parts.c0 * self.homogeneous[i] - parts.j * self.boundary_mode[i] + parts.y[i])
            .collect();
        let boundary_exp = a + b - 1.0;
        let endpoint = if a < 1.0 && parts.c0 != 0.0 {
            Endpoint::Singular {
                exponent: 1.0 - a,
                coeff: parts.c0 / gamma(a)?,
            }
        } else {
            let homogeneous0 = if a == 1.0 { parts.c0 } else { 0.0 };
            if boundary_exp < 0.0 && parts.j != 0.0 {
                Endpoint::Singular {
                    exponent: -boundary_exp,
                    coeff: -parts.j / gamma(a + b)?,
                }
            } else {
                let boundary0 = if boundary_exp <= 0.0 {
                    parts.j / gamma(a + b)?
                } else {
                    0.0
                };
                values[0] = homogeneous0 - boundary0 + parts.y[0];
                Endpoint::Finite
            }
        };
        Ok(GridFunction::from_parts_unchecked(
            self.grid.clone(),
            values,
            self.spec.gamma,
            endpoint,
        ))
    }

    /// σ(t_j) = f(t_j, x(t_j)). Where x is singular at t = 1 the first
    /// sample uses x(t_1).
    pub fn sigma(&self, x: &GridFunction) -> Result<GridFunction, Error> {
        if **x.grid() != *self.grid {
            return Err(param_error("iterate lives on a different grid"));
        }
        let t = self.grid.t();
        let v = x.values();
        let f = &self.spec.f;
        let sigma = (0..t.len())
            .into_par_iter()
            .map(|j| {
                let xj = match (j, x.endpoint()) {
                    (0, Endpoint::Singular { .. }) => v[1],
                    _ => v[j],
                };
                f.eval(t[j], xj).map_err(|source| Error::Eval { node: j, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        GridFunction::new(self.grid.clone(), sigma, 0.0)
    }

    pub fn bracket(&self, x: &GridFunction) -> Result<BracketField, Error> {
        let sigma = self.sigma(x)?;
        self.bracket_of_sigma(&sigma)
    }

    fn bracket_of_sigma(&self, sigma: &GridFunction) -> Result<BracketField, Error> {
        let psi = self.i_beta.apply(sigma)?.values().to_vec();
        let j = self.full.apply(sigma)?;
        let b = self.spec.beta;
        let u = self.grid.u();
        let n = self.grid.n();
        let g: Vec<f64> = (0..=n)
            .map(|i| {
                if i == 0 {
                    if b == 1.0 {
                        psi[0] - j
                    } else {
                        f64::NAN
                    }
                } else if i == n {
                    psi[n] - j / self.gamma_beta
                } else {
                    psi[i] - j * u[i].powf(b - 1.0) / self.gamma_beta
                }
            })
            .collect();
        Ok(BracketField { psi, j, g })
    }

    pub fn apply_parts(&self, x: &GridFunction) -> Result<SolutionParts, Error> {
        let sigma = self.sigma(x)?;
        let psi = self.i_beta.apply(&sigma)?;
        let j = self.full.apply(&sigma)?;
        let y = self.ml.apply(&psi)?;
        Ok(SolutionParts {
            c0: self.spec.c0,
            j,
            y,
        })
    }

    /// (Hx)(t_j) at every node.
    pub fn apply(&self, x: &GridFunction) -> Result<GridFunction, Error> {
        self.assemble(&self.apply_parts(x)?)
    }
}

/// One application of H on the default grid profile of `x`.
pub fn apply_h(p: &ProblemSpec, x: &GridFunction) -> Result<GridFunction, Error> {
    LangevinOperator::new(p.clone(), x.grid().clone())?.apply(x)
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub solution: GridFunction,
    pub parts: SolutionParts,
    pub iterations: usize,
    /// d_k = ‖x_k − x_{k−1}‖ in the weighted norm.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Median of the last (up to five) ratios d_{k+1}/d_k; `None` when fewer
    /// than two nonzero steps were taken.
    pub rate_estimate: Option<f64>,
}

/// x_0 = homogeneous solution, x_{k+1} = H x_k until the weighted step is at
/// most `tol` or `max_iter` applications have been made.
pub fn picard_solve(op: &LangevinOperator, tol: f64, max_iter: usize) -> Result<PicardResult, Error> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(param_error(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter < 1 {
        return Err(param_error("max_iter must be at least 1"));
    }
    let mut parts = op.homogeneous_parts();
    let mut x = op.assemble(&parts)?;
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = op.apply_parts(&x)?;
        let step = weighted_norm(&op.assemble(&next.minus(&parts))?);
        history.push(step);
        x = op.assemble(&next)?;
        parts = next;
        if step <= tol {
            converged = true;
            break;
        }
    }
    Ok(PicardResult {
        solution: x,
        parts,
        iterations: history.len(),
        rate_estimate: rate_estimate(&history),
        history,
        converged,
    })
}

fn rate_estimate(history: &[f64]) -> Option<f64> {
    let ratios: Vec<f64> = history
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    if ratios.is_empty() {
        return None;
    }
    let mut last: Vec<f64> = ratios[ratios.len().saturating_sub(5)..].to_vec();
    last.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = last.len();
    Some(if m % 2 == 1 {
        last[m / 2]
    } else {
        0.5 * (last[m / 2 - 1] + last[m / 2])
    })
}

/// Residuals of a computed solution against the differential equation and
/// both boundary conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// max |D^β (D^α − λ) x − f(t, x)| over interior probe nodes.
    pub ode_residual: f64,
    /// |(D^α − λ) x(e)| = |g(e)|.
    pub right_boundary: f64,
    /// |(ln t_1)^{1−α} x(t_1) Γ(α) − c0|.
    pub left_boundary: f64,
    /// Probe nodes are those with ln t in this closed range.
    pub probe_range: (f64, f64),
    pub probe_count: usize,
}

pub const RESIDUAL_PROBE_RANGE: (f64, f64) = (0.1, 0.9);

fn derivative_of_order(order: f64, phi: &GridFunction) -> Result<GridFunction, Error> {
    if order == 1.0 {
        return Ok(first_derivative(phi));
    }
    let w = VolterraWeights::new(phi.grid().clone(), 1.0 - order)?;
    derivative_with(&w, phi)
}

pub fn residual_report(op: &LangevinOperator, x: &GridFunction) -> Result<ResidualReport, Error> {
    let p = op.spec();
    let grid = op.grid();
    let u = grid.u();
    let n = grid.n();

    let dx = derivative_of_order(p.alpha, x)?;
    let mut b: Vec<f64> = (0..=n)
        .map(|j| dx.values()[j] - p.lambda * x.values()[j])
        .collect();
    b[0] = b[1];
    let b = GridFunction::new(grid.clone(), b, 0.0)?;
    let db = derivative_of_order(p.beta, &b)?;
    let sigma = op.sigma(x)?;

    let (lo, hi) = RESIDUAL_PROBE_RANGE;
    let mut ode = 0.0f64;
    let mut count = 0;
    for j in 1..n {
        if u[j] >= lo && u[j] <= hi {
            ode = ode.max((db.values()[j] - sigma.values()[j]).abs());
            count += 1;
        }
    }

    let bracket = op.bracket(x)?;
    let left = (u[1].powf(1.0 - p.alpha) * x.values()[1] * gamma(p.alpha)? - p.c0).abs();
    Ok(ResidualReport {
        ode_residual: ode,
        right_boundary: bracket.at_end().abs(),
        left_boundary: left,
        probe_range: RESIDUAL_PROBE_RANGE,
        probe_count: count,
    })
}
