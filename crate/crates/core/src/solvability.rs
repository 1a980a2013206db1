//! Existence and uniqueness conditions.
//!
//! ```text
//! ω1 = (|c0| + L2 B(α,1+β)/Γ(β+1) + L2 B(α,β)/Γ(β+1)) E_{α,α}(λ)
//! ω2 = B(β,1−γ)/Γ(β) · (B(α,1+β−γ) + B(α,β)) · E_{α,α}(λ)
//! ```
//!
//! A solution exists when |f(t,x)| ≤ L1|x| + L2 with L1·ω2 < 1, and it is
//! unique when f is L-Lipschitz in x with L·ω2 < 1. Both inequalities are
//! strict; values within [`TIE_TOL`] of 1 are reported as inconclusive.

use serde::Serialize;

use crate::expr::Expr;
use crate::langevin::ProblemSpec;
use crate::special::{beta_fn, gamma, mittag_leffler, MlParams};
use crate::{param_error, Error};

pub const TIE_TOL: f64 = 1e-12;
/// Half-width of the x range sampled by [`estimate_bounds`].
pub const DEFAULT_SAMPLE_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    UserSupplied,
    AutoEstimated,
}

/// Growth constants of f: |f(t,x)| ≤ L1|x| + L2 and
/// |f(t,x) − f(t,y)| ≤ L|x − y|.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthBounds {
    #[serde(rename = "L1")]
    pub l1: Option<f64>,
    #[serde(rename = "L2")]
    pub l2: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub provenance: Provenance,
}

impl GrowthBounds {
    pub fn new(
        l1: Option<f64>,
        l2: Option<f64>,
        l: Option<f64>,
        provenance: Provenance,
    ) -> Result<Self, Error> {
        for (name, v) in [("L1", l1), ("L2", l2), ("L", l)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(param_error(format!("{name} must be finite and >= 0, got {v}")));
                }
            }
        }
        Ok(Self {
            l1,
            l2,
            l,
            provenance,
        })
    }

    pub fn user(l1: Option<f64>, l2: Option<f64>, l: Option<f64>) -> Result<Self, Error> {
        Self::new(l1, l2, l, Provenance::UserSupplied)
    }

    pub fn is_empty(&self) -> bool {
        self.l1.is_none() && self.l2.is_none() && self.l.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    /// Within [`TIE_TOL`] of the threshold.
    Inconclusive,
    /// The constants needed for the check were not supplied.
    NotEvaluable,
}

impl Verdict {
    fn from_product(v: Option<f64>) -> Verdict {
        match v {
            None => Verdict::NotEvaluable,
            Some(v) if v.is_nan() => Verdict::NotEvaluable,
            Some(v) if (v - 1.0).abs() <= TIE_TOL => Verdict::Inconclusive,
            Some(v) if v < 1.0 => Verdict::Holds,
            Some(_) => Verdict::Fails,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotEvaluable => "not evaluable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvabilityReport {
    /// Needs L2; `None` when L2 was not supplied.
    pub omega1: Option<f64>,
    pub omega2: f64,
    #[serde(rename = "L1_omega2")]
    pub l1_omega2: Option<f64>,
    #[serde(rename = "L_omega2")]
    pub l_omega2: Option<f64>,
    /// ω1 / (1 − L1 ω2), present when the existence condition holds.
    pub r_min: Option<f64>,
    pub existence_ok: bool,
    pub uniqueness_ok: bool,
    pub existence: Verdict,
    pub uniqueness: Verdict,
    pub bounds: GrowthBounds,
}

fn e_alpha_alpha_at_lambda(p: &ProblemSpec) -> Result<f64, Error> {
    Ok(mittag_leffler(MlParams::new(p.alpha, p.alpha)?, p.lambda)?.value)
}

pub fn compute_omega1(p: &ProblemSpec, b: &GrowthBounds) -> Result<f64, Error> {
    let l2 = b
        .l2
        .ok_or_else(|| param_error("omega1 needs the growth constant L2"))?;
    let (a, be) = (p.alpha, p.beta);
    let g = gamma(be + 1.0)?;
    let bracket = p.c0.abs() + l2 * beta_fn(a, 1.0 + be)? / g + l2 * beta_fn(a, be)? / g;
    Ok(bracket * e_alpha_alpha_at_lambda(p)?)
}

/// ω2 / E_{α,α}(λ).
pub fn omega2_coefficient(p: &ProblemSpec) -> Result<f64, Error> {
    if !(0.0..1.0).contains(&p.gamma) {
        return Err(param_error(format!("gamma must lie in [0, 1), got {}", p.gamma)));
    }
    let (a, be, g) = (p.alpha, p.beta, p.gamma);
    Ok(beta_fn(be, 1.0 - g)? / gamma(be)? * (beta_fn(a, 1.0 + be - g)? + beta_fn(a, be)?))
}

pub fn compute_omega2(p: &ProblemSpec) -> Result<f64, Error> {
    Ok(omega2_coefficient(p)? * e_alpha_alpha_at_lambda(p)?)
}

pub fn certify(p: &ProblemSpec, b: &GrowthBounds) -> Result<SolvabilityReport, Error> {
    let omega2 = compute_omega2(p)?;
    let omega1 = match b.l2 {
        Some(_) => Some(compute_omega1(p, b)?),
        None => None,
    };
    let l1_omega2 = b.l1.map(|l1| l1 * omega2);
    let l_omega2 = b.l.map(|l| l * omega2);
    let existence = Verdict::from_product(l1_omega2);
    let uniqueness = Verdict::from_product(l_omega2);
    let r_min = match (existence, omega1, l1_omega2) {
        (Verdict::Holds, Some(w1), Some(k)) => Some(w1 / (1.0 - k)),
        _ => None,
    };
    Ok(SolvabilityReport {
        omega1,
        omega2,
        l1_omega2,
        l_omega2,
        r_min,
        existence_ok: existence == Verdict::Holds,
        uniqueness_ok: uniqueness == Verdict::Holds,
        existence,
        uniqueness,
        bounds: b.clone(),
    })
}

/// Empirical growth constants of f on [1, e] × [−X, X], X =
/// [`DEFAULT_SAMPLE_RADIUS`]. Not rigorous: the result is tagged
/// [`Provenance::AutoEstimated`].
pub fn estimate_bounds(f: &Expr, samples: usize) -> Result<GrowthBounds, Error> {
    estimate_bounds_on(f, samples, DEFAULT_SAMPLE_RADIUS)
}

pub fn estimate_bounds_on(f: &Expr, samples: usize, radius: f64) -> Result<GrowthBounds, Error> {
    if samples < 1000 {
        return Err(param_error(format!("need at least 1000 samples, got {samples}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(param_error(format!("sample radius must be positive, got {radius}")));
    }
    let nt = ((samples as f64).sqrt() / 2.0).ceil().max(8.0) as usize;
    // Odd, so that x = 0 is a lattice point.
    let mut nx = samples.div_ceil(nt);
    if nx % 2 == 0 {
        nx += 1;
    }
    let xs: Vec<f64> = (0..nx)
        .map(|k| -radius + 2.0 * radius * k as f64 / (nx - 1) as f64)
        .collect();
    let mid = nx / 2;
    let e = std::f64::consts::E;

    let mut lip = 0.0f64;
    let mut l1 = 0.0f64;
    let mut l2 = 0.0f64;
    let mut rows = Vec::with_capacity(nt);
    for i in 0..nt {
        let t = 1.0 + (e - 1.0) * i as f64 / (nt - 1) as f64;
        let vals = xs
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let x = if k == mid { 0.0 } else { x };
                f.eval(t, x).map_err(|source| Error::Eval {
                    node: i * nx + k,
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        l2 = l2.max(vals[mid].abs());
        for k in 0..nx - 1 {
            let slope = (vals[k + 1] - vals[k]).abs() / (xs[k + 1] - xs[k]);
            lip = lip.max(slope);
        }
        rows.push(vals);
    }
    for vals in &rows {
        for (k, &x) in xs.iter().enumerate() {
            if k != mid {
                l1 = l1.max((vals[k].abs() - l2) / x.abs());
            }
        }
    }
    GrowthBounds::new(
        Some(l1.max(0.0)),
        Some(l2),
        Some(lip),
        Provenance::AutoEstimated,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn spec(c0: f64, gamma: f64) -> ProblemSpec {
        ProblemSpec::new(0.5, 0.75, 1.0, c0, Some(gamma), parse("0").unwrap()).unwrap()
    }

    #[test]
    fn omega1_vanishes_without_data() {
        let b = GrowthBounds::user(Some(0.0), Some(0.0), None).unwrap();
        assert_eq!(compute_omega1(&spec(0.0, 0.25), &b).unwrap(), 0.0);
    }

    #[test]
    fn omega2_with_zero_weight() {
        // B(β, 1)/Γ(β) = 1/Γ(β+1)
        let p = spec(1.0, 0.0);
        let e = e_alpha_alpha_at_lambda(&p).unwrap();
        let direct = (1.0 / gamma(1.75).unwrap())
            * (beta_fn(0.5, 1.75).unwrap() + beta_fn(0.5, 0.75).unwrap())
            * e;
        let w = compute_omega2(&p).unwrap();
        assert!((w - direct).abs() <= 1e-13 * direct, "{w} vs {direct}");
    }

    #[test]
    fn missing_constants_are_not_evaluable() {
        let b = GrowthBounds::user(None, Some(0.25), None).unwrap();
        let r = certify(&spec(1.0, 0.25), &b).unwrap();
        assert_eq!(r.existence, Verdict::NotEvaluable);
        assert_eq!(r.uniqueness, Verdict::NotEvaluable);
        assert!(!r.existence_ok && r.r_min.is_none());
    }

    #[test]
    fn tie_is_inconclusive() {
        let p = spec(1.0, 0.25);
        let w2 = compute_omega2(&p).unwrap();
        let b = GrowthBounds::user(Some(1.0 / w2), Some(0.1), Some(1.0 / w2)).unwrap();
        let r = certify(&p, &b).unwrap();
        assert_eq!(r.existence, Verdict::Inconclusive);
        assert_eq!(r.uniqueness, Verdict::Inconclusive);
    }

    #[test]
    fn rejects_negative_constants() {
        assert!(GrowthBounds::user(Some(-1.0), None, None).is_err());
    }
}
