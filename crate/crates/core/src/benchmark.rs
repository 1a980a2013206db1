//! The worked example with α = 1/2, β = 3/4, λ = 1, γ = 1/4, c0 = 1.
//!
//! Two right-hand sides are used:
//! `sin(|x|/81) + 1/(1+t)^2` (L1 = 1/81, L2 = 1/4) and
//! `|x|/((99+t^2)(1+|x|))` (L = 1/100).
//! [`compare_published`] recomputes the five quantities quoted for it to ten
//! digits and reports the relative error of each.

use serde::Serialize;

use crate::expr::parse;
use crate::langevin::ProblemSpec;
use crate::solvability::{compute_omega2, omega2_coefficient, GrowthBounds};
use crate::special::{mittag_leffler, MlParams};
use crate::Error;

pub const EXAMPLE_ALPHA: f64 = 0.5;
pub const EXAMPLE_BETA: f64 = 0.75;
pub const EXAMPLE_LAMBDA: f64 = 1.0;
pub const EXAMPLE_GAMMA: f64 = 0.25;
pub const EXAMPLE_C0: f64 = 1.0;
pub const EXISTENCE_F: &str = "sin((1/81)*abs(x)) + 1/(1+t)^2";
pub const UNIQUENESS_F: &str = "abs(x)/((99+t^2)*(1+abs(x)))";

/// Relative tolerance matching ten printed digits.
pub const DEFAULT_TOLERANCE: f64 = 5e-9;

pub const PUBLISHED_E_HALF_HALF: f64 = 5.573170227;
pub const PUBLISHED_EXISTENCE_COEFF: f64 = 0.06772116862;
pub const PUBLISHED_L1_OMEGA2: f64 = 0.3774216007;
pub const PUBLISHED_UNIQUENESS_COEFF: f64 = 0.05485414658;
pub const PUBLISHED_L_OMEGA2: f64 = 0.3057114966;

fn example_spec(f: &str, c0: f64) -> Result<ProblemSpec, Error> {
    ProblemSpec::new(
        EXAMPLE_ALPHA,
        EXAMPLE_BETA,
        EXAMPLE_LAMBDA,
        c0,
        Some(EXAMPLE_GAMMA),
        parse(f)?,
    )
}

pub fn existence_example() -> Result<(ProblemSpec, GrowthBounds), Error> {
    Ok((
        example_spec(EXISTENCE_F, EXAMPLE_C0)?,
        GrowthBounds::user(Some(1.0 / 81.0), Some(0.25), None)?,
    ))
}

pub fn uniqueness_example() -> Result<(ProblemSpec, GrowthBounds), Error> {
    Ok((
        example_spec(UNIQUENESS_F, EXAMPLE_C0)?,
        GrowthBounds::user(None, None, Some(0.01))?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub name: &'static str,
    pub published: f64,
    pub computed: f64,
    pub rel_error: f64,
    pub matches: bool,
}

impl Comparison {
    fn new(name: &'static str, published: f64, computed: f64, tol: f64) -> Self {
        let rel_error = ((computed - published) / published).abs();
        Self {
            name,
            published,
            computed,
            rel_error,
            matches: rel_error <= tol,
        }
    }
}

/// L1·ω2 assembled the way the example writes it:
/// (L1·B(β,1−γ)/Γ(β)·(B + B)) · E_{α,α}(λ).
pub fn fused_product(p: &ProblemSpec, constant: f64) -> Result<f64, Error> {
    let e = mittag_leffler(MlParams::new(p.alpha, p.alpha)?, p.lambda)?.value;
    Ok(constant * omega2_coefficient(p)? * e)
}

pub fn compare_published(tol: f64) -> Result<Vec<Comparison>, Error> {
    let (p, b) = existence_example()?;
    let l1 = b.l1.unwrap_or_default();
    let l = uniqueness_example()?.1.l.unwrap_or_default();
    let e = mittag_leffler(MlParams::new(EXAMPLE_ALPHA, EXAMPLE_ALPHA)?, EXAMPLE_LAMBDA)?.value;
    let coeff = omega2_coefficient(&p)?;
    let omega2 = compute_omega2(&p)?;
    Ok(vec![
        Comparison::new("E_{1/2,1/2}(1)", PUBLISHED_E_HALF_HALF, e, tol),
        Comparison::new("L1*omega2/E", PUBLISHED_EXISTENCE_COEFF, l1 * coeff, tol),
        Comparison::new("L1*omega2", PUBLISHED_L1_OMEGA2, l1 * omega2, tol),
        Comparison::new("L*omega2/E", PUBLISHED_UNIQUENESS_COEFF, l * coeff, tol),
        Comparison::new("L*omega2", PUBLISHED_L_OMEGA2, l * omega2, tol),
    ])
}
