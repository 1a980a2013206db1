//! Graded meshes in u = ln t, grid functions on [1, e], product-integration
//! weights for the Hadamard kernels and the weighted norm.
//!
//! In the log variable the Hadamard integral becomes a Riemann-Liouville
//! integral,
//!
//! ```text
//! I^μ φ(u) = 1/Γ(μ) ∫_0^u (u − v)^{μ−1} φ(v) dv,
//! ```
//!
//! which is discretized by integrating the kernel exactly against the
//! piecewise-linear interpolant of φ. For functions that blow up like c·u^{−g}
//! at u = 0 the term c·u^{−g} is integrated in closed form and only the
//! remainder is interpolated.

use std::sync::Arc;

use rayon::prelude::*;

use crate::special::{beta_fn, gamma, KernelPrimitive};
use crate::{param_error, Error};

pub const DEFAULT_NODES: usize = 4096;
pub const DEFAULT_GRADING: f64 = 3.0;

/// Exponents closer than this are treated as equal.
const EXPONENT_TOL: f64 = 1e-12;
/// Ratio h/a up to which cell weights use the binomial series.
const SERIES_RATIO: f64 = 0.25;
const MAX_SERIES_TERMS: usize = 400;

/// Two-sided graded mesh on u ∈ [0, 1], clustered at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    n: usize,
    q: f64,
    u: Vec<f64>,
    t: Vec<f64>,
}

impl LogGrid {
    /// u_j = ½ (j / (n/2))^q on the left half, mirrored on the right half.
    pub fn new(n: usize, q: f64) -> Result<Self, Error> {
        if n < 16 || n % 2 != 0 {
            return Err(param_error(format!(
                "grid node count must be even and at least 16, got {n}"
            )));
        }
        if !(q.is_finite() && q >= 1.0) {
            return Err(param_error(format!(
                "grid grading exponent must be >= 1, got {q}"
            )));
        }
        let m = n / 2;
        let mut u = vec![0.0; n + 1];
        for (j, uj) in u.iter_mut().enumerate().take(m + 1) {
            *uj = 0.5 * (j as f64 / m as f64).powf(q);
        }
        for j in m + 1..=n {
            u[j] = 1.0 - u[n - j];
        }
        let t = u.iter().map(|v| v.exp()).collect();
        Ok(Self { n, q, u, t })
    }

    /// Number of cells; there are n + 1 nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the node with the given u, when it is a node of this grid.
    pub fn index_of(&self, u: f64) -> Option<usize> {
        self.u
            .binary_search_by(|v| v.partial_cmp(&u).unwrap())
            .ok()
    }
}

pub fn make_grid(n: usize, q: f64) -> Result<Arc<LogGrid>, Error> {
    LogGrid::new(n, q).map(Arc::new)
}

/// Behaviour of a grid function at t = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    /// `values[0]` is the value at t = 1.
    Finite,
    /// x(t) ≈ coeff · (ln t)^{−exponent} as t → 1⁺; `values[0]` only carries
    /// the sign as ±∞ and must not be used in arithmetic.
    Singular { exponent: f64, coeff: f64 },
}

/// Samples x(t_j) on a [`LogGrid`] together with the weight exponent γ of the
/// norm sup |(ln t)^γ x(t)|.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<LogGrid>,
    values: Vec<f64>,
    gamma: f64,
    endpoint: Endpoint,
}

fn check_gamma(gamma: f64) -> Result<(), Error> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(param_error(format!(
            "weight exponent gamma must lie in [0, 1), got {gamma}"
        )));
    }
    Ok(())
}

impl GridFunction {
    /// Function with a finite value at t = 1.
    pub fn new(grid: Arc<LogGrid>, values: Vec<f64>, gamma: f64) -> Result<Self, Error> {
        check_gamma(gamma)?;
        if values.len() != grid.len() {
            return Err(param_error(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(param_error(format!("sample {j} is not finite")));
        }
        Ok(Self {
            grid,
            values,
            gamma,
            endpoint: Endpoint::Finite,
        })
    }

    /// Function behaving like coeff · u^{−exponent} at u = 0, 0 < exponent < 1.
    /// `values[0]` is ignored.
    pub fn singular(
        grid: Arc<LogGrid>,
        mut values: Vec<f64>,
        gamma: f64,
        exponent: f64,
        coeff: f64,
    ) -> Result<Self, Error> {
        if !(exponent > 0.0 && exponent < 1.0) {
            return Err(param_error(format!(
                "endpoint singularity exponent must lie in (0, 1), got {exponent}"
            )));
        }
        if !coeff.is_finite() {
            return Err(param_error("endpoint singularity coefficient is not finite"));
        }
        if let Some(v) = values.first_mut() {
            *v = 0.0;
        }
        let mut f = Self::new(grid, values, gamma)?;
        f.values[0] = singular_flag(coeff);
        f.endpoint = Endpoint::Singular { exponent, coeff };
        Ok(f)
    }

    /// Samples φ(u) at every node, including u = 0.
    pub fn from_log_fn(
        grid: Arc<LogGrid>,
        gamma: f64,
        phi: impl Fn(f64) -> f64,
    ) -> Result<Self, Error> {
        let values = grid.u().iter().map(|&u| phi(u)).collect();
        Self::new(grid, values, gamma)
    }

    /// Samples c·u^{−g}·ρ(u) with the singular factor kept exact at u = 0.
    pub fn from_singular_log_fn(
        grid: Arc<LogGrid>,
        gamma: f64,
        exponent: f64,
        rho: impl Fn(f64) -> f64,
    ) -> Result<Self, Error> {
        let mut values: Vec<f64> = grid
            .u()
            .iter()
            .map(|&u| if u > 0.0 { u.powf(-exponent) * rho(u) } else { 0.0 })
            .collect();
        values[0] = 0.0;
        let coeff = rho(0.0);
        Self::singular(grid, values, gamma, exponent, coeff)
    }

    pub fn zeros(grid: Arc<LogGrid>, gamma: f64) -> Result<Self, Error> {
        let n = grid.len();
        Self::new(grid, vec![0.0; n], gamma)
    }

    pub(crate) fn from_parts_unchecked(
        grid: Arc<LogGrid>,
        values: Vec<f64>,
        gamma: f64,
        endpoint: Endpoint,
    ) -> Self {
        let mut f = Self {
            grid,
            values,
            gamma,
            endpoint,
        };
        if let Endpoint::Singular { coeff, .. } = endpoint {
            f.values[0] = singular_flag(coeff);
        }
        f
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn endpoint(&self) -> Endpoint {
        self.endpoint
    }

    fn with_gamma_unchecked(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self, Error> {
        check_gamma(gamma)?;
        self.gamma = gamma;
        Ok(self)
    }

    /// lim_{t→1⁺} (ln t)^γ x(t): 0, the coefficient, or ±∞ depending on how
    /// the singularity compares with the weight.
    pub fn weighted_v0(&self) -> f64 {
        match self.endpoint {
            Endpoint::Finite => {
                if self.gamma > 0.0 {
                    0.0
                } else {
                    self.values[0]
                }
            }
            Endpoint::Singular { exponent, coeff } => {
                if coeff == 0.0 || self.gamma > exponent + EXPONENT_TOL {
                    0.0
                } else if (self.gamma - exponent).abs() <= EXPONENT_TOL {
                    coeff
                } else {
                    singular_flag(coeff)
                }
            }
        }
    }

    /// (ln t_j)^γ x(t_j), with node 0 replaced by [`Self::weighted_v0`].
    pub fn weighted_values(&self) -> Vec<f64> {
        let u = self.grid.u();
        let mut w: Vec<f64> = self
            .values
            .iter()
            .zip(u)
            .map(|(&v, &uj)| if self.gamma == 0.0 { v } else { uj.powf(self.gamma) * v })
            .collect();
        w[0] = self.weighted_v0();
        w
    }

    /// Pointwise difference. Singular endpoints with equal exponents subtract
    /// their coefficients; otherwise the stronger singularity is kept.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction, Error> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && *self.grid != *other.grid {
            return Err(param_error("grid functions live on different grids"));
        }
        let mut values: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        use Endpoint::*;
        let endpoint = match (self.endpoint, other.endpoint) {
            (Finite, Finite) => Finite,
            (Singular { exponent, coeff }, Finite) => Singular { exponent, coeff },
            (Finite, Singular { exponent, coeff }) => Singular {
                exponent,
                coeff: -coeff,
            },
            (
                Singular {
                    exponent: g1,
                    coeff: c1,
                },
                Singular {
                    exponent: g2,
                    coeff: c2,
                },
            ) => {
                if (g1 - g2).abs() <= EXPONENT_TOL {
                    Singular {
                        exponent: g1,
                        coeff: c1 - c2,
                    }
                } else if g1 > g2 {
                    Singular {
                        exponent: g1,
                        coeff: c1,
                    }
                } else {
                    Singular {
                        exponent: g2,
                        coeff: -c2,
                    }
                }
            }
        };
        if endpoint == Finite {
            values[0] = self.values[0] - other.values[0];
        }
        Ok(GridFunction::from_parts_unchecked(
            self.grid.clone(),
            values,
            self.gamma,
            endpoint,
        ))
    }
}

fn singular_flag(coeff: f64) -> f64 {
    if coeff > 0.0 {
        f64::INFINITY
    } else if coeff < 0.0 {
        f64::NEG_INFINITY
    } else {
        0.0
    }
}

/// sup_j (ln t_j)^γ |x(t_j)|; node 0 contributes |weighted_v0|.
pub fn weighted_norm(phi: &GridFunction) -> f64 {
    let u = phi.grid.u();
    let mut m = phi.weighted_v0().abs();
    for j in 1..phi.values.len() {
        let w = if phi.gamma == 0.0 {
            phi.values[j].abs()
        } else {
            u[j].powf(phi.gamma) * phi.values[j].abs()
        };
        if w > m || w.is_nan() {
            m = w;
        }
    }
    m
}

/// (−1)^k binom(μ−1, k) divided by (k+1)(k+2) and by (k+2): the Taylor
/// coefficients of the left and right cell weights in r = h/a.
struct SeriesCoefficients {
    left: Vec<f64>,
    right: Vec<f64>,
}

fn series_coefficients(mu: f64, count: usize) -> SeriesCoefficients {
    let mut left = Vec::with_capacity(count);
    let mut right = Vec::with_capacity(count);
    let mut ck = 1.0;
    for k in 0..count {
        let kf = k as f64;
        left.push(ck / ((kf + 1.0) * (kf + 2.0)));
        right.push(ck / (kf + 2.0));
        ck *= (kf + 1.0 - mu) / (kf + 1.0);
    }
    SeriesCoefficients { left, right }
}

/// Weights of the two end values of a linear interpolant on a cell of width
/// h whose ends lie at distances a (left) and b = a − h (right) from the
/// target point, against the kernel s^{μ−1}; am = a^μ, bm = b^μ.
fn cell_weights(a: f64, b: f64, am: f64, bm: f64, h: f64, mu: f64, coef: &SeriesCoefficients) -> (f64, f64) {
    let r = h / a;
    if r <= SERIES_RATIO {
        // ∫_0^1 (1 − rθ)^{μ−1} (1 − θ) dθ and ∫_0^1 (1 − rθ)^{μ−1} θ dθ.
        let mut left = 0.0;
        let mut right = 0.0;
        let mut rk = 1.0;
        for (&cl, &cr) in coef.left.iter().zip(&coef.right) {
            let term = cr * rk;
            left += cl * rk;
            right += term;
            if term.abs() < 1e-17 * right.abs() {
                break;
            }
            rk *= r;
        }
        let scale = h * am / a;
        (scale * left, scale * right)
    } else {
        let d1 = (a * am - b * bm) / (mu + 1.0);
        let d0 = (am - bm) / mu;
        ((d1 - b * d0) / h, (a * d0 - d1) / h)
    }
}

/// Unscaled weights of ∫_0^U (U − v)^{μ−1} φ(v) dv for the nodes 0..=k,
/// U = u_k.
fn power_row(u: &[f64], k: usize, mu: f64, coef: &SeriesCoefficients) -> Vec<f64> {
    let target = u[k];
    let pow: Vec<f64> = (0..=k)
        .map(|j| if j == k { 0.0 } else { (target - u[j]).powf(mu) })
        .collect();
    let mut w = vec![0.0; k + 1];
    for j in 0..k {
        let h = u[j + 1] - u[j];
        let a = target - u[j];
        let b = target - u[j + 1];
        let (wl, wr) = cell_weights(a, b, pow[j], pow[j + 1], h, mu, coef);
        w[j] += wl;
        w[j + 1] += wr;
    }
    w
}

/// v − c·u^{−g}, with the limit 0 at u = 0.
fn regular_remainder(v: &[f64], u: &[f64], g: f64, c: f64) -> Vec<f64> {
    let mut r: Vec<f64> = v.iter().zip(u).map(|(&x, &uj)| x - c * uj.powf(-g)).collect();
    r[0] = 0.0;
    r
}

fn check_singular_exponent(g: f64) -> Result<(), Error> {
    if g >= 1.0 {
        return Err(param_error(format!(
            "cannot integrate an endpoint singularity of order {g} >= 1"
        )));
    }
    Ok(())
}

/// Lower-triangular product-integration weights of the Hadamard integral of
/// order μ: (I^μ φ)(t_i) ≈ Σ_{j≤i} w[i][j] φ(t_j).
#[derive(Debug, Clone)]
pub struct VolterraWeights {
    grid: Arc<LogGrid>,
    mu: f64,
    rows: Vec<Vec<f64>>,
}

impl VolterraWeights {
    pub fn new(grid: Arc<LogGrid>, mu: f64) -> Result<Self, Error> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(param_error(format!("integral order must be > 0, got {mu}")));
        }
        let scale = 1.0 / gamma(mu)?;
        let coef = series_coefficients(mu, MAX_SERIES_TERMS);
        let u = grid.u();
        let rows: Vec<Vec<f64>> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let mut w = power_row(u, i, mu, &coef);
                w.iter_mut().for_each(|x| *x *= scale);
                w
            })
            .collect();
        Ok(Self { grid, mu, rows })
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn order(&self) -> f64 {
        self.mu
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Applies the weights; the result keeps φ's weight exponent γ.
    pub fn apply(&self, phi: &GridFunction) -> Result<GridFunction, Error> {
        if *phi.grid != *self.grid {
            return Err(param_error("grid function and weights use different grids"));
        }
        let v = phi.values();
        let n = self.grid.len();
        let mut out = vec![0.0; n];
        match phi.endpoint() {
            Endpoint::Finite => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = dot(&self.rows[i], v);
                }
                Ok(GridFunction::from_parts_unchecked(
                    self.grid.clone(),
                    out,
                    phi.gamma(),
                    Endpoint::Finite,
                ))
            }
            Endpoint::Singular { exponent: g, coeff: c } => {
                check_singular_exponent(g)?;
                // c·u^{−g} is integrated exactly; the remainder vanishes at 0.
                let u = self.grid.u();
                let rest = regular_remainder(v, u, g, c);
                let k = c * gamma(1.0 - g)? / gamma(1.0 - g + self.mu)?;
                for i in 1..n {
                    out[i] = dot(&self.rows[i], &rest) + k * u[i].powf(self.mu - g);
                }
                let endpoint = if self.mu > g + EXPONENT_TOL {
                    Endpoint::Finite
                } else if (self.mu - g).abs() <= EXPONENT_TOL {
                    out[0] = c * gamma(1.0 - g)?;
                    Endpoint::Finite
                } else {
                    Endpoint::Singular {
                        exponent: g - self.mu,
                        coeff: c * gamma(1.0 - g)? / gamma(1.0 - g + self.mu)?,
                    }
                };
                Ok(GridFunction::from_parts_unchecked(
                    self.grid.clone(),
                    out,
                    phi.gamma(),
                    endpoint,
                ))
            }
        }
    }
}

/// Fixed-order dot product (ascending index).
fn dot(w: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, b) in w.iter().zip(v) {
        s += a * b;
    }
    s
}

/// (1/Γ(μ)) ∫_1^t (ln t/s)^{μ−1} φ(s) ds/s at every node.
pub fn hadamard_integral(mu: f64, phi: &GridFunction) -> Result<GridFunction, Error> {
    VolterraWeights::new(phi.grid().clone(), mu)?.apply(phi)
}

/// Unscaled weights of ∫_0^1 (1 − v)^{β−1} φ(v) dv.
#[derive(Debug, Clone)]
pub struct FullIntervalWeights {
    grid: Arc<LogGrid>,
    beta: f64,
    row: Vec<f64>,
}

impl FullIntervalWeights {
    pub fn new(grid: Arc<LogGrid>, beta: f64) -> Result<Self, Error> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(param_error(format!("beta must lie in (0, 1], got {beta}")));
        }
        let coef = series_coefficients(beta, MAX_SERIES_TERMS);
        let row = power_row(grid.u(), grid.n(), beta, &coef);
        Ok(Self { grid, beta, row })
    }

    pub fn apply(&self, phi: &GridFunction) -> Result<f64, Error> {
        if *phi.grid != *self.grid {
            return Err(param_error("grid function and weights use different grids"));
        }
        let v = phi.values();
        match phi.endpoint() {
            Endpoint::Finite => Ok(dot(&self.row, v)),
            Endpoint::Singular { exponent: g, coeff: c } => {
                check_singular_exponent(g)?;
                let rest = regular_remainder(v, self.grid.u(), g, c);
                Ok(dot(&self.row, &rest) + c * beta_fn(self.beta, 1.0 - g)?)
            }
        }
    }
}

/// ∫_1^e (1 − ln s)^{β−1} φ(s) ds/s.
pub fn full_interval_integral(beta: f64, phi: &GridFunction) -> Result<f64, Error> {
    FullIntervalWeights::new(phi.grid().clone(), beta)?.apply(phi)
}

/// d/du on a non-uniform mesh: three-point centred formula inside, one-sided
/// three-point formulas at the ends. With `skip_first`, node 0 is not used
/// (its value is not finite) and node 1 takes the forward formula.
fn log_derivative(values: &[f64], u: &[f64], skip_first: bool) -> Vec<f64> {
    let n = values.len() - 1;
    let mut d = vec![0.0; n + 1];
    let forward = |j: usize| {
        let h1 = u[j + 1] - u[j];
        let h2 = u[j + 2] - u[j + 1];
        -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * values[j] + (h1 + h2) / (h1 * h2) * values[j + 1]
            - h1 / (h2 * (h1 + h2)) * values[j + 2]
    };
    let start = if skip_first { 2 } else { 1 };
    if skip_first {
        d[1] = forward(1);
        d[0] = f64::NAN;
    } else {
        d[0] = forward(0);
    }
    for j in start..n {
        let h1 = u[j] - u[j - 1];
        let h2 = u[j + 1] - u[j];
        d[j] = -h2 / (h1 * (h1 + h2)) * values[j - 1]
            + (h2 - h1) / (h1 * h2) * values[j]
            + h1 / (h2 * (h1 + h2)) * values[j + 1];
    }
    let h1 = u[n - 1] - u[n - 2];
    let h2 = u[n] - u[n - 1];
    d[n] = h2 / (h1 * (h1 + h2)) * values[n - 2] - (h1 + h2) / (h1 * h2) * values[n - 1]
        + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * values[n];
    d
}

/// Hadamard derivative D^α φ = (t d/dt) I^{1−α} φ for 0 < α < 1.
///
/// Diagnostic grade: the fractional integral is accurate, the final
/// derivative is a second-order difference quotient, so only interior nodes
/// away from t = 1 are reliable.
pub fn hadamard_derivative(alpha: f64, phi: &GridFunction) -> Result<GridFunction, Error> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(param_error(format!(
            "derivative order must lie in (0, 1), got {alpha}"
        )));
    }
    let w = VolterraWeights::new(phi.grid().clone(), 1.0 - alpha)?;
    derivative_with(&w, phi)
}

/// Same as [`hadamard_derivative`] with prepared weights of order 1 − α.
pub fn derivative_with(w: &VolterraWeights, phi: &GridFunction) -> Result<GridFunction, Error> {
    let integral = w.apply(phi)?;
    Ok(first_derivative(&integral).with_gamma_unchecked(phi.gamma()))
}

/// d/du of the samples (t d/dt in the original variable). A singular
/// endpoint c·u^{−g} becomes −g·c·u^{−g−1}.
pub fn first_derivative(phi: &GridFunction) -> GridFunction {
    let u = phi.grid().u();
    match phi.endpoint() {
        Endpoint::Finite => GridFunction::from_parts_unchecked(
            phi.grid().clone(),
            log_derivative(phi.values(), u, false),
            phi.gamma(),
            Endpoint::Finite,
        ),
        Endpoint::Singular { exponent, coeff } => GridFunction::from_parts_unchecked(
            phi.grid().clone(),
            log_derivative(phi.values(), u, true),
            phi.gamma(),
            Endpoint::Singular {
                exponent: exponent + 1.0,
                coeff: -exponent * coeff,
            },
        ),
    }
}

/// Cell weights of the Mittag-Leffler kernel
/// K(s) = s^{α−1} E_{α,α}(λ s^α):
/// w[i][j] = ∫_{u_j}^{u_{j+1}} K(u_i − v) dv for j < i, from differences of the
/// closed-form primitive.
#[derive(Debug, Clone)]
pub struct MlKernelWeights {
    grid: Arc<LogGrid>,
    alpha: f64,
    lambda: f64,
    rows: Vec<Vec<f64>>,
}

impl MlKernelWeights {
    pub fn new(grid: Arc<LogGrid>, alpha: f64, lambda: f64) -> Result<Self, Error> {
        let prim = KernelPrimitive::new(alpha, lambda, lambda)?;
        let u = grid.u();
        let rows = (0..grid.len())
            .into_par_iter()
            .map(|i| -> Result<Vec<f64>, Error> {
                let mut p = vec![0.0; i + 1];
                for j in 0..i {
                    p[j] = prim.eval(u[i] - u[j])?;
                }
                Ok((0..i).map(|j| p[j] - p[j + 1]).collect())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            grid,
            alpha,
            lambda,
            rows,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// ∫_0^{u_i} K(u_i − v) ψ(v) dv with ψ replaced on each cell by the mean
    /// of its end values (the exact cell mean of c·v^{−g} + linear on the
    /// first cell when ψ is singular).
    pub fn apply(&self, psi: &GridFunction) -> Result<Vec<f64>, Error> {
        if **psi.grid() != *self.grid {
            return Err(param_error("grid function and weights use different grids"));
        }
        let v = psi.values();
        let n = v.len();
        let mut means: Vec<f64> = (0..n - 1).map(|j| 0.5 * (v[j] + v[j + 1])).collect();
        if let Endpoint::Singular { exponent: g, coeff: c } = psi.endpoint() {
            check_singular_exponent(g)?;
            let h = self.grid.u()[1];
            let w1 = v[1] * h.powf(g);
            means[0] = h.powf(-g) * (c / (1.0 - g) + (w1 - c) / (2.0 - g));
        }
        Ok((0..n).map(|i| dot(&self.rows[i], &means)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_when_grading_is_one() {
        let g = LogGrid::new(16, 1.0).unwrap();
        for (j, &u) in g.u().iter().enumerate() {
            assert_eq!(u, j as f64 / 16.0);
        }
    }

    #[test]
    fn graded_first_node() {
        let g = LogGrid::new(32, 2.0).unwrap();
        assert_eq!(g.u()[1], 1.0 / 512.0);
        assert_eq!(g.u()[0], 0.0);
        assert_eq!(g.u()[32], 1.0);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(LogGrid::new(15, 2.0).is_err());
        assert!(LogGrid::new(14, 2.0).is_err());
        assert!(LogGrid::new(32, 0.5).is_err());
    }

    #[test]
    fn cell_weights_agree_across_branches() {
        let coef = series_coefficients(0.6, MAX_SERIES_TERMS);
        let (a, h) = (1.0, 0.25);
        let w = |a: f64, h: f64| cell_weights(a, a - h, a.powf(0.6), (a - h).powf(0.6), h, 0.6, &coef);
        let series = w(a, h);
        // Force the closed form by evaluating just above the switch.
        let h2 = 0.25 * (1.0 + 1e-12);
        let closed = w(a, h2);
        assert!((series.0 - closed.0).abs() < 1e-11 * series.0);
        assert!((series.1 - closed.1).abs() < 1e-11 * series.1);
    }

    #[test]
    fn derivative_of_quadratic_is_exact() {
        let g = make_grid(32, 2.0).unwrap();
        let v: Vec<f64> = g.u().iter().map(|u| u * u).collect();
        let d = log_derivative(&v, g.u(), false);
        for (j, &u) in g.u().iter().enumerate() {
            assert!((d[j] - 2.0 * u).abs() < 1e-11, "node {j}");
        }
    }
}
