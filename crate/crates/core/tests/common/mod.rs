#![allow(dead_code)]

//! Reference routines shared by the integration tests. Nothing here calls
//! into the library under test.

use std::f64::consts::FRAC_PI_2;

/// Tanh-sinh quadrature of f over [a, b]. The integrand receives the point
/// and its distances to both ends, so endpoint singularities can be
/// evaluated without cancellation.
pub fn tanh_sinh(a: f64, b: f64, tol: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    if half == 0.0 {
        return 0.0;
    }
    let t_max = 4.0;
    let node = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let w = FRAC_PI_2 * t.cosh() / s.cosh().powi(2);
        // distance to the nearer end, computed without cancellation
        let near = 2.0 * half / ((2.0 * s.abs()).exp() + 1.0);
        let far = 2.0 * half - near;
        if near <= 0.0 {
            return 0.0;
        }
        let (da, db) = if s < 0.0 { (near, far) } else { (far, near) };
        let v = f(a + da, da, db) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += node(t) + node(-t);
            k += 2;
        }
        let next = sum * h * half;
        if (next - estimate).abs() <= tol * next.abs().max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Σ z^k / Γ(αk + β) with statrs' gamma, for moderate |z|.
pub fn ml_reference(alpha: f64, beta: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 0..400 {
        let term = zk / statrs::function::gamma::gamma(alpha * k as f64 + beta);
        sum += term;
        if k > 3 && term.abs() < 1e-18 * sum.abs() {
            break;
        }
        zk *= z;
    }
    sum
}

pub fn gamma_reference(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn beta_reference(a: f64, b: f64) -> f64 {
    statrs::function::beta::beta(a, b)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}
