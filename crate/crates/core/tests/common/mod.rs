//! Independent reference quadrature for the Riesz integrals.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Tanh-sinh quadrature of `f` over `[a, b]`, halving the step until two
/// consecutive levels agree to `tol` (relative).
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        let v = FRAC_PI_2 * t.sinh();
        let w = half * FRAC_PI_2 * t.cosh() / v.cosh().powi(2);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        // distance to the nearer endpoint, computed without cancellation
        let x = if v <= 0.0 {
            a + (b - a) / (1.0 + (-2.0 * v).exp())
        } else {
            b - (b - a) / (1.0 + (2.0 * v).exp())
        };
        if x <= a || x >= b {
            return 0.0;
        }
        w * f(x)
    };
    let t_max = 4.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let est = sum * h;
        if (est - prev).abs() <= tol * est.abs().max(1e-300) {
            return est;
        }
        prev = est;
    }
    prev
}

/// `∫_0^∞ f(x ∓ s) s^{-α} ds` with `sign = -1` for `I⁻` and `+1` for `I⁺`.
///
/// The weak singularity is removed by `s = r^{1/(1-α)}`, the range is split
/// at the position of the bulk of `f`, and the tail uses `s = S/t`.
pub fn riesz_reference(f: impl Fn(f64) -> f64, alpha: f64, x: f64, sign: f64) -> f64 {
    let tol = 1e-15;
    let g = |s: f64| f(x + sign * s) * s.powf(-alpha);
    let e = 1.0 / (1.0 - alpha);
    let near = tanh_sinh(|r: f64| f(x + sign * r.powf(e)) * e, 0.0, 1.0, tol);
    let mut total = near;
    let mut lo = 1.0;
    let far = (2.0 * x.abs() + 2.0).max(2.0);
    for cut in [0.5 * (1.0 + far), far] {
        total += tanh_sinh(g, lo, cut, tol);
        lo = cut;
    }
    total + tanh_sinh(|t: f64| g(lo / t) * lo / (t * t), 0.0, 1.0, tol)
}
