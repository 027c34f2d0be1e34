//! Tanh–sinh (double-exponential) quadrature.

use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

const T_MAX: f64 = 4.5;
const MAX_LEVEL: u32 = 9;

/// Integrates f over [a, b]. The integrand receives (x, x − a, b − x) so that
/// endpoint singularities can be evaluated without cancellation.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, rel_tol: f64) -> QuadResult
where
    F: Fn(f64, f64, f64) -> f64,
{
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, converged: true };
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let width = b - a;
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        // distance to the nearer endpoint, computed without cancellation
        let d = width / (1.0 + (2.0 * u.abs()).exp());
        if d <= 0.0 || !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        let (x, dl, dr) = if t < 0.0 {
            (a + d, d, width - d)
        } else if t > 0.0 {
            (b - d, width - d, d)
        } else {
            (mid, half, half)
        };
        let fx = f(x, dl, dr);
        if fx.is_finite() {
            half * w * fx
        } else {
            0.0
        }
    };

    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > T_MAX {
            break;
        }
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > T_MAX {
                break;
            }
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        if error <= rel_tol * estimate.abs() || (estimate == 0.0 && error == 0.0) {
            return QuadResult { value: estimate, error, converged: true };
        }
    }
    QuadResult { value: estimate, error, converged: false }
}

/// Integrates f over [a, ∞) via x = a + s/(1−s), s ∈ [0, 1).
pub fn tanh_sinh_semi_infinite<F>(f: F, a: f64, rel_tol: f64) -> QuadResult
where
    F: Fn(f64) -> f64,
{
    tanh_sinh(
        |s, _dl, dr| {
            let x = a + s / dr;
            f(x) / (dr * dr)
        },
        0.0,
        1.0,
        rel_tol,
    )
}

/// Sums results over consecutive sub-intervals split at the given points.
pub fn tanh_sinh_split<F>(f: F, points: &[f64], rel_tol: f64) -> QuadResult
where
    F: Fn(f64, f64, f64) -> f64,
{
    let mut total = QuadResult { value: 0.0, error: 0.0, converged: true };
    for w in points.windows(2) {
        let r = tanh_sinh(&f, w[0], w[1], rel_tol);
        total.value += r.value;
        total.error += r.error;
        total.converged &= r.converged;
    }
    total
}
