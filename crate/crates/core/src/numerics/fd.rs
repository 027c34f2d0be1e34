//! Central finite-difference stencils.

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    /// Stencil value at step h.
    pub value: f64,
    /// Richardson extrapolation from steps h and h/2.
    pub richardson: f64,
    /// |D(h) − D(h/2)|.
    pub error: f64,
}

fn stencil<F: Fn(f64) -> f64>(f: &F, x: f64, order: u32, h: f64) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        _ => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
    }
}

/// Derivative of order 1, 2 or 3 by second-order central stencils.
pub fn fd_derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: u32, h: f64) -> Result<FdEstimate> {
    if !(1..=3).contains(&order) {
        return domain(format!("fd_derivative: order must be 1, 2 or 3, got {order}"));
    }
    if !(h > 0.0) {
        return domain(format!("fd_derivative: step must be positive, got {h}"));
    }
    let d1 = stencil(&f, x, order, h);
    let d2 = stencil(&f, x, order, 0.5 * h);
    Ok(FdEstimate { value: d1, richardson: (4.0 * d2 - d1) / 3.0, error: (d1 - d2).abs() })
}
