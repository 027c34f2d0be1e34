//! Ensemble averages of 2×2 fidelity susceptibility and level curvature,
//! reduced to low-dimensional integrals over the gap variables.
//!
//! Write H0 = c₀ + a·σ_z and ℋ = c₁ + w·n̂·σ, with μ = cos∠(ẑ, n̂). Then
//! g_rr = a²w²(1−μ²) / (4|h|⁴) and K₂ = a²w²(1−μ²) / (2|h|³), where
//! |h|² = a² + r²w² + 2arwμ. The laws of a², w² (Gamma) and μ depend on
//! the family.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::quad::{tanh_sinh, tanh_sinh_semi_infinite, QuadResult};
use super::special::log_gamma;
use crate::error::{domain, Result};
use crate::prng::{uniform, Stream};
use crate::stats::{mc_estimate, Estimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Integrand2x2 {
    /// H0 diagonal N(0,1), ℋ from the 2×2 tridiagonal β-ensemble.
    TridiagBeta { beta: f64 },
    /// H0 diagonal N(0,1), ℋ from the invariant η-ensemble with variance σ².
    InvariantEta { eta: f64, variance: f64 },
    /// H0 and ℋ both with β-ensemble eigenvalues, ℋ Haar-rotated.
    HaarCase1 { beta: f64 },
    /// H0 diagonal N(0,1), ℋ with β-ensemble eigenvalues, Haar-rotated.
    HaarCase2 { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadratureMethod {
    /// Deterministic tanh–sinh quadrature of the reduced integral.
    Reduced,
    /// Plain Monte Carlo over the reduced variables drawn from their exact laws.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { method: QuadratureMethod::Reduced, rel_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    /// False when the requested tolerance was not reached.
    pub achieved: bool,
}

impl From<QuadResult> for Integral {
    fn from(q: QuadResult) -> Self {
        Self { value: q.value, error: q.error, achieved: q.converged }
    }
}

impl From<Estimate> for Integral {
    fn from(e: Estimate) -> Self {
        Self { value: e.mean, error: e.stderr, achieved: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum MuLaw {
    /// μ uniform on [−1, 1] (isotropic perturbation direction in 3-D).
    Uniform,
    /// density ∝ (1−μ²)^{β/2−1}, the real tridiagonal case.
    Tridiag(f64),
}

/// a² ~ Gamma(shape_a, scale_a), w² ~ Gamma(shape_w, scale_w), μ ~ mu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GapLaw {
    pub shape_a: f64,
    pub scale_a: f64,
    pub shape_w: f64,
    pub scale_w: f64,
    pub mu: MuLaw,
}

fn beta_half_gap(beta: f64) -> (f64, f64) {
    (0.5 * (beta + 1.0), 1.0 / beta)
}

impl Integrand2x2 {
    pub(crate) fn law(&self) -> Result<GapLaw> {
        let diag = (0.5, 1.0);
        let (a, w, mu) = match *self {
            Self::TridiagBeta { beta } => {
                if !(beta > 0.0) {
                    return domain(format!("beta must be > 0, got {beta}"));
                }
                (diag, beta_half_gap(beta), MuLaw::Tridiag(beta))
            }
            Self::InvariantEta { eta, variance } => {
                if !(0.0..=1.0).contains(&eta) || !(variance > 0.0) {
                    return domain(format!("need eta in [0,1] and variance > 0, got {eta}, {variance}"));
                }
                (diag, (0.5 * (3.0 - 2.0 * eta), variance), MuLaw::Uniform)
            }
            Self::HaarCase1 { beta } => {
                if !(beta > 0.0) {
                    return domain(format!("beta must be > 0, got {beta}"));
                }
                (beta_half_gap(beta), beta_half_gap(beta), MuLaw::Uniform)
            }
            Self::HaarCase2 { beta } => {
                if !(beta > 0.0) {
                    return domain(format!("beta must be > 0, got {beta}"));
                }
                (diag, beta_half_gap(beta), MuLaw::Uniform)
            }
        };
        Ok(GapLaw { shape_a: a.0, scale_a: a.1, shape_w: w.0, scale_w: w.1, mu })
    }
}

/// |h|² = a² + r²w² + 2arwμ written as a sum of squares.
fn h_squared(a: f64, w: f64, mu: f64, r: f64) -> f64 {
    let x = a + r * w * mu;
    let y = r * w;
    x * x + y * y * (1.0 - mu * mu)
}

/// Fidelity susceptibility of either level of a 2×2 family.
pub fn fs_sample(a: f64, w: f64, mu: f64, r: f64) -> f64 {
    let h2 = h_squared(a, w, mu, r);
    a * a * w * w * (1.0 - mu * mu) / (4.0 * h2 * h2)
}

/// Curvature ½ d²E₊/dr² of the upper level of a 2×2 family.
pub fn curvature_sample(a: f64, w: f64, mu: f64, r: f64) -> f64 {
    let h2 = h_squared(a, w, mu, r);
    a * a * w * w * (1.0 - mu * mu) / (2.0 * h2 * h2.sqrt())
}

/// Isotropic average ½∫ s²(1−μ²)/(4(1+s²+2sμ)²) dμ. Symmetric under s → 1/s.
pub fn isotropic_phi(s: f64) -> f64 {
    let t = if s > 1.0 { 1.0 / s } else { s };
    if t < 0.3 {
        let t2 = t * t;
        let mut p = t2;
        let mut sum = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            let term = kf * p / (4.0 * kf * kf - 1.0);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            p *= t2;
        }
        return 0.5 * sum;
    }
    (1.0 + t * t) / (8.0 * t) * t.atanh() - 0.125
}

fn sample_mu(rng: &mut Stream, law: MuLaw) -> f64 {
    match law {
        MuLaw::Uniform => 2.0 * uniform(rng) - 1.0,
        MuLaw::Tridiag(beta) => {
            let x = Gamma::new(0.5, 1.0).unwrap().sample(rng);
            let y = Gamma::new(0.5 * beta, 1.0).unwrap().sample(rng);
            let m = (x / (x + y)).sqrt();
            if uniform(rng) < 0.5 {
                -m
            } else {
                m
            }
        }
    }
}

fn sample_gaps(rng: &mut Stream, law: &GapLaw) -> (f64, f64, f64) {
    let a2 = Gamma::new(law.shape_a, law.scale_a).unwrap().sample(rng);
    let w2 = Gamma::new(law.shape_w, law.scale_w).unwrap().sample(rng);
    let mu = sample_mu(rng, law.mu);
    (a2.sqrt(), w2.sqrt(), mu)
}

/// E[Φ(r√q)]/r² with q = w²/a² following a scaled beta-prime law.
fn fs_isotropic_reduced(law: &GapLaw, r: f64, tol: f64) -> QuadResult {
    let (ka, ta, kw, tw) = (law.shape_a, law.scale_a, law.shape_w, law.scale_w);
    let ln_b = log_gamma(ka).unwrap() + log_gamma(kw).unwrap() - log_gamma(ka + kw).unwrap();
    let ratio = tw / ta;
    let rho = ta / (tw * r * r);
    let ustar = rho / (1.0 + rho);
    let f = |u: f64, omu: f64| -> f64 {
        if u <= 0.0 || omu <= 0.0 {
            return 0.0;
        }
        let s = r * (ratio * u / omu).sqrt();
        isotropic_phi(s) * ((kw - 1.0) * u.ln() + (ka - 1.0) * omu.ln() - ln_b).exp()
    };
    let left = tanh_sinh(|x, dl, _dr| f(dl, 1.0 - x), 0.0, ustar, tol);
    let right = tanh_sinh(|x, _dl, dr| f(x, dr), ustar, 1.0, tol);
    QuadResult {
        value: (left.value + right.value) / (r * r),
        error: (left.error + right.error) / (r * r),
        converged: left.converged && right.converged,
    }
}

/// Tridiagonal family: the μ, a and w integrals done analytically leave a
/// single integral over u ∈ [0, ∞).
fn fs_tridiag_reduced(beta: f64, r: f64, tol: f64) -> QuadResult {
    let r2 = r * r;
    let c = beta + r2;
    let scale = 1.0 / (r * c.sqrt()).max(1e-300);
    let q = tanh_sinh_semi_infinite(
        |v| {
            let u = v * scale;
            let p = 1.0 + c * u;
            u * (1.0 + r2 * u).powf(-0.5 * beta - 1.0) * (r2 * p.powf(-0.5) + beta * p.powf(-1.5))
        },
        0.0,
        tol,
    );
    let pref = beta * beta / (16.0 * c) * scale;
    QuadResult { value: pref * q.value, error: pref * q.error, converged: q.converged }
}

/// Ensemble-averaged g_rr of a 2×2 family.
pub fn integrate_fs_2x2(kind: Integrand2x2, r: f64, spec: &QuadratureSpec) -> Result<Integral> {
    let law = kind.law()?;
    if !(r > 0.0) {
        return domain(format!("integrate_fs_2x2 requires r > 0, got {r}"));
    }
    if let Integrand2x2::TridiagBeta { beta } = kind {
        if beta <= 1.0 && matches!(spec.method, QuadratureMethod::Reduced) {
            return domain(format!("tridiagonal average diverges for beta <= 1, got {beta}"));
        }
    }
    match spec.method {
        QuadratureMethod::Reduced => Ok(match kind {
            Integrand2x2::TridiagBeta { beta } => fs_tridiag_reduced(beta, r, spec.rel_tol),
            _ => fs_isotropic_reduced(&law, r, spec.rel_tol),
        }
        .into()),
        QuadratureMethod::MonteCarlo { samples, seed } => Ok(mc_estimate(samples, seed, 11, |rng| {
            let (a, w, mu) = sample_gaps(rng, &law);
            fs_sample(a, w, mu, r)
        })
        .into()),
    }
}

/// Average upper-level curvature for H0 diagonal N(0,1) and ℋ from the 2×2
/// tridiagonal β-ensemble. The reduced route integrates the radial variable
/// of (a, r·w) analytically and leaves a nested (angle, μ) quadrature.
pub fn integrate_curvature_2x2(beta: f64, r: f64, spec: &QuadratureSpec) -> Result<Integral> {
    if !(beta > 0.0) || !(r > 0.0) {
        return domain(format!("need beta > 0 and r > 0, got {beta}, {r}"));
    }
    let law = Integrand2x2::TridiagBeta { beta }.law()?;
    match spec.method {
        QuadratureMethod::MonteCarlo { samples, seed } => Ok(mc_estimate(samples, seed, 13, |rng| {
            let (a, w, mu) = sample_gaps(rng, &law);
            curvature_sample(a, w, mu, r)
        })
        .into()),
        QuadratureMethod::Reduced => Ok(curvature_reduced(&law, beta, r, spec.rel_tol).into()),
    }
}

fn curvature_reduced(law: &GapLaw, beta: f64, r: f64, tol: f64) -> QuadResult {
    let (ka, ta, kw) = (law.shape_a, law.scale_a, law.shape_w);
    let ty = r * r * law.scale_w;
    let p = ka + kw + 0.5;
    let ln_bmu = log_gamma(0.5).unwrap() + log_gamma(0.5 * beta).unwrap()
        - log_gamma(0.5 * beta + 0.5).unwrap();
    let ln_pref = -(2.0 * r * r).ln() + 4f64.ln() - log_gamma(ka).unwrap() - log_gamma(kw).unwrap()
        - ka * ta.ln()
        - kw * ty.ln()
        + log_gamma(p).unwrap()
        - 2f64.ln()
        - ln_bmu;
    let inner_tol = (tol * 0.1).max(1e-13);
    // ∫ (1−μ²)^{β/2} / (1 + mμ)^{3/2} dμ with 1 − m supplied separately
    let inner = |m: f64, one_minus_m: f64| -> f64 {
        tanh_sinh(
            |_mu, dl, dr| (dl * dr).powf(0.5 * beta) / (one_minus_m + m * dl).powf(1.5),
            -1.0,
            1.0,
            inner_tol,
        )
        .value
    };
    let outer = |alpha: f64, d_quarter: f64| -> f64 {
        let (s, c) = alpha.sin_cos();
        if s <= 0.0 || c <= 0.0 {
            return 0.0;
        }
        let m = 2.0 * s * c;
        let one_minus_m = 2.0 * d_quarter.sin().powi(2);
        let cc = c * c / ta + s * s / ty;
        let ln_ang = (2.0 * ka + 1.0) * c.ln() + (2.0 * kw + 1.0) * s.ln() - p * cc.ln();
        (ln_ang + ln_pref).exp() * inner(m, one_minus_m)
    };
    let left = tanh_sinh(|a, _dl, dr| outer(a, dr), 0.0, FRAC_PI_4, tol);
    let right = tanh_sinh(|a, dl, _dr| outer(a, dl), FRAC_PI_4, FRAC_PI_2, tol);
    QuadResult {
        value: left.value + right.value,
        error: left.error + right.error,
        converged: left.converged && right.converged,
    }
}
