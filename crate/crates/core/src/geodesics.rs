//! Geodesics of the GUE metric (closed form) and of the 2×2
//! integrability-breaking metric (numerical, θ chart with r = √2 cot θ).

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::ode::{dopri5, OdeOptions, Termination};

/// Speed K (g_ab ẋᵃẋᵇ = K²), angular momentum L and, for the GUE metric,
/// A = (N−1)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicConstants {
    pub k: f64,
    pub l: f64,
    pub a: f64,
}

impl GeodesicConstants {
    pub fn gue(n: usize, k: f64, l: f64) -> Self {
        Self { k, l, a: (n as f64 - 1.0) / 2.0 }
    }

    /// Constants for the integrability-breaking metric; `a` is unused.
    pub fn intbreak(k: f64, l: f64) -> Self {
        Self { k, l, a: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !(self.l >= 0.0) || !(self.a > 0.0) {
            return domain(format!("need K > 0, L >= 0, A > 0; got {self:?}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Growing,
    Decaying,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Growing => 1.0,
            Branch::Decaying => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub lambda: f64,
    pub theta: f64,
    pub r: f64,
    pub phi: f64,
    pub l_residual: f64,
    pub k_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    LambdaMax,
    ThetaLower,
    ThetaUpper,
    StepUnderflow,
    MaxSteps,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicTrajectory {
    pub branch: Branch,
    pub constants: GeodesicConstants,
    pub points: Vec<TrajectoryPoint>,
    pub stop: StopReason,
}

impl GeodesicTrajectory {
    pub fn max_l_residual(&self) -> f64 {
        self.points.iter().fold(0.0, |a, p| a.max(p.l_residual.abs()))
    }

    pub fn max_k_residual(&self) -> f64 {
        self.points.iter().fold(0.0, |a, p| a.max(p.k_residual.abs()))
    }
}

// ---------------------------------------------------------------- GUE

struct GueParams {
    omega: f64,
    c1: f64,
    d: f64,
    ak2: f64,
}

fn gue_params(c: &GeodesicConstants, r0: f64) -> Result<GueParams> {
    c.validate()?;
    if !(r0 > 0.0) {
        return domain(format!("need r0 > 0, got {r0}"));
    }
    let ak2 = c.a * c.k * c.k;
    let d = ak2 - c.l * c.l;
    if !(d > 0.0) {
        return domain(format!("need A K² − L² > 0, got {d}"));
    }
    let c2sq = r0 * r0 - c.l * c.l * (r0 * r0 + 1.0) / ak2;
    if c2sq < 0.0 {
        return domain(format!("r0 = {r0} is inside the forbidden region (C₂² = {c2sq})"));
    }
    Ok(GueParams { omega: c.k / c.a.sqrt(), c1: c2sq.sqrt().atan(), d, ak2 })
}

/// λ at which r_± diverges: (π/2 ∓ C₁)√A/K.
pub fn gue_divergence_lambda(c: &GeodesicConstants, r0: f64, branch: Branch) -> Result<f64> {
    let p = gue_params(c, r0)?;
    Ok((FRAC_PI_2 - branch.sign() * p.c1) / p.omega)
}

fn gue_phase(c: &GeodesicConstants, r0: f64, branch: Branch, lambda: f64) -> Result<(GueParams, f64)> {
    let p = gue_params(c, r0)?;
    let u = p.omega * lambda + branch.sign() * p.c1;
    if u.abs() >= FRAC_PI_2 {
        let lim = (FRAC_PI_2.copysign(u) - branch.sign() * p.c1) / p.omega;
        return domain(format!("λ = {lambda} is beyond the divergence at λ = {lim}"));
    }
    Ok((p, u))
}

pub fn gue_geodesic_r(c: &GeodesicConstants, r0: f64, branch: Branch, lambda: f64) -> Result<f64> {
    let (p, u) = gue_phase(c, r0, branch, lambda)?;
    let t = u.tan();
    Ok(((p.ak2 * t * t + c.l * c.l) / p.d).sqrt())
}

/// φ(λ) with φ(0) = 0; identically zero for L = 0.
pub fn gue_geodesic_phi(c: &GeodesicConstants, r0: f64, branch: Branch, lambda: f64) -> Result<f64> {
    let (p, u) = gue_phase(c, r0, branch, lambda)?;
    if c.l == 0.0 {
        return Ok(0.0);
    }
    let q = c.a.sqrt() * c.k / c.l;
    let u0 = branch.sign() * p.c1;
    Ok((q * u.tan()).atan() - (q * u0.tan()).atan())
}

/// λ at which the initially decaying branch turns around: (√A/K)·arccot(1/C₂).
pub fn gue_bounce_lambda(c: &GeodesicConstants, r0: f64) -> Result<f64> {
    let p = gue_params(c, r0)?;
    if p.c1 == 0.0 && c.l > 0.0 {
        return domain(format!("C₂ vanishes at r0 = {r0}: no decaying branch"));
    }
    Ok(p.c1 / p.omega)
}

/// Smallest λ ≥ 0 at which the branch reaches r_t.
pub fn gue_lambda_to_reach(c: &GeodesicConstants, r0: f64, branch: Branch, r_t: f64) -> Result<f64> {
    let p = gue_params(c, r0)?;
    let q = (r_t * r_t * p.d - c.l * c.l) / p.ak2;
    if q < 0.0 {
        return domain(format!("r = {r_t} is below the orbit minimum"));
    }
    let ut = q.sqrt().atan();
    let lam = match branch {
        Branch::Growing if r_t >= r0 => (ut - p.c1) / p.omega,
        Branch::Growing => return domain(format!("growing branch never returns to r = {r_t} < r0")),
        Branch::Decaying if r_t >= r0 => (ut + p.c1) / p.omega,
        Branch::Decaying => (p.c1 - ut) / p.omega,
    };
    Ok(lam.max(0.0))
}

/// r, φ and their first two λ-derivatives on the closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GueState {
    pub r: f64,
    pub dr: f64,
    pub d2r: f64,
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
}

pub fn gue_geodesic_state(c: &GeodesicConstants, r0: f64, branch: Branch, lambda: f64) -> Result<GueState> {
    let (p, u) = gue_phase(c, r0, branch, lambda)?;
    let (t, s) = (u.tan(), 1.0 / u.cos().powi(2));
    let r = ((p.ak2 * t * t + c.l * c.l) / p.d).sqrt();
    // r ṙ = AK²ω T S / D
    let num = p.ak2 * p.omega * t * s / p.d;
    let dnum = p.ak2 * p.omega * p.omega * (s * s + 2.0 * t * t * s) / p.d;
    let dr = num / r;
    let d2r = (dnum * r - num * dr) / (r * r);
    let dphi = c.l * (r * r + 1.0) / (c.a * r * r);
    let d2phi = -2.0 * c.l * dr / (c.a * r * r * r);
    Ok(GueState { r, dr, d2r, phi: gue_geodesic_phi(c, r0, branch, lambda)?, dphi, d2phi })
}

/// Residuals of r̈ − r(φ̇² + 2ṙ²/(r²+1)) and φ̈ + 2φ̇ṙ/(r(r²+1)).
pub fn gue_ode_residual(s: &GueState) -> [f64; 2] {
    let r2p1 = s.r * s.r + 1.0;
    [
        s.d2r - s.r * (s.dphi * s.dphi + 2.0 * s.dr * s.dr / r2p1),
        s.d2phi + 2.0 * s.dphi * s.dr / (s.r * r2p1),
    ]
}

/// Closed-form trajectory on a λ grid. θ is the sphere latitude with cot θ = r.
pub fn gue_trajectory(c: &GeodesicConstants, r0: f64, branch: Branch, lambdas: &[f64]) -> Result<GeodesicTrajectory> {
    let mut points = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let s = gue_geodesic_state(c, r0, branch, lam)?;
        let r2p1 = s.r * s.r + 1.0;
        let (grr, gpp) = (c.a / (r2p1 * r2p1), c.a * s.r * s.r / r2p1);
        points.push(TrajectoryPoint {
            lambda: lam,
            theta: (1.0 / s.r).atan(),
            r: s.r,
            phi: s.phi,
            l_residual: gpp * s.dphi - c.l,
            k_residual: grr * s.dr * s.dr + gpp * s.dphi * s.dphi - c.k * c.k,
        });
    }
    Ok(GeodesicTrajectory { branch, constants: *c, points, stop: StopReason::LambdaMax })
}

/// Geodesic distance on A(dθ² + cos²θ dφ²) between two latitude/longitude
/// points, √A times the central angle.
pub fn sphere_distance(theta0: f64, phi0: f64, theta1: f64, phi1: f64, a: f64) -> f64 {
    let dphi = phi1 - phi0;
    let (s0, c0) = theta0.sin_cos();
    let (s1, c1) = theta1.sin_cos();
    let y = ((c1 * dphi.sin()).powi(2) + (c0 * s1 - s0 * c1 * dphi.cos()).powi(2)).sqrt();
    let x = s0 * s1 + c0 * c1 * dphi.cos();
    a.sqrt() * y.atan2(x)
}

// ------------------------------------------------- integrability-breaking

const SERIES_CUT: f64 = 0.5;
// ¼ csc²θ (2θ/sin 2θ − 1) = Σ a_k θ^{2k}
const G_TT: [f64; 17] = [
    0.16666666666666666,
    0.13333333333333333,
    0.06984126984126984,
    0.03132275132275132,
    0.0131986531986532,
    0.005426315013616601,
    0.002210279628269046,
    0.0008973107560097911,
    0.0003638669505977053,
    0.00014749546509341138,
    5.978088715152752e-05,
    2.422867757493842e-05,
    9.8195611122099e-06,
    3.979723936777449e-06,
    1.6129220330777538e-06,
    6.536927566185167e-07,
    2.6493170443472803e-07,
];
// ½ θ cot θ = Σ b_k θ^{2k}
const G_PP: [f64; 12] = [
    0.5,
    -0.16666666666666666,
    -0.011111111111111112,
    -0.0010582010582010583,
    -0.00010582010582010582,
    -1.0688899577788467e-05,
    -1.0822021404031986e-06,
    -1.0962973925936889e-07,
    -1.1107304394989839e-08,
    -1.1253923258404497e-09,
    -1.1402575602296092e-10,
    -1.1553216299501312e-11,
];

fn even_series(c: &[f64], x: f64) -> (f64, f64) {
    let x2 = x * x;
    let mut v = 0.0;
    let mut d = 0.0;
    for (k, &ck) in c.iter().enumerate().rev() {
        v = v * x2 + ck;
        if k > 0 {
            d = d * x2 + 2.0 * k as f64 * ck;
        }
    }
    // d accumulated Σ 2k c_k x^{2k−2}; multiply by x
    (v, d * x)
}

/// (g_θθ, g_θθ′) of the integrability-breaking metric in the θ chart.
pub fn intbreak_g_theta(theta: f64) -> (f64, f64) {
    if theta.abs() < SERIES_CUT {
        return even_series(&G_TT, theta);
    }
    let (s, c) = theta.sin_cos();
    let s2 = (2.0 * theta).sin();
    let f = 2.0 * theta / s2 - 1.0;
    let fp = (2.0 * s2 - 4.0 * theta * (2.0 * theta).cos()) / (s2 * s2);
    let csc2 = 1.0 / (s * s);
    (0.25 * csc2 * f, 0.25 * csc2 * (fp - 2.0 * c / s * f))
}

/// (g_φφ, g_φφ′) of the integrability-breaking metric in the θ chart.
pub fn intbreak_g_phi(theta: f64) -> (f64, f64) {
    if theta.abs() < SERIES_CUT {
        return even_series(&G_PP, theta);
    }
    let (s, c) = theta.sin_cos();
    (0.5 * theta * c / s, 0.5 * (c / s - theta / (s * s)))
}

/// θ̇² from the conserved quantities: 4 sin²θ [K² − 2L² tanθ/θ] / (2θ/sin2θ − 1).
pub fn intbreak_theta_dot_sq(theta: f64, k: f64, l: f64) -> f64 {
    let (gtt, _) = intbreak_g_theta(theta);
    let (gpp, _) = intbreak_g_phi(theta);
    (k * k - l * l / gpp) / gtt
}

/// Boundary offset δ for the θ ∈ (δ, π/2 − δ) events.
pub const THETA_DELTA: f64 = 1e-6;

/// Integrates the second-order geodesic equations of the θ-chart metric from
/// θ0 (θ̇0 signed by `branch`, θ grows on the growing branch) until θ leaves
/// (δ, π/2 − δ) or λ reaches `lambda_max`.
pub fn intbreak_geodesic(
    theta0: f64,
    phi0: f64,
    c: &GeodesicConstants,
    branch: Branch,
    lambda_max: f64,
    opts: &OdeOptions,
) -> Result<GeodesicTrajectory> {
    c.validate()?;
    if !(theta0 > 0.0 && theta0 < FRAC_PI_2) {
        return domain(format!("θ0 = {theta0} outside (0, π/2)"));
    }
    let td2 = intbreak_theta_dot_sq(theta0, c.k, c.l);
    if td2 < 0.0 {
        return domain(format!(
            "no real geodesic: K² − 2L² tanθ0/θ0 < 0 at θ0 = {theta0} (K = {}, L = {})",
            c.k, c.l
        ));
    }
    let (gpp0, _) = intbreak_g_phi(theta0);
    let y0 = [theta0, phi0, branch.sign() * td2.sqrt(), c.l / gpp0];
    let rhs = |_: f64, y: &[f64; 4]| {
        let (gtt, gttp) = intbreak_g_theta(y[0]);
        let (gpp, gppp) = intbreak_g_phi(y[0]);
        let (td, pd) = (y[2], y[3]);
        [td, pd, -(gttp * td * td - gppp * pd * pd) / (2.0 * gtt), -gppp / gpp * td * pd]
    };
    let lower = |y: &[f64; 4]| y[0] - THETA_DELTA;
    let upper = |y: &[f64; 4]| FRAC_PI_2 - THETA_DELTA - y[0];
    let sol = dopri5(rhs, 0.0, y0, lambda_max, opts, &[&lower, &upper]);
    let stop = match sol.termination {
        Termination::Reached => StopReason::LambdaMax,
        Termination::Event(0) => StopReason::ThetaLower,
        Termination::Event(_) => StopReason::ThetaUpper,
        Termination::StepUnderflow => StopReason::StepUnderflow,
        Termination::MaxSteps => StopReason::MaxSteps,
        Termination::NonFinite => StopReason::NonFinite,
    };
    let points = sol
        .t
        .iter()
        .zip(&sol.y)
        .map(|(&lambda, y)| {
            let (gtt, _) = intbreak_g_theta(y[0]);
            let (gpp, _) = intbreak_g_phi(y[0]);
            TrajectoryPoint {
                lambda,
                theta: y[0],
                r: SQRT_2 / y[0].tan(),
                phi: y[1],
                l_residual: gpp * y[3] - c.l,
                k_residual: gtt * y[2] * y[2] + gpp * y[3] * y[3] - c.k * c.k,
            }
        })
        .collect();
    Ok(GeodesicTrajectory { branch, constants: *c, points, stop })
}

/// (A₁, A₂) of the small-θ expansion θ̇ ≈ −(A₁ + A₂θ²) on the decaying branch.
pub fn intbreak_approx_constants(k: f64, l: f64) -> Result<(f64, f64)> {
    let disc = k * k - 2.0 * l * l;
    if !(disc > 0.0) {
        return domain(format!("small-θ approximation needs K² > 2L², got K = {k}, L = {l}"));
    }
    let a1 = (6.0 * disc).sqrt();
    let a2 = 6f64.sqrt() / 15.0 * (7.0 * l * l - 6.0 * k * k) / disc.sqrt();
    Ok((a1, a2))
}

/// θ(λ) = −√(A₁/A₂) tan[√(A₁A₂)λ − arctan(√(A₂/A₁)θ0)], continued
/// analytically when A₂ < 0.
pub fn intbreak_theta_approx(theta0: f64, k: f64, l: f64, lambda: f64) -> Result<f64> {
    let (a1, a2) = intbreak_approx_constants(k, l)?;
    let (a1, a2) = (Complex64::from(a1), Complex64::from(a2));
    let arg = (a1 * a2).sqrt() * lambda - ((a2 / a1).sqrt() * theta0).atan();
    Ok((-(a1 / a2).sqrt() * arg.tan()).re)
}

/// r(λ) = √2 cot θ_approx(λ).
pub fn intbreak_r_approx(theta0: f64, k: f64, l: f64, lambda: f64) -> Result<f64> {
    Ok(SQRT_2 / intbreak_theta_approx(theta0, k, l, lambda)?.tan())
}
