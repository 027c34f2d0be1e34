//! Fidelity susceptibility and quantum metric: per-state values, Monte-Carlo
//! ensemble averages, closed-form metrics and scalar curvature.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{build_family, sample, CMat, EnsembleSpec, Hermitian, HamiltonianFamily};
use crate::error::{domain, Error, Result};
use crate::numerics::reduced::Integrand2x2;
use crate::numerics::{fd_derivative, gamma_fn, hyp2f1, log_gamma, rgamma};
use crate::prng::{SeedSpec, Stream};
use crate::spectra::{eigh, eigh_tridiagonal_real, to_eigenbasis, SpectralData};
use crate::stats::{batch_means, mc_estimate, Estimate, DEFAULT_BATCHES};

/// Relative degeneracy threshold: gaps below EPS_DEG·(E_max − E_min) are flagged.
pub const EPS_DEG: f64 = 1e-12;

/// Default polar angle for runs that use both H1 and H2.
pub const DEFAULT_PHI: f64 = PI / 7.0;

pub fn degeneracy_threshold(values: &[f64]) -> f64 {
    match (values.first(), values.last()) {
        (Some(a), Some(b)) => EPS_DEG * (b - a),
        _ => 0.0,
    }
}

/// True when level n is within the degeneracy threshold of a neighbour.
pub fn level_degenerate(values: &[f64], n: usize) -> bool {
    let eps = degeneracy_threshold(values);
    (n > 0 && values[n] - values[n - 1] <= eps) || (n + 1 < values.len() && values[n + 1] - values[n] <= eps)
}

pub fn spectrum_degenerate(values: &[f64]) -> bool {
    let eps = degeneracy_threshold(values);
    values.windows(2).any(|w| w[1] - w[0] <= eps)
}

/// A value together with the near-degeneracy flag of its realisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub degenerate: bool,
}

/// Σ_{j≠n} |ℋ_nj|² / (E_j − E_n)² with ℋ given in the eigenbasis.
pub fn fs_per_state_eigenbasis(values: &[f64], pert_eb: &CMat, n: usize) -> Flagged {
    let value = (0..values.len())
        .filter(|&j| j != n)
        .map(|j| pert_eb[(n, j)].norm_sqr() / (values[j] - values[n]).powi(2))
        .sum();
    Flagged { value, degenerate: level_degenerate(values, n) }
}

pub fn fs_per_state(spectral: &SpectralData, pert: &Hermitian, n: usize) -> Result<Flagged> {
    if n >= spectral.values.len() {
        return domain(format!("state index {n} out of range for N = {}", spectral.values.len()));
    }
    Ok(fs_per_state_eigenbasis(&spectral.values, &to_eigenbasis(spectral, pert), n))
}

/// Full per-state quantum geometric tensor Q_ab = Σ_{m≠n} (∂aH)_nm (∂bH)_mn / (E_n − E_m)²
/// for a list of eigenbasis derivative operators. Returns the complex matrix Q.
pub fn qgt_per_state(values: &[f64], derivs_eb: &[CMat], n: usize) -> DMatrix<Complex64> {
    let d = derivs_eb.len();
    DMatrix::from_fn(d, d, |a, b| {
        (0..values.len())
            .filter(|&m| m != n)
            .map(|m| derivs_eb[a][(n, m)] * derivs_eb[b][(m, n)] / (values[n] - values[m]).powi(2))
            .sum()
    })
}

/// QGT of the fixed-coefficient superposition Σ c_n|n⟩:
/// Q_ab = ⟨∂aΨ|∂bΨ⟩ − ⟨∂aΨ|Ψ⟩⟨Ψ|∂bΨ⟩ with ∂a|m⟩ = Σ_{k≠m} |k⟩(∂aH)_km/(E_m − E_k).
pub fn qgt_superposition(values: &[f64], derivs_eb: &[CMat], c: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let n = values.len();
    if c.len() != n {
        return domain(format!("coefficient vector has length {}, expected {n}", c.len()));
    }
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return domain(format!("coefficients must be normalised, Σ|c|² = {norm}"));
    }
    let u: Vec<Vec<Complex64>> = derivs_eb
        .iter()
        .map(|da| {
            (0..n)
                .map(|k| {
                    (0..n)
                        .filter(|&m| m != k)
                        .map(|m| da[(k, m)] / (values[m] - values[k]) * c[m])
                        .sum()
                })
                .collect()
        })
        .collect();
    let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    let d = derivs_eb.len();
    Ok(DMatrix::from_fn(d, d, |a, b| dot(&u[a], &u[b]) - dot(&u[a], c) * dot(c, &u[b])))
}

/// Monte-Carlo averaged metric components at one chart point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QmtEstimate {
    pub r: f64,
    pub phi: f64,
    pub g_rr: Estimate,
    pub g_pp: Estimate,
    pub g_rp: Estimate,
    pub realizations: usize,
    pub rejected_degenerate: usize,
}

/// (1/N) Σ_n Σ_{m≠n} of |A|², |B|², Re(A_nm B_mn) over ΔE², given entry access.
fn qmt_sums(values: &[f64], entry: impl Fn(usize, usize) -> (f64, f64, f64)) -> [f64; 3] {
    let n = values.len();
    let mut s = [0.0; 3];
    for i in 0..n {
        for j in i + 1..n {
            let w = 1.0 / (values[i] - values[j]).powi(2);
            let (a, b, c) = entry(i, j);
            s[0] += a * w;
            s[1] += b * w;
            s[2] += c * w;
        }
    }
    s.map(|x| 2.0 * x / n as f64)
}

/// Tridiagonal P times dense Z.
fn tridiag_mul(diag: &[f64], off: &[f64], z: &DMatrix<f64>) -> DMatrix<f64> {
    let n = diag.len();
    DMatrix::from_fn(n, z.ncols(), |i, k| {
        let mut v = diag[i] * z[(i, k)];
        if i > 0 {
            v += off[i - 1] * z[(i - 1, k)];
        }
        if i + 1 < n {
            v += off[i] * z[(i + 1, k)];
        }
        v
    })
}

/// Per-realisation state-averaged metric [g_rr, g_φφ, g_rφ] at (r, φ), or
/// None when the spectrum is near-degenerate.
pub fn qmt_realisation(fam: &HamiltonianFamily, r: f64, phi: f64) -> Result<Option<[f64; 3]>> {
    let h = fam.evaluate(r, phi);
    let dr = fam.d_r(phi);
    let dp = fam.d_phi(r, phi);
    if let (
        Hermitian::Tridiagonal { diag, off },
        Hermitian::Tridiagonal { diag: d1, off: o1 },
        Hermitian::Tridiagonal { diag: d2, off: o2 },
    ) = (&h, &dr, &dp)
    {
        let (values, z) = eigh_tridiagonal_real(diag, off)?;
        if spectrum_degenerate(&values) {
            return Ok(None);
        }
        let a = z.transpose() * tridiag_mul(d1, o1, &z);
        let b = z.transpose() * tridiag_mul(d2, o2, &z);
        return Ok(Some(qmt_sums(&values, |i, j| {
            let (x, y) = (a[(i, j)], b[(i, j)]);
            (x * x, y * y, x * y)
        })));
    }
    let s = eigh(&h)?;
    if spectrum_degenerate(&s.values) {
        return Ok(None);
    }
    let a = to_eigenbasis(&s, &dr);
    let b = to_eigenbasis(&s, &dp);
    Ok(Some(qmt_sums(&s.values, |i, j| {
        let (x, y) = (a[(i, j)], b[(i, j)]);
        (x.norm_sqr(), y.norm_sqr(), (x * y.conj()).re)
    })))
}

/// Ensemble-averaged QMT over `m` realisations at each r in `rs`. Each
/// realisation draws one family and evaluates it at every r, so the r
/// points share random numbers.
pub fn qmt_mc_sweep(
    h0: &EnsembleSpec,
    h1: &EnsembleSpec,
    h2: Option<&EnsembleSpec>,
    rs: &[f64],
    phi: f64,
    m: usize,
    seed: u64,
) -> Result<Vec<QmtEstimate>> {
    if m < DEFAULT_BATCHES {
        return Err(Error::Estimator(format!("need at least {DEFAULT_BATCHES} realisations, got {m}")));
    }
    let per: Vec<Vec<Option<[f64; 3]>>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let fam = build_family(h0, h1, h2, SeedSpec::new(seed, k as u64))?;
            rs.iter().map(|&r| qmt_realisation(&fam, r, phi)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    rs.iter()
        .enumerate()
        .map(|(i, &r)| {
            let kept: Vec<[f64; 3]> = per.iter().filter_map(|row| row[i]).collect();
            if kept.is_empty() {
                return Err(Error::Estimator(format!("all {m} realisations degenerate at r = {r}")));
            }
            let comp = |c: usize| batch_means(&kept.iter().map(|g| g[c]).collect::<Vec<_>>(), DEFAULT_BATCHES);
            Ok(QmtEstimate {
                r,
                phi,
                g_rr: comp(0),
                g_pp: comp(1),
                g_rp: comp(2),
                realizations: m,
                rejected_degenerate: m - kept.len(),
            })
        })
        .collect()
}

pub fn qmt_mc(
    h0: &EnsembleSpec,
    h1: &EnsembleSpec,
    h2: Option<&EnsembleSpec>,
    r: f64,
    phi: f64,
    m: usize,
    seed: u64,
) -> Result<QmtEstimate> {
    Ok(qmt_mc_sweep(h0, h1, h2, &[r], phi, m, seed)?.remove(0))
}

/// GUE family closed forms: (g_rr, g_φφ, Ricci).
pub fn gue_metric_closed(n: usize, r: f64) -> Result<(f64, f64, f64)> {
    if n < 2 {
        return domain(format!("GUE metric needs N >= 2, got {n}"));
    }
    let a = (n - 1) as f64;
    let q = r * r + 1.0;
    Ok((a / (2.0 * q * q), a * r * r / (2.0 * q), 4.0 / a))
}

/// Integrability-breaking 2×2 metric (g_rr, g_φφ). g_rr is +∞ at r = 0.
pub fn intbreak_metric(r: f64) -> (f64, f64) {
    if r == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let acot = (SQRT_2 / r).atan();
    let grr = 0.25 * (acot / (SQRT_2 * r) - 1.0 / (2.0 + r * r));
    let gpp = r / (2.0 * SQRT_2) * acot;
    (grr, gpp)
}

/// Scalar curvature of the integrability-breaking metric.
pub fn intbreak_ricci(r: f64) -> f64 {
    if r > 2e3 {
        let x = 1.0 / (r * r);
        return 4.0 - 64.0 / 15.0 * x + 3904.0 / 525.0 * x * x;
    }
    let r2 = r * r;
    let c = (SQRT_2 / r).atan();
    let num = 4.0 * SQRT_2 * r - 4.0 * (r2 - 2.0) * c;
    let den = (r2 + 2.0) * c * c * ((r2 + 2.0) * c - SQRT_2 * r);
    num / den
}

/// Scalar curvature of the diagonal metric E dr² + G dφ² with E, G
/// depending on r only: R = −(EG)^{−1/2} d/dr[G′(EG)^{−1/2}].
pub fn ricci_fd(g_rr: impl Fn(f64) -> f64, g_pp: impl Fn(f64) -> f64, r: f64, h: f64) -> Result<f64> {
    let e = g_rr(r);
    let g = g_pp(r);
    let e1 = fd_derivative(&g_rr, r, 1, h)?.richardson;
    let g1 = fd_derivative(&g_pp, r, 1, h)?.richardson;
    let g2 = fd_derivative(&g_pp, r, 2, h)?.richardson;
    let vals = [e, g, e1, g1, g2];
    if vals.iter().any(|v| !v.is_finite()) {
        return domain(format!("non-finite metric data near r = {r}"));
    }
    let eg = e * g;
    let d = g2 / eg.sqrt() - 0.5 * g1 * (e1 * g + e * g1) / eg.powf(1.5);
    Ok(-d / eg.sqrt())
}

/// Γ((β−1)/2)/Γ(β/2). Direct ratio while Γ stays finite; the large-r
/// closed form cancels about r² digits of it away.
fn gamma_ratio(beta: f64) -> Result<f64> {
    if beta < 300.0 {
        Ok(gamma_fn(0.5 * (beta - 1.0))? / gamma_fn(0.5 * beta)?)
    } else {
        Ok((log_gamma(0.5 * (beta - 1.0))? - log_gamma(0.5 * beta)?).exp())
    }
}

/// Tridiagonal β-ensemble 2×2 FS for β > 1.
pub fn tridiag_beta_fs_closed(beta: f64, r: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return domain(format!("tridiagonal FS average does not converge for beta <= 1, got {beta}"));
    }
    if !(r > 0.0) {
        return domain(format!("need r > 0, got {r}"));
    }
    let r2 = r * r;
    let lead = (PI * beta).sqrt() * gamma_ratio(beta)? / r;
    let f = hyp2f1(-0.5, 0.5 * beta, 1.5, -r2 / beta)?;
    let pow = (0.5 * beta * (r2 / beta).ln_1p()).exp();
    Ok(beta / (16.0 * (beta + r2).powi(2)) * pow * ((beta + (beta - 1.0) * r2) * lead - 4.0 * beta * f))
}

/// (1/8)((3 + 2r²)/(r√(3+r²)) − 2), rationalised.
pub fn tridiag_beta_fs_beta3(r: f64) -> f64 {
    let s = (3.0 + r * r).sqrt();
    9.0 / (8.0 * r * s * (3.0 + 2.0 * r * r + 2.0 * r * s))
}

/// (√(5+r²)(4r²+5) − r(4r²+15))/(60r), rationalised.
pub fn tridiag_beta_fs_beta5(r: f64) -> f64 {
    let s = (5.0 + r * r).sqrt();
    125.0 / (60.0 * r * (s * (4.0 * r * r + 5.0) + r * (4.0 * r * r + 15.0)))
}

/// Leading small-r coefficient c with ḡ ≈ c/r − 1/4.
pub fn tridiag_beta_smallr_coefficient(beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return domain(format!("need beta > 1, got {beta}"));
    }
    Ok((PI * beta).sqrt() * gamma_ratio(beta)? / 16.0)
}

/// Small-r series of the tridiagonal FS with `terms` ∈ 1..=4 terms.
pub fn tridiag_beta_fs_smallr(beta: f64, r: f64, terms: usize) -> Result<f64> {
    let c0 = tridiag_beta_smallr_coefficient(beta)?;
    let c1 = 3.0 * PI.sqrt() * (log_gamma(0.5 * (beta - 1.0))?).exp() / (16.0 * beta.sqrt()) * rgamma(0.5 * beta - 1.0);
    let coeffs = [c0 / r, -0.25, c1 * r, (3.0 - beta) / (6.0 * beta) * r * r];
    Ok(coeffs.iter().take(terms.clamp(1, 4)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedFormMetric {
    Gue { n: usize },
    IntBreak,
    TridiagBeta { beta: f64 },
}

impl ClosedFormMetric {
    pub fn g_rr(&self, r: f64) -> Result<f64> {
        match *self {
            Self::Gue { n } => Ok(gue_metric_closed(n, r)?.0),
            Self::IntBreak => Ok(intbreak_metric(r).0),
            Self::TridiagBeta { beta } => tridiag_beta_fs_closed(beta, r),
        }
    }

    /// None where no closed form exists.
    pub fn g_pp(&self, r: f64) -> Result<Option<f64>> {
        match *self {
            Self::Gue { n } => Ok(Some(gue_metric_closed(n, r)?.1)),
            Self::IntBreak => Ok(Some(intbreak_metric(r).1)),
            Self::TridiagBeta { .. } => Ok(None),
        }
    }

    pub fn ricci(&self, r: f64) -> Result<Option<f64>> {
        match *self {
            Self::Gue { n } => Ok(Some(gue_metric_closed(n, r)?.2)),
            Self::IntBreak => Ok(Some(intbreak_ricci(r))),
            Self::TridiagBeta { .. } => Ok(None),
        }
    }
}

/// Σ_{m≠n} 1/(E_n − E_m)² for one spectrum.
pub fn virial_pair_sum(values: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            s += 2.0 / (values[i] - values[j]).powi(2);
        }
    }
    s
}

/// Dyson's virial value N(N−1)/(2σ²β(1 − 1/β)) for the Gaussian β-ensemble.
pub fn virial_closed(n: usize, variance: f64, beta: f64) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) / (2.0 * variance * beta * (1.0 - 1.0 / beta))
}

fn sample_pair_2x2(kind: Integrand2x2, rng: &mut Stream) -> Result<(Hermitian, Hermitian)> {
    let diag = EnsembleSpec::diagonal(2);
    Ok(match kind {
        Integrand2x2::TridiagBeta { beta } => (sample(&diag, rng)?, sample(&EnsembleSpec::tridiagonal(2, beta), rng)?),
        Integrand2x2::InvariantEta { eta, variance } => {
            (sample(&diag, rng)?, sample(&EnsembleSpec::eta(eta).with_variance(variance), rng)?)
        }
        Integrand2x2::HaarCase1 { beta } => {
            let s = EnsembleSpec::haar_beta(beta);
            (sample(&s, rng)?, sample(&s, rng)?)
        }
        Integrand2x2::HaarCase2 { beta } => (sample(&diag, rng)?, sample(&EnsembleSpec::haar_beta(beta), rng)?),
    })
}

/// Monte-Carlo g_rr of a 2×2 family by sampling matrices, diagonalising
/// H0 + rℋ and averaging the per-state FS over both levels.
pub fn fs_mc_2x2(kind: Integrand2x2, r: f64, m: usize, seed: u64) -> Result<Estimate> {
    if !(r > 0.0) {
        return domain(format!("need r > 0, got {r}"));
    }
    if m < DEFAULT_BATCHES {
        return Err(Error::Estimator(format!("need at least {DEFAULT_BATCHES} samples, got {m}")));
    }
    // validate parameters once before the parallel loop
    sample_pair_2x2(kind, &mut SeedSpec::new(seed, 0).slot(0))?;
    let est = mc_estimate(m, seed, 21, |rng| {
        let (h0, v) = sample_pair_2x2(kind, rng).expect("validated");
        let s = eigh(&h0.axpby(1.0, &v, r)).expect("2x2 Hermitian");
        let p = to_eigenbasis(&s, &v);
        0.5 * (fs_per_state_eigenbasis(&s.values, &p, 0).value + fs_per_state_eigenbasis(&s.values, &p, 1).value)
    });
    if !est.mean.is_finite() {
        return Err(Error::Estimator("non-finite 2x2 FS average".into()));
    }
    Ok(est)
}
