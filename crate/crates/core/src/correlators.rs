//! Two-point correlator G(t) = (1/N) E Tr[ℋ(t)ℋ], its SFF and free-probability
//! forms, and the FS recovered from the level pair sum.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{build_family, EnsembleSpec};
use crate::error::{domain, Error, Result};
use crate::geometry::virial_pair_sum;
use crate::numerics::j1_ratio;
use crate::numerics::quad::tanh_sinh;
use crate::prng::SeedSpec;
use crate::spectra::{eigh, to_eigenbasis, SffSeries};
use crate::stats::{batch_means, Estimate, DEFAULT_BATCHES};

const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorMeta {
    pub n: usize,
    pub r: f64,
    pub variance: f64,
    pub m: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorMc {
    pub t: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Largest |Im G| seen over all realisations and times.
    pub max_imag: f64,
    pub meta: CorrelatorMeta,
}

/// Monte-Carlo G(t) for H = H0 + rℋ with H0, ℋ independent GUE(σ²).
pub fn correlator_mc(n: usize, r: f64, variance: f64, t: &[f64], m: usize, seed: u64) -> Result<CorrelatorMc> {
    if m == 0 {
        return Err(Error::Estimator("correlator needs at least one realisation".into()));
    }
    let spec = EnsembleSpec::gue(n).with_variance(variance);
    spec.validate()?;
    let per: Vec<(Vec<f64>, f64)> = (0..m)
        .into_par_iter()
        .map(|k| {
            let fam = build_family(&spec, &spec, None, SeedSpec::new(seed, k as u64))?;
            let s = eigh(&fam.evaluate(r, 0.0))?;
            let p = to_eigenbasis(&s, &fam.h1);
            let w = DMatrix::from_fn(n, n, |i, j| p[(i, j)].norm_sqr());
            let mut g = Vec::with_capacity(t.len());
            let mut imag = 0.0f64;
            for &tk in t {
                let (sv, cv): (Vec<f64>, Vec<f64>) = s.values.iter().map(|e| (e * tk).sin_cos()).unzip();
                let (c, sn) = (DVector::from_vec(cv), DVector::from_vec(sv));
                let (wc, ws) = (&w * &c, &w * &sn);
                g.push((c.dot(&wc) + sn.dot(&ws)) / n as f64);
                imag = imag.max((sn.dot(&wc) - c.dot(&ws)).abs() / n as f64);
            }
            Ok((g, imag))
        })
        .collect::<Result<_>>()?;
    let max_imag = per.iter().fold(0.0f64, |a, p| a.max(p.1));
    if max_imag > IMAG_TOL {
        return Err(Error::Numeric(format!("correlator imaginary residual {max_imag:e} exceeds {IMAG_TOL:e}")));
    }
    let (mut mean, mut stderr) = (Vec::new(), Vec::new());
    for i in 0..t.len() {
        let col: Vec<f64> = per.iter().map(|p| p.0[i]).collect();
        let e = batch_means(&col, DEFAULT_BATCHES.min(m));
        mean.push(e.mean);
        stderr.push(e.stderr);
    }
    Ok(CorrelatorMc { t: t.to_vec(), mean, stderr, max_imag, meta: CorrelatorMeta { n, r, variance, m, seed } })
}

/// Value of a sampled series at `t`: exact grid hits are returned as is,
/// otherwise linear interpolation in ln t between neighbours. t = 0 must be
/// on the grid.
pub fn interp_log_t(grid: &[f64], values: &[f64], t: f64) -> Result<f64> {
    if grid.len() != values.len() || grid.is_empty() {
        return domain("grid and values must be non-empty and of equal length".to_string());
    }
    if let Some(i) = grid.iter().position(|&g| (g - t).abs() <= 1e-12 * t.abs()) {
        return Ok(values[i]);
    }
    let i = grid.partition_point(|&g| g < t);
    if i == 0 || i == grid.len() || !(grid[i - 1] > 0.0) {
        return domain(format!("t = {t} outside the interpolable range [{}, {}]", grid[0], grid[grid.len() - 1]));
    }
    let (a, b) = (grid[i - 1].ln(), grid[i].ln());
    let w = (t.ln() - a) / (b - a);
    Ok(values[i - 1] + w * (values[i] - values[i - 1]))
}

/// G(t) = (Nσ²/(r²+1))·(R(t√(r²+1))/N² + r²) with R the SFF of GUE(σ²).
pub fn correlator_exact(n: usize, r: f64, variance: f64, sff: &SffSeries, t: &[f64]) -> Result<Vec<f64>> {
    let a = (r * r + 1.0).sqrt();
    let nf = n as f64;
    t.iter()
        .map(|&tk| {
            let rt = if tk == 0.0 { nf * nf } else { interp_log_t(&sff.t, &sff.mean, tk * a)? };
            Ok(nf * variance / (a * a) * (rt / (nf * nf) + r * r))
        })
        .collect()
}

/// Scaled-frame G̃(t) = ⟨V(t)V⟩ under H̃ = H/(σ√(r²+1)):
/// (r²Nσ²/(r²+1))·(R̃(t)/N² + r²), R̃ the SFF of unit-variance GUE.
pub fn correlator_exact_scaled(n: usize, r: f64, variance: f64, sff_unit: &SffSeries, t: &[f64]) -> Result<Vec<f64>> {
    let nf = n as f64;
    t.iter()
        .map(|&tk| {
            let rt = if tk == 0.0 { nf * nf } else { interp_log_t(&sff_unit.t, &sff_unit.mean, tk)? };
            Ok(r * r * nf * variance / (r * r + 1.0) * (rt / (nf * nf) + r * r))
        })
        .collect()
}

/// Large-N scaled-frame correlator (r²/(r²+1))·((J₁(2√N t)/(√N t))² + r²).
pub fn correlator_free(n: usize, r: f64, t: f64) -> f64 {
    let j = j1_ratio((n as f64).sqrt() * t);
    r * r / (r * r + 1.0) * (j * j + r * r)
}

/// Large-N correlator in the frame of `correlator_exact` (σ² = 1/N):
/// (1/(r²+1))·((J₁(2t′)/t′)² + r²), t′ = t√(r²+1).
pub fn correlator_free_unscaled(r: f64, t: f64) -> f64 {
    let j = j1_ratio(t * (r * r + 1.0).sqrt());
    (j * j + r * r) / (r * r + 1.0)
}

/// Box approximation N + N²(J₁(2t′)/t′)² − N·r₂(t′), r₂ = max(0, 1 − t′/(2N)).
pub fn box_sff(n: usize, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("box_sff needs t >= 0, got {t}"));
    }
    let nf = n as f64;
    let j = j1_ratio(t);
    let r2 = if t < 2.0 * nf { 1.0 - t / (2.0 * nf) } else { 0.0 };
    Ok(nf + nf * nf * j * j - nf * r2)
}

/// G′(x + i0) for the semicircle resolvent G(z) = (z − √(z−2)√(z+2))/2.
fn resolvent_derivative(x: f64) -> Complex64 {
    let z = Complex64::new(x, 0.0);
    let s = if x.abs() < 2.0 {
        Complex64::new(0.0, (4.0 - x * x).sqrt())
    } else {
        Complex64::new((x * x - 4.0).sqrt().copysign(x), 0.0)
    };
    0.5 * (1.0 - z / s)
}

/// N-independent part of the FS, −(1/(r²+1)²)∫ρ(E) Re G′(E + i0) dE with ρ the
/// radius-2 semicircle.
pub fn disconnected_fs(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return domain(format!("disconnected_fs needs r >= 0, got {r}"));
    }
    let q = tanh_sinh(
        |x, dl, dr| {
            let rho = (dl * dr).sqrt() / (2.0 * std::f64::consts::PI);
            rho * resolvent_derivative(x).re
        },
        -2.0,
        2.0,
        1e-12,
    );
    if !q.converged {
        return Err(Error::Numeric("resolvent quadrature did not converge".into()));
    }
    Ok(-q.value / (r * r + 1.0).powi(2))
}

/// ḡ_rr = σ²/(N(r²+1)²)·E Σ_{i≠j} 1/(E′_i − E′_j)² from the spectra of H′ ~ GUE(σ²)
/// that also produced the SFF.
pub fn fs_from_sff(n: usize, r: f64, variance: f64, spectra: &[Vec<f64>]) -> Result<Estimate> {
    if spectra.len() < DEFAULT_BATCHES {
        return Err(Error::Estimator(format!(
            "need at least {DEFAULT_BATCHES} realisations, got {}",
            spectra.len()
        )));
    }
    if let Some(s) = spectra.iter().find(|s| s.len() != n) {
        return domain(format!("spectrum of length {} does not match N = {n}", s.len()));
    }
    let scale = variance / (n as f64 * (r * r + 1.0).powi(2));
    let samples: Vec<f64> = spectra.iter().map(|v| scale * virial_pair_sum(v)).collect();
    Ok(batch_means(&samples, DEFAULT_BATCHES))
}

/// All three correlator routes on a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSeries {
    pub t: Vec<f64>,
    pub g_mc: Vec<f64>,
    pub g_mc_se: Vec<f64>,
    pub g_exact: Vec<f64>,
    pub g_free: Vec<f64>,
    pub meta: CorrelatorMeta,
}

/// Runs the Monte-Carlo correlator with `seed` and the SFF (on t√(r²+1)) with
/// an independent `sff_seed`, at σ² = 1/N.
pub fn correlator_series(n: usize, r: f64, t: &[f64], m: usize, seed: u64, sff_seed: u64) -> Result<CorrelatorSeries> {
    let variance = 1.0 / n as f64;
    let mc = correlator_mc(n, r, variance, t, m, seed)?;
    let a = (r * r + 1.0).sqrt();
    let scaled: Vec<f64> = t.iter().map(|&x| x * a).collect();
    let sff = crate::spectra::sff(&EnsembleSpec::gue(n).with_variance(variance), &scaled, m, sff_seed)?;
    let g_exact = correlator_exact(n, r, variance, &sff, t)?;
    let g_free = t.iter().map(|&x| correlator_free_unscaled(r, x)).collect();
    Ok(CorrelatorSeries { t: t.to_vec(), g_mc: mc.mean, g_mc_se: mc.stderr, g_exact, g_free, meta: mc.meta })
}
