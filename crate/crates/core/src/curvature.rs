//! Level curvature K_n = ½ d²E_n/dr² and third derivative L_n = (1/6) d³E_n/dr³.

use serde::{Deserialize, Serialize};

use crate::ensembles::{sample, CMat, EnsembleSpec, Hermitian};
use crate::error::{domain, Error, Result};
use crate::geometry::{degeneracy_threshold, level_degenerate, Flagged};
use crate::spectra::{eigh, to_eigenbasis, SpectralData};
use crate::stats::{mc_estimate, Estimate};

pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelDerivatives {
    pub state: usize,
    pub r: f64,
    pub curvature: f64,
    pub third: f64,
}

/// Σ_{j≠n} |ℋ_nj|² / (E_n − E_j), ℋ in the eigenbasis.
pub fn level_curvature_eigenbasis(values: &[f64], p: &CMat, n: usize) -> Flagged {
    let value = (0..values.len())
        .filter(|&j| j != n)
        .map(|j| p[(n, j)].norm_sqr() / (values[n] - values[j]))
        .sum();
    Flagged { value, degenerate: level_degenerate(values, n) }
}

pub fn level_curvature(spectral: &SpectralData, pert: &Hermitian, n: usize) -> Result<Flagged> {
    check_index(spectral, n)?;
    Ok(level_curvature_eigenbasis(&spectral.values, &to_eigenbasis(spectral, pert), n))
}

/// Σ_{k,m≠n} ℋ_kn ℋ_nm ℋ_mk / (E_nk E_nm) − ℋ_nn Σ_{k≠n} |ℋ_nk|² / E_nk².
pub fn third_derivative_eigenbasis(values: &[f64], p: &CMat, n: usize) -> Flagged {
    let len = values.len();
    let mut first = 0.0;
    for k in (0..len).filter(|&k| k != n) {
        let enk = values[n] - values[k];
        for m in (0..len).filter(|&m| m != n) {
            let enm = values[n] - values[m];
            first += (p[(k, n)] * p[(n, m)] * p[(m, k)]).re / (enk * enm);
        }
    }
    let second: f64 = (0..len)
        .filter(|&k| k != n)
        .map(|k| p[(n, k)].norm_sqr() / (values[n] - values[k]).powi(2))
        .sum();
    Flagged { value: first - p[(n, n)].re * second, degenerate: level_degenerate(values, n) }
}

pub fn third_derivative(spectral: &SpectralData, pert: &Hermitian, n: usize) -> Result<Flagged> {
    check_index(spectral, n)?;
    Ok(third_derivative_eigenbasis(&spectral.values, &to_eigenbasis(spectral, pert), n))
}

pub fn level_derivatives(spectral: &SpectralData, pert: &Hermitian, n: usize, r: f64) -> Result<LevelDerivatives> {
    check_index(spectral, n)?;
    let p = to_eigenbasis(spectral, pert);
    Ok(LevelDerivatives {
        state: n,
        r,
        curvature: level_curvature_eigenbasis(&spectral.values, &p, n).value,
        third: third_derivative_eigenbasis(&spectral.values, &p, n).value,
    })
}

/// χ(z) = Σ_{j≠n} |ℋ_nj|² / (z − (E_j − E_n)).
pub fn cauchy_chi(spectral: &SpectralData, pert: &Hermitian, n: usize, z: f64) -> Result<f64> {
    check_index(spectral, n)?;
    let v = &spectral.values;
    let eps = degeneracy_threshold(v);
    if let Some(j) = (0..v.len()).find(|&j| j != n && (z - (v[j] - v[n])).abs() <= eps) {
        return domain(format!("z = {z} lies on the pole at gap E_{j} − E_{n}"));
    }
    let p = to_eigenbasis(spectral, pert);
    Ok((0..v.len()).filter(|&j| j != n).map(|j| p[(n, j)].norm_sqr() / (z - (v[j] - v[n]))).sum())
}

fn check_index(spectral: &SpectralData, n: usize) -> Result<()> {
    if n >= spectral.values.len() {
        return domain(format!("state index {n} out of range for N = {}", spectral.values.len()));
    }
    Ok(())
}

/// Closed-form average upper-level curvature of the 2×2 tridiagonal family
/// for β ∈ {2, 4}.
pub fn curvature_closed(beta: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("average curvature diverges like log r at r = {r}"));
    }
    let r2 = r * r;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    if beta == 2.0 {
        Ok(((4.0 / r2 + 1.0).acosh() - 2.0 * std::f64::consts::SQRT_2 / (2.0 + r2).sqrt()) / (4.0 * sqrt_pi))
    } else if beta == 4.0 {
        Ok(((8.0 + 3.0 * r2) * (8.0 / r2 + 1.0).acosh() - 12.0 * (4.0 + r2).sqrt()) / (32.0 * sqrt_pi))
    } else {
        domain(format!("closed form available for beta in {{2, 4}} only, got {beta}"))
    }
}

/// Averaged curvature of both levels of H = H0 + rℋ, H0 diagonal N(0,1) and
/// ℋ from the 2×2 tridiagonal β-ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEstimate {
    pub upper: Estimate,
    pub lower: Estimate,
}

pub fn curvature_mc(beta: f64, r: f64, m: usize, seed: u64) -> Result<CurvatureEstimate> {
    if !(beta > 0.0) {
        return domain(format!("beta must be > 0, got {beta}"));
    }
    if m < MIN_SAMPLES {
        return Err(Error::Estimator(format!("need at least {MIN_SAMPLES} samples, got {m}")));
    }
    let h0 = EnsembleSpec::diagonal(2);
    let v = EnsembleSpec::tridiagonal(2, beta);
    let level = |n: usize| {
        mc_estimate(m, seed, 31, |rng| {
            let a = sample(&h0, rng).expect("validated");
            let b = sample(&v, rng).expect("validated");
            let s = eigh(&a.axpby(1.0, &b, r)).expect("tridiagonal 2x2");
            level_curvature_eigenbasis(&s.values, &to_eigenbasis(&s, &b), n).value
        })
    };
    Ok(CurvatureEstimate { upper: level(1), lower: level(0) })
}
