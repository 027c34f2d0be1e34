//! Hermitian eigendecomposition, spectral form factor and spectral-function moments.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample, CMat, EnsembleSpec, Hermitian};
use crate::error::{domain, Error, Result};
use crate::prng::SeedSpec;
use crate::stats::{batch_means, DEFAULT_BATCHES};

/// Ascending eigenvalues and matching eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunctionMoments {
    pub state: usize,
    pub order: i32,
    pub value: f64,
}

const HERMITICITY_TOL: f64 = 1e-12;

pub fn check_hermitian(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return domain(format!("matrix is {}×{}, not square", m.nrows(), m.ncols()));
    }
    let scale = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > HERMITICITY_TOL * scale.max(f64::MIN_POSITIVE) {
                return domain(format!("matrix not Hermitian: |H[{i},{j}] − conj H[{j},{i}]| = {d:e}"));
            }
        }
    }
    Ok(())
}

/// Multiplies each column by a phase so its largest-magnitude entry is real
/// positive (lowest index on ties).
fn fix_phases(v: &mut CMat) {
    for mut col in v.column_iter_mut() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for (i, z) in col.iter().enumerate() {
            let a = z.norm();
            if a > best_abs * (1.0 + 1e-12) {
                best = i;
                best_abs = a;
            }
        }
        if best_abs > 0.0 {
            let ph = col[best].conj() / best_abs;
            for z in col.iter_mut() {
                *z *= ph;
            }
            col[best] = best_abs.into();
        }
    }
}

fn fix_phases_real(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > best_abs * (1.0 + 1e-12) {
                best = i;
                best_abs = x.abs();
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

fn sort_pairs<T: nalgebra::Scalar + Copy>(values: &[f64], vectors: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let vals = idx.iter().map(|&i| values[i]).collect();
    let vecs = DMatrix::from_fn(vectors.nrows(), idx.len(), |r, c| vectors[(r, idx[c])]);
    (vals, vecs)
}

/// Dense Hermitian eigendecomposition.
pub fn eigh_dense(m: &CMat) -> Result<SpectralData> {
    check_hermitian(m)?;
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::Numeric(format!("dense eigensolver did not converge (N = {n})")))?;
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (values, mut vectors) = sort_pairs(&vals, &eig.eigenvectors);
    fix_phases(&mut vectors);
    Ok(SpectralData { values, vectors })
}

/// Eigendecomposition of either storage form.
pub fn eigh(h: &Hermitian) -> Result<SpectralData> {
    match h {
        Hermitian::Dense(m) => eigh_dense(m),
        Hermitian::Tridiagonal { diag, off } => eigh_tridiagonal(diag, off),
    }
}

/// Eigenvalues only.
pub fn eigvalsh(h: &Hermitian) -> Result<Vec<f64>> {
    let mut v = match h {
        Hermitian::Dense(m) => {
            check_hermitian(m)?;
            m.clone().symmetric_eigenvalues().iter().copied().collect()
        }
        Hermitian::Tridiagonal { diag, off } => {
            let mut d = diag.clone();
            let mut e = off.clone();
            e.push(0.0);
            tql(&mut d, &mut e, None)?;
            d
        }
    };
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix. `e` holds the
/// off-diagonal in e[0..n−1] and is destroyed. Eigenvectors accumulate into
/// `z` when given (start from the identity).
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut DMatrix<f64>>) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric(format!("tridiagonal QL did not converge at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Real eigenpairs of a symmetric tridiagonal matrix, ascending, with the
/// same sign convention as `eigh`.
pub fn eigh_tridiagonal_real(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = diag.len();
    if off.len() + 1 != n.max(1) {
        return domain(format!("tridiagonal lengths {} and {} are inconsistent", n, off.len()));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = DMatrix::identity(n, n);
    tql(&mut d, &mut e, Some(&mut z))?;
    let (values, mut vectors) = sort_pairs(&d, &z);
    fix_phases_real(&mut vectors);
    Ok((values, vectors))
}

pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<SpectralData> {
    let (values, z) = eigh_tridiagonal_real(diag, off)?;
    Ok(SpectralData { values, vectors: z.map(Complex64::from) })
}

/// V†·H·V.
pub fn to_eigenbasis(spectral: &SpectralData, h: &Hermitian) -> CMat {
    let v = &spectral.vectors;
    v.adjoint() * h.to_dense() * v
}

/// |Σ_n e^{−iE_n t}|² for one spectrum.
pub fn sff_single(values: &[f64], t: f64) -> f64 {
    let (mut c, mut s) = (0.0, 0.0);
    for &e in values {
        let (si, co) = (e * t).sin_cos();
        c += co;
        s += si;
    }
    c * c + s * s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SffSeries {
    pub t: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub realizations: usize,
}

/// Ensemble SFF from precomputed spectra.
pub fn sff_from_spectra(spectra: &[Vec<f64>], t_grid: &[f64]) -> SffSeries {
    let per_t: Vec<(f64, f64)> = t_grid
        .par_iter()
        .map(|&t| {
            let samples: Vec<f64> = spectra.iter().map(|v| sff_single(v, t)).collect();
            let e = batch_means(&samples, DEFAULT_BATCHES);
            (e.mean, e.stderr)
        })
        .collect();
    SffSeries {
        t: t_grid.to_vec(),
        mean: per_t.iter().map(|p| p.0).collect(),
        stderr: per_t.iter().map(|p| p.1).collect(),
        realizations: spectra.len(),
    }
}

/// R(t) = E|Tr e^{−iHt}|² over `m` realisations of a single ensemble.
pub fn sff(spec: &EnsembleSpec, t_grid: &[f64], m: usize, seed: u64) -> Result<SffSeries> {
    if m == 0 {
        return Err(Error::Estimator("sff needs at least one realisation".into()));
    }
    let spectra = (0..m)
        .into_par_iter()
        .map(|k| eigvalsh(&sample(spec, &mut SeedSpec::new(seed, k as u64).slot(0))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(sff_from_spectra(&spectra, t_grid))
}

/// Log-uniform grid of `points` values on [t_min, t_max].
pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![t_min];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

/// M_k = Σ_{j≠n} |ℋ_nj|² (E_j − E_n)^k, with ℋ already in the eigenbasis.
pub fn spectral_moments_eigenbasis(
    values: &[f64],
    pert_eb: &CMat,
    n: usize,
    orders: &[i32],
) -> Result<Vec<SpectralFunctionMoments>> {
    if let Some(k) = orders.iter().find(|k| k.abs() > 4) {
        return domain(format!("moment order must satisfy |k| <= 4, got {k}"));
    }
    if n >= values.len() {
        return domain(format!("state index {n} out of range for N = {}", values.len()));
    }
    Ok(orders
        .iter()
        .map(|&k| {
            let value = (0..values.len())
                .filter(|&j| j != n)
                .map(|j| pert_eb[(n, j)].norm_sqr() * (values[j] - values[n]).powi(k))
                .sum();
            SpectralFunctionMoments { state: n, order: k, value }
        })
        .collect())
}

/// Moments of the spectral function of state n for perturbation ℋ.
pub fn spectral_moments(
    spectral: &SpectralData,
    pert: &Hermitian,
    n: usize,
    orders: &[i32],
) -> Result<Vec<SpectralFunctionMoments>> {
    spectral_moments_eigenbasis(&spectral.values, &to_eigenbasis(spectral, pert), n, orders)
}
