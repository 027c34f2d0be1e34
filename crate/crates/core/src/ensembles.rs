//! Random-matrix ensembles and parameterised Hamiltonian families
//! H(r, φ) = H0 + r cosφ·H1 + r sinφ·H2.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::prng::{chi, gamma, gaussian, uniform, SeedSpec, Stream};

pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleKind {
    Gue,
    DiagonalGaussian,
    TridiagonalBeta,
    InvariantEta2x2,
    HaarBeta2x2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    /// σ². Unused by TridiagonalBeta, whose scale is fixed by β and N.
    pub variance: f64,
    pub beta: f64,
    pub eta: f64,
}

impl EnsembleSpec {
    /// GUE with σ² = 1/N.
    pub fn gue(n: usize) -> Self {
        Self { kind: EnsembleKind::Gue, n, variance: 1.0 / n as f64, beta: 2.0, eta: 0.0 }
    }

    /// Diagonal matrix of independent N(0, 1) entries.
    pub fn diagonal(n: usize) -> Self {
        Self { kind: EnsembleKind::DiagonalGaussian, n, variance: 1.0, beta: 0.0, eta: 0.0 }
    }

    pub fn tridiagonal(n: usize, beta: f64) -> Self {
        Self { kind: EnsembleKind::TridiagonalBeta, n, variance: 2.0 / (beta * n as f64), beta, eta: 0.0 }
    }

    /// 2×2 η-ensemble with σ² = 1/2.
    pub fn eta(eta: f64) -> Self {
        Self { kind: EnsembleKind::InvariantEta2x2, n: 2, variance: 0.5, beta: 0.0, eta }
    }

    /// 2×2 matrix with β-ensemble eigenvalues and Haar eigenvectors, σ² = 1/2.
    pub fn haar_beta(beta: f64) -> Self {
        Self { kind: EnsembleKind::HaarBeta2x2, n: 2, variance: 0.5, beta, eta: 0.0 }
    }

    pub fn with_variance(mut self, variance: f64) -> Self {
        self.variance = variance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if !(self.variance > 0.0) {
            return domain(format!("variance must be > 0, got {}", self.variance));
        }
        match self.kind {
            EnsembleKind::TridiagonalBeta | EnsembleKind::HaarBeta2x2 if !(self.beta > 0.0) => {
                domain(format!("beta must be > 0, got {}", self.beta))
            }
            EnsembleKind::InvariantEta2x2 if !(0.0..=1.0).contains(&self.eta) => {
                domain(format!("eta must lie in [0, 1], got {}", self.eta))
            }
            EnsembleKind::InvariantEta2x2 | EnsembleKind::HaarBeta2x2 if self.n != 2 => {
                Err(Error::Config(format!("{:?} requires N = 2, got {}", self.kind, self.n)))
            }
            _ => Ok(()),
        }
    }
}

/// A Hermitian matrix in dense or real-tridiagonal storage.
#[derive(Debug, Clone, PartialEq)]
pub enum Hermitian {
    Dense(CMat),
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
}

impl Hermitian {
    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.nrows(),
            Self::Tridiagonal { diag, .. } => diag.len(),
        }
    }

    pub fn to_dense(&self) -> CMat {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Tridiagonal { diag, off } => {
                let n = diag.len();
                let mut m = CMat::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = diag[i].into();
                }
                for (i, &b) in off.iter().enumerate() {
                    m[(i, i + 1)] = b.into();
                    m[(i + 1, i)] = b.into();
                }
                m
            }
        }
    }

    /// a·self + b·other, staying tridiagonal when both are.
    pub fn axpby(&self, a: f64, other: &Hermitian, b: f64) -> Hermitian {
        match (self, other) {
            (Self::Tridiagonal { diag: d1, off: o1 }, Self::Tridiagonal { diag: d2, off: o2 }) => {
                Self::Tridiagonal {
                    diag: d1.iter().zip(d2).map(|(x, y)| a * x + b * y).collect(),
                    off: o1.iter().zip(o2).map(|(x, y)| a * x + b * y).collect(),
                }
            }
            _ => Self::Dense(self.to_dense() * Complex64::from(a) + other.to_dense() * Complex64::from(b)),
        }
    }
}

pub fn sample_gue(spec: &EnsembleSpec, rng: &mut Stream) -> Result<CMat> {
    let n = spec.n;
    let s2 = spec.variance;
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = gaussian(rng, 0.0, s2)?.into();
        for j in i + 1..n {
            let z = Complex64::new(gaussian(rng, 0.0, 0.5 * s2)?, gaussian(rng, 0.0, 0.5 * s2)?);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    Ok(m)
}

pub fn sample_diagonal(spec: &EnsembleSpec, rng: &mut Stream) -> Result<Vec<f64>> {
    (0..spec.n).map(|_| gaussian(rng, 0.0, spec.variance)).collect()
}

/// Returns (diagonal, off-diagonal) of the tridiagonal β-ensemble matrix.
pub fn sample_tridiagonal_beta(spec: &EnsembleSpec, rng: &mut Stream) -> Result<(Vec<f64>, Vec<f64>)> {
    let beta = spec.beta;
    if !(beta > 0.0) {
        return domain(format!("beta must be > 0, got {beta}"));
    }
    let n = spec.n;
    let bn = beta * n as f64;
    let diag = (0..n).map(|_| gaussian(rng, 0.0, 2.0 / bn)).collect::<Result<Vec<_>>>()?;
    let scale = 1.0 / bn.sqrt();
    let off = (1..n).map(|k| chi(rng, (n - k) as f64 * beta, scale)).collect::<Result<Vec<_>>>()?;
    Ok((diag, off))
}

/// Haar-random 2×2 unitary with mixing-angle density sin2θ on [0, π/2].
pub fn sample_haar2x2(rng: &mut Stream) -> CMat {
    let u1 = 2.0 * std::f64::consts::PI * uniform(rng);
    let u2 = 2.0 * std::f64::consts::PI * uniform(rng);
    let theta = 0.5 * (1.0 - 2.0 * uniform(rng)).acos();
    let (s, c) = theta.sin_cos();
    let e1 = Complex64::from_polar(1.0, u1);
    let e2 = Complex64::from_polar(1.0, u2);
    CMat::from_row_slice(2, 2, &[e1 * c, -e2 * s, e2.conj() * s, e1.conj() * c])
}

fn rotate_2x2(u: &CMat, l1: f64, l2: f64) -> CMat {
    let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![l1.into(), l2.into()]));
    let mut m = u * d * u.adjoint();
    // exact Hermiticity after the product
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    m[(0, 1)] = off;
    m[(1, 0)] = off.conj();
    m[(0, 0)] = m[(0, 0)].re.into();
    m[(1, 1)] = m[(1, 1)].re.into();
    m
}

fn centre_gap(rng: &mut Stream, centre_var: f64, gap_shape: f64, gap_scale: f64) -> Result<(f64, f64)> {
    let c = gaussian(rng, 0.0, centre_var)?;
    let mut delta = gamma(rng, gap_shape, gap_scale)?.sqrt();
    if uniform(rng) < 0.5 {
        delta = -delta;
    }
    Ok((c + 0.5 * delta, c - 0.5 * delta))
}

/// Unordered eigenvalue pair of the η-ensemble: centre ~ N(0, σ²/2),
/// squared gap ~ Gamma((3−2η)/2, 4σ²), random sign.
pub fn sample_eta_eigenvalues(spec: &EnsembleSpec, rng: &mut Stream) -> Result<(f64, f64)> {
    let eta = spec.eta;
    if !(0.0..=1.0).contains(&eta) {
        return domain(format!("eta must lie in [0, 1], got {eta}"));
    }
    let s2 = spec.variance;
    centre_gap(rng, 0.5 * s2, 0.5 * (3.0 - 2.0 * eta), 4.0 * s2)
}

/// η-ensemble matrix U·diag(λ)·U† with Haar U.
pub fn sample_invariant_eta(spec: &EnsembleSpec, rng: &mut Stream) -> Result<CMat> {
    let (l1, l2) = sample_eta_eigenvalues(spec, rng)?;
    Ok(rotate_2x2(&sample_haar2x2(rng), l1, l2))
}

/// β-ensemble eigenvalues with Haar eigenvectors: centre ~ N(0, σ²/β),
/// squared gap ~ Gamma((β+1)/2, 8σ²/β).
pub fn sample_haar_beta(spec: &EnsembleSpec, rng: &mut Stream) -> Result<CMat> {
    let beta = spec.beta;
    if !(beta > 0.0) {
        return domain(format!("beta must be > 0, got {beta}"));
    }
    let s2 = spec.variance;
    let (l1, l2) = centre_gap(rng, s2 / beta, 0.5 * (beta + 1.0), 8.0 * s2 / beta)?;
    Ok(rotate_2x2(&sample_haar2x2(rng), l1, l2))
}

pub fn sample(spec: &EnsembleSpec, rng: &mut Stream) -> Result<Hermitian> {
    spec.validate()?;
    Ok(match spec.kind {
        EnsembleKind::Gue => Hermitian::Dense(sample_gue(spec, rng)?),
        EnsembleKind::DiagonalGaussian => {
            let diag = sample_diagonal(spec, rng)?;
            let off = vec![0.0; spec.n - 1];
            Hermitian::Tridiagonal { diag, off }
        }
        EnsembleKind::TridiagonalBeta => {
            let (diag, off) = sample_tridiagonal_beta(spec, rng)?;
            Hermitian::Tridiagonal { diag, off }
        }
        EnsembleKind::InvariantEta2x2 => Hermitian::Dense(sample_invariant_eta(spec, rng)?),
        EnsembleKind::HaarBeta2x2 => Hermitian::Dense(sample_haar_beta(spec, rng)?),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFamily {
    pub h0: Hermitian,
    pub h1: Hermitian,
    pub h2: Option<Hermitian>,
}

impl HamiltonianFamily {
    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn evaluate(&self, r: f64, phi: f64) -> Hermitian {
        match &self.h2 {
            None => self.h0.axpby(1.0, &self.h1, r),
            Some(h2) => {
                let (s, c) = phi.sin_cos();
                self.h0.axpby(1.0, &self.h1, r * c).axpby(1.0, h2, r * s)
            }
        }
    }

    /// ∂H/∂r at angle φ.
    pub fn d_r(&self, phi: f64) -> Hermitian {
        match &self.h2 {
            None => self.h1.clone(),
            Some(h2) => {
                let (s, c) = phi.sin_cos();
                self.h1.axpby(c, h2, s)
            }
        }
    }

    /// ∂H/∂φ at (r, φ); zero without H2.
    pub fn d_phi(&self, r: f64, phi: f64) -> Hermitian {
        match &self.h2 {
            None => self.h1.axpby(0.0, &self.h1, 0.0),
            Some(h2) => {
                let (s, c) = phi.sin_cos();
                self.h1.axpby(-r * s, h2, r * c)
            }
        }
    }
}

/// Samples H0, H1 and (optionally) H2 from matrix slots 0, 1, 2 of the
/// given realisation.
pub fn build_family(
    h0: &EnsembleSpec,
    h1: &EnsembleSpec,
    h2: Option<&EnsembleSpec>,
    seed: SeedSpec,
) -> Result<HamiltonianFamily> {
    let n = h0.n;
    if h1.n != n || h2.is_some_and(|s| s.n != n) {
        return Err(Error::Config(format!(
            "dimension mismatch: H0 has N = {n}, H1 has N = {}{}",
            h1.n,
            h2.map(|s| format!(", H2 has N = {}", s.n)).unwrap_or_default()
        )));
    }
    Ok(HamiltonianFamily {
        h0: sample(h0, &mut seed.slot(0))?,
        h1: sample(h1, &mut seed.slot(1))?,
        h2: h2.map(|s| sample(s, &mut seed.slot(2))).transpose()?,
    })
}
