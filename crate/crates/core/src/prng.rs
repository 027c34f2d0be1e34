//! Seedable generators with derived sub-streams.
//!
//! Every realization owns a generator derived from (master_seed, stream_index,
//! slot) through splitmix64 mixing, so results do not depend on how
//! realizations are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub type Stream = Xoshiro256PlusPlus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    /// Generator for one matrix slot of this realization.
    pub fn slot(&self, slot: u64) -> Stream {
        let a = splitmix64(self.master_seed);
        let b = splitmix64(a ^ self.stream_index.wrapping_mul(0xD1B5_4A32_D192_ED03));
        let c = splitmix64(b ^ slot.wrapping_mul(0xA24B_AED4_963E_E407));
        Stream::seed_from_u64(c)
    }

    pub fn stream(&self) -> Stream {
        self.slot(0)
    }
}

/// Sample from N(mean, variance).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, mean: f64, variance: f64) -> Result<f64> {
    if !(variance >= 0.0) {
        return domain(format!("gaussian: variance must be >= 0, got {variance}"));
    }
    if variance == 0.0 {
        return Ok(mean);
    }
    let z: f64 = StandardNormal.sample(rng);
    Ok(mean + variance.sqrt() * z)
}

/// Sample with density ∝ b^{k−1} exp(−b²/(2 scale²)), as scale·√Gamma(k/2, 2).
pub fn chi<R: Rng + ?Sized>(rng: &mut R, k: f64, scale: f64) -> Result<f64> {
    if !(k > 0.0) || !(scale > 0.0) {
        return domain(format!("chi: need k > 0 and scale > 0, got k={k}, scale={scale}"));
    }
    let g = Gamma::new(0.5 * k, 2.0).map_err(|e| crate::error::Error::Domain(e.to_string()))?;
    Ok(scale * g.sample(rng).sqrt())
}

/// Sample from Gamma(shape, scale).
pub fn gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> Result<f64> {
    let g = Gamma::new(shape, scale).map_err(|e| crate::error::Error::Domain(e.to_string()))?;
    Ok(g.sample(rng))
}

/// Uniform on [0, 1).
pub fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
