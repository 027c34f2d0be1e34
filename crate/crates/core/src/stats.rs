use serde::{Deserialize, Serialize};

pub const DEFAULT_BATCHES: usize = 10;

/// Mean and standard error of a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Number of standard errors separating the mean from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr
    }
}

/// Batch-means estimate over contiguous batches of the samples in order.
/// Batch sizes differ by at most one. Falls back to the naive standard
/// error when there are fewer samples than batches.
pub fn batch_means(samples: &[f64], batches: usize) -> Estimate {
    let n = samples.len();
    if n == 0 {
        return Estimate { mean: f64::NAN, stderr: f64::NAN };
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < batches || batches < 2 {
        if n < 2 {
            return Estimate { mean, stderr: f64::INFINITY };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        return Estimate { mean, stderr: (var / n as f64).sqrt() };
    }
    let mut start = 0;
    let mut bm = Vec::with_capacity(batches);
    for b in 0..batches {
        let len = n / batches + usize::from(b < n % batches);
        let s = &samples[start..start + len];
        bm.push(s.iter().sum::<f64>() / len as f64);
        start += len;
    }
    let bmean = bm.iter().sum::<f64>() / batches as f64;
    let var = bm.iter().map(|x| (x - bmean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Estimate { mean, stderr: (var / batches as f64).sqrt() }
}

/// Least-squares slope and intercept of log|y| against log x.
pub fn power_law_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Monte-Carlo mean of `draw` over `samples` draws. Draws are grouped into
/// fixed-size chunks, each with its own derived stream, so the result is
/// independent of the thread count. Standard error by batch means over
/// contiguous groups of chunks.
pub fn mc_estimate<F>(samples: usize, seed: u64, slot: u64, draw: F) -> Estimate
where
    F: Fn(&mut crate::prng::Stream) -> f64 + Sync,
{
    use rayon::prelude::*;
    let chunk = samples.div_ceil(DEFAULT_BATCHES).clamp(1, 4096);
    let chunks = samples.div_ceil(chunk).max(1);
    let sums: Vec<(f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = crate::prng::SeedSpec::new(seed, c as u64).slot(slot);
            let len = chunk.min(samples - c * chunk);
            let mut s = 0.0;
            for _ in 0..len {
                s += draw(&mut rng);
            }
            (s, len)
        })
        .collect();
    chunked_batch_means(&sums, DEFAULT_BATCHES)
}

/// Batch means where the inputs are (sum, count) per chunk in order.
pub fn chunked_batch_means(chunks: &[(f64, usize)], batches: usize) -> Estimate {
    let total: usize = chunks.iter().map(|c| c.1).sum();
    let mean = chunks.iter().map(|c| c.0).sum::<f64>() / total as f64;
    if chunks.len() < batches {
        let means: Vec<f64> = chunks.iter().map(|c| c.0 / c.1 as f64).collect();
        let est = batch_means(&means, means.len());
        return Estimate { mean, stderr: est.stderr };
    }
    let mut bm = Vec::with_capacity(batches);
    let mut start = 0;
    for b in 0..batches {
        let len = chunks.len() / batches + usize::from(b < chunks.len() % batches);
        let (s, n) = chunks[start..start + len]
            .iter()
            .fold((0.0, 0usize), |acc, c| (acc.0 + c.0, acc.1 + c.1));
        bm.push(s / n as f64);
        start += len;
    }
    let bmean = bm.iter().sum::<f64>() / batches as f64;
    let var = bm.iter().map(|x| (x - bmean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Estimate { mean, stderr: (var / batches as f64).sqrt() }
}
