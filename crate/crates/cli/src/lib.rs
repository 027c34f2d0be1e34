//! Library side of the `rmtgeo` command: figure data, acceptance suites and
//! the thin module verbs, all writing CSV plus a manifest.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accept;
pub mod config;
pub mod figures;
pub mod output;
pub mod verbs;

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, config or parameters. Exit code 2.
    Usage(String),
    Io(String),
    Compute(rmtgeo::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rmtgeo::Error> for CliError {
    fn from(e: rmtgeo::Error) -> Self {
        match e {
            rmtgeo::Error::Config(m) | rmtgeo::Error::Domain(m) => CliError::Usage(m),
            other => CliError::Compute(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Seed for an independent sub-computation.
pub fn sub_seed(seed: u64, tag: u64) -> u64 {
    rmtgeo::prng::splitmix64(seed ^ rmtgeo::prng::splitmix64(tag))
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
