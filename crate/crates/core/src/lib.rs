// NaN inputs must fail validation, so guards are written as !(x > 0.0).
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlators;
pub mod curvature;
pub mod ensembles;
pub mod error;
pub mod geodesics;
pub mod geometry;
pub mod numerics;
pub mod prng;
pub mod spectra;
pub mod stats;

pub use error::{Error, Result};
