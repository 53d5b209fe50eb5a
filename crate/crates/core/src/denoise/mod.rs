//! Classical image denoisers.

mod bm3d;
mod filters;
mod sigma;

pub use bm3d::{bm3d, bm3d_with, Bm3dParams};
pub use filters::{mean_filter, median_filter};
pub use sigma::{estimate_sigma, MAD_TO_SIGMA, MIN_ESTIMATE_SIDE};

/// Default window side for mean and median filtering.
pub const DEFAULT_WINDOW: usize = 5;
