//! Receive chain: CP removal and FFT, perfect-CSI MMSE combining, soft demapping.

pub mod demapper;
pub mod equalizer;

pub use demapper::soft_demap;
pub use equalizer::{mmse_combine, mmse_equalize, EqualizedGrid};

use crate::error::Result;
use crate::phy_tx::{Numerology, OfdmEngine, ResourceGrid, Waveform};
use crate::scalar::Real;

/// Demodulates one slot per antenna into `num_subcarriers`-wide grids.
pub fn ofdm_demodulate<T: Real>(
    rx: &[Waveform<T>],
    numerology: &Numerology,
    num_subcarriers: usize,
) -> Result<Vec<ResourceGrid<T>>> {
    let engine = OfdmEngine::new(*numerology);
    rx.iter()
        .map(|w| engine.demodulate(&w.samples, num_subcarriers))
        .collect()
}
