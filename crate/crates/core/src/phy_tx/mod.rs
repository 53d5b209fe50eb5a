//! Transmit chain from coded bits to time-domain samples.

pub mod dmrs;
pub mod grid;
pub mod modulation;
pub mod ofdm;

pub use dmrs::{generate_dmrs, gold_sequence, Dmrs};
pub use grid::{demap_from_grid, map_to_grid, GridLayout, ResourceGrid};
pub use modulation::{qam64_map, Modulation};
pub use ofdm::{ofdm_modulate, Numerology, OfdmEngine, Waveform};
