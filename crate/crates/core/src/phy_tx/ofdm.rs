use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::grid::ResourceGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sampling and cyclic-prefix parameters of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerology {
    pub fft_size: usize,
    pub sample_rate: f64,
    pub subcarrier_spacing: f64,
    pub symbols_per_slot: usize,
    /// Prefix of the first symbol in each half slot.
    pub cp_long: usize,
    pub cp_short: usize,
}

impl Default for Numerology {
    fn default() -> Self {
        Numerology {
            fft_size: 1024,
            sample_rate: 15.36e6,
            subcarrier_spacing: 15e3,
            symbols_per_slot: 14,
            cp_long: 80,
            cp_short: 72,
        }
    }
}

impl Numerology {
    pub fn cp_len(&self, symbol: usize) -> usize {
        if symbol.is_multiple_of(self.symbols_per_slot / 2) {
            self.cp_long
        } else {
            self.cp_short
        }
    }

    /// Offset of symbol `l`'s prefix from the start of the slot.
    pub fn symbol_start(&self, symbol: usize) -> usize {
        (0..symbol).map(|l| self.cp_len(l) + self.fft_size).sum()
    }

    pub fn slot_len(&self) -> usize {
        self.symbol_start(self.symbols_per_slot)
    }

    pub fn sample_period(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// FFT bin carrying subcarrier `k` of `num_subcarriers` centred on DC.
    #[inline]
    pub fn bin(&self, k: usize, num_subcarriers: usize) -> usize {
        (k + self.fft_size - num_subcarriers / 2) % self.fft_size
    }
}

/// Complex baseband samples of one or more slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform<T> {
    pub samples: Vec<Complex<T>>,
    pub sample_rate: f64,
}

impl<T: Real> Waveform<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_power(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        let e: T = self.samples.iter().map(|s| s.norm_sqr()).sum();
        e / T::lit(self.samples.len() as f64)
    }
}

/// Planned unitary FFT pair for a numerology.
pub struct OfdmEngine<T: Real> {
    pub numerology: Numerology,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    norm: T,
}

impl<T: Real> OfdmEngine<T> {
    pub fn new(numerology: Numerology) -> Self {
        let mut planner = FftPlanner::new();
        OfdmEngine {
            forward: planner.plan_fft_forward(numerology.fft_size),
            inverse: planner.plan_fft_inverse(numerology.fft_size),
            norm: T::one() / T::lit(numerology.fft_size as f64).sqrt(),
            numerology,
        }
    }

    /// Grid to time samples with a cyclic prefix on every symbol.
    pub fn modulate(&self, grid: &ResourceGrid<T>) -> Result<Waveform<T>> {
        let num = &self.numerology;
        let n = num.fft_size;
        if grid.num_symbols != num.symbols_per_slot || grid.num_subcarriers > n {
            return Err(Error::Config(format!(
                "{}x{} grid does not fit {} symbols of FFT size {n}",
                grid.num_symbols, grid.num_subcarriers, num.symbols_per_slot
            )));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut samples = Vec::with_capacity(num.slot_len());
        let mut buf = vec![zero; n];
        for l in 0..grid.num_symbols {
            buf.iter_mut().for_each(|b| *b = zero);
            for (k, &x) in grid.symbol(l).iter().enumerate() {
                buf[num.bin(k, grid.num_subcarriers)] = x;
            }
            self.inverse.process(&mut buf);
            buf.iter_mut().for_each(|b| *b = *b * self.norm);
            samples.extend_from_slice(&buf[n - num.cp_len(l)..]);
            samples.extend_from_slice(&buf);
        }
        Ok(Waveform {
            samples,
            sample_rate: num.sample_rate,
        })
    }

    /// Strips each prefix and returns the `num_subcarriers`-wide grid.
    pub fn demodulate(&self, samples: &[Complex<T>], num_subcarriers: usize) -> Result<ResourceGrid<T>> {
        let num = &self.numerology;
        let n = num.fft_size;
        if samples.len() != num.slot_len() {
            return Err(Error::size("slot samples", num.slot_len(), samples.len()));
        }
        if num_subcarriers > n {
            return Err(Error::Config(format!("{num_subcarriers} subcarriers exceed FFT size {n}")));
        }
        let mut grid = ResourceGrid::zeros(num_subcarriers, num.symbols_per_slot);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
        for l in 0..num.symbols_per_slot {
            let start = num.symbol_start(l) + num.cp_len(l);
            buf.copy_from_slice(&samples[start..start + n]);
            self.forward.process(&mut buf);
            for (k, out) in grid.symbol_mut(l).iter_mut().enumerate() {
                *out = buf[num.bin(k, num_subcarriers)] * self.norm;
            }
        }
        Ok(grid)
    }
}

/// One-shot [`OfdmEngine::modulate`].
pub fn ofdm_modulate<T: Real>(grid: &ResourceGrid<T>, numerology: &Numerology) -> Result<Waveform<T>> {
    OfdmEngine::new(*numerology).modulate(grid)
}
