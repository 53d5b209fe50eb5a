use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gray-mapped square QAM of 38.211.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Modulation {
    Qpsk,
    Qam16,
    #[default]
    Qam64,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    /// Bits carried on each of the I and Q axes.
    pub fn bits_per_axis(self) -> usize {
        self.bits_per_symbol() / 2
    }

    /// Normalization giving unit mean energy over the constellation.
    pub fn scale(self) -> f64 {
        let levels = (1usize << self.bits_per_axis()) as f64;
        (2.0 * (levels * levels - 1.0) / 3.0).sqrt()
    }

    /// Unnormalized PAM level for the axis bits `(c0, c1, ...)`:
    /// `(1-2c0) * (2^(m-1) - (1-2c1) * (2^(m-2) - ...))`.
    pub fn axis_level(self, axis_bits: &[u8]) -> f64 {
        let m = axis_bits.len();
        let sign = |b: u8| 1.0 - 2.0 * (b & 1) as f64;
        let mut acc = sign(axis_bits[m - 1]);
        for i in (0..m - 1).rev() {
            acc = sign(axis_bits[i]) * ((1usize << (m - 1 - i)) as f64 - acc);
        }
        acc
    }

    /// All `2^m` axis levels, indexed by the axis bit pattern (first bit = MSB).
    pub fn axis_table(self) -> Vec<f64> {
        let m = self.bits_per_axis();
        let scale = self.scale();
        (0..1usize << m)
            .map(|pattern| {
                let bits: Vec<u8> = (0..m).map(|i| ((pattern >> (m - 1 - i)) & 1) as u8).collect();
                self.axis_level(&bits) / scale
            })
            .collect()
    }

    /// Maps bits to symbols; even-indexed bits of each group drive I, odd drive Q.
    pub fn map<T: Real>(self, bits: &[u8]) -> Result<Vec<Complex<T>>> {
        let q = self.bits_per_symbol();
        if !bits.len().is_multiple_of(q) {
            return Err(Error::size(
                "modulation input (multiple of bits per symbol)",
                bits.len().div_ceil(q) * q,
                bits.len(),
            ));
        }
        let table = self.axis_table();
        let m = self.bits_per_axis();
        Ok(bits
            .chunks_exact(q)
            .map(|g| {
                let (mut i_idx, mut q_idx) = (0usize, 0usize);
                for j in 0..m {
                    i_idx = (i_idx << 1) | (g[2 * j] & 1) as usize;
                    q_idx = (q_idx << 1) | (g[2 * j + 1] & 1) as usize;
                }
                Complex::new(T::lit(table[i_idx]), T::lit(table[q_idx]))
            })
            .collect())
    }

    /// Nearest-point hard decision.
    pub fn hard_demap<T: Real>(self, symbols: &[Complex<T>]) -> Vec<u8> {
        let table = self.axis_table();
        let m = self.bits_per_axis();
        let nearest = |v: f64| {
            table
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
                .map(|(i, _)| i)
                .unwrap_or(0)
        };
        let mut bits = Vec::with_capacity(symbols.len() * 2 * m);
        for s in symbols {
            let i_idx = nearest(s.re.to_f64_lossy());
            let q_idx = nearest(s.im.to_f64_lossy());
            for j in 0..m {
                bits.push(((i_idx >> (m - 1 - j)) & 1) as u8);
                bits.push(((q_idx >> (m - 1 - j)) & 1) as u8);
            }
        }
        bits
    }

    /// Every constellation point, indexed by its bit pattern (first bit = MSB).
    pub fn constellation<T: Real>(self) -> Vec<Complex<T>> {
        let q = self.bits_per_symbol();
        let bits: Vec<u8> = (0..1usize << q)
            .flat_map(|p| (0..q).map(move |i| ((p >> (q - 1 - i)) & 1) as u8))
            .collect();
        self.map(&bits).expect("whole groups")
    }
}

/// 64-QAM mapping with the `1/sqrt(42)` normalization.
pub fn qam64_map<T: Real>(bits: &[u8]) -> Result<Vec<Complex<T>>> {
    Modulation::Qam64.map(bits)
}
