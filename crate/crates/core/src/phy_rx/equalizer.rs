use num_complex::Complex;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::phy_tx::{GridLayout, ResourceGrid};
use crate::scalar::Real;

/// MMSE output on the data REs of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizedGrid<T> {
    /// MMSE estimates, one per data RE in mapping order.
    pub symbols: Vec<Complex<T>>,
    /// Noise variance of the unbiased estimate `symbols[i] / bias[i]`.
    pub post_eq_noise_var: Vec<T>,
    /// MMSE shrinkage `g / (g + N0)` with `g = sum |h|^2`.
    pub bias: Vec<T>,
}

impl<T: Real> EqualizedGrid<T> {
    /// Symbols already free of MMSE shrinkage.
    pub fn unbiased(symbols: Vec<Complex<T>>, post_eq_noise_var: Vec<T>) -> Self {
        let bias = vec![T::one(); symbols.len()];
        EqualizedGrid {
            symbols,
            post_eq_noise_var,
            bias,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Per-RE MMSE combining of observations `y` over channels `h`.
///
/// Returns `(estimate, post-equalization noise variance, bias)`.
#[inline]
pub fn mmse_combine<T: Real>(y: &[Complex<T>], h: &[Complex<T>], noise_var: T) -> (Complex<T>, T, T) {
    let mut num = Complex::new(T::zero(), T::zero());
    let mut gain = T::zero();
    for (&yi, &hi) in y.iter().zip(h) {
        num = num + hi.conj() * yi;
        gain = gain + hi.norm_sqr();
    }
    let denom = gain + noise_var;
    if denom <= T::zero() {
        return (num, T::infinity(), T::zero());
    }
    let var = if gain > T::zero() {
        noise_var / gain
    } else {
        T::infinity()
    };
    (num / denom, var, gain / denom)
}

/// Equalizes the data REs of `rx_grids` (one per antenna) with the exact
/// channel response of `channel`.
///
/// `noise_vars` holds each antenna's noise variance; unequal values are
/// whitened to the first antenna's level before combining.
pub fn mmse_equalize<T: Real>(
    rx_grids: &[ResourceGrid<T>],
    channel: &ChannelRealization<T>,
    noise_vars: &[T],
    layout: &GridLayout,
) -> Result<EqualizedGrid<T>> {
    if rx_grids.len() != channel.num_rx {
        return Err(Error::size("receive grids", channel.num_rx, rx_grids.len()));
    }
    if noise_vars.len() != channel.num_rx {
        return Err(Error::size("per-antenna noise variances", channel.num_rx, noise_vars.len()));
    }
    let n_sc = layout.num_subcarriers();
    if channel.num_subcarriers != n_sc || channel.num_symbols < layout.symbols_per_slot {
        return Err(Error::Config(format!(
            "channel response covers {} symbols x {} subcarriers, slot needs {} x {n_sc}",
            channel.num_symbols, channel.num_subcarriers, layout.symbols_per_slot
        )));
    }
    for g in rx_grids {
        if g.num_subcarriers != n_sc || g.num_symbols != layout.symbols_per_slot {
            return Err(Error::size("receive grid REs", layout.num_res(), g.entries.len()));
        }
    }
    let reference = noise_vars[0];
    let weights: Vec<T> = noise_vars
        .iter()
        .map(|&n| {
            if n > T::zero() && reference > T::zero() {
                (reference / n).sqrt()
            } else {
                T::one()
            }
        })
        .collect();

    let cap = layout.data_capacity();
    let mut out = EqualizedGrid {
        symbols: Vec::with_capacity(cap),
        post_eq_noise_var: Vec::with_capacity(cap),
        bias: Vec::with_capacity(cap),
    };
    let num_rx = rx_grids.len();
    let mut y = vec![Complex::new(T::zero(), T::zero()); num_rx];
    let mut h = y.clone();
    for idx in layout.data_indices() {
        let (l, k) = (idx / n_sc, idx % n_sc);
        for rx in 0..num_rx {
            y[rx] = rx_grids[rx].entries[idx] * weights[rx];
            h[rx] = channel.response(rx, l)[k] * weights[rx];
        }
        let (s, var, bias) = mmse_combine(&y, &h, reference);
        out.symbols.push(s);
        out.post_eq_noise_var.push(var);
        out.bias.push(bias);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn single_branch_unit_noise_halves() {
        let s = c(0.3, -0.7);
        let (est, var, bias) = mmse_combine(&[s, c(5.0, 5.0)], &[c(1.0, 0.0), c(0.0, 0.0)], 1.0);
        assert!((est - s / 2.0).norm() < 1e-15);
        assert_eq!(var, 1.0);
        assert_eq!(bias, 0.5);
    }

    #[test]
    fn two_equal_branches() {
        let s = c(-0.4, 0.9);
        let n0 = 0.3;
        let (est, var, _) = mmse_combine(&[s, s], &[c(1.0, 0.0), c(1.0, 0.0)], n0);
        assert!((est - s * 2.0 / (2.0 + n0)).norm() < 1e-15);
        assert!((var - n0 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_forcing_limit() {
        let s = c(0.1, 0.2);
        let h = [c(0.3, -1.1), c(-0.7, 0.05)];
        let y: Vec<_> = h.iter().map(|&hi| hi * s).collect();
        let (est, var, bias) = mmse_combine(&y, &h, 1e-14);
        assert!((est - s).norm() < 1e-12);
        assert!(var > 0.0);
        assert!((bias - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unequal_noise_is_whitened() {
        let layout = GridLayout::default();
        let (h0, h1) = (c(0.8, -0.3), c(-0.2, 1.1));
        let (y0, y1) = (c(0.5, 0.1), c(-0.9, 0.4));
        let (n0, n1) = (0.2, 0.05);
        let channel = ChannelRealization {
            delays: Vec::new(),
            num_rx: 2,
            len: 0,
            tap_gains: Vec::new(),
            num_subcarriers: 624,
            num_symbols: 14,
            freq_response: [vec![h0; 624 * 14], vec![h1; 624 * 14]].concat(),
        };
        let mut g0 = ResourceGrid::zeros(624, 14);
        let mut g1 = ResourceGrid::zeros(624, 14);
        g0.entries.iter_mut().for_each(|e| *e = y0);
        g1.entries.iter_mut().for_each(|e| *e = y1);
        let eq = mmse_equalize(&[g0, g1], &channel, &[n0, n1], &layout).unwrap();
        assert_eq!(eq.len(), 8112);
        let snr = h0.norm_sqr() / n0 + h1.norm_sqr() / n1;
        let expect = (h0.conj() * y0 / n0 + h1.conj() * y1 / n1) / (snr + 1.0);
        assert!((eq.symbols[100] - expect).norm() < 1e-12);
        assert!((eq.post_eq_noise_var[100] - 1.0 / snr).abs() < 1e-12);
        assert!((eq.bias[100] - snr / (snr + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn dead_channel_has_infinite_variance() {
        let (_, var, bias) = mmse_combine(&[c(1.0, 0.0)], &[c(0.0, 0.0)], 0.1);
        assert!(var.is_infinite());
        assert_eq!(bias, 0.0);
    }
}
