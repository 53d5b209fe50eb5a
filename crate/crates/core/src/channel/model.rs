use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cdl::{normalized_powers, Cluster, CDL_A};
use crate::error::{Error, Result};
use crate::phy_tx::{Numerology, Waveform};
use crate::scalar::Real;

/// Sinusoids per fading process.
pub const NUM_SINUSOIDS: usize = 32;

/// Fading gains are evaluated exactly every this many samples and linearly
/// interpolated in between.
pub const GAIN_KNOT_SPACING: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub profile: Vec<Cluster>,
    /// RMS delay spread in seconds.
    pub delay_spread: f64,
    /// Maximum Doppler shift in Hz.
    pub max_doppler: f64,
    pub num_rx: usize,
    pub snr_db: f64,
    pub rng_seed: u64,
    pub numerology: Numerology,
    pub num_subcarriers: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            profile: CDL_A.to_vec(),
            delay_spread: 30e-9,
            max_doppler: 0.0,
            num_rx: 2,
            snr_db: 20.0,
            rng_seed: 0,
            numerology: Numerology::default(),
            num_subcarriers: 624,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.profile.is_empty() {
            return Err(Error::Config("channel profile has no clusters".into()));
        }
        if !(self.max_doppler >= 0.0 && self.max_doppler.is_finite()) {
            return Err(Error::Config(format!("max Doppler {} must be >= 0", self.max_doppler)));
        }
        if !(self.delay_spread >= 0.0 && self.delay_spread.is_finite()) {
            return Err(Error::Config(format!("delay spread {} must be >= 0", self.delay_spread)));
        }
        if self.num_rx == 0 {
            return Err(Error::Config("at least one receive antenna is required".into()));
        }
        if self.num_subcarriers > self.numerology.fft_size {
            return Err(Error::Config("more subcarriers than FFT bins".into()));
        }
        Ok(())
    }

    /// Discrete taps: each cluster at its delay rounded to the nearest sample.
    pub fn taps(&self) -> Vec<Tap> {
        let ts = self.numerology.sample_period();
        self.profile
            .iter()
            .zip(normalized_powers(&self.profile))
            .map(|(c, power)| Tap {
                delay: (c.normalized_delay * self.delay_spread / ts).round() as usize,
                power,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Delay in samples.
    pub delay: usize,
    /// Normalized linear power.
    pub power: f64,
}

/// Sum-of-sinusoids parameters of one Rayleigh process.
#[derive(Debug, Clone)]
struct Fader {
    /// Angular Doppler frequency of each sinusoid, rad/s.
    omega: [f64; NUM_SINUSOIDS],
    phase: [f64; NUM_SINUSOIDS],
    amplitude: f64,
}

impl Fader {
    fn draw(rng: &mut ChaCha8Rng, max_doppler: f64, power: f64) -> Self {
        let tau = std::f64::consts::TAU;
        let mut omega = [0.0; NUM_SINUSOIDS];
        let mut phase = [0.0; NUM_SINUSOIDS];
        for (w, p) in omega.iter_mut().zip(&mut phase) {
            let alpha: f64 = rng.random_range(0.0..tau);
            *w = tau * max_doppler * alpha.cos();
            *p = rng.random_range(0.0..tau);
        }
        Fader {
            omega,
            phase,
            amplitude: (power / NUM_SINUSOIDS as f64).sqrt(),
        }
    }

    /// Gains at `t0 + i * dt` for `i in 0..count`, via phasor recurrence.
    fn knots(&self, t0: f64, dt: f64, count: usize) -> Vec<Complex<f64>> {
        let mut out = vec![Complex::new(0.0, 0.0); count];
        for (&w, &p) in self.omega.iter().zip(&self.phase) {
            let mut z = Complex::from_polar(self.amplitude, w * t0 + p);
            let step = Complex::from_polar(1.0, w * dt);
            for o in out.iter_mut() {
                *o += z;
                z *= step;
            }
        }
        out
    }
}

/// Seeded fading state for one link; slots are realized from any sample offset.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    config: ChannelConfig,
    taps: Vec<Tap>,
    /// `faders[tap * num_rx + rx]`
    faders: Vec<Fader>,
}

impl ChannelModel {
    pub fn new(config: ChannelConfig) -> Result<Self> {
        config.validate()?;
        let taps = config.taps();
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let faders = taps
            .iter()
            .flat_map(|tap| std::iter::repeat_n(tap.power, config.num_rx))
            .map(|power| Fader::draw(&mut rng, config.max_doppler, power))
            .collect();
        Ok(ChannelModel {
            config,
            taps,
            faders,
        })
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    /// Channel over samples `start..start + len` of the link's timeline.
    pub fn realize<T: Real>(&self, start: u64, len: usize) -> ChannelRealization<T> {
        let cfg = &self.config;
        let ts = cfg.numerology.sample_period();
        let num_rx = cfg.num_rx;
        let knot_count = len.div_ceil(GAIN_KNOT_SPACING) + 1;
        let dt = ts * GAIN_KNOT_SPACING as f64;
        let t0 = start as f64 * ts;

        let mut tap_gains = Vec::with_capacity(self.faders.len() * len);
        for fader in &self.faders {
            let knots = fader.knots(t0, dt, knot_count);
            for n in 0..len {
                let (i, r) = (n / GAIN_KNOT_SPACING, n % GAIN_KNOT_SPACING);
                let f = r as f64 / GAIN_KNOT_SPACING as f64;
                let g = knots[i] + (knots[i + 1] - knots[i]) * f;
                tap_gains.push(Complex::new(T::lit(g.re), T::lit(g.im)));
            }
        }

        let num = &cfg.numerology;
        let n_sc = cfg.num_subcarriers;
        let reference_times = symbol_reference_times(num, len);
        let mut freq_response =
            vec![Complex::new(T::zero(), T::zero()); num_rx * reference_times.len() * n_sc];
        let ramps: Vec<Vec<Complex<f64>>> = self
            .taps
            .iter()
            .map(|tap| {
                (0..n_sc)
                    .map(|k| {
                        let offset = k as f64 - (n_sc / 2) as f64;
                        Complex::from_polar(
                            1.0,
                            -std::f64::consts::TAU * offset * tap.delay as f64 / num.fft_size as f64,
                        )
                    })
                    .collect()
            })
            .collect();
        let mut acc = vec![Complex::new(0.0, 0.0); n_sc];
        for rx in 0..num_rx {
            for (l, &t_ref) in reference_times.iter().enumerate() {
                acc.iter_mut().for_each(|a| *a = Complex::new(0.0, 0.0));
                for (tap, ramp) in ramps.iter().enumerate() {
                    let g = tap_gains[(tap * num_rx + rx) * len + t_ref];
                    let g = Complex::new(g.re.to_f64_lossy(), g.im.to_f64_lossy());
                    for (a, &e) in acc.iter_mut().zip(ramp) {
                        *a += g * e;
                    }
                }
                let row = &mut freq_response[(rx * reference_times.len() + l) * n_sc..][..n_sc];
                for (h, a) in row.iter_mut().zip(&acc) {
                    *h = Complex::new(T::lit(a.re), T::lit(a.im));
                }
            }
        }

        ChannelRealization {
            delays: self.taps.iter().map(|t| t.delay).collect(),
            num_rx,
            len,
            tap_gains,
            num_subcarriers: n_sc,
            num_symbols: reference_times.len(),
            freq_response,
        }
    }
}

/// Centre of each complete OFDM symbol's FFT window within `len` samples.
fn symbol_reference_times(num: &Numerology, len: usize) -> Vec<usize> {
    let slot = num.slot_len();
    let mut out = Vec::new();
    let mut base = 0;
    'slots: loop {
        for l in 0..num.symbols_per_slot {
            let start = base + num.symbol_start(l) + num.cp_len(l);
            if start + num.fft_size > len {
                break 'slots;
            }
            out.push(start + num.fft_size / 2);
        }
        base += slot;
    }
    out
}

/// Time-varying channel over a span of samples, plus its per-RE response.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    /// Delay of each tap in samples.
    pub delays: Vec<usize>,
    pub num_rx: usize,
    /// Samples covered.
    pub len: usize,
    /// `tap_gains[(tap * num_rx + rx) * len + t]`
    pub tap_gains: Vec<Complex<T>>,
    pub num_subcarriers: usize,
    /// Complete OFDM symbols covered.
    pub num_symbols: usize,
    /// `freq_response[(rx * num_symbols + symbol) * num_subcarriers + k]`
    pub freq_response: Vec<Complex<T>>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn num_taps(&self) -> usize {
        self.delays.len()
    }

    pub fn tap_series(&self, tap: usize, rx: usize) -> &[Complex<T>] {
        let i = tap * self.num_rx + rx;
        &self.tap_gains[i * self.len..(i + 1) * self.len]
    }

    #[inline]
    pub fn gain(&self, tap: usize, rx: usize, t: usize) -> Complex<T> {
        self.tap_gains[(tap * self.num_rx + rx) * self.len + t]
    }

    /// Response of antenna `rx` on OFDM symbol `symbol`, one entry per subcarrier.
    pub fn response(&self, rx: usize, symbol: usize) -> &[Complex<T>] {
        let n = self.num_subcarriers;
        &self.freq_response[(rx * self.num_symbols + symbol) * n..][..n]
    }
}

/// Draws a fresh model from `cfg` and realizes its first `duration` samples.
pub fn realize_channel<T: Real>(cfg: &ChannelConfig, duration: usize) -> Result<ChannelRealization<T>> {
    Ok(ChannelModel::new(cfg.clone())?.realize(0, duration))
}

/// Tapped-delay-line convolution, one output waveform per receive antenna.
/// Samples before the start of `tx` are taken as zero.
pub fn apply_channel<T: Real>(tx: &Waveform<T>, real: &ChannelRealization<T>) -> Result<Vec<Waveform<T>>> {
    if tx.len() != real.len {
        return Err(Error::size("waveform samples covered by the channel", real.len, tx.len()));
    }
    let x = &tx.samples;
    Ok((0..real.num_rx)
        .map(|rx| {
            let mut y = vec![Complex::new(T::zero(), T::zero()); x.len()];
            for (tap, &d) in real.delays.iter().enumerate() {
                let g = real.tap_series(tap, rx);
                for n in d..x.len() {
                    y[n] = y[n] + g[n] * x[n - d];
                }
            }
            Waveform {
                samples: y,
                sample_rate: tx.sample_rate,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(doppler: f64, seed: u64) -> ChannelConfig {
        ChannelConfig {
            max_doppler: doppler,
            rng_seed: seed,
            ..ChannelConfig::default()
        }
    }

    fn wave(samples: Vec<Complex<f64>>) -> Waveform<f64> {
        Waveform {
            samples,
            sample_rate: 15.36e6,
        }
    }

    #[test]
    fn cdl_a_delays_span_zero_to_four_samples() {
        let taps = cfg(0.0, 0).taps();
        assert_eq!(taps.len(), 23);
        assert_eq!(taps[0].delay, 0);
        // 0.3819 * 30 ns = 11.5 ns -> 0.18 samples.
        assert_eq!(taps[1].delay, 0);
        // 1.5375 * 30 ns = 46.1 ns -> 0.71 samples.
        assert_eq!(taps[9].delay, 1);
        assert_eq!(taps[22].delay, 4);
        assert!((taps.iter().map(|t| t.power).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_doppler_is_constant() {
        let real = realize_channel::<f64>(&cfg(0.0, 3), 2 * 15360).unwrap();
        for tap in 0..real.num_taps() {
            for rx in 0..2 {
                let s = real.tap_series(tap, rx);
                assert!(s.iter().all(|&g| g == s[0]));
            }
        }
        assert_eq!(real.num_symbols, 28);
        for rx in 0..2 {
            for l in 1..28 {
                assert_eq!(real.response(rx, l), real.response(rx, 0));
            }
        }
    }

    #[test]
    fn same_seed_same_realization() {
        let a = realize_channel::<f64>(&cfg(300.0, 9), 4000).unwrap();
        let b = realize_channel::<f64>(&cfg(300.0, 9), 4000).unwrap();
        let c = realize_channel::<f64>(&cfg(300.0, 10), 4000).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.tap_gains, c.tap_gains);
    }

    #[test]
    fn offset_realization_continues_the_process() {
        let model = ChannelModel::new(cfg(500.0, 4)).unwrap();
        let whole = model.realize::<f64>(0, 2 * 15360);
        let second = model.realize::<f64>(15360, 15360);
        for tap in [0, 5, 22] {
            for t in (0..15360).step_by(97) {
                let d = whole.gain(tap, 1, 15360 + t) - second.gain(tap, 1, t);
                assert!(d.norm() < 1e-9);
            }
        }
    }

    #[test]
    fn interpolated_gain_tracks_exact_sum() {
        let c = cfg(750.0, 2);
        let model = ChannelModel::new(c).unwrap();
        let real = model.realize::<f64>(0, 15360);
        let ts = 1.0 / 15.36e6;
        let f = &model.faders[3];
        for t in [1usize, 7, 15, 1000, 15359] {
            let exact: Complex<f64> = f
                .omega
                .iter()
                .zip(&f.phase)
                .map(|(&w, &p)| Complex::from_polar(f.amplitude, w * t as f64 * ts + p))
                .sum();
            assert!((real.gain(1, 1, t) - exact).norm() < 1e-5);
        }
    }

    #[test]
    fn freq_response_is_transform_of_taps() {
        let real = realize_channel::<f64>(&cfg(300.0, 5), 15360).unwrap();
        let num = Numerology::default();
        let l = 5;
        let t_ref = num.symbol_start(l) + num.cp_len(l) + 512;
        for k in [0usize, 100, 312, 623] {
            let mut h = Complex::new(0.0, 0.0);
            for tap in 0..real.num_taps() {
                let ph = -std::f64::consts::TAU * (k as f64 - 312.0) * real.delays[tap] as f64 / 1024.0;
                h += real.gain(tap, 0, t_ref) * Complex::from_polar(1.0, ph);
            }
            assert!((real.response(0, l)[k] - h).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_channel() {
        let c = ChannelConfig {
            profile: vec![Cluster {
                normalized_delay: 0.0,
                power_db: 0.0,
            }],
            ..cfg(0.0, 0)
        };
        let model = ChannelModel::new(c).unwrap();
        let mut real = model.realize::<f64>(0, 64);
        real.tap_gains.iter_mut().for_each(|g| *g = Complex::new(1.0, 0.0));
        let x = wave((0..64).map(|i| Complex::new(i as f64, -1.0)).collect());
        let y = apply_channel(&x, &real).unwrap();
        assert_eq!(y.len(), 2);
        assert_eq!(y[0], x);
        assert_eq!(y[1], x);
    }

    #[test]
    fn two_tap_impulse_response() {
        let (g1, g2) = (Complex::new(0.6, -0.2), Complex::new(-0.1, 0.3));
        let real = ChannelRealization {
            delays: vec![0, 3],
            num_rx: 1,
            len: 10,
            tap_gains: [vec![g1; 10], vec![g2; 10]].concat(),
            num_subcarriers: 0,
            num_symbols: 0,
            freq_response: Vec::new(),
        };
        let mut x = vec![Complex::new(0.0, 0.0); 10];
        x[0] = Complex::new(1.0, 0.0);
        let y = &apply_channel(&wave(x), &real).unwrap()[0].samples;
        assert_eq!(y[0], g1);
        assert_eq!(y[3], g2);
        assert!(y.iter().enumerate().all(|(i, v)| i == 0 || i == 3 || v.norm() == 0.0));
    }

    #[test]
    fn superposition() {
        let real = realize_channel::<f64>(&cfg(400.0, 8), 2000).unwrap();
        let x: Vec<Complex<f64>> = (0..2000).map(|i| Complex::new((i as f64).sin(), 0.3)).collect();
        let y: Vec<Complex<f64>> = (0..2000).map(|i| Complex::new(0.1, (i as f64 * 0.7).cos())).collect();
        let (a, b) = (Complex::new(1.5, -0.5), Complex::new(-0.25, 2.0));
        let mix: Vec<_> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let out_mix = apply_channel(&wave(mix), &real).unwrap();
        let out_x = apply_channel(&wave(x), &real).unwrap();
        let out_y = apply_channel(&wave(y), &real).unwrap();
        for rx in 0..2 {
            for n in 0..2000 {
                let expect = a * out_x[rx].samples[n] + b * out_y[rx].samples[n];
                assert!((out_mix[rx].samples[n] - expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let real = realize_channel::<f64>(&cfg(0.0, 1), 100).unwrap();
        assert!(apply_channel(&wave(vec![Complex::new(0.0, 0.0); 99]), &real).is_err());
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(ChannelModel::new(cfg(-1.0, 0)).is_err());
        assert!(ChannelModel::new(ChannelConfig { num_rx: 0, ..cfg(0.0, 0) }).is_err());
    }
}
