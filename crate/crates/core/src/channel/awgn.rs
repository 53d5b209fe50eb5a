use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::phy_tx::Waveform;
use crate::scalar::Real;

/// Noise variance per complex sample giving `snr_db` relative to the mean
/// power of `rx`; silent input is referenced to unit power.
pub fn noise_variance<T: Real>(rx: &Waveform<T>, snr_db: f64) -> T {
    let p = rx.mean_power();
    let p = if p > T::zero() { p } else { T::one() };
    p / T::lit(10f64.powf(snr_db / 10.0))
}

/// Adds circular complex Gaussian noise at `snr_db`; returns the noisy
/// waveform and the variance used.
pub fn add_awgn<T: Real, R: Rng + ?Sized>(rx: &Waveform<T>, snr_db: f64, rng: &mut R) -> (Waveform<T>, T) {
    let n0 = noise_variance(rx, snr_db);
    let sigma = (n0 / T::lit(2.0)).sqrt();
    let samples = rx
        .samples
        .iter()
        .map(|&s| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            s + Complex::new(T::lit(re), T::lit(im)) * sigma
        })
        .collect();
    (
        Waveform {
            samples,
            sample_rate: rx.sample_rate,
        },
        n0,
    )
}
