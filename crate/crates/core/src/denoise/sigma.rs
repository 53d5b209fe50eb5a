use crate::error::{Error, Result};
use crate::transport::ImagePayload;

/// `1 / Phi^-1(3/4)`: MAD to standard deviation for a Gaussian.
pub const MAD_TO_SIGMA: f64 = 1.482_602_218_505_602;

/// Smallest side accepted by [`estimate_sigma`].
pub const MIN_ESTIMATE_SIDE: usize = 16;

/// Noise standard deviation (0..255 scale) from the median absolute deviation
/// of the 3x3 Laplacian response over interior pixels of every channel.
pub fn estimate_sigma(img: &ImagePayload) -> Result<f64> {
    img.validate()?;
    if img.width < MIN_ESTIMATE_SIDE || img.height < MIN_ESTIMATE_SIDE {
        return Err(Error::InvalidImage(format!(
            "noise estimation needs at least {MIN_ESTIMATE_SIDE}x{MIN_ESTIMATE_SIDE}, got {}x{}",
            img.width, img.height
        )));
    }
    // [0 1 0; 1 -4 1; 0 1 0] has squared norm 20.
    let gain = 20f64.sqrt();
    let (w, h) = (img.width, img.height);
    let mut resp = Vec::with_capacity((w - 2) * (h - 2) * img.channels);
    for c in 0..img.channels {
        let p = |x: usize, y: usize| img.at(x, y, c) as f64;
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                resp.push(p(x - 1, y) + p(x + 1, y) + p(x, y - 1) + p(x, y + 1) - 4.0 * p(x, y));
            }
        }
    }
    let center = median(&mut resp);
    let mut dev: Vec<f64> = resp.iter().map(|r| (r - center).abs()).collect();
    Ok(MAD_TO_SIGMA * median(&mut dev) / gain)
}

fn median(v: &mut [f64]) -> f64 {
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::natural_image;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn add_noise(img: &ImagePayload, sigma: f64, offset: f64, seed: u64) -> ImagePayload {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Normal::new(offset, sigma).unwrap();
        let mut out = img.clone();
        for p in &mut out.pixels {
            *p = (*p as f64 + n.sample(&mut rng)).round().clamp(0.0, 255.0) as u8;
        }
        out
    }

    #[test]
    fn constant_image_has_no_noise() {
        assert_eq!(estimate_sigma(&ImagePayload::filled(32, 32, 3, 90)).unwrap(), 0.0);
    }

    #[test]
    fn recovers_gaussian_sigma() {
        for seed in 0..4 {
            let img = natural_image(128, 128, seed);
            let est = estimate_sigma(&add_noise(&img, 20.0, 0.0, seed + 10)).unwrap();
            assert!((est - 20.0).abs() <= 5.0, "seed {seed}: {est}");
        }
    }

    #[test]
    fn offset_invariant() {
        let base = ImagePayload::filled(64, 64, 3, 100);
        let a = estimate_sigma(&add_noise(&base, 10.0, 0.0, 1)).unwrap();
        let b = estimate_sigma(&add_noise(&base, 10.0, 30.0, 1)).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn small_image_rejected() {
        assert!(matches!(
            estimate_sigma(&ImagePayload::filled(15, 40, 3, 0)),
            Err(Error::InvalidImage(_))
        ));
    }
}
