use crate::error::{Error, Result};
use crate::transport::ImagePayload;

/// Peak value of 8-bit samples.
pub const PEAK_8BIT: f64 = 255.0;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;

fn check_shapes(a: &ImagePayload, b: &ImagePayload) -> Result<()> {
    a.validate()?;
    b.validate()?;
    if !a.same_shape(b) {
        return Err(Error::size("paired image samples", a.len(), b.len()));
    }
    Ok(())
}

/// Mean squared error over every sample of every channel.
pub fn mse(y: &ImagePayload, yhat: &ImagePayload) -> Result<f64> {
    check_shapes(y, yhat)?;
    let sum: f64 = y
        .pixels
        .iter()
        .zip(&yhat.pixels)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok(sum / y.len() as f64)
}

/// PSNR in dB with peak `R = 255`; `f64::INFINITY` for identical images.
pub fn psnr(y: &ImagePayload, yhat: &ImagePayload) -> Result<f64> {
    psnr_with_peak(y, yhat, PEAK_8BIT)
}

pub fn psnr_with_peak(y: &ImagePayload, yhat: &ImagePayload, peak: f64) -> Result<f64> {
    let m = mse(y, yhat)?;
    Ok(if m == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / m).log10()
    })
}

/// Luminance plane `0.299 R + 0.587 G + 0.114 B`; single-channel images pass through.
pub fn luminance(img: &ImagePayload) -> Vec<f64> {
    match img.channels {
        1 => img.pixels.iter().map(|&p| p as f64).collect(),
        _ => img
            .pixels
            .chunks_exact(img.channels)
            .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
            .collect(),
    }
}

/// Normalized 1-D Gaussian taps.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..size)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Separable weighted sums over every fully contained window.
fn filter_valid(plane: &[f64], width: usize, height: usize, k: &[f64]) -> Vec<f64> {
    let n = k.len();
    let (ow, oh) = (width + 1 - n, height + 1 - n);
    let mut rows = vec![0.0; ow * height];
    for y in 0..height {
        let src = &plane[y * width..(y + 1) * width];
        for x in 0..ow {
            rows[y * ow + x] = k.iter().zip(&src[x..x + n]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = k.iter().enumerate().map(|(i, w)| w * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Mean SSIM on luminance with an 11x11 Gaussian window (sigma 1.5) over
/// every fully contained window.
pub fn ssim(y: &ImagePayload, yhat: &ImagePayload) -> Result<f64> {
    check_shapes(y, yhat)?;
    if y.width < SSIM_WINDOW || y.height < SSIM_WINDOW {
        return Err(Error::InvalidImage(format!(
            "{}x{} image is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window",
            y.width, y.height
        )));
    }
    let (w, h) = (y.width, y.height);
    let a = luminance(y);
    let b = luminance(yhat);
    let k = gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA);
    let prod = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| x * y).collect::<Vec<_>>();
    let mu_a = filter_valid(&a, w, h, &k);
    let mu_b = filter_valid(&b, w, h, &k);
    let aa = filter_valid(&prod(&a, &a), w, h, &k);
    let bb = filter_valid(&prod(&b, &b), w, h, &k);
    let ab = filter_valid(&prod(&a, &b), w, h, &k);
    let c1 = (0.01 * PEAK_8BIT).powi(2);
    let c2 = (0.03 * PEAK_8BIT).powi(2);
    let total: f64 = (0..mu_a.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = aa[i] - ma * ma;
            let vb = bb[i] - mb * mb;
            let cov = ab[i] - ma * mb;
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
        })
        .sum();
    Ok(total / mu_a.len() as f64)
}
