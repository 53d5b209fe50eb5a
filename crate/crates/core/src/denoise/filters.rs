use crate::error::{Error, Result};
use crate::transport::ImagePayload;

fn check_window(k: usize) -> Result<()> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::InvalidWindow(k));
    }
    Ok(())
}

/// Index table for edge replication: entry `i + r` maps offset `i - r` clamped into `0..n`.
fn replicated(n: usize, r: usize) -> Vec<usize> {
    (0..n + 2 * r)
        .map(|i| i.saturating_sub(r).min(n - 1))
        .collect()
}

/// Per-channel `k x k` box average with edge replication, rounded half up.
pub fn mean_filter(img: &ImagePayload, k: usize) -> Result<ImagePayload> {
    check_window(k)?;
    img.validate()?;
    let (w, h, ch) = (img.width, img.height, img.channels);
    let r = k / 2;
    let xs = replicated(w, r);
    let ys = replicated(h, r);
    let area = (k * k) as u32;
    let mut out = vec![0u8; img.pixels.len()];
    let mut col_sums = vec![0u32; xs.len()];
    for c in 0..ch {
        for y in 0..h {
            for (s, &x) in col_sums.iter_mut().zip(&xs) {
                *s = ys[y..y + k].iter().map(|&yy| img.at(x, yy, c) as u32).sum();
            }
            let mut acc: u32 = col_sums[..k].iter().sum();
            for x in 0..w {
                if x > 0 {
                    acc = acc + col_sums[x + k - 1] - col_sums[x - 1];
                }
                out[(y * w + x) * ch + c] = ((2 * acc + area) / (2 * area)) as u8;
            }
        }
    }
    ImagePayload::new(w, h, ch, out)
}

/// Per-channel `k x k` median with edge replication.
pub fn median_filter(img: &ImagePayload, k: usize) -> Result<ImagePayload> {
    check_window(k)?;
    img.validate()?;
    let (w, h, ch) = (img.width, img.height, img.channels);
    let r = k / 2;
    let xs = replicated(w, r);
    let ys = replicated(h, r);
    let mut out = vec![0u8; img.pixels.len()];
    let mut hist = [0u32; 256];
    let half = (k * k / 2) as u32;
    for c in 0..ch {
        for y in 0..h {
            hist.fill(0);
            for &yy in &ys[y..y + k] {
                for &xx in &xs[..k] {
                    hist[img.at(xx, yy, c) as usize] += 1;
                }
            }
            for x in 0..w {
                if x > 0 {
                    for &yy in &ys[y..y + k] {
                        hist[img.at(xs[x - 1], yy, c) as usize] -= 1;
                        hist[img.at(xs[x + k - 1], yy, c) as usize] += 1;
                    }
                }
                let mut seen = 0;
                let median = hist
                    .iter()
                    .position(|&n| {
                        seen += n;
                        seen > half
                    })
                    .unwrap_or(0);
                out[(y * w + x) * ch + c] = median as u8;
            }
        }
    }
    ImagePayload::new(w, h, ch, out)
}
