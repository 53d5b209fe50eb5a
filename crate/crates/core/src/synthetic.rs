//! Procedural test images with smooth regions, edges and texture.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::transport::ImagePayload;

/// Bilinearly interpolated random lattice with `cells` cells per side.
fn value_noise(rng: &mut ChaCha8Rng, w: usize, h: usize, cells: usize) -> Vec<f64> {
    let n = cells + 1;
    let lattice: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let fy = y as f64 / h as f64 * cells as f64;
        let (iy, ty) = (fy.floor() as usize, fy.fract());
        for x in 0..w {
            let fx = x as f64 / w as f64 * cells as f64;
            let (ix, tx) = (fx.floor() as usize, fx.fract());
            let at = |i: usize, j: usize| lattice[j.min(cells) * n + i.min(cells)];
            let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
            let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
            out[y * w + x] = top * (1.0 - ty) + bottom * ty;
        }
    }
    out
}

/// RGB image of a few soft-edged objects over a shaded, textured background.
pub fn natural_image(width: usize, height: usize, seed: u64) -> ImagePayload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut color = || [0; 3].map(|_: u8| rng.random_range(20.0..235.0));
    let (c0, c1) = (color(), color());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let coarse = value_noise(&mut rng, width, height, 4);
    let fine = value_noise(&mut rng, width, height, 28);

    let mut planes = vec![vec![0.0; width * height]; 3];
    for y in 0..height {
        for x in 0..width {
            let u = x as f64 / width as f64 - 0.5;
            let v = y as f64 / height as f64 - 0.5;
            let t = (0.5 + u * angle.cos() + v * angle.sin()).clamp(0.0, 1.0);
            let i = y * width + x;
            for (c, plane) in planes.iter_mut().enumerate() {
                plane[i] = c0[c] * (1.0 - t) + c1[c] * t + 25.0 * coarse[i] + 8.0 * fine[i];
            }
        }
    }

    let objects = rng.random_range(3..7);
    for _ in 0..objects {
        let col = [0; 3].map(|_: u8| rng.random_range(0.0..255.0));
        let cx = rng.random_range(0.0..width as f64);
        let cy = rng.random_range(0.0..height as f64);
        let rx = rng.random_range(0.08..0.3) * width as f64;
        let ry = rng.random_range(0.08..0.3) * height as f64;
        let rectangular = rng.random_bool(0.4);
        let soft = rng.random_range(1.0..4.0);
        for y in 0..height {
            for x in 0..width {
                let dx = (x as f64 - cx) / rx;
                let dy = (y as f64 - cy) / ry;
                let r = if rectangular {
                    dx.abs().max(dy.abs())
                } else {
                    (dx * dx + dy * dy).sqrt()
                };
                let edge = ((1.0 - r) * rx.min(ry) / soft).clamp(0.0, 1.0);
                if edge > 0.0 {
                    let i = y * width + x;
                    for (c, plane) in planes.iter_mut().enumerate() {
                        let shade = col[c] + 6.0 * fine[i];
                        plane[i] = plane[i] * (1.0 - edge) + shade * edge;
                    }
                }
            }
        }
    }
    ImagePayload::from_planes(width, height, &planes)
}
