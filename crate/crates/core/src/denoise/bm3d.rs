//! Two-stage block-matching and 3D collaborative filtering, one channel at a time.

use std::f64::consts::PI;

use crate::transport::ImagePayload;

const BLOCK: usize = 8;
const AREA: usize = BLOCK * BLOCK;

#[derive(Debug, Clone, PartialEq)]
pub struct Bm3dParams {
    /// Stride between reference blocks.
    pub step: usize,
    /// Side of the square search window centred on each reference block.
    pub search_window: usize,
    pub max_matches_hard: usize,
    pub max_matches_wiener: usize,
    /// Hard threshold on 3D coefficients, in units of sigma.
    pub hard_threshold: f64,
    /// Largest mean squared block difference accepted as a match.
    pub match_distance_hard: f64,
    pub match_distance_wiener: f64,
    pub kaiser_beta: f64,
}

impl Default for Bm3dParams {
    fn default() -> Self {
        Bm3dParams {
            step: 3,
            search_window: 39,
            max_matches_hard: 16,
            max_matches_wiener: 32,
            hard_threshold: 2.7,
            match_distance_hard: 2500.0,
            match_distance_wiener: 400.0,
            kaiser_beta: 2.0,
        }
    }
}

/// Denoises `img` assuming additive white noise of standard deviation
/// `sigma` on the 0..255 scale. Images narrower than one block, and
/// non-positive `sigma`, are returned unchanged.
pub fn bm3d(img: &ImagePayload, sigma: f64) -> ImagePayload {
    bm3d_with(img, sigma, &Bm3dParams::default())
}

pub fn bm3d_with(img: &ImagePayload, sigma: f64, params: &Bm3dParams) -> ImagePayload {
    if !(sigma > 0.0 && sigma.is_finite()) || img.width < BLOCK || img.height < BLOCK {
        return img.clone();
    }
    let planes: Vec<Vec<f64>> = (0..img.channels)
        .map(|c| {
            let plane = Plane::new(img.width, img.height, img.plane(c));
            let basic = plane.hard_threshold_pass(sigma, params);
            plane.wiener_pass(&basic, sigma, params)
        })
        .collect();
    ImagePayload::from_planes(img.width, img.height, &planes)
}

/// Orthonormal DCT-II matrix, `m[k * BLOCK + n]`.
fn dct_matrix() -> [f64; AREA] {
    let mut m = [0.0; AREA];
    for k in 0..BLOCK {
        let scale = if k == 0 { (1.0 / BLOCK as f64).sqrt() } else { (2.0 / BLOCK as f64).sqrt() };
        for n in 0..BLOCK {
            m[k * BLOCK + n] = scale * (PI * (2 * n + 1) as f64 * k as f64 / (2 * BLOCK) as f64).cos();
        }
    }
    m
}

/// `out = m * x * m^T` (forward) or `m^T * x * m` (inverse).
fn transform_2d(m: &[f64; AREA], x: &[f64], out: &mut [f64], inverse: bool) {
    let at = |r: usize, c: usize| if inverse { m[c * BLOCK + r] } else { m[r * BLOCK + c] };
    let mut tmp = [0.0; AREA];
    for r in 0..BLOCK {
        for c in 0..BLOCK {
            tmp[r * BLOCK + c] = (0..BLOCK).map(|j| at(r, j) * x[j * BLOCK + c]).sum();
        }
    }
    for r in 0..BLOCK {
        for c in 0..BLOCK {
            out[r * BLOCK + c] = (0..BLOCK).map(|j| tmp[r * BLOCK + j] * at(c, j)).sum();
        }
    }
}

/// In-place orthonormal Walsh-Hadamard transform; its own inverse.
fn hadamard(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    v.iter_mut().for_each(|x| *x *= scale);
}

fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let (mut term, mut sum, mut k) = (1.0, 1.0, 1.0);
    while term > 1e-17 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn kaiser_window(beta: f64) -> [f64; AREA] {
    let n = BLOCK as f64 - 1.0;
    let w1: Vec<f64> = (0..BLOCK)
        .map(|i| {
            let r = 2.0 * i as f64 / n - 1.0;
            bessel_i0(beta * (1.0 - r * r).sqrt()) / bessel_i0(beta)
        })
        .collect();
    let mut w = [0.0; AREA];
    for r in 0..BLOCK {
        for c in 0..BLOCK {
            w[r * BLOCK + c] = w1[r] * w1[c];
        }
    }
    w
}

/// Reference offsets along one axis: every `step`, plus the last position.
fn reference_axis(positions: usize, step: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..positions).step_by(step.max(1)).collect();
    if v.last() != Some(&(positions - 1)) {
        v.push(positions - 1);
    }
    v
}

struct Plane {
    width: usize,
    pixels: Vec<f64>,
    /// Block positions per axis.
    nx: usize,
    ny: usize,
    dct: [f64; AREA],
}

struct Accumulator {
    numerator: Vec<f64>,
    denominator: Vec<f64>,
    kaiser: [f64; AREA],
}

impl Accumulator {
    fn new(len: usize, beta: f64) -> Self {
        Accumulator {
            numerator: vec![0.0; len],
            denominator: vec![0.0; len],
            kaiser: kaiser_window(beta),
        }
    }

    fn add(&mut self, width: usize, x: usize, y: usize, block: &[f64], weight: f64) {
        for r in 0..BLOCK {
            for c in 0..BLOCK {
                let i = (y + r) * width + x + c;
                let k = weight * self.kaiser[r * BLOCK + c];
                self.numerator[i] += k * block[r * BLOCK + c];
                self.denominator[i] += k;
            }
        }
    }

    fn finish(self, fallback: &[f64]) -> Vec<f64> {
        self.numerator
            .iter()
            .zip(&self.denominator)
            .zip(fallback)
            .map(|((&n, &d), &f)| if d > 0.0 { n / d } else { f })
            .collect()
    }
}

impl Plane {
    fn new(width: usize, height: usize, pixels: Vec<f64>) -> Self {
        Plane {
            width,
            pixels,
            nx: width - BLOCK + 1,
            ny: height - BLOCK + 1,
            dct: dct_matrix(),
        }
    }

    /// Every overlapping block, row-major within the block, position-major overall.
    fn blocks(&self, pixels: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nx * self.ny * AREA];
        for y in 0..self.ny {
            for x in 0..self.nx {
                let dst = &mut out[(y * self.nx + x) * AREA..][..AREA];
                for r in 0..BLOCK {
                    let src = (y + r) * self.width + x;
                    dst[r * BLOCK..(r + 1) * BLOCK].copy_from_slice(&pixels[src..src + BLOCK]);
                }
            }
        }
        out
    }

    fn spectra(&self, blocks: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; blocks.len()];
        for (src, dst) in blocks.chunks_exact(AREA).zip(out.chunks_exact_mut(AREA)) {
            transform_2d(&self.dct, src, dst, false);
        }
        out
    }

    /// Closest blocks to the reference at `(x, y)`, the reference first,
    /// truncated to a power of two.
    fn group(&self, blocks: &[f64], x: usize, y: usize, params: &Bm3dParams, threshold: f64, max: usize) -> Vec<usize> {
        let half = params.search_window / 2;
        let reference = y * self.nx + x;
        let ref_block = &blocks[reference * AREA..][..AREA];
        let limit = threshold * AREA as f64;
        let mut found: Vec<(f64, usize)> = Vec::with_capacity(max + 1);
        for cy in y.saturating_sub(half)..(y + half + 1).min(self.ny) {
            for cx in x.saturating_sub(half)..(x + half + 1).min(self.nx) {
                let idx = cy * self.nx + cx;
                if idx == reference {
                    continue;
                }
                let bound = match found.last() {
                    Some(&(worst, _)) if found.len() + 1 >= max => worst.min(limit),
                    _ => limit,
                };
                let cand = &blocks[idx * AREA..][..AREA];
                let mut d = 0.0;
                for (ra, rb) in ref_block.chunks_exact(2 * BLOCK).zip(cand.chunks_exact(2 * BLOCK)) {
                    d += ra.iter().zip(rb).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
                    if d > bound {
                        break;
                    }
                }
                if d > limit || (found.len() + 1 >= max && d >= bound) {
                    continue;
                }
                let at = found.partition_point(|&(fd, _)| fd <= d);
                found.insert(at, (d, idx));
                found.truncate(max - 1);
            }
        }
        let mut group = Vec::with_capacity(max);
        group.push(reference);
        group.extend(found.iter().map(|&(_, i)| i));
        let keep = 1 << group.len().ilog2();
        group.truncate(keep);
        group
    }

    fn references(&self, params: &Bm3dParams) -> Vec<(usize, usize)> {
        let xs = reference_axis(self.nx, params.step);
        reference_axis(self.ny, params.step)
            .into_iter()
            .flat_map(|y| xs.iter().map(move |&x| (x, y)))
            .collect()
    }

    /// Stacks the spectra of `group` and applies the Hadamard transform across the stack.
    fn stack(&self, spectra: &[f64], group: &[usize]) -> Vec<f64> {
        let n = group.len();
        let mut cube = vec![0.0; n * AREA];
        let mut column = vec![0.0; n];
        for k in 0..AREA {
            for (j, &g) in group.iter().enumerate() {
                column[j] = spectra[g * AREA + k];
            }
            hadamard(&mut column);
            for j in 0..n {
                cube[j * AREA + k] = column[j];
            }
        }
        cube
    }

    fn unstack_into(&self, cube: &mut [f64], group: &[usize], acc: &mut Accumulator, weight: f64) {
        let n = group.len();
        let mut column = vec![0.0; n];
        for k in 0..AREA {
            for j in 0..n {
                column[j] = cube[j * AREA + k];
            }
            hadamard(&mut column);
            for j in 0..n {
                cube[j * AREA + k] = column[j];
            }
        }
        let mut block = [0.0; AREA];
        for (j, &g) in group.iter().enumerate() {
            transform_2d(&self.dct, &cube[j * AREA..(j + 1) * AREA], &mut block, true);
            acc.add(self.width, g % self.nx, g / self.nx, &block, weight);
        }
    }

    fn hard_threshold_pass(&self, sigma: f64, params: &Bm3dParams) -> Vec<f64> {
        let blocks = self.blocks(&self.pixels);
        let spectra = self.spectra(&blocks);
        let threshold = params.hard_threshold * sigma;
        let mut acc = Accumulator::new(self.pixels.len(), params.kaiser_beta);
        for (x, y) in self.references(params) {
            let group = self.group(&blocks, x, y, params, params.match_distance_hard, params.max_matches_hard);
            let mut cube = self.stack(&spectra, &group);
            let mut kept = 0usize;
            for v in &mut cube {
                if v.abs() < threshold {
                    *v = 0.0;
                } else {
                    kept += 1;
                }
            }
            let weight = if kept > 0 { 1.0 / (sigma * sigma * kept as f64) } else { 1.0 };
            self.unstack_into(&mut cube, &group, &mut acc, weight);
        }
        acc.finish(&self.pixels)
    }

    fn wiener_pass(&self, basic: &[f64], sigma: f64, params: &Bm3dParams) -> Vec<f64> {
        let basic_blocks = self.blocks(basic);
        let basic_spectra = self.spectra(&basic_blocks);
        let noisy_spectra = self.spectra(&self.blocks(&self.pixels));
        let var = sigma * sigma;
        let mut acc = Accumulator::new(self.pixels.len(), params.kaiser_beta);
        for (x, y) in self.references(params) {
            let group = self.group(&basic_blocks, x, y, params, params.match_distance_wiener, params.max_matches_wiener);
            let pilot = self.stack(&basic_spectra, &group);
            let mut cube = self.stack(&noisy_spectra, &group);
            let mut energy = 0.0;
            for (v, &p) in cube.iter_mut().zip(&pilot) {
                let gain = p * p / (p * p + var);
                *v *= gain;
                energy += gain * gain;
            }
            let weight = if energy > 0.0 { 1.0 / (var * energy) } else { 1.0 };
            self.unstack_into(&mut cube, &group, &mut acc, weight);
        }
        acc.finish(basic)
    }
}
