use std::path::Path;

use crate::error::{Error, Result};

/// Foreground flags, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::size("mask pixels", width * height, bits.len()));
        }
        Ok(BinaryMask { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        BinaryMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    /// Reads a PNG mask; any nonzero luma is foreground.
    pub fn read_png(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| Error::Codec {
            path: path.to_path_buf(),
            source,
        })?;
        let luma = img.to_luma8();
        let (w, h) = luma.dimensions();
        Ok(BinaryMask {
            width: w as usize,
            height: h as usize,
            bits: luma.into_raw().into_iter().map(|v| v != 0).collect(),
        })
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Intersection over union; two empty masks agree perfectly.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) || a.bits.len() != b.bits.len() {
        return Err(Error::size("paired mask pixels", a.bits.len(), b.bits.len()));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

/// Mean IoU over mask pairs; `None` when there are no pairs.
pub fn mean_iou(pairs: &[(BinaryMask, BinaryMask)]) -> Result<Option<f64>> {
    if pairs.is_empty() {
        return Ok(None);
    }
    let sum = pairs.iter().map(|(a, b)| iou(a, b)).sum::<Result<f64>>()?;
    Ok(Some(sum / pairs.len() as f64))
}
