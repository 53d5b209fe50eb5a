//! Image payloads, their bit-level serialization and transport-block segmentation.
//!
//! Images travel as raw 8-bit samples with no in-band header; the geometry
//! is carried out of band, so a bit error can corrupt pixel values but never
//! the image shape. Bits are stored one per `u8` (values 0 or 1), MSB first
//! within each byte.

use std::path::Path;

use crate::error::{Error, Result};

/// Raw 8-bit image, row-major and channel-interleaved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImagePayload {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub pixels: Vec<u8>,
}

impl ImagePayload {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<u8>) -> Result<Self> {
        let img = ImagePayload {
            width,
            height,
            channels,
            pixels,
        };
        img.validate()?;
        Ok(img)
    }

    /// An RGB image filled with a single value.
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Self {
        ImagePayload {
            width,
            height,
            channels,
            pixels: vec![value; width * height * channels],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.channels == 0 {
            return Err(Error::InvalidImage(format!(
                "zero dimension {}x{}x{}",
                self.width, self.height, self.channels
            )));
        }
        let expected = self.width * self.height * self.channels;
        if self.pixels.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{}x{}x{} needs {} samples, buffer has {}",
                self.width,
                self.height,
                self.channels,
                expected,
                self.pixels.len()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn same_shape(&self, other: &ImagePayload) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, c: usize) -> u8 {
        self.pixels[(y * self.width + x) * self.channels + c]
    }

    /// Extracts one channel as a row-major `f64` plane.
    pub fn plane(&self, c: usize) -> Vec<f64> {
        self.pixels
            .iter()
            .skip(c)
            .step_by(self.channels)
            .map(|&v| v as f64)
            .collect()
    }

    /// Builds an image from per-channel planes, rounding and clamping to `[0, 255]`.
    pub fn from_planes(width: usize, height: usize, planes: &[Vec<f64>]) -> Self {
        let channels = planes.len();
        let mut pixels = vec![0u8; width * height * channels];
        for (c, plane) in planes.iter().enumerate() {
            for (i, &v) in plane.iter().enumerate() {
                pixels[i * channels + c] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
        ImagePayload {
            width,
            height,
            channels,
            pixels,
        }
    }

    /// Reads a PNG; grayscale is expanded to RGB and alpha is dropped.
    pub fn read_png(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| Error::Codec {
            path: path.to_path_buf(),
            source,
        })?;
        let rgb = img.to_rgb8();
        let (w, h) = rgb.dimensions();
        ImagePayload::new(w as usize, h as usize, 3, rgb.into_raw())
    }

    /// Writes the image as an 8-bit PNG (gray for one channel, RGB for three).
    pub fn write_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.validate()?;
        let color = match self.channels {
            1 => image::ExtendedColorType::L8,
            3 => image::ExtendedColorType::Rgb8,
            4 => image::ExtendedColorType::Rgba8,
            n => return Err(Error::InvalidImage(format!("cannot encode {n} channels as PNG"))),
        };
        image::save_buffer(
            path,
            &self.pixels,
            self.width as u32,
            self.height as u32,
            color,
        )
        .map_err(|source| Error::Codec {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Unpacks bytes into bits, MSB first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        bits.extend((0..8).rev().map(|i| (b >> i) & 1));
    }
    bits
}

/// Packs bits (MSB first) into bytes. A trailing partial byte is zero-padded.
pub fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i)))
        })
        .collect()
}

pub fn serialize_image(image: &ImagePayload) -> Result<Vec<u8>> {
    image.validate()?;
    Ok(bytes_to_bits(&image.pixels))
}

/// Inverse of [`serialize_image`] given the out-of-band geometry.
pub fn deserialize_image(
    bits: &[u8],
    width: usize,
    height: usize,
    channels: usize,
) -> Result<ImagePayload> {
    let expected = width * height * channels * 8;
    if bits.len() != expected {
        return Err(Error::InvalidImage(format!(
            "bit stream of {} bits does not match {width}x{height}x{channels} ({expected} bits)",
            bits.len()
        )));
    }
    ImagePayload::new(width, height, channels, bits_to_bytes(bits))
}

/// One transport block's worth of payload bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportBlock {
    pub info_bits: Vec<u8>,
    pub index: usize,
    /// Zero bits appended to the final block; zero elsewhere.
    pub pad_count: usize,
}

/// Splits a payload into blocks of exactly `tb_size` bits, zero-padding the last.
pub fn segment_payload(bits: &[u8], tb_size: usize) -> Result<Vec<TransportBlock>> {
    if bits.is_empty() {
        return Err(Error::EmptyPayload);
    }
    if tb_size == 0 {
        return Err(Error::Config("transport block size must be positive".into()));
    }
    Ok(bits
        .chunks(tb_size)
        .enumerate()
        .map(|(index, chunk)| {
            let pad_count = tb_size - chunk.len();
            let mut info_bits = chunk.to_vec();
            info_bits.resize(tb_size, 0);
            TransportBlock {
                info_bits,
                index,
                pad_count,
            }
        })
        .collect())
}

/// Concatenates blocks and truncates to the original payload length.
pub fn desegment_payload(blocks: &[TransportBlock], total_len: usize) -> Vec<u8> {
    let mut bits: Vec<u8> = blocks
        .iter()
        .flat_map(|b| b.info_bits.iter().copied())
        .collect();
    bits.truncate(total_len);
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_count_for_224_rgb() {
        let img = ImagePayload::filled(224, 224, 3, 7);
        assert_eq!(serialize_image(&img).unwrap().len(), 1_204_224);
    }

    #[test]
    fn msb_first_bytes() {
        let img = ImagePayload::new(1, 1, 3, vec![0, 255, 128]).unwrap();
        let bits = serialize_image(&img).unwrap();
        let s: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
        assert_eq!(s, "000000001111111110000000");
    }

    #[test]
    fn zero_image_is_zero_bits() {
        let img = ImagePayload::filled(2, 2, 3, 0);
        let bits = serialize_image(&img).unwrap();
        assert_eq!(bits.len(), 96);
        assert!(bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn rejects_mismatched_buffer() {
        assert!(matches!(
            ImagePayload::new(2, 2, 3, vec![0; 11]),
            Err(Error::InvalidImage(_))
        ));
        let bad = ImagePayload {
            width: 3,
            height: 1,
            channels: 3,
            pixels: vec![1; 8],
        };
        assert!(serialize_image(&bad).is_err());
    }

    #[test]
    fn segmentation_padding() {
        let blocks = segment_payload(&[1; 10], 4).unwrap();
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[2].pad_count, 2);
        assert_eq!(blocks[2].info_bits, vec![1, 1, 0, 0]);
        assert!(blocks[..2].iter().all(|b| b.pad_count == 0));

        let exact = segment_payload(&[0, 1, 0, 1, 0, 1, 0, 1], 8).unwrap();
        assert_eq!(exact.len(), 1);
        assert_eq!(exact[0].pad_count, 0);
    }

    #[test]
    fn segmentation_of_image_payload() {
        let bits = vec![0u8; 1_204_224];
        let a = 28_488;
        let blocks = segment_payload(&bits, a).unwrap();
        assert_eq!(blocks.len(), 1_204_224usize.div_ceil(a));
    }

    #[test]
    fn empty_payload_rejected() {
        assert!(matches!(segment_payload(&[], 8), Err(Error::EmptyPayload)));
    }

    #[test]
    fn png_round_trip_and_gray_expansion() {
        let dir = tempfile::tempdir().unwrap();
        let img = ImagePayload::new(2, 1, 3, vec![1, 2, 3, 250, 251, 252]).unwrap();
        let p = dir.path().join("rgb.png");
        img.write_png(&p).unwrap();
        assert_eq!(ImagePayload::read_png(&p).unwrap(), img);

        let gray = ImagePayload::new(2, 1, 1, vec![9, 200]).unwrap();
        let g = dir.path().join("gray.png");
        gray.write_png(&g).unwrap();
        let back = ImagePayload::read_png(&g).unwrap();
        assert_eq!(back.channels, 3);
        assert_eq!(back.pixels, vec![9, 9, 9, 200, 200, 200]);
    }

    proptest! {
        #[test]
        fn serialize_round_trip(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let mut s = seed;
            let pixels: Vec<u8> = (0..w * h * 3).map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 56) as u8
            }).collect();
            let img = ImagePayload::new(w, h, 3, pixels).unwrap();
            let bits = serialize_image(&img).unwrap();
            prop_assert_eq!(deserialize_image(&bits, w, h, 3).unwrap(), img);
        }

        #[test]
        fn segmentation_partitions(len in 1usize..500, a in 1usize..64) {
            let bits: Vec<u8> = (0..len).map(|i| ((i * 7 + 3) % 5 == 0) as u8).collect();
            let blocks = segment_payload(&bits, a).unwrap();
            prop_assert_eq!(blocks.len(), len.div_ceil(a));
            let total_pad: usize = blocks.iter().map(|b| b.pad_count).sum();
            prop_assert!(total_pad < a);
            for (i, b) in blocks.iter().enumerate() {
                prop_assert_eq!(b.index, i);
                prop_assert_eq!(b.info_bits.len(), a);
            }
            prop_assert_eq!(desegment_payload(&blocks, len), bits);
        }
    }
}
