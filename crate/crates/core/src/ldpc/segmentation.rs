use std::ops::Range;

use super::crc::{crc_attach, crc_check, CrcKind};
use super::{min_lifting_size, BaseGraph, LdpcConfig};
use crate::error::{Error, Result};

/// Largest transport block accepted by [`Segmentation::for_transport_block`].
pub const MAX_TRANSPORT_BLOCK_BITS: usize = 1_277_992;

/// Transport-block CRC used for a payload of `a` bits.
pub fn tb_crc_kind(a: usize) -> CrcKind {
    if a > 3824 {
        CrcKind::Crc24A
    } else {
        CrcKind::Crc16
    }
}

/// Code-block segmentation of one CRC-protected transport block (38.212).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segmentation {
    pub base_graph: BaseGraph,
    /// Bits entering segmentation (`B`, payload plus transport-block CRC).
    pub input_len: usize,
    pub num_blocks: usize,
    /// Whether each code block carries its own CRC24B.
    pub block_crc: bool,
    pub k_prime: usize,
    pub lifting_size: usize,
    pub k: usize,
}

impl Segmentation {
    /// Segments `b` bits for base graph `bg`.
    pub fn new(b: usize, bg: BaseGraph) -> Result<Self> {
        if b == 0 {
            return Err(Error::EmptyPayload);
        }
        let kcb = bg.max_code_block();
        let (num_blocks, block_crc) = if b <= kcb {
            (1, false)
        } else {
            (b.div_ceil(kcb - 24), true)
        };
        let b_prime = b + if block_crc { 24 * num_blocks } else { 0 };
        if !b_prime.is_multiple_of(num_blocks) {
            return Err(Error::Config(format!(
                "{b} bits do not split evenly into {num_blocks} code blocks"
            )));
        }
        let k_prime = b_prime / num_blocks;
        let kb = match bg {
            BaseGraph::Bg1 => 22,
            BaseGraph::Bg2 if b > 640 => 10,
            BaseGraph::Bg2 if b > 560 => 9,
            BaseGraph::Bg2 if b > 192 => 8,
            BaseGraph::Bg2 => 6,
        };
        let lifting_size = min_lifting_size(kb, k_prime).ok_or(Error::UnsupportedBlockSize(b))?;
        Ok(Segmentation {
            base_graph: bg,
            input_len: b,
            num_blocks,
            block_crc,
            k_prime,
            lifting_size,
            k: bg.info_cols() * lifting_size,
        })
    }

    /// Segmentation for a transport block of `a` payload bits at `rate`.
    pub fn for_transport_block(a: usize, rate: f64) -> Result<Self> {
        if a > MAX_TRANSPORT_BLOCK_BITS {
            return Err(Error::UnsupportedBlockSize(a));
        }
        Segmentation::new(a + tb_crc_kind(a).parity_len(), BaseGraph::select(a, rate))
    }

    /// Payload bits carried per code block, excluding its CRC24B.
    pub fn payload_per_block(&self) -> usize {
        self.k_prime - if self.block_crc { 24 } else { 0 }
    }

    pub fn ldpc_config(&self, e: usize, rv: u8) -> Result<LdpcConfig> {
        LdpcConfig::new(self.base_graph, self.lifting_size, self.k_prime, e, rv)
    }
}

/// One code block ready for encoding: `K` bits, filler positions zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBlock {
    pub bits: Vec<u8>,
    pub filler: Range<usize>,
}

/// Splits `b_bits` (payload with transport-block CRC attached) into code blocks.
pub fn segment_code_blocks(b_bits: &[u8], bg: BaseGraph) -> Result<(Segmentation, Vec<CodeBlock>)> {
    let seg = Segmentation::new(b_bits.len(), bg)?;
    let per_block = seg.payload_per_block();
    let blocks = b_bits
        .chunks(per_block)
        .map(|chunk| {
            let mut bits = if seg.block_crc {
                crc_attach(chunk, CrcKind::Crc24B)
            } else {
                chunk.to_vec()
            };
            debug_assert_eq!(bits.len(), seg.k_prime);
            bits.resize(seg.k, 0);
            CodeBlock {
                bits,
                filler: seg.k_prime..seg.k,
            }
        })
        .collect::<Vec<_>>();
    debug_assert_eq!(blocks.len(), seg.num_blocks);
    Ok((seg, blocks))
}

/// Reassembles decoded code blocks (at least `K'` bits each).
///
/// Returns the `B` transport-block bits and each block's CRC24B outcome
/// (always `true` for a single unprotected block).
pub fn desegment_code_blocks(decoded: &[Vec<u8>], seg: &Segmentation) -> (Vec<u8>, Vec<bool>) {
    let per_block = seg.payload_per_block();
    let mut bits = Vec::with_capacity(seg.input_len);
    let mut ok = Vec::with_capacity(decoded.len());
    for block in decoded {
        let block = &block[..seg.k_prime];
        ok.push(!seg.block_crc || crc_check(block, CrcKind::Crc24B));
        bits.extend_from_slice(&block[..per_block]);
    }
    bits.truncate(seg.input_len);
    (bits, ok)
}

/// Rate-matched lengths `E_r` for `G` coded bits over `num_blocks` blocks,
/// `qm` bits per symbol and one layer (38.212).
pub fn rate_matched_lengths(g: usize, num_blocks: usize, qm: usize) -> Vec<usize> {
    let symbols = g / qm;
    let small = qm * (symbols / num_blocks);
    let large = qm * symbols.div_ceil(num_blocks);
    let threshold = num_blocks - symbols % num_blocks;
    (0..num_blocks)
        .map(|r| if r < threshold { small } else { large })
        .collect()
}

/// Convenience: segmentation and per-block `E` for `a` payload bits in `g` coded bits.
pub fn code_block_sizes(a: usize, rate: f64, g: usize, qm: usize) -> Result<(Segmentation, Vec<usize>)> {
    let seg = Segmentation::for_transport_block(a, rate)?;
    let e = rate_matched_lengths(g, seg.num_blocks, qm);
    Ok((seg, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_link_segmentation() {
        let seg = Segmentation::for_transport_block(28488, 600.0 / 1024.0).unwrap();
        assert_eq!(seg.base_graph, BaseGraph::Bg1);
        assert_eq!(seg.input_len, 28512);
        assert_eq!(seg.num_blocks, 4);
        assert!(seg.block_crc);
        assert_eq!(seg.k_prime, 7152);
        assert_eq!(seg.lifting_size, 352);
        assert_eq!(seg.k, 7744);
        assert_eq!(rate_matched_lengths(48672, 4, 6), vec![12168; 4]);
    }

    #[test]
    fn uneven_rate_matching_split() {
        let e = rate_matched_lengths(6 * 10, 3, 6);
        assert_eq!(e, vec![18, 18, 24]);
        assert_eq!(e.iter().sum::<usize>(), 60);
    }

    #[test]
    fn small_block_uses_bg2_and_crc16() {
        let seg = Segmentation::for_transport_block(100, 0.5).unwrap();
        assert_eq!(tb_crc_kind(100), CrcKind::Crc16);
        assert_eq!(seg.base_graph, BaseGraph::Bg2);
        assert_eq!(seg.num_blocks, 1);
        assert_eq!(seg.k_prime, 116);
        assert_eq!(seg.k, 10 * seg.lifting_size);
        assert!(6 * seg.lifting_size >= 116);
    }

    #[test]
    fn oversized_block_rejected() {
        assert!(matches!(
            Segmentation::for_transport_block(MAX_TRANSPORT_BLOCK_BITS + 8, 0.5),
            Err(Error::UnsupportedBlockSize(_))
        ));
    }

    #[test]
    fn segment_and_reassemble() {
        let b: Vec<u8> = (0..28512).map(|i| ((i * 31 + 7) % 3 == 0) as u8).collect();
        let (seg, blocks) = segment_code_blocks(&b, BaseGraph::Bg1).unwrap();
        assert_eq!(blocks.len(), 4);
        for blk in &blocks {
            assert_eq!(blk.bits.len(), seg.k);
            assert!(blk.bits[blk.filler.clone()].iter().all(|&x| x == 0));
            assert!(crc_check(&blk.bits[..seg.k_prime], CrcKind::Crc24B));
        }
        let decoded: Vec<Vec<u8>> = blocks.iter().map(|b| b.bits.clone()).collect();
        let (back, ok) = desegment_code_blocks(&decoded, &seg);
        assert_eq!(back, b);
        assert!(ok.iter().all(|&x| x));
    }
}
