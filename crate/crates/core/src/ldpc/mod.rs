//! NR transport-channel coding: CRC, code-block segmentation, QC-LDPC
//! encoding on base graphs 1 and 2, circular-buffer rate matching and
//! layered normalized min-sum decoding.
//!
//! LLR convention throughout: positive means bit 0 is more likely.

mod code;
mod crc;
mod decoder;
mod rate_match;
mod segmentation;
mod tables;

pub use code::LiftedCode;
pub use crc::{crc_attach, crc_check, crc_parity, CrcKind};
pub use decoder::{DecodeOutput, LayeredDecoder, DEFAULT_MAX_ITER, DEFAULT_SCALING};
pub use rate_match::{rate_match, rate_recover, rate_recover_into, selection_indices, FILLER_LLR};
pub use segmentation::{
    code_block_sizes, desegment_code_blocks, rate_matched_lengths, segment_code_blocks, tb_crc_kind,
    CodeBlock, Segmentation, MAX_TRANSPORT_BLOCK_BITS,
};

use crate::error::{Error, Result};

/// LDPC base graph of 38.212.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseGraph {
    Bg1,
    Bg2,
}

impl BaseGraph {
    /// Rows of the base matrix.
    pub fn rows(self) -> usize {
        match self {
            BaseGraph::Bg1 => 46,
            BaseGraph::Bg2 => 42,
        }
    }

    /// Columns of the base matrix.
    pub fn cols(self) -> usize {
        match self {
            BaseGraph::Bg1 => 68,
            BaseGraph::Bg2 => 52,
        }
    }

    /// Systematic columns (`K = info_cols * Zc`).
    pub fn info_cols(self) -> usize {
        match self {
            BaseGraph::Bg1 => 22,
            BaseGraph::Bg2 => 10,
        }
    }

    /// Columns of the transmitted buffer; the first two systematic columns are punctured.
    pub fn buffer_cols(self) -> usize {
        self.cols() - 2
    }

    /// Maximum code-block size `Kcb`.
    pub fn max_code_block(self) -> usize {
        match self {
            BaseGraph::Bg1 => 8448,
            BaseGraph::Bg2 => 3840,
        }
    }

    pub(crate) fn entries(self) -> &'static [(u8, u8, [u16; 8])] {
        match self {
            BaseGraph::Bg1 => tables::BG1_ENTRIES,
            BaseGraph::Bg2 => tables::BG2_ENTRIES,
        }
    }

    /// Circular-buffer start `k0` for redundancy version `rv` (no limited buffer).
    pub fn rv_start(self, rv: u8, n_cb: usize, zc: usize) -> usize {
        let (num, den) = match (self, rv & 3) {
            (_, 0) => return 0,
            (BaseGraph::Bg1, 1) => (17, 66),
            (BaseGraph::Bg1, 2) => (33, 66),
            (BaseGraph::Bg1, _) => (56, 66),
            (BaseGraph::Bg2, 1) => (13, 50),
            (BaseGraph::Bg2, 2) => (25, 50),
            (BaseGraph::Bg2, _) => (43, 50),
        };
        (num * n_cb / (den * zc)) * zc
    }

    /// Base-graph choice of 38.212 for payload `a` bits at code rate `rate`.
    pub fn select(a: usize, rate: f64) -> BaseGraph {
        if a <= 292 || (a <= 3824 && rate <= 0.67) || rate <= 0.25 {
            BaseGraph::Bg2
        } else {
            BaseGraph::Bg1
        }
    }
}

/// Lifting sizes grouped by set index `i_LS` (38.212).
pub const LIFTING_SETS: [&[usize]; 8] = [
    &[2, 4, 8, 16, 32, 64, 128, 256],
    &[3, 6, 12, 24, 48, 96, 192, 384],
    &[5, 10, 20, 40, 80, 160, 320],
    &[7, 14, 28, 56, 112, 224],
    &[9, 18, 36, 72, 144, 288],
    &[11, 22, 44, 88, 176, 352],
    &[13, 26, 52, 104, 208],
    &[15, 30, 60, 120, 240],
];

/// Set index of a lifting size, or `None` if `zc` is not a standard size.
pub fn lifting_set_index(zc: usize) -> Option<usize> {
    LIFTING_SETS.iter().position(|set| set.contains(&zc))
}

/// Smallest standard lifting size with `kb * zc >= k_prime`.
pub fn min_lifting_size(kb: usize, k_prime: usize) -> Option<usize> {
    LIFTING_SETS
        .iter()
        .flat_map(|s| s.iter().copied())
        .filter(|&z| kb * z >= k_prime)
        .min()
}

/// Parameters of one LDPC code block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LdpcConfig {
    pub base_graph: BaseGraph,
    pub lifting_size: usize,
    /// Information bits per code block including filler (`K`).
    pub k: usize,
    /// Information bits per code block excluding filler (`K'`).
    pub k_prime: usize,
    /// Circular-buffer length (`N`), i.e. codeword bits after puncturing.
    pub n: usize,
    /// Rate-matched output length `E`.
    pub e: usize,
    /// Redundancy version in `0..=3`.
    pub rv: u8,
}

impl LdpcConfig {
    pub fn new(
        base_graph: BaseGraph,
        lifting_size: usize,
        k_prime: usize,
        e: usize,
        rv: u8,
    ) -> Result<Self> {
        if lifting_set_index(lifting_size).is_none() {
            return Err(Error::Config(format!("{lifting_size} is not an NR lifting size")));
        }
        let k = base_graph.info_cols() * lifting_size;
        if k_prime == 0 || k_prime > k {
            return Err(Error::Config(format!(
                "K'={k_prime} does not fit K={k} for Zc={lifting_size}"
            )));
        }
        if e == 0 {
            return Err(Error::Config("rate-matched length E must be positive".into()));
        }
        if rv > 3 {
            return Err(Error::Config(format!("redundancy version {rv} out of range")));
        }
        Ok(LdpcConfig {
            base_graph,
            lifting_size,
            k,
            k_prime,
            n: base_graph.buffer_cols() * lifting_size,
            e,
            rv,
        })
    }

    pub fn with_rv(mut self, rv: u8) -> Self {
        self.rv = rv & 3;
        self
    }

    pub fn filler_count(&self) -> usize {
        self.k - self.k_prime
    }

    /// Filler positions expressed as indices into the circular buffer.
    pub fn filler_range(&self) -> std::ops::Range<usize> {
        let off = 2 * self.lifting_size;
        (self.k_prime - off)..(self.k - off)
    }

    /// Number of buffer positions that are not filler.
    pub fn transmittable_len(&self) -> usize {
        self.n - self.filler_count()
    }

    pub fn rv_start(&self) -> usize {
        self.base_graph.rv_start(self.rv, self.n, self.lifting_size)
    }

    /// Full codeword length including the punctured columns.
    pub fn codeword_len(&self) -> usize {
        self.base_graph.cols() * self.lifting_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes_match_standard() {
        assert_eq!(BaseGraph::Bg1.entries().len(), 316);
        assert_eq!(BaseGraph::Bg2.entries().len(), 197);
        for bg in [BaseGraph::Bg1, BaseGraph::Bg2] {
            for &(r, c, _) in bg.entries() {
                assert!((r as usize) < bg.rows());
                assert!((c as usize) < bg.cols());
            }
        }
    }

    #[test]
    fn lifting_sizes() {
        assert_eq!(LIFTING_SETS.iter().map(|s| s.len()).sum::<usize>(), 51);
        assert_eq!(min_lifting_size(22, 7152), Some(352));
        assert_eq!(min_lifting_size(22, 8448), Some(384));
        assert_eq!(min_lifting_size(22, 8449), None);
        assert_eq!(lifting_set_index(352), Some(5));
        assert_eq!(lifting_set_index(17), None);
    }

    #[test]
    fn base_graph_selection() {
        assert_eq!(BaseGraph::select(28488, 600.0 / 1024.0), BaseGraph::Bg1);
        assert_eq!(BaseGraph::select(3824, 600.0 / 1024.0), BaseGraph::Bg2);
        assert_eq!(BaseGraph::select(200, 0.9), BaseGraph::Bg2);
        assert_eq!(BaseGraph::select(20000, 0.2), BaseGraph::Bg2);
    }

    #[test]
    fn rv_starts() {
        let z = 352;
        let n = 66 * z;
        let starts: Vec<usize> = (0..4).map(|rv| BaseGraph::Bg1.rv_start(rv, n, z)).collect();
        assert_eq!(starts, vec![0, 17 * z, 33 * z, 56 * z]);
        let n2 = 50 * 64;
        assert_eq!(BaseGraph::Bg2.rv_start(3, n2, 64), 43 * 64);
    }

    #[test]
    fn config_validation() {
        assert!(LdpcConfig::new(BaseGraph::Bg1, 17, 100, 100, 0).is_err());
        assert!(LdpcConfig::new(BaseGraph::Bg1, 352, 8000, 100, 0).is_err());
        assert!(LdpcConfig::new(BaseGraph::Bg1, 352, 7152, 0, 0).is_err());
        let cfg = LdpcConfig::new(BaseGraph::Bg1, 352, 7152, 12168, 0).unwrap();
        assert_eq!(cfg.k, 7744);
        assert_eq!(cfg.n, 23232);
        assert_eq!(cfg.filler_count(), 592);
        assert_eq!(cfg.filler_range(), (7152 - 704)..(7744 - 704));
    }
}
