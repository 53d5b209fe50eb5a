//! Layered normalized min-sum decoding over the lifted base graph.
//!
//! Each base row is one layer of `Zc` independent checks. Extension rows
//! whose degree-one parity column carries no soft information are skipped:
//! every message they would emit is exactly zero. Their parity bits are
//! re-derived from the decoded bits afterwards so the returned word can be
//! checked against the full matrix.

use std::sync::Arc;

use super::code::LiftedCode;
use super::LdpcConfig;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_MAX_ITER: usize = 20;
pub const DEFAULT_SCALING: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutput {
    /// The `K` systematic bits (filler included, code-block CRC retained).
    pub bits: Vec<u8>,
    /// Whether the hard-decision codeword satisfies every parity check.
    pub parity_ok: bool,
    pub iterations: usize,
}

pub struct LayeredDecoder<T> {
    code: Arc<LiftedCode>,
    scaling: T,
    /// Posterior LLRs for every column of the unpunctured codeword.
    posterior: Vec<T>,
    /// Check-to-variable messages, `Zc` per base edge.
    messages: Vec<T>,
    edge_offset: Vec<usize>,
    scratch: Vec<T>,
    hard: Vec<u8>,
}

impl<T: Real> LayeredDecoder<T> {
    pub fn new(code: Arc<LiftedCode>) -> Self {
        Self::with_scaling(code, T::lit(DEFAULT_SCALING))
    }

    pub fn with_scaling(code: Arc<LiftedCode>, scaling: T) -> Self {
        let z = code.lifting_size();
        let mut edge_offset = Vec::with_capacity(code.rows().len());
        let mut total = 0;
        let mut max_deg = 0;
        for row in code.rows() {
            edge_offset.push(total);
            total += row.len();
            max_deg = max_deg.max(row.len());
        }
        LayeredDecoder {
            scaling,
            posterior: vec![T::zero(); code.codeword_len()],
            messages: vec![T::zero(); total * z],
            edge_offset,
            scratch: vec![T::zero(); max_deg * z],
            hard: vec![0; code.codeword_len()],
            code,
        }
    }

    /// Decoder for the code described by `cfg`.
    pub fn for_config(cfg: &LdpcConfig) -> Result<Self> {
        Ok(Self::new(LiftedCode::shared(cfg.base_graph, cfg.lifting_size)?))
    }

    pub fn code(&self) -> &LiftedCode {
        &self.code
    }

    /// Decodes `N` buffer LLRs (the codeword minus its two punctured columns).
    pub fn decode(&mut self, llrs: &[T], max_iter: usize) -> Result<DecodeOutput> {
        let z = self.code.lifting_size();
        let bg = self.code.base_graph();
        let n = bg.buffer_cols() * z;
        if llrs.len() != n {
            return Err(Error::size("decoder LLRs", n, llrs.len()));
        }
        self.posterior[..2 * z].iter_mut().for_each(|v| *v = T::zero());
        self.posterior[2 * z..].copy_from_slice(llrs);
        self.messages.iter_mut().for_each(|v| *v = T::zero());

        let kb = bg.info_cols();
        let active: Vec<usize> = (0..self.code.rows().len())
            .filter(|&r| {
                r < 4 || {
                    let col = kb + r;
                    self.posterior[col * z..(col + 1) * z]
                        .iter()
                        .any(|v| !v.is_zero())
                }
            })
            .collect();

        let mut iterations = 0;
        let mut converged = self.satisfied(&active);
        while !converged && iterations < max_iter {
            for &row in &active {
                self.update_layer(row);
            }
            iterations += 1;
            converged = self.satisfied(&active);
        }

        self.harden();
        for row in (4..self.code.rows().len()).filter(|r| !active.contains(r)) {
            self.code.refill_extension(&mut self.hard, row);
        }
        let parity_ok = self.code.check(&self.hard);
        Ok(DecodeOutput {
            bits: self.hard[..self.code.k()].to_vec(),
            parity_ok,
            iterations,
        })
    }

    fn harden(&mut self) {
        for (h, &l) in self.hard.iter_mut().zip(&self.posterior) {
            *h = (l < T::zero()) as u8;
        }
    }

    fn satisfied(&mut self, rows: &[usize]) -> bool {
        self.harden();
        let z = self.code.lifting_size();
        let mut acc = vec![0u8; z];
        rows.iter().all(|&r| {
            acc.iter_mut().for_each(|a| *a = 0);
            for &(c, s) in &self.code.rows()[r] {
                let col = &self.hard[c * z..(c + 1) * z];
                for (a, &h) in acc[..z - s].iter_mut().zip(&col[s..]) {
                    *a ^= h;
                }
                for (a, &h) in acc[z - s..].iter_mut().zip(&col[..s]) {
                    *a ^= h;
                }
            }
            acc.iter().all(|&a| a == 0)
        })
    }

    fn update_layer(&mut self, row: usize) {
        let z = self.code.lifting_size();
        let edges = &self.code.rows()[row];
        let base = self.edge_offset[row];
        let q = &mut self.scratch;

        // Variable-to-check messages: posterior minus this layer's old message.
        for (e, &(c, s)) in edges.iter().enumerate() {
            let msg = &self.messages[(base + e) * z..(base + e + 1) * z];
            let col = &self.posterior[c * z..(c + 1) * z];
            let qe = &mut q[e * z..(e + 1) * z];
            for w in 0..z - s {
                qe[w] = col[w + s] - msg[w];
            }
            for w in z - s..z {
                qe[w] = col[w + s - z] - msg[w];
            }
        }

        let inf = T::infinity();
        let mut min1 = vec![inf; z];
        let mut min2 = vec![inf; z];
        let mut argmin = vec![0usize; z];
        let mut negative = vec![false; z];
        for e in 0..edges.len() {
            let qe = &q[e * z..(e + 1) * z];
            for w in 0..z {
                let v = qe[w];
                let a = v.abs();
                negative[w] ^= v < T::zero();
                if a < min1[w] {
                    min2[w] = min1[w];
                    min1[w] = a;
                    argmin[w] = e;
                } else if a < min2[w] {
                    min2[w] = a;
                }
            }
        }

        for (e, &(c, s)) in edges.iter().enumerate() {
            let qe = &q[e * z..(e + 1) * z];
            let msg = &mut self.messages[(base + e) * z..(base + e + 1) * z];
            for w in 0..z {
                let mag = if argmin[w] == e { min2[w] } else { min1[w] };
                let neg = negative[w] ^ (qe[w] < T::zero());
                let r = self.scaling * if neg { -mag } else { mag };
                msg[w] = r;
            }
            let col = &mut self.posterior[c * z..(c + 1) * z];
            for w in 0..z - s {
                col[w + s] = qe[w] + msg[w];
            }
            for w in z - s..z {
                col[w + s - z] = qe[w] + msg[w];
            }
        }
    }
}
