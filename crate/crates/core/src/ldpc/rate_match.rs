//! Circular-buffer bit selection (38.212) and its soft inverse.

use super::LdpcConfig;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LLR pinned on filler positions during rate recovery.
pub const FILLER_LLR: f64 = 1e6;

/// Buffer indices in transmission order, `E` of them, skipping filler.
pub fn selection_indices(cfg: &LdpcConfig) -> Vec<usize> {
    let filler = cfg.filler_range();
    if cfg.transmittable_len() == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(cfg.e);
    let mut pos = cfg.rv_start() % cfg.n;
    while out.len() < cfg.e {
        if !filler.contains(&pos) {
            out.push(pos);
        }
        pos += 1;
        if pos == cfg.n {
            pos = 0;
        }
    }
    out
}

/// Selects `E` bits from the circular buffer `buffer` (the codeword without
/// its two punctured columns).
pub fn rate_match(buffer: &[u8], cfg: &LdpcConfig) -> Result<Vec<u8>> {
    if buffer.len() != cfg.n {
        return Err(Error::size("rate-matching buffer", cfg.n, buffer.len()));
    }
    if cfg.e < cfg.k_prime {
        log::warn!(
            "rate-matched length E={} is below K'={}; block cannot self-decode",
            cfg.e,
            cfg.k_prime
        );
    }
    Ok(selection_indices(cfg).into_iter().map(|i| buffer[i]).collect())
}

/// Adds `E` received LLRs into the `N`-long soft buffer `acc` and pins filler
/// positions to [`FILLER_LLR`]. Repeated positions accumulate.
pub fn rate_recover_into<T: Real>(llrs: &[T], cfg: &LdpcConfig, acc: &mut [T]) -> Result<()> {
    if llrs.len() != cfg.e {
        return Err(Error::size("rate-matched LLRs", cfg.e, llrs.len()));
    }
    if acc.len() != cfg.n {
        return Err(Error::size("soft buffer", cfg.n, acc.len()));
    }
    for (&i, &l) in selection_indices(cfg).iter().zip(llrs) {
        acc[i] = acc[i] + l;
    }
    let surrogate = T::lit(FILLER_LLR);
    for v in &mut acc[cfg.filler_range()] {
        *v = surrogate;
    }
    Ok(())
}

/// Soft inverse of [`rate_match`]: `N` LLRs, zero where nothing was sent.
pub fn rate_recover<T: Real>(llrs: &[T], cfg: &LdpcConfig) -> Result<Vec<T>> {
    let mut acc = vec![T::zero(); cfg.n];
    rate_recover_into(llrs, cfg, &mut acc)?;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::BaseGraph;

    fn small_cfg(e: usize, rv: u8) -> LdpcConfig {
        // BG2, Zc=16: N = 800, K = 160, K' = 150 -> 10 filler bits.
        LdpcConfig::new(BaseGraph::Bg2, 16, 150, e, rv).unwrap()
    }

    /// Walks the circular buffer bit by bit, as written in the standard.
    fn walk_oracle(cfg: &LdpcConfig) -> Vec<usize> {
        let filler = cfg.filler_range();
        let mut out = Vec::new();
        let (mut k, mut j) = (0, 0);
        while k < cfg.e {
            let idx = (cfg.rv_start() + j) % cfg.n;
            if !filler.contains(&idx) {
                out.push(idx);
                k += 1;
            }
            j += 1;
        }
        out
    }

    #[test]
    fn full_buffer_is_identity_on_non_filler() {
        let cfg0 = small_cfg(1, 0);
        let cfg = small_cfg(cfg0.transmittable_len(), 0);
        let buffer: Vec<u8> = (0..cfg.n).map(|i| (i % 3 == 0) as u8).collect();
        let out = rate_match(&buffer, &cfg).unwrap();
        let expected: Vec<u8> = (0..cfg.n)
            .filter(|i| !cfg.filler_range().contains(i))
            .map(|i| buffer[i])
            .collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn double_length_repeats_every_bit_twice() {
        let base = small_cfg(1, 0).transmittable_len();
        let cfg = small_cfg(2 * base, 0);
        let idx = selection_indices(&cfg);
        assert_eq!(idx, walk_oracle(&cfg));
        let mut counts = vec![0; cfg.n];
        for i in idx {
            counts[i] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let expected = if cfg.filler_range().contains(&i) { 0 } else { 2 };
            assert_eq!(c, expected);
        }
    }

    #[test]
    fn short_selection_matches_walk_for_every_rv() {
        for rv in 0..4 {
            let cfg = small_cfg(333, rv);
            assert_eq!(selection_indices(&cfg), walk_oracle(&cfg));
        }
        let cfg = small_cfg(333, 0);
        let idx = selection_indices(&cfg);
        let first: Vec<usize> = (0..cfg.n)
            .filter(|i| !cfg.filler_range().contains(i))
            .take(333)
            .collect();
        assert_eq!(idx, first);
    }

    #[test]
    fn recovery_counts_transmissions() {
        let base = small_cfg(1, 0).transmittable_len();
        let cfg = small_cfg(base + 100, 2);
        let recovered = rate_recover(&vec![1.0f64; cfg.e], &cfg).unwrap();
        let mut counts = vec![0.0; cfg.n];
        for i in walk_oracle(&cfg) {
            counts[i] += 1.0;
        }
        for (i, (&r, &c)) in recovered.iter().zip(&counts).enumerate() {
            if cfg.filler_range().contains(&i) {
                assert_eq!(r, FILLER_LLR);
            } else {
                assert_eq!(r, c);
            }
        }
    }

    #[test]
    fn bijective_case_places_without_summing() {
        let base = small_cfg(1, 0).transmittable_len();
        let cfg = small_cfg(base, 1);
        let llrs: Vec<f64> = (0..cfg.e).map(|i| i as f64 + 0.5).collect();
        let rec = rate_recover(&llrs, &cfg).unwrap();
        for (k, &i) in selection_indices(&cfg).iter().enumerate() {
            assert_eq!(rec[i], llrs[k]);
        }
    }

    #[test]
    fn zero_llrs_recover_to_zero_and_surrogate() {
        let cfg = small_cfg(500, 0);
        let rec = rate_recover(&vec![0.0f32; 500], &cfg).unwrap();
        for (i, &v) in rec.iter().enumerate() {
            if cfg.filler_range().contains(&i) {
                assert_eq!(v, FILLER_LLR as f32);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let cfg = small_cfg(500, 0);
        assert!(rate_recover(&vec![0.0f64; 499], &cfg).is_err());
        assert!(rate_match(&[0u8; 10], &cfg).is_err());
    }
}
