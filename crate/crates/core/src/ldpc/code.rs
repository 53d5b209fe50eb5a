use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{lifting_set_index, BaseGraph};
use crate::error::{Error, Result};

/// A base graph lifted by `Zc`: each base entry `(col, shift)` stands for a
/// `Zc x Zc` identity cyclically shifted so that row `r` of the block touches
/// column `(r + shift) mod Zc`.
#[derive(Debug)]
pub struct LiftedCode {
    base_graph: BaseGraph,
    zc: usize,
    rows: Vec<Vec<(usize, usize)>>,
    /// Net shift left on the first core parity column when the four core rows are summed.
    core_shift: usize,
}

/// `dst[w] ^= src[(w + s) mod z]`
#[inline]
fn xor_rotated(dst: &mut [u8], src: &[u8], s: usize) {
    let z = dst.len();
    let (head, tail) = dst.split_at_mut(z - s);
    for (d, &x) in head.iter_mut().zip(&src[s..z]) {
        *d ^= x;
    }
    for (d, &x) in tail.iter_mut().zip(&src[..s]) {
        *d ^= x;
    }
}

/// `out[w] = src[(w + s) mod z]`
fn rotated(src: &[u8], s: usize) -> Vec<u8> {
    let mut out = vec![0u8; src.len()];
    xor_rotated(&mut out, src, s);
    out
}

type CodeCache = HashMap<(BaseGraph, usize), Arc<LiftedCode>>;

impl LiftedCode {
    pub fn new(base_graph: BaseGraph, zc: usize) -> Result<Self> {
        let set = lifting_set_index(zc)
            .ok_or_else(|| Error::Config(format!("{zc} is not an NR lifting size")))?;
        let mut rows = vec![Vec::new(); base_graph.rows()];
        for &(r, c, shifts) in base_graph.entries() {
            rows[r as usize].push((c as usize, shifts[set] as usize % zc));
        }
        let kb = base_graph.info_cols();

        // The four core rows must sum to a single shifted copy of the first
        // core parity column, with the other three core columns cancelling.
        let mut parity_of = HashMap::<(usize, usize), usize>::new();
        for row in &rows[..4] {
            for &(c, s) in row.iter().filter(|(c, _)| (kb..kb + 4).contains(c)) {
                *parity_of.entry((c, s)).or_default() += 1;
            }
        }
        let survivors: Vec<(usize, usize)> = parity_of
            .into_iter()
            .filter(|&(_, n)| n % 2 == 1)
            .map(|(k, _)| k)
            .collect();
        let core_shift = match survivors.as_slice() {
            [(c, s)] if *c == kb => *s,
            _ => {
                return Err(Error::Config(format!(
                    "base graph {base_graph:?} core is not double-diagonal for Zc={zc}"
                )))
            }
        };
        for (i, row) in rows.iter().enumerate().skip(4) {
            let own = kb + i;
            if !row.iter().any(|&(c, _)| c == own) || row.iter().any(|&(c, _)| c > own) {
                return Err(Error::Config(format!("extension row {i} is not lower-triangular")));
            }
        }
        Ok(LiftedCode {
            base_graph,
            zc,
            rows,
            core_shift,
        })
    }

    /// Shared, lazily built instance for `(base_graph, zc)`.
    pub fn shared(base_graph: BaseGraph, zc: usize) -> Result<Arc<LiftedCode>> {
        static CACHE: OnceLock<Mutex<CodeCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().expect("code cache poisoned");
        if let Some(code) = map.get(&(base_graph, zc)) {
            return Ok(Arc::clone(code));
        }
        let code = Arc::new(LiftedCode::new(base_graph, zc)?);
        map.insert((base_graph, zc), Arc::clone(&code));
        Ok(code)
    }

    pub fn base_graph(&self) -> BaseGraph {
        self.base_graph
    }

    pub fn lifting_size(&self) -> usize {
        self.zc
    }

    /// Base rows as `(column, shift)` lists, shifts already reduced mod `Zc`.
    pub fn rows(&self) -> &[Vec<(usize, usize)>] {
        &self.rows
    }

    pub fn k(&self) -> usize {
        self.base_graph.info_cols() * self.zc
    }

    pub fn codeword_len(&self) -> usize {
        self.base_graph.cols() * self.zc
    }

    /// Systematic encoding of `K` information bits into the full
    /// (unpunctured) codeword of `cols * Zc` bits.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        let z = self.zc;
        let kb = self.base_graph.info_cols();
        if info.len() != kb * z {
            return Err(Error::size("LDPC information bits", kb * z, info.len()));
        }
        let mut cw = vec![0u8; self.codeword_len()];
        cw[..info.len()].copy_from_slice(info);

        let mut lambda = vec![vec![0u8; z]; 4];
        for (lam, row) in lambda.iter_mut().zip(&self.rows) {
            for &(c, s) in row.iter().filter(|(c, _)| *c < kb) {
                xor_rotated(lam, &cw[c * z..(c + 1) * z], s);
            }
        }

        let mut sum = vec![0u8; z];
        for lam in &lambda {
            for (d, &x) in sum.iter_mut().zip(lam) {
                *d ^= x;
            }
        }
        let p0 = rotated(&sum, (z - self.core_shift) % z);
        cw[kb * z..(kb + 1) * z].copy_from_slice(&p0);

        // Peel the remaining core parity columns one row at a time.
        let mut known = [true, false, false, false];
        while known.iter().any(|k| !k) {
            let mut progressed = false;
            for (i, row) in self.rows[..4].iter().enumerate() {
                let core: Vec<(usize, usize)> = row
                    .iter()
                    .copied()
                    .filter(|(c, _)| (kb..kb + 4).contains(c))
                    .collect();
                let unknown: Vec<(usize, usize)> =
                    core.iter().copied().filter(|(c, _)| !known[c - kb]).collect();
                if let [(u, su)] = unknown.as_slice() {
                    let mut rhs = lambda[i].clone();
                    for &(c, s) in core.iter().filter(|(c, _)| c != u) {
                        xor_rotated(&mut rhs, &cw[c * z..(c + 1) * z], s);
                    }
                    let p = rotated(&rhs, (z - su) % z);
                    cw[u * z..(u + 1) * z].copy_from_slice(&p);
                    known[u - kb] = true;
                    progressed = true;
                }
            }
            if !progressed {
                return Err(Error::Config("core parity system is not peelable".into()));
            }
        }

        for row in 4..self.rows.len() {
            self.refill_extension(&mut cw, row);
        }
        Ok(cw)
    }

    /// Recomputes the degree-one parity column of extension row `row` from the
    /// other bits of `cw`, so that the row's checks hold.
    pub(crate) fn refill_extension(&self, cw: &mut [u8], row: usize) {
        let z = self.zc;
        let own = self.base_graph.info_cols() + row;
        let mut rhs = vec![0u8; z];
        let mut own_shift = 0;
        for &(c, s) in &self.rows[row] {
            if c == own {
                own_shift = s;
            } else {
                xor_rotated(&mut rhs, &cw[c * z..(c + 1) * z], s);
            }
        }
        let p = rotated(&rhs, (z - own_shift) % z);
        cw[own * z..(own + 1) * z].copy_from_slice(&p);
    }

    /// True when every parity check holds on the full-length codeword `cw`.
    pub fn check(&self, cw: &[u8]) -> bool {
        let z = self.zc;
        if cw.len() != self.codeword_len() {
            return false;
        }
        let mut acc = vec![0u8; z];
        self.rows.iter().all(|row| {
            acc.iter_mut().for_each(|a| *a = 0);
            for &(c, s) in row {
                xor_rotated(&mut acc, &cw[c * z..(c + 1) * z], s);
            }
            acc.iter().all(|&a| a & 1 == 0)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense-free oracle: expand every base entry into explicit (row, col)
    /// positions and evaluate each check by direct summation.
    fn oracle_syndrome_zero(bg: BaseGraph, zc: usize, cw: &[u8]) -> bool {
        let set = lifting_set_index(zc).unwrap();
        let mut checks = vec![0u8; bg.rows() * zc];
        for &(i, j, v) in bg.entries() {
            let shift = v[set] as usize % zc;
            for r in 0..zc {
                let col = j as usize * zc + (r + shift) % zc;
                checks[i as usize * zc + r] ^= cw[col];
            }
        }
        checks.iter().all(|&c| c == 0)
    }

    #[test]
    fn every_lifting_size_builds() {
        for bg in [BaseGraph::Bg1, BaseGraph::Bg2] {
            for set in super::super::LIFTING_SETS {
                for &z in set {
                    LiftedCode::new(bg, z).unwrap();
                }
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let code = LiftedCode::new(BaseGraph::Bg1, 352).unwrap();
        let cw = code.encode(&vec![0; code.k()]).unwrap();
        assert!(cw.iter().all(|&b| b == 0));
    }

    #[test]
    fn random_codewords_satisfy_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (bg, z) in [
            (BaseGraph::Bg1, 352),
            (BaseGraph::Bg1, 384),
            (BaseGraph::Bg1, 2),
            (BaseGraph::Bg1, 104),
            (BaseGraph::Bg2, 64),
            (BaseGraph::Bg2, 15),
            (BaseGraph::Bg2, 208),
        ] {
            let code = LiftedCode::new(bg, z).unwrap();
            for _ in 0..5 {
                let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
                let cw = code.encode(&info).unwrap();
                assert_eq!(&cw[..info.len()], &info[..], "systematic part in place");
                assert!(oracle_syndrome_zero(bg, z, &cw), "{bg:?} Zc={z}");
                assert!(code.check(&cw));
            }
        }
    }

    #[test]
    fn single_bit_difference_changes_codeword() {
        let code = LiftedCode::new(BaseGraph::Bg2, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let mut b = a.clone();
        b[17] ^= 1;
        assert_ne!(code.encode(&a).unwrap(), code.encode(&b).unwrap());
    }

    #[test]
    fn check_detects_corruption() {
        let code = LiftedCode::new(BaseGraph::Bg2, 64).unwrap();
        let mut cw = code.encode(&vec![1; code.k()]).unwrap();
        assert!(code.check(&cw));
        cw[5] ^= 1;
        assert!(!code.check(&cw));
        assert!(!oracle_syndrome_zero(BaseGraph::Bg2, 64, &cw));
    }

    #[test]
    fn wrong_info_length_rejected() {
        let code = LiftedCode::new(BaseGraph::Bg2, 64).unwrap();
        assert!(code.encode(&[0; 10]).is_err());
    }
}
