use crate::phy_tx::Modulation;
use crate::scalar::Real;

use super::equalizer::EqualizedGrid;

/// Max-log LLRs, `bits_per_symbol` per RE, positive favouring bit 0.
///
/// Each estimate is divided by its MMSE bias before demapping; REs with no
/// channel gain yield zero LLRs.
pub fn soft_demap<T: Real>(eq: &EqualizedGrid<T>, modulation: Modulation) -> Vec<T> {
    let table: Vec<T> = modulation.axis_table().into_iter().map(T::lit).collect();
    let m = modulation.bits_per_axis();
    let mut llrs = Vec::with_capacity(eq.len() * 2 * m);
    let mut i_llr = vec![T::zero(); m];
    let mut q_llr = vec![T::zero(); m];
    for ((s, &var), &bias) in eq.symbols.iter().zip(&eq.post_eq_noise_var).zip(&eq.bias) {
        if bias.is_nan() || bias <= T::zero() || !var.is_finite() {
            llrs.extend(std::iter::repeat_n(T::zero(), 2 * m));
            continue;
        }
        let u = *s / bias;
        axis_llrs(u.re, var, &table, &mut i_llr);
        axis_llrs(u.im, var, &table, &mut q_llr);
        for j in 0..m {
            llrs.push(i_llr[j]);
            llrs.push(q_llr[j]);
        }
    }
    llrs
}

/// Max-log LLRs of the bits on one PAM axis; `table[p]` is the level whose
/// bit pattern is `p` (first bit = MSB).
fn axis_llrs<T: Real>(x: T, var: T, table: &[T], out: &mut [T]) {
    let m = out.len();
    let inf = T::infinity();
    let mut best = vec![[inf, inf]; m];
    for (p, &a) in table.iter().enumerate() {
        let d = (x - a) * (x - a);
        for (j, b) in best.iter_mut().enumerate() {
            let bit = (p >> (m - 1 - j)) & 1;
            if d < b[bit] {
                b[bit] = d;
            }
        }
    }
    for (o, b) in out.iter_mut().zip(&best) {
        *o = (b[1] - b[0]) / var;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Exact LLRs by marginalizing over every constellation point.
    fn exact_llrs(y: Complex<f64>, var: f64, modulation: Modulation) -> Vec<f64> {
        let points = modulation.constellation::<f64>();
        let q = modulation.bits_per_symbol();
        (0..q)
            .map(|i| {
                let (mut p0, mut p1) = (0.0, 0.0);
                for (pattern, s) in points.iter().enumerate() {
                    let like = (-(y - s).norm_sqr() / var).exp();
                    if (pattern >> (q - 1 - i)) & 1 == 0 {
                        p0 += like;
                    } else {
                        p1 += like;
                    }
                }
                (p0 / p1).ln()
            })
            .collect()
    }

    /// Max-log by brute force over all points, as a check on the per-axis shortcut.
    fn brute_max_log(y: Complex<f64>, var: f64, modulation: Modulation) -> Vec<f64> {
        let points = modulation.constellation::<f64>();
        let q = modulation.bits_per_symbol();
        (0..q)
            .map(|i| {
                let (mut d0, mut d1) = (f64::INFINITY, f64::INFINITY);
                for (pattern, s) in points.iter().enumerate() {
                    let d = (y - s).norm_sqr();
                    if (pattern >> (q - 1 - i)) & 1 == 0 {
                        d0 = d0.min(d);
                    } else {
                        d1 = d1.min(d);
                    }
                }
                (d1 - d0) / var
            })
            .collect()
    }

    #[test]
    fn certain_symbols_reproduce_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let bits: Vec<u8> = (0..6 * 200).map(|_| rng.random_range(0..2)).collect();
        let syms = Modulation::Qam64.map::<f64>(&bits).unwrap();
        let eq = EqualizedGrid::unbiased(syms, vec![1e-6; 200]);
        let llrs = soft_demap(&eq, Modulation::Qam64);
        for (l, &b) in llrs.iter().zip(&bits) {
            assert_eq!(b == 0, *l > 0.0);
            assert!(l.abs() > 1e3);
        }
    }

    #[test]
    fn origin_gives_zero_first_bit() {
        let eq = EqualizedGrid::unbiased(vec![Complex::new(0.0, 0.0)], vec![0.5]);
        let llrs = soft_demap(&eq, Modulation::Qam64);
        assert_eq!(llrs[0], 0.0);
        assert_eq!(llrs[1], 0.0);
    }

    #[test]
    fn axis_shortcut_equals_brute_force_max_log() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for modulation in [Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64] {
            for _ in 0..500 {
                let y = Complex::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
                let var = rng.random_range(0.01..1.0);
                let got = soft_demap(&EqualizedGrid::unbiased(vec![y], vec![var]), modulation);
                for (a, b) in got.iter().zip(brute_max_log(y, var, modulation)) {
                    assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
                }
            }
        }
    }

    #[test]
    fn close_to_exact_marginalization_at_high_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let points = Modulation::Qam64.constellation::<f64>();
        let var = 0.1; // Es/N0 = 10 dB
        let (mut agree, mut total) = (0, 0);
        for _ in 0..5000 {
            let s = points[rng.random_range(0..64)];
            let n = Complex::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ) * (var / 2.0f64).sqrt();
            let y = s + n;
            let got = soft_demap(&EqualizedGrid::unbiased(vec![y], vec![var]), Modulation::Qam64);
            let exact = exact_llrs(y, var, Modulation::Qam64);
            for (a, e) in got.iter().zip(&exact) {
                // Max-log never exceeds ln(#points per hypothesis) in error.
                assert!((a - e).abs() <= 32f64.ln() + 1e-9, "{a} vs {e}");
                agree += ((*a > 0.0) == (*e > 0.0)) as usize;
                total += 1;
            }
        }
        assert!(agree as f64 >= 0.99 * total as f64, "{agree}/{total}");
    }

    #[test]
    fn bias_is_removed_before_demapping() {
        let s = Modulation::Qam64.map::<f64>(&[0, 1, 1, 0, 1, 1]).unwrap()[0];
        let shrunk = EqualizedGrid {
            symbols: vec![s * 0.5],
            post_eq_noise_var: vec![0.01],
            bias: vec![0.5],
        };
        let direct = EqualizedGrid::unbiased(vec![s], vec![0.01]);
        assert_eq!(soft_demap(&shrunk, Modulation::Qam64), soft_demap(&direct, Modulation::Qam64));
    }

    #[test]
    fn dead_re_yields_zero_llrs() {
        let eq = EqualizedGrid {
            symbols: vec![Complex::new(0.0, 0.0)],
            post_eq_noise_var: vec![f64::INFINITY],
            bias: vec![0.0],
        };
        assert_eq!(soft_demap(&eq, Modulation::Qam64), vec![0.0; 6]);
    }

    #[test]
    fn llr_magnitude_grows_with_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points = Modulation::Qam64.constellation::<f64>();
        let mut medians = Vec::new();
        for snr_db in [1.0, 5.0, 10.0, 15.0, 20.0] {
            let var = 10f64.powf(-snr_db / 10.0);
            let mut mags = Vec::new();
            for _ in 0..2000 {
                let s = points[rng.random_range(0..64)];
                let n = Complex::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                ) * (var / 2.0f64).sqrt();
                let eq = EqualizedGrid::unbiased(vec![s + n], vec![var]);
                mags.extend(soft_demap(&eq, Modulation::Qam64).into_iter().map(f64::abs));
            }
            mags.sort_by(f64::total_cmp);
            medians.push(mags[mags.len() / 2]);
        }
        assert!(medians.windows(2).all(|w| w[1] > w[0]), "{medians:?}");
    }
}
