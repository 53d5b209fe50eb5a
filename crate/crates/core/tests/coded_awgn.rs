//! Coded 64-QAM over AWGN: transport blocks through CRC, segmentation, LDPC,
//! rate matching, mapping, noise, max-log demapping and layered decoding.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use nrlink::ldpc::{
    crc_attach, crc_check, desegment_code_blocks, rate_match, rate_matched_lengths, rate_recover,
    segment_code_blocks, tb_crc_kind, BaseGraph, LayeredDecoder, LiftedCode,
};
use nrlink::phy_rx::{soft_demap, EqualizedGrid};
use nrlink::phy_tx::Modulation;

const CODED_BITS: usize = 48672;
const MAX_ITER: usize = 20;

/// Block error rate of `blocks` transport blocks of `a` bits at `es_n0_db`.
fn bler(a: usize, es_n0_db: f64, blocks: usize, seed: u64) -> f64 {
    let modulation = Modulation::Qam64;
    let qm = modulation.bits_per_symbol();
    let rate = (a + 24) as f64 / CODED_BITS as f64;
    let crc = tb_crc_kind(a);
    let n0 = 10f64.powf(-es_n0_db / 10.0);
    let noise_scale = (n0 / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..blocks {
        let payload: Vec<u8> = (0..a).map(|_| rng.random_range(0..2)).collect();
        let (seg, cbs) = segment_code_blocks(&crc_attach(&payload, crc), BaseGraph::select(a, rate)).unwrap();
        let code = LiftedCode::shared(seg.base_graph, seg.lifting_size).unwrap();
        let lengths = rate_matched_lengths(CODED_BITS, seg.num_blocks, qm);
        let z = seg.lifting_size;
        let mut coded = Vec::with_capacity(CODED_BITS);
        for (cb, &e) in cbs.iter().zip(&lengths) {
            let cw = code.encode(&cb.bits).unwrap();
            coded.extend(rate_match(&cw[2 * z..], &seg.ldpc_config(e, 0).unwrap()).unwrap());
        }
        let received: Vec<Complex<f64>> = modulation
            .map::<f64>(&coded)
            .unwrap()
            .into_iter()
            .map(|s| {
                let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                s + Complex::new(re, im) * noise_scale
            })
            .collect();
        let n = received.len();
        let llrs = soft_demap(&EqualizedGrid::unbiased(received, vec![n0; n]), modulation);
        let mut decoder = LayeredDecoder::<f64>::new(code);
        let mut offset = 0;
        let mut decoded = Vec::new();
        for &e in &lengths {
            let soft = rate_recover(&llrs[offset..offset + e], &seg.ldpc_config(e, 0).unwrap()).unwrap();
            offset += e;
            decoded.push(decoder.decode(&soft, MAX_ITER).unwrap().bits);
        }
        let (b_bits, _) = desegment_code_blocks(&decoded, &seg);
        if !(crc_check(&b_bits, crc) && b_bits[..a] == payload[..]) {
            failures += 1;
        }
    }
    failures as f64 / blocks as f64
}

#[test]
fn link_rate_fails_below_capacity() {
    // 600/1024 on 64-QAM carries 3.52 bits per symbol, above the 3.46 bit
    // capacity of a 10 dB AWGN channel.
    assert_eq!(bler(28488, 10.0, 10, 78), 1.0);
}

#[test]
fn link_rate_is_error_free_at_14_db() {
    assert_eq!(bler(28488, 14.0, 100, 79), 0.0);
}
