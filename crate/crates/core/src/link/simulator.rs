use std::sync::Arc;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{compute_capacity, Capacity, LinkConfig, RV_SEQUENCE};
use crate::channel::{add_awgn, apply_channel, ChannelModel, ChannelRealization};
use crate::error::Result;
use crate::ldpc::{
    crc_attach, crc_check, desegment_code_blocks, rate_match, rate_matched_lengths, rate_recover_into,
    segment_code_blocks, tb_crc_kind, LayeredDecoder, LdpcConfig, LiftedCode, Segmentation,
};
use crate::phy_rx::{mmse_equalize, soft_demap};
use crate::phy_tx::{generate_dmrs, map_to_grid, GridLayout, OfdmEngine};
use crate::scalar::Real;
use crate::transport::{
    desegment_payload, deserialize_image, segment_payload, serialize_image, ImagePayload, TransportBlock,
};

/// Outcome of sending one payload.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    /// Transport-block CRC outcome after the final attempt of each block.
    pub crc_pass: Vec<bool>,
    /// Retransmissions spent on each transport block.
    pub retransmissions: Vec<usize>,
    /// Failed transport blocks over all transport blocks.
    pub bler: f64,
    /// Payload bits delivered in error.
    pub bit_errors: u64,
    pub payload_bits: u64,
    /// Slots used, retransmissions included.
    pub slots: u64,
}

impl LinkReport {
    pub fn failed_blocks(&self) -> usize {
        self.crc_pass.iter().filter(|&&ok| !ok).count()
    }
}

/// One configured uplink; reusable across payloads.
pub struct LinkSimulator<T: Real> {
    cfg: LinkConfig,
    capacity: Capacity,
    segmentation: Segmentation,
    block_lengths: Vec<usize>,
    layout: GridLayout,
    engine: OfdmEngine<T>,
    code: Arc<LiftedCode>,
    decoder: LayeredDecoder<T>,
    ideal: bool,
}

/// Noise variance assumed by the equalizer on an ideal link.
const IDEAL_NOISE_VAR: f64 = 1e-6;

impl<T: Real> LinkSimulator<T> {
    pub fn new(cfg: LinkConfig) -> Result<Self> {
        let capacity = compute_capacity(&cfg)?;
        let segmentation = Segmentation::for_transport_block(capacity.a, cfg.code_rate)?;
        let qm = cfg.modulation.bits_per_symbol();
        let block_lengths = rate_matched_lengths(capacity.g, segmentation.num_blocks, qm);
        let code = LiftedCode::shared(segmentation.base_graph, segmentation.lifting_size)?;
        Ok(LinkSimulator {
            layout: cfg.layout(),
            engine: OfdmEngine::new(cfg.numerology()),
            decoder: LayeredDecoder::new(Arc::clone(&code)),
            code,
            capacity,
            segmentation,
            block_lengths,
            cfg,
            ideal: false,
        })
    }

    /// Replaces fading and noise by a unit single-tap channel.
    pub fn ideal(mut self) -> Self {
        self.ideal = true;
        self
    }

    pub fn config(&self) -> &LinkConfig {
        &self.cfg
    }

    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    /// Sends `image` and reassembles what the receiver delivers.
    pub fn transmit_image(&mut self, image: &ImagePayload) -> Result<(ImagePayload, LinkReport)> {
        let bits = serialize_image(image)?;
        let (received, report) = self.transmit_bits(&bits)?;
        let out = deserialize_image(&received, image.width, image.height, image.channels)?;
        Ok((out, report))
    }

    /// Sends a bit payload, one transport block per slot with stop-and-wait
    /// HARQ. Decoded bits are delivered whether or not their CRC passed.
    pub fn transmit_bits(&mut self, bits: &[u8]) -> Result<(Vec<u8>, LinkReport)> {
        let blocks = segment_payload(bits, self.capacity.a)?;
        let model = ChannelModel::new(self.cfg.channel_config(self.cfg.rng_seed))?;
        let mut noise_rng = ChaCha8Rng::seed_from_u64(self.cfg.rng_seed);
        noise_rng.set_stream(1);

        let mut slot = 0u64;
        let mut delivered = Vec::with_capacity(blocks.len());
        let mut crc_pass = Vec::with_capacity(blocks.len());
        let mut retransmissions = Vec::with_capacity(blocks.len());
        for tb in &blocks {
            let (bits, ok, retx) = self.send_block(tb, &model, &mut slot, &mut noise_rng)?;
            delivered.push(TransportBlock {
                info_bits: bits,
                index: tb.index,
                pad_count: tb.pad_count,
            });
            crc_pass.push(ok);
            retransmissions.push(retx);
        }
        let received = desegment_payload(&delivered, bits.len());
        let bit_errors = received.iter().zip(bits).filter(|(a, b)| a != b).count() as u64;
        let failed = crc_pass.iter().filter(|&&ok| !ok).count();
        let report = LinkReport {
            bler: failed as f64 / crc_pass.len() as f64,
            crc_pass,
            retransmissions,
            bit_errors,
            payload_bits: bits.len() as u64,
            slots: slot,
        };
        Ok((received, report))
    }

    fn send_block(
        &mut self,
        tb: &TransportBlock,
        model: &ChannelModel,
        slot: &mut u64,
        noise_rng: &mut ChaCha8Rng,
    ) -> Result<(Vec<u8>, bool, usize)> {
        let crc_kind = tb_crc_kind(self.capacity.a);
        let with_crc = crc_attach(&tb.info_bits, crc_kind);
        let (seg, code_blocks) = segment_code_blocks(&with_crc, self.segmentation.base_graph)?;
        let zc = seg.lifting_size;
        let buffers = code_blocks
            .iter()
            .map(|cb| Ok(self.code.encode(&cb.bits)?[2 * zc..].to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let n = buffers[0].len();
        let mut soft = vec![vec![T::zero(); n]; seg.num_blocks];

        let mut attempt = 0;
        loop {
            let rv = RV_SEQUENCE[attempt % RV_SEQUENCE.len()];
            let configs = self
                .block_lengths
                .iter()
                .map(|&e| seg.ldpc_config(e, rv))
                .collect::<Result<Vec<LdpcConfig>>>()?;
            let mut coded = Vec::with_capacity(self.capacity.g);
            for (buf, cfg) in buffers.iter().zip(&configs) {
                coded.extend(rate_match(buf, cfg)?);
            }

            let llrs = self.run_slot(&coded, model, *slot, noise_rng)?;
            *slot += 1;

            let mut offset = 0;
            let mut decoded = Vec::with_capacity(seg.num_blocks);
            for (acc, cfg) in soft.iter_mut().zip(&configs) {
                rate_recover_into(&llrs[offset..offset + cfg.e], cfg, acc)?;
                offset += cfg.e;
                decoded.push(self.decoder.decode(acc, self.cfg.ldpc_max_iter)?.bits);
            }
            let (b_bits, _) = desegment_code_blocks(&decoded, &seg);
            let ok = crc_check(&b_bits, crc_kind);
            if ok || attempt >= self.cfg.max_harq_retx {
                let info = b_bits[..b_bits.len() - crc_kind.parity_len()].to_vec();
                return Ok((info, ok, attempt));
            }
            attempt += 1;
        }
    }

    /// Modulates `coded` bits into slot `slot`, passes them through the
    /// channel and noise, and returns the demapped LLRs.
    fn run_slot(&self, coded: &[u8], model: &ChannelModel, slot: u64, noise_rng: &mut ChaCha8Rng) -> Result<Vec<T>> {
        let num = self.engine.numerology;
        let slots_per_frame = 10;
        let symbols = self.cfg.modulation.map::<T>(coded)?;
        let dmrs = generate_dmrs::<T>(
            (slot % slots_per_frame) as usize,
            self.cfg.dmrs_scrambling_id,
            self.layout.dmrs_symbol,
            self.layout.num_subcarriers(),
        );
        let grid = map_to_grid(&self.layout, &symbols, &dmrs)?;
        let tx = self.engine.modulate(&grid)?;
        let realization = if self.ideal {
            unit_channel(self.cfg.num_rx, num.slot_len(), self.layout.num_subcarriers(), num.symbols_per_slot)
        } else {
            model.realize::<T>(slot * num.slot_len() as u64, num.slot_len())
        };
        let faded = apply_channel(&tx, &realization)?;
        let mut noise_vars = Vec::with_capacity(faded.len());
        let mut grids = Vec::with_capacity(faded.len());
        for rx in &faded {
            let rx = if self.ideal {
                noise_vars.push(T::lit(IDEAL_NOISE_VAR));
                rx.clone()
            } else {
                let (noisy, n0) = add_awgn(rx, self.cfg.snr_db, noise_rng);
                noise_vars.push(n0);
                noisy
            };
            grids.push(self.engine.demodulate(&rx.samples, self.layout.num_subcarriers())?);
        }
        let eq = mmse_equalize(&grids, &realization, &noise_vars, &self.layout)?;
        Ok(soft_demap(&eq, self.cfg.modulation))
    }
}

fn unit_channel<T: Real>(num_rx: usize, len: usize, num_subcarriers: usize, num_symbols: usize) -> ChannelRealization<T> {
    let one = Complex::new(T::one(), T::zero());
    ChannelRealization {
        delays: vec![0],
        num_rx,
        len,
        tap_gains: vec![one; num_rx * len],
        num_subcarriers,
        num_symbols,
        freq_response: vec![one; num_rx * num_symbols * num_subcarriers],
    }
}
