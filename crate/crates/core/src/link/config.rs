use std::fmt;
use std::str::FromStr;

use crate::channel::{ChannelConfig, Cluster, CDL_A};
use crate::error::{Error, Result};
use crate::ldpc::Segmentation;
use crate::phy_tx::{GridLayout, Modulation, Numerology};

/// Lowest and highest SNR accepted by [`LinkConfig::validate`], in dB.
pub const SNR_RANGE_DB: (f64, f64) = (-10.0, 50.0);

/// SNR points of a standard dataset sweep, in dB.
pub const DEFAULT_SNR_GRID_DB: [f64; 10] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 10.0, 15.0, 18.0, 20.0];

/// Maximum Doppler shifts of a standard dataset sweep, in Hz.
pub const DEFAULT_DOPPLER_GRID_HZ: [f64; 6] = [100.0, 300.0, 350.0, 400.0, 500.0, 750.0];

/// Redundancy versions used by successive HARQ attempts.
pub const RV_SEQUENCE: [u8; 4] = [0, 2, 3, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CyclicPrefix {
    #[default]
    Normal,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MappingType {
    #[default]
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Duplex {
    #[default]
    Fdd,
    Tdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelProfile {
    #[default]
    CdlA,
}

impl ChannelProfile {
    pub fn clusters(self) -> &'static [Cluster] {
        match self {
            ChannelProfile::CdlA => &CDL_A,
        }
    }
}

macro_rules! keyword_enum {
    ($ty:ty, $what:literal, $($variant:path => $name:literal),+) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($variant),)+
                    other => Err(Error::Config(format!("unknown {}: {other}", $what))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self {
                    $($variant => $name,)+
                })
            }
        }
    };
}

keyword_enum!(CyclicPrefix, "cyclic prefix", CyclicPrefix::Normal => "normal", CyclicPrefix::Extended => "extended");
keyword_enum!(MappingType, "mapping type", MappingType::A => "a", MappingType::B => "b");
keyword_enum!(Duplex, "duplex mode", Duplex::Fdd => "fdd", Duplex::Tdd => "tdd");
keyword_enum!(ChannelProfile, "channel profile", ChannelProfile::CdlA => "cdl-a");
keyword_enum!(Modulation, "modulation", Modulation::Qpsk => "qpsk", Modulation::Qam16 => "16qam", Modulation::Qam64 => "64qam");

/// Uplink simulation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub code_rate: f64,
    pub cyclic_prefix: CyclicPrefix,
    pub num_tx: usize,
    pub num_rx: usize,
    pub mapping_type: MappingType,
    pub duplex: Duplex,
    pub num_prb: usize,
    /// Hz.
    pub subcarrier_spacing: f64,
    /// Hz.
    pub bandwidth: f64,
    pub modulation: Modulation,
    pub channel_profile: ChannelProfile,
    /// Seconds.
    pub delay_spread: f64,
    pub snr_db: f64,
    pub doppler_hz: f64,
    pub max_harq_retx: usize,
    pub ldpc_max_iter: usize,
    pub dmrs_scrambling_id: u32,
    pub rng_seed: u64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            code_rate: 600.0 / 1024.0,
            cyclic_prefix: CyclicPrefix::Normal,
            num_tx: 1,
            num_rx: 2,
            mapping_type: MappingType::A,
            duplex: Duplex::Fdd,
            num_prb: 52,
            subcarrier_spacing: 15e3,
            bandwidth: 10e6,
            modulation: Modulation::Qam64,
            channel_profile: ChannelProfile::CdlA,
            delay_spread: 30e-9,
            snr_db: 20.0,
            doppler_hz: 0.0,
            max_harq_retx: 0,
            ldpc_max_iter: 20,
            dmrs_scrambling_id: 0,
            rng_seed: 0,
        }
    }
}

/// Per-slot transport capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    /// Coded bits carried by the data REs of one slot.
    pub g: usize,
    /// Information bits per transport block.
    pub a: usize,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.code_rate > 0.0 && self.code_rate < 1.0) {
            return bad(format!("code rate {} outside (0, 1)", self.code_rate));
        }
        if !(SNR_RANGE_DB.0..=SNR_RANGE_DB.1).contains(&self.snr_db) {
            return bad(format!(
                "SNR {} dB outside supported range [{}, {}]",
                self.snr_db, SNR_RANGE_DB.0, SNR_RANGE_DB.1
            ));
        }
        if !(self.doppler_hz >= 0.0 && self.doppler_hz.is_finite()) {
            return bad(format!("Doppler {} Hz must be >= 0", self.doppler_hz));
        }
        if self.num_tx != 1 {
            return bad(format!("{} transmit antennas; only single-layer uplink is modeled", self.num_tx));
        }
        if self.num_rx == 0 {
            return bad("at least one receive antenna is required".into());
        }
        if self.cyclic_prefix != CyclicPrefix::Normal {
            return bad("only the normal cyclic prefix is modeled".into());
        }
        if self.mapping_type != MappingType::A {
            return bad("only PUSCH mapping type A is modeled".into());
        }
        if self.subcarrier_spacing != 15e3 {
            return bad(format!("subcarrier spacing {} Hz; only 15 kHz is modeled", self.subcarrier_spacing));
        }
        if self.num_prb == 0 || 12.0 * self.num_prb as f64 * self.subcarrier_spacing > self.bandwidth {
            return bad(format!("{} PRBs do not fit {} Hz", self.num_prb, self.bandwidth));
        }
        if self.ldpc_max_iter == 0 {
            return bad("LDPC decoding needs at least one iteration".into());
        }
        if !(self.delay_spread >= 0.0 && self.delay_spread.is_finite()) {
            return bad(format!("delay spread {} must be >= 0", self.delay_spread));
        }
        Ok(())
    }

    pub fn layout(&self) -> GridLayout {
        GridLayout {
            num_prb: self.num_prb,
            ..GridLayout::default()
        }
    }

    /// FFT size and prefixes scaled from the 15 kHz normal-prefix pattern.
    pub fn numerology(&self) -> Numerology {
        let n_sc = 12 * self.num_prb;
        let fft_size = ((n_sc as f64 * 1.2).ceil() as usize).next_power_of_two().max(128);
        Numerology {
            fft_size,
            sample_rate: fft_size as f64 * self.subcarrier_spacing,
            subcarrier_spacing: self.subcarrier_spacing,
            symbols_per_slot: 14,
            cp_long: 10 * fft_size / 128,
            cp_short: 9 * fft_size / 128,
        }
    }

    pub fn channel_config(&self, seed: u64) -> ChannelConfig {
        ChannelConfig {
            profile: self.channel_profile.clusters().to_vec(),
            delay_spread: self.delay_spread,
            max_doppler: self.doppler_hz,
            num_rx: self.num_rx,
            snr_db: self.snr_db,
            rng_seed: seed,
            numerology: self.numerology(),
            num_subcarriers: 12 * self.num_prb,
        }
    }
}

/// Coded bits per slot and the transport-block size that fits them.
pub fn compute_capacity(cfg: &LinkConfig) -> Result<Capacity> {
    cfg.validate()?;
    let g = cfg.layout().data_capacity() * cfg.modulation.bits_per_symbol();
    let budget = (g as f64 * cfg.code_rate).floor() as usize;
    let mut a = budget.saturating_sub(24) / 8 * 8;
    while a > 0 {
        if Segmentation::for_transport_block(a, cfg.code_rate).is_ok() {
            return Ok(Capacity { g, a });
        }
        a -= 8;
    }
    Err(Error::Config(format!("no transport block fits {g} coded bits")))
}
