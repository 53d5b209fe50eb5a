//! 5G NR uplink image-transmission simulator with classical denoisers and
//! image-quality metrics.

pub mod channel;
pub mod denoise;
pub mod error;
pub mod ldpc;
pub mod link;
pub mod metrics;
pub mod phy_rx;
pub mod phy_tx;
pub mod scalar;
pub mod synthetic;
pub mod transport;

pub use error::{Error, Result};
pub use scalar::Real;
pub use transport::ImagePayload;

pub type ResourceGrid = phy_tx::ResourceGrid<f64>;
pub type ResourceGridF32 = phy_tx::ResourceGrid<f32>;
pub type Waveform = phy_tx::Waveform<f64>;
pub type WaveformF32 = phy_tx::Waveform<f32>;
pub type ChannelRealization = channel::ChannelRealization<f64>;
pub type ChannelRealizationF32 = channel::ChannelRealization<f32>;
pub type EqualizedGrid = phy_rx::EqualizedGrid<f64>;
pub type EqualizedGridF32 = phy_rx::EqualizedGrid<f32>;
pub type LinkSimulator = link::LinkSimulator<f64>;
pub type LinkSimulatorF32 = link::LinkSimulator<f32>;
pub type LayeredDecoder = ldpc::LayeredDecoder<f64>;
pub type LayeredDecoderF32 = ldpc::LayeredDecoder<f32>;
