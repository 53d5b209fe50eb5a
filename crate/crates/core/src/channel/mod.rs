//! CDL fading with Doppler over a tapped delay line, and additive noise.

pub mod awgn;
pub mod cdl;
pub mod model;

pub use awgn::{add_awgn, noise_variance};
pub use cdl::{normalized_powers, Cluster, CDL_A};
pub use model::{
    apply_channel, realize_channel, ChannelConfig, ChannelModel, ChannelRealization, Tap,
    GAIN_KNOT_SPACING, NUM_SINUSOIDS,
};
