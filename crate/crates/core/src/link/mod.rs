//! End-to-end image transmission over the simulated uplink, and dataset sweeps.

pub mod config;
pub mod simulator;
pub mod sweep;

pub use config::{
    compute_capacity, Capacity, ChannelProfile, CyclicPrefix, Duplex, LinkConfig, MappingType, DEFAULT_DOPPLER_GRID_HZ,
    DEFAULT_SNR_GRID_DB, RV_SEQUENCE, SNR_RANGE_DB,
};
pub use simulator::{LinkReport, LinkSimulator};
pub use sweep::{
    dataset_digest, generate_dataset, group_dir_name, list_pngs, load_images, parse_group_dir, point_seed,
    read_manifest, sweep, write_dataset, write_manifest, DatasetSummary, ManifestRow, NamedImage, SweepOutcome,
    SweepSpec, CLEAN_DIR, MANIFEST_COLUMNS, MANIFEST_FILE,
};

use crate::error::Result;
use crate::transport::ImagePayload;

/// One-shot transmission of `image` under `cfg`.
pub fn transmit_image(image: &ImagePayload, cfg: &LinkConfig) -> Result<(ImagePayload, LinkReport)> {
    LinkSimulator::<f32>::new(cfg.clone())?.transmit_image(image)
}
