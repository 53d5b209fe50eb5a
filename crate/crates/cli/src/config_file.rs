//! Flat `key = value` configuration for dataset generation.
//!
//! Keys mirror [`LinkConfig`] fields; `snr_db` and `doppler_hz` take
//! comma-separated lists, `seed` sets the base seed and `workers` the pool
//! size. Blank lines and `#` comments are ignored.

use std::collections::HashSet;
use std::str::FromStr;

use nrlink::link::{LinkConfig, DEFAULT_DOPPLER_GRID_HZ, DEFAULT_SNR_GRID_DB, SNR_RANGE_DB};

use crate::UsageError;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateSettings {
    pub link: LinkConfig,
    pub snr_db: Vec<f64>,
    pub doppler_hz: Vec<f64>,
    pub seed: u64,
    pub workers: usize,
}

impl Default for GenerateSettings {
    fn default() -> Self {
        GenerateSettings {
            link: LinkConfig::default(),
            snr_db: DEFAULT_SNR_GRID_DB.to_vec(),
            doppler_hz: DEFAULT_DOPPLER_GRID_HZ.to_vec(),
            seed: 0,
            workers: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, UsageError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| UsageError(format!("{key}: cannot parse {value:?}: {e}")))
}

/// Accepts `0.5859375` as well as `600/1024`.
fn parse_rate(value: &str) -> Result<f64, UsageError> {
    match value.split_once('/') {
        Some((n, d)) => {
            let n: f64 = parse_value("code_rate", n.trim())?;
            let d: f64 = parse_value("code_rate", d.trim())?;
            Ok(n / d)
        }
        None => parse_value("code_rate", value),
    }
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, UsageError> {
    let values = value
        .split(',')
        .map(|v| parse_value::<f64>(key, v.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(UsageError(format!("{key}: empty list")));
    }
    Ok(values)
}

pub fn parse_config(text: &str) -> Result<GenerateSettings, UsageError> {
    let mut s = GenerateSettings::default();
    let mut seen = HashSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("line {}: expected key = value", n + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_owned()) {
            return Err(UsageError(format!("line {}: duplicate key {key}", n + 1)));
        }
        let link = &mut s.link;
        match key {
            "code_rate" => link.code_rate = parse_rate(value)?,
            "cyclic_prefix" => link.cyclic_prefix = parse_value(key, value)?,
            "num_tx" => link.num_tx = parse_value(key, value)?,
            "num_rx" => link.num_rx = parse_value(key, value)?,
            "mapping_type" => link.mapping_type = parse_value(key, value)?,
            "duplex" => link.duplex = parse_value(key, value)?,
            "num_prb" => link.num_prb = parse_value(key, value)?,
            "subcarrier_spacing" => link.subcarrier_spacing = parse_value(key, value)?,
            "bandwidth" => link.bandwidth = parse_value(key, value)?,
            "modulation" => link.modulation = parse_value(key, value)?,
            "channel_profile" => link.channel_profile = parse_value(key, value)?,
            "delay_spread" => link.delay_spread = parse_value(key, value)?,
            "max_harq_retx" => link.max_harq_retx = parse_value(key, value)?,
            "ldpc_max_iter" => link.ldpc_max_iter = parse_value(key, value)?,
            "dmrs_scrambling_id" => link.dmrs_scrambling_id = parse_value(key, value)?,
            "snr_db" => s.snr_db = parse_list(key, value)?,
            "doppler_hz" => s.doppler_hz = parse_list(key, value)?,
            "seed" | "rng_seed" => s.seed = parse_value(key, value)?,
            "workers" => s.workers = parse_value(key, value)?,
            other => return Err(UsageError(format!("line {}: unknown key {other}", n + 1))),
        }
    }
    Ok(s)
}

impl GenerateSettings {
    /// Checks every operating point of the grid against the link limits.
    pub fn validate(&self) -> Result<(), UsageError> {
        if self.snr_db.is_empty() || self.doppler_hz.is_empty() {
            return Err(UsageError("need at least one SNR and one Doppler value".into()));
        }
        for &snr in &self.snr_db {
            if !(SNR_RANGE_DB.0..=SNR_RANGE_DB.1).contains(&snr) {
                return Err(UsageError(format!(
                    "SNR {snr} dB outside [{}, {}]",
                    SNR_RANGE_DB.0, SNR_RANGE_DB.1
                )));
            }
        }
        for &d in &self.doppler_hz {
            let point = LinkConfig {
                snr_db: self.snr_db[0],
                doppler_hz: d,
                ..self.link.clone()
            };
            point.validate().map_err(|e| UsageError(e.to_string()))?;
        }
        Ok(())
    }
}
