use std::collections::HashSet;
use std::fs;
use std::hash::Hasher;
use std::io::Read;
use std::path::{Path, PathBuf};

use fnv::FnvHasher;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::LinkConfig;
use super::simulator::{LinkReport, LinkSimulator};
use crate::error::{Error, Result};
use crate::metrics::psnr;
use crate::transport::ImagePayload;

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const CLEAN_DIR: &str = "clean";
pub const MANIFEST_COLUMNS: [&str; 9] = [
    "image_stem",
    "width",
    "height",
    "snr_db",
    "doppler_hz",
    "seed",
    "bler",
    "bit_errors",
    "psnr_vs_clean",
];

/// Grid of operating points swept for every image.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Everything except SNR, Doppler and seed, which each point overrides.
    pub base: LinkConfig,
    pub snr_db: Vec<f64>,
    pub doppler_hz: Vec<f64>,
    pub base_seed: u64,
    /// Concurrent points; 0 means one per available core.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedImage {
    pub stem: String,
    pub image: ImagePayload,
}

/// One simulated (image, SNR, Doppler) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub image_index: usize,
    pub stem: String,
    pub snr_db: f64,
    pub doppler_hz: f64,
    pub seed: u64,
    pub received: ImagePayload,
    pub report: LinkReport,
    pub psnr_vs_clean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub image_stem: String,
    pub width: usize,
    pub height: usize,
    pub snr_db: f64,
    pub doppler_hz: f64,
    pub seed: u64,
    pub bler: f64,
    pub bit_errors: u64,
    pub psnr_vs_clean: f64,
}

impl From<&SweepOutcome> for ManifestRow {
    fn from(o: &SweepOutcome) -> Self {
        ManifestRow {
            image_stem: o.stem.clone(),
            width: o.received.width,
            height: o.received.height,
            snr_db: o.snr_db,
            doppler_hz: o.doppler_hz,
            seed: o.seed,
            bler: o.report.bler,
            bit_errors: o.report.bit_errors,
            psnr_vs_clean: o.psnr_vs_clean,
        }
    }
}

/// FNV-1a over the little-endian encoding of the base seed, the image stem
/// (length-prefixed), and the bit patterns of SNR and Doppler.
pub fn point_seed(base_seed: u64, image_stem: &str, snr_db: f64, doppler_hz: f64) -> u64 {
    let mut h = FnvHasher::default();
    h.write(&base_seed.to_le_bytes());
    h.write(&(image_stem.len() as u64).to_le_bytes());
    h.write(image_stem.as_bytes());
    h.write(&snr_db.to_bits().to_le_bytes());
    h.write(&doppler_hz.to_bits().to_le_bytes());
    h.finish()
}

/// Directory holding the received images of one operating point.
pub fn group_dir_name(snr_db: f64, doppler_hz: f64) -> String {
    format!("snr{snr_db}_dop{doppler_hz}")
}

/// Inverse of [`group_dir_name`].
pub fn parse_group_dir(name: &str) -> Option<(f64, f64)> {
    let rest = name.strip_prefix("snr")?;
    let (snr, dop) = rest.split_once("_dop")?;
    Some((snr.parse().ok()?, dop.parse().ok()?))
}

/// Runs every (image, SNR, Doppler) point on a bounded pool and hands each
/// outcome to `sink`. Rows come back in image, SNR, Doppler order.
pub fn sweep<F>(images: &[NamedImage], spec: &SweepSpec, sink: F) -> Result<Vec<ManifestRow>>
where
    F: Fn(&SweepOutcome) -> Result<()> + Sync,
{
    if spec.snr_db.is_empty() || spec.doppler_hz.is_empty() {
        return Err(Error::Config("sweep needs at least one SNR and one Doppler value".into()));
    }
    let mut seen = HashSet::new();
    for im in images {
        if !seen.insert(im.stem.as_str()) {
            return Err(Error::Config(format!("duplicate image stem {}", im.stem)));
        }
    }
    let points: Vec<(usize, f64, f64)> = (0..images.len())
        .flat_map(|i| {
            spec.snr_db
                .iter()
                .flat_map(move |&s| spec.doppler_hz.iter().map(move |&d| (i, s, d)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        points
            .par_iter()
            .map(|&(i, snr_db, doppler_hz)| {
                let named = &images[i];
                let seed = point_seed(spec.base_seed, &named.stem, snr_db, doppler_hz);
                let cfg = LinkConfig {
                    snr_db,
                    doppler_hz,
                    rng_seed: seed,
                    ..spec.base.clone()
                };
                let mut sim = LinkSimulator::<f32>::new(cfg)?;
                let (received, report) = sim.transmit_image(&named.image)?;
                let outcome = SweepOutcome {
                    image_index: i,
                    stem: named.stem.clone(),
                    snr_db,
                    doppler_hz,
                    seed,
                    psnr_vs_clean: psnr(&named.image, &received)?,
                    received,
                    report,
                };
                log::debug!(
                    "{} snr={snr_db} dop={doppler_hz}: bler={:.3} psnr={:.2}",
                    named.stem,
                    outcome.report.bler,
                    outcome.psnr_vs_clean
                );
                sink(&outcome)?;
                Ok(ManifestRow::from(&outcome))
            })
            .collect()
    })
}

/// Images that could not be used, with the reason.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetSummary {
    pub rows: Vec<ManifestRow>,
    pub skipped: Vec<(PathBuf, String)>,
}

/// Loads PNG inputs, skipping unreadable ones with a warning.
pub fn load_images(paths: &[PathBuf]) -> (Vec<NamedImage>, Vec<(PathBuf, String)>) {
    let mut images = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        match (stem, ImagePayload::read_png(path)) {
            (Some(stem), Ok(image)) => images.push(NamedImage { stem, image }),
            (_, Err(e)) => {
                log::warn!("skipping {}: {e}", path.display());
                skipped.push((path.clone(), e.to_string()));
            }
            (None, Ok(_)) => skipped.push((path.clone(), "no file stem".into())),
        }
    }
    (images, skipped)
}

/// PNG files directly inside `dir`, sorted by name.
pub fn list_pngs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if path.is_file() && is_png {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Writes `clean/`, one `snr{S}_dop{D}/` directory per point and `manifest.csv`.
pub fn write_dataset(images: &[NamedImage], out_dir: &Path, spec: &SweepSpec) -> Result<Vec<ManifestRow>> {
    let clean = out_dir.join(CLEAN_DIR);
    fs::create_dir_all(&clean).map_err(|e| Error::io(&clean, e))?;
    for im in images {
        im.image.write_png(clean.join(format!("{}.png", im.stem)))?;
    }
    for &s in &spec.snr_db {
        for &d in &spec.doppler_hz {
            let dir = out_dir.join(group_dir_name(s, d));
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    let rows = sweep(images, spec, |o| {
        let path = out_dir
            .join(group_dir_name(o.snr_db, o.doppler_hz))
            .join(format!("{}.png", o.stem));
        o.received.write_png(path)
    })?;
    write_manifest(&out_dir.join(MANIFEST_FILE), &rows)?;
    Ok(rows)
}

/// Builds a dataset from the PNGs in `in_dir`.
pub fn generate_dataset(in_dir: &Path, out_dir: &Path, spec: &SweepSpec) -> Result<DatasetSummary> {
    let (images, skipped) = load_images(&list_pngs(in_dir)?);
    if images.is_empty() {
        return Err(Error::Config(format!("no readable PNG images in {}", in_dir.display())));
    }
    let rows = write_dataset(&images, out_dir, spec)?;
    Ok(DatasetSummary { rows, skipped })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(MANIFEST_COLUMNS).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record([
            r.image_stem.clone(),
            r.width.to_string(),
            r.height.to_string(),
            r.snr_db.to_string(),
            r.doppler_hz.to_string(),
            r.seed.to_string(),
            r.bler.to_string(),
            r.bit_errors.to_string(),
            r.psnr_vs_clean.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header != MANIFEST_COLUMNS {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            msg: format!("unexpected header {header:?}"),
        });
    }
    let bad = |line: usize, what: &str| Error::Parse {
        path: path.to_path_buf(),
        msg: format!("record {line}: bad {what}"),
    };
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            let f = |k: usize| rec.get(k).unwrap_or_default();
            Ok(ManifestRow {
                image_stem: f(0).to_owned(),
                width: f(1).parse().map_err(|_| bad(i + 1, "width"))?,
                height: f(2).parse().map_err(|_| bad(i + 1, "height"))?,
                snr_db: f(3).parse().map_err(|_| bad(i + 1, "snr_db"))?,
                doppler_hz: f(4).parse().map_err(|_| bad(i + 1, "doppler_hz"))?,
                seed: f(5).parse().map_err(|_| bad(i + 1, "seed"))?,
                bler: f(6).parse().map_err(|_| bad(i + 1, "bler"))?,
                bit_errors: f(7).parse().map_err(|_| bad(i + 1, "bit_errors"))?,
                psnr_vs_clean: f(8).parse().map_err(|_| bad(i + 1, "psnr_vs_clean"))?,
            })
        })
        .collect()
}

/// SHA-256 over every file below `dir`, keyed by relative path, in sorted order.
pub fn dataset_digest(dir: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Config(format!("walking {}: {e}", dir.display())))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(dir).unwrap_or(entry.path());
        let rel = rel.to_string_lossy().replace('\\', "/");
        hasher.update((rel.len() as u64).to_le_bytes());
        hasher.update(rel.as_bytes());
        let mut bytes = Vec::new();
        fs::File::open(entry.path())
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(entry.path(), e))?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(format!("{:x}", hasher.finalize()))
}
