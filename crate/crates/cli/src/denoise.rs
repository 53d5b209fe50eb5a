use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use rayon::prelude::*;

use nrlink::denoise::{bm3d, estimate_sigma, mean_filter, median_filter};
use nrlink::link::{CLEAN_DIR, MANIFEST_FILE};
use nrlink::ImagePayload;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Mean,
    Median,
    Bm3d,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseOptions {
    pub method: Method,
    pub window: usize,
    /// Noise level for BM3D; estimated per image when absent.
    pub sigma: Option<f64>,
}

pub fn denoise_image(img: &ImagePayload, opts: &DenoiseOptions, label: &str) -> Result<ImagePayload> {
    Ok(match opts.method {
        Method::Mean => mean_filter(img, opts.window)?,
        Method::Median => median_filter(img, opts.window)?,
        Method::Bm3d => {
            let sigma = match opts.sigma {
                Some(s) => s,
                None => {
                    let s = estimate_sigma(img)?;
                    log::info!("{label}: estimated sigma {s:.3}");
                    s
                }
            };
            bm3d(img, sigma)
        }
    })
}

/// Every PNG below `root`, relative to it, sorted.
pub fn relative_pngs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.with_context(|| format!("walking {}", root.display()))?;
        let is_png = entry
            .path()
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if entry.file_type().is_file() && is_png {
            out.push(entry.path().strip_prefix(root)?.to_path_buf());
        }
    }
    Ok(out)
}

pub struct DenoiseSummary {
    pub written: usize,
    pub copied: usize,
    pub failed: Vec<(PathBuf, String)>,
}

/// Filters every PNG under `in_dir` into the same relative path under
/// `out_dir`. A dataset's `clean/` references and manifest are copied as is.
pub fn denoise_tree(in_dir: &Path, out_dir: &Path, opts: &DenoiseOptions, workers: usize) -> Result<DenoiseSummary> {
    let files = relative_pngs(in_dir)?;
    let is_reference = |rel: &Path| rel.starts_with(CLEAN_DIR);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let results: Vec<(PathBuf, bool, Result<()>)> = pool.install(|| {
        files
            .par_iter()
            .map(|rel| {
                let src = in_dir.join(rel);
                let dst = out_dir.join(rel);
                let reference = is_reference(rel);
                let run = || -> Result<()> {
                    if let Some(parent) = dst.parent() {
                        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
                    }
                    if reference {
                        fs::copy(&src, &dst).with_context(|| format!("copying {}", src.display()))?;
                    } else {
                        let img = ImagePayload::read_png(&src)?;
                        denoise_image(&img, opts, &rel.display().to_string())?.write_png(&dst)?;
                    }
                    Ok(())
                };
                (rel.clone(), reference, run())
            })
            .collect()
    });
    let manifest = in_dir.join(MANIFEST_FILE);
    if manifest.is_file() {
        fs::create_dir_all(out_dir)?;
        fs::copy(&manifest, out_dir.join(MANIFEST_FILE))?;
    }
    let mut summary = DenoiseSummary {
        written: 0,
        copied: 0,
        failed: Vec::new(),
    };
    for (rel, reference, result) in results {
        match result {
            Ok(()) if reference => summary.copied += 1,
            Ok(()) => summary.written += 1,
            Err(e) => {
                log::warn!("{}: {e:#}", rel.display());
                summary.failed.push((rel, format!("{e:#}")));
            }
        }
    }
    Ok(summary)
}
