//! Quality report of a directory of test images against clean references.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use nrlink::link::{parse_group_dir, CLEAN_DIR};
use nrlink::metrics::{iou, mean_ap, psnr, read_detections, ssim, BinaryMask, ImageDetections};
use nrlink::ImagePayload;

use crate::denoise::relative_pngs;

pub const REPORT_COLUMNS: [&str; 11] = [
    "kind",
    "group",
    "image_stem",
    "snr_db",
    "doppler_hz",
    "count",
    "psnr",
    "ssim",
    "iou",
    "map50",
    "map50_95",
];

#[derive(Debug, Clone, Default)]
pub struct EvaluateInputs {
    pub clean_dir: PathBuf,
    pub test_dir: PathBuf,
    /// Reference masks, `{stem}.png`.
    pub gt_masks: Option<PathBuf>,
    /// Predicted masks at the same relative path as each test image.
    pub masks: Option<PathBuf>,
    /// Reference detections, `{stem}.txt`.
    pub gt_detections: Option<PathBuf>,
    /// Predicted detections at the same relative path as each test image, `.txt`.
    pub detections: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowKind {
    Image,
    Group,
    Missing,
}

impl RowKind {
    fn as_str(self) -> &'static str {
        match self {
            RowKind::Image => "image",
            RowKind::Group => "group",
            RowKind::Missing => "missing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub kind: RowKind,
    pub group: String,
    pub image_stem: String,
    pub snr_db: Option<f64>,
    pub doppler_hz: Option<f64>,
    pub count: usize,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub iou: Option<f64>,
    pub map50: Option<f64>,
    pub map50_95: Option<f64>,
}

impl ReportRow {
    fn record(&self) -> Vec<String> {
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.kind.as_str().to_owned(),
            self.group.clone(),
            self.image_stem.clone(),
            num(self.snr_db),
            num(self.doppler_hz),
            self.count.to_string(),
            num(self.psnr),
            num(self.ssim),
            num(self.iou),
            num(self.map50),
            num(self.map50_95),
        ]
    }
}

struct Scored {
    row: ReportRow,
    detections: Option<ImageDetections>,
}

fn with_ext(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn score_masks(inputs: &EvaluateInputs, rel: &Path, stem: &str) -> Result<Option<f64>> {
    let (Some(gt_dir), Some(pred_dir)) = (&inputs.gt_masks, &inputs.masks) else {
        return Ok(None);
    };
    let gt_path = gt_dir.join(format!("{stem}.png"));
    let pred_path = pred_dir.join(rel);
    if !gt_path.is_file() || !pred_path.is_file() {
        log::warn!("{}: mask pair incomplete", rel.display());
        return Ok(None);
    }
    let gt = BinaryMask::read_png(&gt_path)?;
    let pred = BinaryMask::read_png(&pred_path)?;
    Ok(Some(iou(&pred, &gt)?))
}

fn load_detections(inputs: &EvaluateInputs, rel: &Path, stem: &str) -> Result<Option<ImageDetections>> {
    let (Some(gt_dir), Some(pred_dir)) = (&inputs.gt_detections, &inputs.detections) else {
        return Ok(None);
    };
    let gt_path = gt_dir.join(format!("{stem}.txt"));
    let pred_path = with_ext(&pred_dir.join(rel), "txt");
    if !gt_path.is_file() {
        log::warn!("{}: no reference detections", rel.display());
        return Ok(None);
    }
    let ground_truth = read_detections(&gt_path)?;
    let predictions = if pred_path.is_file() {
        read_detections(&pred_path)?
    } else {
        Vec::new()
    };
    Ok(Some(ImageDetections {
        predictions,
        ground_truth,
    }))
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Scores every test PNG against `clean_dir/{stem}.png` and aggregates per
/// group directory. Unmatched stems become `missing` rows.
pub fn evaluate(inputs: &EvaluateInputs) -> Result<Vec<ReportRow>> {
    let clean_dir = &inputs.clean_dir;
    let test_dir = &inputs.test_dir;
    for dir in [clean_dir, test_dir] {
        anyhow::ensure!(dir.is_dir(), "{} is not a directory", dir.display());
    }
    let same_tree = clean_dir.canonicalize()? == test_dir.canonicalize()?;
    let clean_stems: BTreeSet<String> = nrlink::link::list_pngs(clean_dir)?
        .iter()
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();

    let mut by_group: BTreeMap<String, Vec<Scored>> = BTreeMap::new();
    let mut missing = Vec::new();
    for rel in relative_pngs(test_dir)? {
        if !same_tree && rel.starts_with(CLEAN_DIR) {
            continue;
        }
        let group = rel
            .parent()
            .map(|p| p.to_string_lossy().into_owned())
            .unwrap_or_default();
        let stem = rel
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let point = rel
            .parent()
            .and_then(|p| p.file_name())
            .and_then(|n| parse_group_dir(&n.to_string_lossy()));
        let mut row = ReportRow {
            kind: RowKind::Image,
            group: group.clone(),
            image_stem: stem.clone(),
            snr_db: point.map(|p| p.0),
            doppler_hz: point.map(|p| p.1),
            count: 1,
            psnr: None,
            ssim: None,
            iou: None,
            map50: None,
            map50_95: None,
        };
        if !clean_stems.contains(&stem) {
            log::warn!("{}: no clean reference", rel.display());
            row.kind = RowKind::Missing;
            row.count = 0;
            missing.push(row);
            continue;
        }
        let clean = ImagePayload::read_png(clean_dir.join(format!("{stem}.png")))?;
        let test = ImagePayload::read_png(test_dir.join(&rel)).with_context(|| rel.display().to_string())?;
        row.psnr = Some(psnr(&clean, &test)?);
        row.ssim = Some(ssim(&clean, &test)?);
        row.iou = score_masks(inputs, &rel, &stem)?;
        let detections = load_detections(inputs, &rel, &stem)?;
        if let Some(d) = &detections {
            let ap = mean_ap(std::slice::from_ref(d));
            row.map50 = Some(ap.map50);
            row.map50_95 = Some(ap.map50_95);
        }
        by_group.entry(group).or_default().push(Scored { row, detections });
    }

    let mut rows = Vec::new();
    let mut group_rows = Vec::new();
    for (group, scored) in &by_group {
        let present: BTreeSet<&str> = scored.iter().map(|s| s.row.image_stem.as_str()).collect();
        for stem in clean_stems.iter().filter(|s| !present.contains(s.as_str())) {
            missing.push(ReportRow {
                kind: RowKind::Missing,
                group: group.clone(),
                image_stem: stem.clone(),
                snr_db: scored[0].row.snr_db,
                doppler_hz: scored[0].row.doppler_hz,
                count: 0,
                psnr: None,
                ssim: None,
                iou: None,
                map50: None,
                map50_95: None,
            });
        }
        let pooled: Vec<ImageDetections> = scored.iter().filter_map(|s| s.detections.clone()).collect();
        let ap = (!pooled.is_empty()).then(|| mean_ap(&pooled));
        group_rows.push(ReportRow {
            kind: RowKind::Group,
            group: group.clone(),
            image_stem: String::new(),
            snr_db: scored[0].row.snr_db,
            doppler_hz: scored[0].row.doppler_hz,
            count: scored.len(),
            psnr: mean(scored.iter().map(|s| s.row.psnr)),
            ssim: mean(scored.iter().map(|s| s.row.ssim)),
            iou: mean(scored.iter().map(|s| s.row.iou)),
            map50: ap.map(|a| a.map50),
            map50_95: ap.map(|a| a.map50_95),
        });
        rows.extend(scored.iter().map(|s| s.row.clone()));
    }
    rows.extend(group_rows);
    rows.extend(missing);
    Ok(rows)
}

pub fn write_report<W: Write>(out: W, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}
