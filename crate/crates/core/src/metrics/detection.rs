use std::path::Path;

use crate::error::{Error, Result};

/// IoU thresholds 0.50, 0.55, ..., 0.95.
pub const COCO_IOU_THRESHOLDS: [f64; 10] = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

/// Recall sample points of the interpolated precision-recall area.
pub const RECALL_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        if !(x1 < x2 && y1 < y2) {
            return Err(Error::Config(format!("degenerate box ({x1}, {y1}, {x2}, {y2})")));
        }
        Ok(BBox { x1, y1, x2, y2 })
    }

    pub fn area(&self) -> f64 {
        (self.x2 - self.x1) * (self.y2 - self.y1)
    }

    pub fn iou(&self, other: &BBox) -> f64 {
        let w = (self.x2.min(other.x2) - self.x1.max(other.x1)).max(0.0);
        let h = (self.y2.min(other.y2) - self.y1.max(other.y1)).max(0.0);
        let inter = w * h;
        let union = self.area() + other.area() - inter;
        if union > 0.0 {
            inter / union
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub class_id: u32,
    pub bbox: BBox,
    /// Confidence in `[0, 1]`; ground truth carries 1.
    pub confidence: f64,
}

/// Predictions and ground truth for one image.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImageDetections {
    pub predictions: Vec<Detection>,
    pub ground_truth: Vec<Detection>,
}

/// mAP at IoU 0.5 and averaged over 0.5:0.05:0.95.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanAp {
    pub map50: f64,
    pub map50_95: f64,
}

/// Reads `class_id x1 y1 x2 y2 [confidence]` lines; blank lines and `#`
/// comments are skipped.
pub fn read_detections(path: impl AsRef<Path>) -> Result<Vec<Detection>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_detections(&text).map_err(|msg| Error::Parse {
        path: path.to_path_buf(),
        msg,
    })
}

pub fn parse_detections(text: &str) -> std::result::Result<Vec<Detection>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(5..=6).contains(&fields.len()) {
            return Err(format!("line {}: expected 5 or 6 fields, found {}", n + 1, fields.len()));
        }
        let class_id = fields[0]
            .parse::<u32>()
            .map_err(|e| format!("line {}: class id: {e}", n + 1))?;
        let mut v = [0.0; 5];
        for (slot, f) in v.iter_mut().zip(&fields[1..]) {
            *slot = f.parse::<f64>().map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        let confidence = if fields.len() == 6 { v[4] } else { 1.0 };
        if !(0.0..=1.0).contains(&confidence) {
            return Err(format!("line {}: confidence {confidence} outside [0, 1]", n + 1));
        }
        let bbox = BBox::new(v[0], v[1], v[2], v[3]).map_err(|e| format!("line {}: {e}", n + 1))?;
        out.push(Detection {
            class_id,
            bbox,
            confidence,
        });
    }
    Ok(out)
}

/// Confidence-descending greedy matching inside one image for one class:
/// returns `(confidence, true_positive)` per prediction.
fn match_image(preds: &[&Detection], gts: &[&Detection], threshold: f64) -> Vec<(f64, bool)> {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].confidence.total_cmp(&preds[a].confidence));
    let mut taken = vec![false; gts.len()];
    order
        .into_iter()
        .map(|i| {
            let mut best = None;
            let mut best_iou = threshold;
            for (j, g) in gts.iter().enumerate() {
                if taken[j] {
                    continue;
                }
                let v = preds[i].bbox.iou(&g.bbox);
                if v >= best_iou {
                    best_iou = v;
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                taken[j] = true;
            }
            (preds[i].confidence, best.is_some())
        })
        .collect()
}

/// Area under the 101-point interpolated precision-recall curve.
fn average_precision(mut scored: Vec<(f64, bool)>, num_gt: usize) -> f64 {
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut precision = Vec::with_capacity(scored.len());
    let mut recall = Vec::with_capacity(scored.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for &(_, hit) in &scored {
        if hit {
            tp += 1;
        } else {
            fp += 1;
        }
        precision.push(tp as f64 / (tp + fp) as f64);
        recall.push(tp as f64 / num_gt as f64);
    }
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut sum = 0.0;
    for r in 0..RECALL_POINTS {
        let target = r as f64 / (RECALL_POINTS - 1) as f64;
        let idx = recall.partition_point(|&v| v < target);
        if idx < precision.len() {
            sum += precision[idx];
        }
    }
    sum / RECALL_POINTS as f64
}

/// Mean over ground-truth classes of the AP at each IoU threshold.
pub fn mean_ap_at(images: &[ImageDetections], thresholds: &[f64]) -> Vec<f64> {
    let mut classes: Vec<u32> = images
        .iter()
        .flat_map(|im| im.ground_truth.iter().map(|d| d.class_id))
        .collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.is_empty() {
        log::warn!("no ground-truth objects; mAP reported as 0");
        return vec![0.0; thresholds.len()];
    }
    thresholds
        .iter()
        .map(|&t| {
            let total: f64 = classes
                .iter()
                .map(|&c| {
                    let mut scored = Vec::new();
                    let mut num_gt = 0;
                    for im in images {
                        let preds: Vec<&Detection> = im.predictions.iter().filter(|d| d.class_id == c).collect();
                        let gts: Vec<&Detection> = im.ground_truth.iter().filter(|d| d.class_id == c).collect();
                        num_gt += gts.len();
                        scored.extend(match_image(&preds, &gts, t));
                    }
                    average_precision(scored, num_gt)
                })
                .sum();
            total / classes.len() as f64
        })
        .collect()
}

pub fn mean_ap(images: &[ImageDetections]) -> MeanAp {
    let per = mean_ap_at(images, &COCO_IOU_THRESHOLDS);
    MeanAp {
        map50: per[0],
        map50_95: per.iter().sum::<f64>() / per.len() as f64,
    }
}
