//! Image quality and vision-task metrics.

pub mod detection;
pub mod quality;
pub mod segmentation;

pub use detection::{
    mean_ap, mean_ap_at, parse_detections, read_detections, BBox, Detection, ImageDetections, MeanAp,
    COCO_IOU_THRESHOLDS,
};
pub use quality::{luminance, mse, psnr, psnr_with_peak, ssim};
pub use segmentation::{iou, mean_iou, BinaryMask};
