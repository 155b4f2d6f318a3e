//! Detector evaluation: IoU, greedy matching, precision/recall curves,
//! all-point AP and mAP at 0.5 and averaged over 0.5:0.95.

mod curve;
mod iou;
mod matching;
mod report;

use thiserror::Error;

pub use curve::{average_precision, pr_curve, PrCurve, PrPoint};
pub use iou::iou;
pub use matching::{match_detections, rank_by_confidence, MatchResult, IOU_TIE_EPS};
pub use report::{
    evaluate, mean_ap, ClassReport, Counts, EvalParams, EvalReport, ExcludedClass, ImageSet, OperatingPoint,
    ThresholdMap, COCO_IOU_THRESHOLDS, PRIMARY_IOU,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("detections reference image {0:?} which has no ground truth")]
    UnknownImage(String),
    #[error("IoU threshold {0} is outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("class has no ground-truth instances; AP is undefined")]
    NoGroundTruth,
}
