use serde::Serialize;

use crate::dataset_io::{Annotation, Detection};

use super::iou;

/// Outcome of matching one image's detections against its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    pub iou_threshold: f64,
    /// Per detection, in input order: `true` for a true positive.
    pub detection_tp: Vec<bool>,
    /// Per ground-truth box, in input order: index of the matched detection.
    pub gt_match: Vec<Option<usize>>,
}

impl MatchResult {
    pub fn true_positives(&self) -> usize {
        self.detection_tp.iter().filter(|&&tp| tp).count()
    }

    pub fn false_positives(&self) -> usize {
        self.detection_tp.len() - self.true_positives()
    }

    pub fn false_negatives(&self) -> usize {
        self.gt_match.iter().filter(|m| m.is_none()).count()
    }
}

/// IoU values within this distance count as equal. Box coordinates carry
/// six decimals, so an IoU that is exactly a decimal threshold (7/14 vs 0.5)
/// can land a few ulps below it in floating point.
pub const IOU_TIE_EPS: f64 = 1e-9;

/// Detection indices ordered by confidence, highest first; equal
/// confidences keep input order.
pub fn rank_by_confidence(detections: &[Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&a, &b| detections[b].confidence.total_cmp(&detections[a].confidence));
    order
}

/// Greedy single-assignment matching.
///
/// Detections are visited by descending confidence. Each takes the
/// still-unmatched ground-truth box of its own class with the highest IoU,
/// provided that IoU is at least `iou_threshold` (ties go to the lower GT
/// index). Both comparisons allow [`IOU_TIE_EPS`] of slack. Whatever is left
/// over becomes FP (detections) or FN (ground truth).
pub fn match_detections(gt: &[Annotation], detections: &[Detection], iou_threshold: f64) -> MatchResult {
    let mut detection_tp = vec![false; detections.len()];
    let mut gt_match = vec![None; gt.len()];
    for det_idx in rank_by_confidence(detections) {
        let det = &detections[det_idx];
        let mut best: Option<(usize, f64)> = None;
        for (gt_idx, g) in gt.iter().enumerate() {
            if g.class != det.class || gt_match[gt_idx].is_some() {
                continue;
            }
            let overlap = iou(&g.bbox, &det.bbox);
            if overlap >= iou_threshold - IOU_TIE_EPS && best.is_none_or(|(_, b)| overlap > b + IOU_TIE_EPS) {
                best = Some((gt_idx, overlap));
            }
        }
        if let Some((gt_idx, _)) = best {
            gt_match[gt_idx] = Some(det_idx);
            detection_tp[det_idx] = true;
        }
    }
    MatchResult {
        iou_threshold,
        detection_tp,
        gt_match,
    }
}
