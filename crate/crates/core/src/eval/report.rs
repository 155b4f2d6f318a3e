use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset_io::{Annotation, ClassLabel, Detection};

use super::{average_precision, match_detections, pr_curve, EvalError, MatchResult, PrPoint};

/// IoU thresholds 0.50, 0.55, ..., 0.95 averaged for mAP@[.5:.95].
pub const COCO_IOU_THRESHOLDS: [f64; 10] = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

/// Threshold for mAP@0.5 and the scalar precision/recall operating point.
pub const PRIMARY_IOU: f64 = 0.5;

/// Per-image boxes keyed by image id. Iteration order is the id order, which
/// makes every result independent of how the caller collected the images.
pub type ImageSet<T> = BTreeMap<String, Vec<T>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    /// Extra thresholds to report alongside the standard ten.
    pub iou_thresholds: Vec<f64>,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            iou_thresholds: COCO_IOU_THRESHOLDS.to_vec(),
        }
    }
}

impl EvalParams {
    /// Sorted, deduplicated union of the standard and requested thresholds.
    pub fn thresholds(&self) -> Result<Vec<f64>, EvalError> {
        for &t in &self.iou_thresholds {
            if !(t > 0.0 && t < 1.0) {
                return Err(EvalError::InvalidThreshold(t));
            }
        }
        let mut all: Vec<f64> = COCO_IOU_THRESHOLDS
            .iter()
            .chain(&self.iou_thresholds)
            .copied()
            .collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        Ok(all)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: ClassLabel,
    pub num_gt: u64,
    pub num_detections: u64,
    pub ap50: f64,
    pub ap50_95: f64,
    /// Aligned with `EvalReport::iou_thresholds`.
    pub ap_by_threshold: Vec<f64>,
    /// Counts at IoU 0.5 over all detections.
    pub counts: Counts,
    /// Precision/recall after each ranked detection, at IoU 0.5.
    pub pr_curve: Vec<PrPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedClass {
    pub class: ClassLabel,
    pub num_detections: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub iou_threshold: f64,
    pub selection: String,
    /// Lowest confidence kept; `None` when there are no detections.
    pub confidence_cutoff: Option<f64>,
    pub f1: f64,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMap {
    pub iou_threshold: f64,
    pub map: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub matching: String,
    pub interpolation: String,
    pub iou_thresholds: Vec<f64>,
    pub num_images: u64,
    pub precision: f64,
    pub precision_defined: bool,
    pub recall: f64,
    pub recall_defined: bool,
    pub map50: f64,
    pub map50_95: f64,
    pub map_defined: bool,
    pub operating_point: OperatingPoint,
    pub map_by_threshold: Vec<ThresholdMap>,
    pub classes: Vec<ClassReport>,
    pub excluded_classes: Vec<ExcludedClass>,
    /// Counts at IoU 0.5 over all detections, summed over classes.
    pub totals: Counts,
    pub notes: Vec<String>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Mean of per-class APs, the definition of mAP used throughout the report.
pub fn mean_ap(aps: &[f64]) -> f64 {
    mean(aps.iter().copied())
}

struct Scored {
    confidence: f64,
    class: ClassLabel,
    is_tp: bool,
}

/// Match every image at one threshold. Output is in image-id order, then
/// detection input order, whatever the thread count.
fn scored_detections(images: &[(&String, &[Annotation], &[Detection])], threshold: f64) -> Vec<Vec<Scored>> {
    images
        .par_iter()
        .map(|(_, gt, det)| {
            let m: MatchResult = match_detections(gt, det, threshold);
            det.iter()
                .zip(&m.detection_tp)
                .map(|(d, &is_tp)| Scored {
                    confidence: d.confidence,
                    class: d.class,
                    is_tp,
                })
                .collect()
        })
        .collect()
}

fn class_ap(
    per_image: &[Vec<Scored>],
    class: ClassLabel,
    num_gt: u64,
) -> Result<(f64, Counts, Vec<PrPoint>), EvalError> {
    let mut ranked: Vec<(f64, bool)> = per_image
        .iter()
        .flatten()
        .filter(|s| s.class == class)
        .map(|s| (s.confidence, s.is_tp))
        .collect();
    // stable: equal confidences stay in image-id, then input, order
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let flags: Vec<bool> = ranked.iter().map(|r| r.1).collect();
    let tp = flags.iter().filter(|&&f| f).count() as u64;
    let counts = Counts {
        tp,
        fp: flags.len() as u64 - tp,
        fn_: num_gt - tp,
    };
    let curve = pr_curve(&flags, num_gt)?;
    Ok((average_precision(&curve), counts, curve.points))
}

/// Pooled precision/recall at the confidence cutoff with the best F1.
/// Equal confidences are kept or dropped together; among equal F1 values
/// the highest cutoff wins.
fn operating_point(per_image: &[Vec<Scored>], total_gt: u64) -> OperatingPoint {
    let mut ranked: Vec<(f64, bool)> = per_image.iter().flatten().map(|s| (s.confidence, s.is_tp)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = OperatingPoint {
        iou_threshold: PRIMARY_IOU,
        selection: "max_f1".to_string(),
        confidence_cutoff: None,
        f1: 0.0,
        counts: Counts {
            tp: 0,
            fp: 0,
            fn_: total_gt,
        },
    };
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    let mut best_f1 = f64::NEG_INFINITY;
    while i < ranked.len() {
        let cutoff = ranked[i].0;
        while i < ranked.len() && ranked[i].0 == cutoff {
            if ranked[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let f1 = if total_gt + tp + fp == 0 {
            0.0
        } else {
            // F1 = 2PR/(P+R) = 2TP / (2TP + FP + FN)
            2.0 * tp as f64 / (tp + fp + total_gt) as f64
        };
        if f1 > best_f1 {
            best_f1 = f1;
            best.confidence_cutoff = Some(cutoff);
            best.f1 = f1;
            best.counts = Counts {
                tp,
                fp,
                fn_: total_gt - tp,
            };
        }
    }
    best
}

/// Evaluate detections against ground truth.
///
/// Every image in `detections` must also appear in `ground_truth`; images
/// without detections simply contribute false negatives. Classes with no
/// ground truth are excluded from mAP and listed in `excluded_classes`.
pub fn evaluate(
    ground_truth: &ImageSet<Annotation>,
    detections: &ImageSet<Detection>,
    params: &EvalParams,
) -> Result<EvalReport, EvalError> {
    if let Some(id) = detections.keys().find(|id| !ground_truth.contains_key(*id)) {
        return Err(EvalError::UnknownImage(id.clone()));
    }
    let thresholds = params.thresholds()?;
    let empty: Vec<Detection> = Vec::new();
    let images: Vec<(&String, &[Annotation], &[Detection])> = ground_truth
        .iter()
        .map(|(id, gt)| (id, gt.as_slice(), detections.get(id).unwrap_or(&empty).as_slice()))
        .collect();

    let mut num_gt = [0u64; ClassLabel::COUNT];
    let mut num_det = [0u64; ClassLabel::COUNT];
    for (_, gt, det) in &images {
        for a in gt.iter() {
            num_gt[a.class.index()] += 1;
        }
        for d in det.iter() {
            num_det[d.class.index()] += 1;
        }
    }
    let evaluated: Vec<ClassLabel> = ClassLabel::ALL.into_iter().filter(|c| num_gt[c.index()] > 0).collect();

    // ap[class_pos][threshold_pos]
    let mut ap = vec![vec![0.0; thresholds.len()]; evaluated.len()];
    let mut counts50 = vec![Counts::default(); evaluated.len()];
    let mut curves50 = vec![Vec::new(); evaluated.len()];
    let mut op_point = None;
    for (ti, &t) in thresholds.iter().enumerate() {
        let per_image = scored_detections(&images, t);
        for (ci, &class) in evaluated.iter().enumerate() {
            let (value, counts, curve) = class_ap(&per_image, class, num_gt[class.index()])?;
            ap[ci][ti] = value;
            if t == PRIMARY_IOU {
                counts50[ci] = counts;
                curves50[ci] = curve;
            }
        }
        if t == PRIMARY_IOU {
            op_point = Some(operating_point(&per_image, num_gt.iter().sum()));
        }
    }
    let op_point = op_point.expect("standard thresholds include 0.5");
    let primary_pos = thresholds.iter().position(|&t| t == PRIMARY_IOU).expect("0.5 present");
    let coco_pos: Vec<usize> = COCO_IOU_THRESHOLDS
        .iter()
        .map(|t| {
            thresholds
                .iter()
                .position(|x| x == t)
                .expect("standard thresholds present")
        })
        .collect();

    let classes: Vec<ClassReport> = evaluated
        .iter()
        .enumerate()
        .map(|(ci, &class)| ClassReport {
            class,
            num_gt: num_gt[class.index()],
            num_detections: num_det[class.index()],
            ap50: ap[ci][primary_pos],
            ap50_95: mean(coco_pos.iter().map(|&ti| ap[ci][ti])),
            ap_by_threshold: ap[ci].clone(),
            counts: counts50[ci],
            pr_curve: std::mem::take(&mut curves50[ci]),
        })
        .collect();
    let excluded_classes: Vec<ExcludedClass> = ClassLabel::ALL
        .into_iter()
        .filter(|c| num_gt[c.index()] == 0 && num_det[c.index()] > 0)
        .map(|class| ExcludedClass {
            class,
            num_detections: num_det[class.index()],
            reason: "no ground-truth instances; AP undefined".to_string(),
        })
        .collect();

    let ap50s: Vec<f64> = classes.iter().map(|c| c.ap50).collect();
    let ap50_95s: Vec<f64> = classes.iter().map(|c| c.ap50_95).collect();
    let map_by_threshold = thresholds
        .iter()
        .enumerate()
        .map(|(ti, &t)| ThresholdMap {
            iou_threshold: t,
            map: mean(ap.iter().map(|row| row[ti])),
        })
        .collect();

    let total_gt: u64 = num_gt.iter().sum();
    let total_det: u64 = num_det.iter().sum();
    let oc = op_point.counts;
    let precision_defined = oc.tp + oc.fp > 0;
    let recall_defined = total_gt > 0;
    let mut notes = Vec::new();
    if !precision_defined {
        notes.push("precision undefined (no detections); reported as 0".to_string());
    }
    if !recall_defined {
        notes.push("recall undefined (no ground truth); reported as 0".to_string());
    }
    if classes.is_empty() {
        notes.push("no class has ground truth; mAP reported as 0".to_string());
    }
    let mut totals = Counts::default();
    for c in &classes {
        totals.tp += c.counts.tp;
        totals.fp += c.counts.fp;
        totals.fn_ += c.counts.fn_;
    }
    totals.fp += excluded_classes.iter().map(|e| e.num_detections).sum::<u64>();
    debug_assert_eq!(totals.tp + totals.fp, total_det);

    Ok(EvalReport {
        matching: "greedy, confidence-ordered, single assignment, same class only".to_string(),
        interpolation: "all_point".to_string(),
        iou_thresholds: thresholds,
        num_images: images.len() as u64,
        precision: if precision_defined {
            oc.tp as f64 / (oc.tp + oc.fp) as f64
        } else {
            0.0
        },
        precision_defined,
        recall: if recall_defined {
            oc.tp as f64 / total_gt as f64
        } else {
            0.0
        },
        recall_defined,
        map50: mean_ap(&ap50s),
        map50_95: mean_ap(&ap50_95s),
        map_defined: !classes.is_empty(),
        operating_point: op_point,
        map_by_threshold,
        classes,
        excluded_classes,
        totals,
        notes,
    })
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary_line(&self) -> String {
        format!(
            "P={:.4}{} R={:.4} mAP@.5={:.4} mAP@.5:.95={:.4}",
            self.precision,
            if self.precision_defined { "" } else { "(undefined)" },
            self.recall,
            self.map50,
            self.map50_95
        )
    }

    /// Markdown with the headline metric table (Precision, Recall, mAP,
    /// mAP-95) followed by the per-class breakdown.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let flag = |defined: bool| if defined { "" } else { " *" };
        out.push_str("| Precision | Recall | mAP | mAP-95 |\n");
        out.push_str("|---|---|---|---|\n");
        let _ = writeln!(
            out,
            "| {:.4}{} | {:.4}{} | {:.4} | {:.4} |",
            self.precision,
            flag(self.precision_defined),
            self.recall,
            flag(self.recall_defined),
            self.map50,
            self.map50_95
        );
        out.push('\n');
        out.push_str("| Class | GT | Detections | TP | FP | FN | AP@0.5 | AP@[.5:.95] |\n");
        out.push_str("|---|---|---|---|---|---|---|---|\n");
        for c in &self.classes {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {:.4} | {:.4} |",
                c.class, c.num_gt, c.num_detections, c.counts.tp, c.counts.fp, c.counts.fn_, c.ap50, c.ap50_95
            );
        }
        for e in &self.excluded_classes {
            let _ = writeln!(
                out,
                "| {} | 0 | {} | - | - | - | n/a | n/a |",
                e.class, e.num_detections
            );
        }
        out.push('\n');
        let cutoff = self
            .operating_point
            .confidence_cutoff
            .map_or("none".to_string(), |c| format!("{c:.4}"));
        let _ = writeln!(
            out,
            "Precision/recall at IoU {} and confidence >= {} (max F1). mAP is the mean over classes with ground truth; mAP-95 averages IoU 0.50:0.05:0.95. AP uses all-point interpolation.",
            self.operating_point.iou_threshold, cutoff
        );
        for note in &self.notes {
            let _ = writeln!(out, "\n\\* {note}");
        }
        out
    }
}
