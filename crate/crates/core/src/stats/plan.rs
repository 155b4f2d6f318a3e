use std::collections::BTreeMap;

use serde::Serialize;

use crate::dataset_io::{ClassLabel, DatasetManifest, ImageRecord, Split};
use crate::preprocess::{augmented_file_name, AugmentOp};

use super::{class_histogram, ClassCounts, ClassHistogram};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlannedOp {
    pub image_path: String,
    pub op: AugmentOp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AugmentPlan {
    pub target_min: u64,
    /// Selected `(image, op)` pairs in selection order.
    pub steps: Vec<PlannedOp>,
    /// Train-split histogram after executing every step; val is unchanged.
    pub projected: ClassHistogram,
    /// Classes still below target after planning, with the missing count.
    pub shortfall: BTreeMap<ClassLabel, u64>,
}

impl AugmentPlan {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Planned ops grouped by image.
    pub fn per_image(&self) -> BTreeMap<&str, Vec<AugmentOp>> {
        let mut out: BTreeMap<&str, Vec<AugmentOp>> = BTreeMap::new();
        for step in &self.steps {
            out.entry(step.image_path.as_str()).or_default().push(step.op);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plan serializes");
        s.push('\n');
        s
    }
}

/// Pick train images to augment until every class reaches `target_min`
/// train instances.
///
/// Each round scores the images that still have an unused op by how many
/// instances of below-target classes they hold, takes the best (earliest in
/// manifest order on ties) and assigns its next op in the fixed order
/// hflip, vflip, rot90, rot180, rot270. An augmented copy carries all of the
/// image's annotations, so every class in it grows. Planning stops when no
/// class is short or no remaining image can help; classes that stay short
/// (for instance because no train image contains them) are reported in
/// `shortfall`.
pub fn plan_augmentation(manifest: &DatasetManifest, target_min: u64, available: &[AugmentOp]) -> AugmentPlan {
    let ops: Vec<AugmentOp> = AugmentOp::ALL.into_iter().filter(|op| available.contains(op)).collect();
    let mut projected = class_histogram(manifest);
    let train: Vec<(&ImageRecord, ClassCounts)> = manifest
        .records_in(Split::Train)
        .map(|r| (r, ClassCounts::from_annotations(&r.annotations)))
        .collect();
    let mut used = vec![0usize; train.len()];
    let mut steps = Vec::new();

    loop {
        let short: Vec<ClassLabel> = ClassLabel::ALL
            .into_iter()
            .filter(|&c| projected.train[c] < target_min)
            .collect();
        if short.is_empty() {
            break;
        }
        let mut best: Option<(usize, u64)> = None;
        for (i, (_, counts)) in train.iter().enumerate() {
            if used[i] >= ops.len() {
                continue;
            }
            let score: u64 = short.iter().map(|&c| counts[c]).sum();
            if score > 0 && best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let Some((i, _)) = best else { break };
        let (record, counts) = &train[i];
        steps.push(PlannedOp {
            image_path: record.image_path.clone(),
            op: ops[used[i]],
        });
        used[i] += 1;
        projected.train += counts;
    }

    let shortfall = ClassLabel::ALL
        .into_iter()
        .filter(|&c| projected.train[c] < target_min)
        .map(|c| (c, target_min - projected.train[c]))
        .collect();
    AugmentPlan {
        target_min,
        steps,
        projected,
        shortfall,
    }
}

/// Manifest records an executed plan adds: one per step, with transformed
/// annotations and `<stem>__<op>.<ext>` paths.
pub fn augmented_records(manifest: &DatasetManifest, plan: &AugmentPlan) -> Vec<ImageRecord> {
    plan.steps
        .iter()
        .filter_map(|step| {
            let source = manifest.find(&step.image_path)?;
            let (width, height) = step.op.output_size(source.width, source.height);
            Some(ImageRecord {
                image_path: augmented_file_name(&source.image_path, step.op),
                width,
                height,
                split: Split::Train,
                annotations: step.op.apply_annotations(&source.annotations),
                source: Some(format!("augment:{}:{}", source.image_path, step.op)),
            })
        })
        .collect()
}
