use serde::Serialize;

use crate::dataset_io::{DatasetManifest, Split};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitCounts {
    pub split: Split,
    pub images: u64,
    pub annotated_images: u64,
    pub instances: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSummary {
    pub splits: Vec<SplitCounts>,
    pub total_images: u64,
    /// Images with no annotations, in manifest order.
    pub unannotated: Vec<String>,
    pub empty_splits: Vec<Split>,
}

impl SplitSummary {
    pub fn images_in(&self, split: Split) -> u64 {
        self.splits.iter().find(|s| s.split == split).map_or(0, |s| s.images)
    }
}

pub fn split_summary(manifest: &DatasetManifest) -> SplitSummary {
    let splits: Vec<SplitCounts> = Split::ALL
        .into_iter()
        .map(|split| {
            let records: Vec<_> = manifest.records_in(split).collect();
            SplitCounts {
                split,
                images: records.len() as u64,
                annotated_images: records.iter().filter(|r| !r.annotations.is_empty()).count() as u64,
                instances: records.iter().map(|r| r.annotations.len() as u64).sum(),
            }
        })
        .collect();
    SplitSummary {
        empty_splits: splits.iter().filter(|s| s.images == 0).map(|s| s.split).collect(),
        total_images: manifest.records.len() as u64,
        unannotated: manifest
            .records
            .iter()
            .filter(|r| r.annotations.is_empty())
            .map(|r| r.image_path.clone())
            .collect(),
        splits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset_io::{Annotation, BoundingBox, ClassLabel, ImageRecord};

    fn manifest(n_train: usize, n_val: usize) -> DatasetManifest {
        let a = Annotation::new(ClassLabel::Ic, BoundingBox::new(0.5, 0.5, 0.2, 0.2).unwrap());
        let records = (0..n_train + n_val)
            .map(|i| ImageRecord {
                image_path: format!("img_{i}.jpg"),
                width: 64,
                height: 64,
                split: if i < n_train { Split::Train } else { Split::Val },
                annotations: vec![a],
                source: None,
            })
            .collect();
        DatasetManifest {
            records,
            ..Default::default()
        }
    }

    #[test]
    fn paper_shaped_split() {
        let s = split_summary(&manifest(30, 12));
        assert_eq!(s.images_in(Split::Train), 30);
        assert_eq!(s.images_in(Split::Val), 12);
        assert_eq!(s.total_images, 42);
        assert!(s.empty_splits.is_empty() && s.unannotated.is_empty());
    }

    #[test]
    fn all_train_flags_val() {
        let s = split_summary(&manifest(5, 0));
        assert_eq!(s.images_in(Split::Val), 0);
        assert_eq!(s.empty_splits, vec![Split::Val]);
    }

    #[test]
    fn unannotated_image_flagged() {
        let mut m = manifest(3, 2);
        m.records[4].annotations.clear();
        let s = split_summary(&m);
        assert_eq!(s.unannotated, vec!["img_4.jpg".to_string()]);
        assert_eq!(s.splits[1].annotated_images, 1);
    }
}
