use std::fmt::Write as _;
use std::ops::{AddAssign, Index};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::dataset_io::{Annotation, ClassLabel, DatasetManifest, Split};

/// Instance count per class, indexed by class id.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts([u64; ClassLabel::COUNT]);

impl ClassCounts {
    pub fn from_annotations<'a>(annotations: impl IntoIterator<Item = &'a Annotation>) -> Self {
        let mut counts = Self::default();
        for a in annotations {
            counts.0[a.class.index()] += 1;
        }
        counts
    }

    pub fn get(&self, class: ClassLabel) -> u64 {
        self.0[class.index()]
    }

    pub fn add(&mut self, class: ClassLabel, n: u64) {
        self.0[class.index()] += n;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassLabel, u64)> + '_ {
        ClassLabel::ALL.into_iter().map(|c| (c, self.get(c)))
    }
}

impl AddAssign<&ClassCounts> for ClassCounts {
    fn add_assign(&mut self, rhs: &ClassCounts) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Index<ClassLabel> for ClassCounts {
    type Output = u64;

    fn index(&self, class: ClassLabel) -> &u64 {
        &self.0[class.index()]
    }
}

impl Serialize for ClassCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(ClassLabel::COUNT))?;
        for (class, n) in self.iter() {
            map.serialize_entry(class.name(), &n)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassHistogram {
    pub train: ClassCounts,
    pub val: ClassCounts,
}

impl ClassHistogram {
    pub fn split(&self, split: Split) -> &ClassCounts {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
        }
    }

    pub fn split_mut(&mut self, split: Split) -> &mut ClassCounts {
        match split {
            Split::Train => &mut self.train,
            Split::Val => &mut self.val,
        }
    }

    pub fn total(&self) -> u64 {
        self.train.total() + self.val.total()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("histogram serializes");
        s.push('\n');
        s
    }

    /// Aligned plain-text table: class, train, val, total.
    pub fn to_table(&self) -> String {
        let width = ClassLabel::ALL.iter().map(|c| c.name().len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>6}  {:>6}  {:>6}", "class", "train", "val", "total");
        for class in ClassLabel::ALL {
            let (t, v) = (self.train[class], self.val[class]);
            let _ = writeln!(out, "{:<width$}  {:>6}  {:>6}  {:>6}", class.name(), t, v, t + v);
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>6}  {:>6}",
            "total",
            self.train.total(),
            self.val.total(),
            self.total()
        );
        out
    }
}

/// Exact annotation counts per split and class.
pub fn class_histogram(manifest: &DatasetManifest) -> ClassHistogram {
    let mut hist = ClassHistogram::default();
    for record in &manifest.records {
        *hist.split_mut(record.split) += &ClassCounts::from_annotations(&record.annotations);
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset_io::{BoundingBox, ImageRecord};

    #[test]
    fn empty_manifest() {
        let h = class_histogram(&DatasetManifest::default());
        assert_eq!(h, ClassHistogram::default());
        assert_eq!(h.total(), 0);
    }

    #[test]
    fn two_capacitors() {
        let a = Annotation::new(ClassLabel::Capacitor, BoundingBox::new(0.5, 0.5, 0.1, 0.1).unwrap());
        let manifest = DatasetManifest {
            records: vec![ImageRecord {
                image_path: "x.png".into(),
                width: 10,
                height: 10,
                split: Split::Val,
                annotations: vec![a, a],
                source: None,
            }],
            ..Default::default()
        };
        let h = class_histogram(&manifest);
        assert_eq!(h.val[ClassLabel::Capacitor], 2);
        assert_eq!(h.train.total(), 0);
        assert_eq!(h.total(), 2);
        let json: serde_json::Value = serde_json::from_str(&h.to_json()).unwrap();
        assert_eq!(json["val"]["capacitor"], 2);
        assert_eq!(json["train"]["transformer"], 0);
        let table = h.to_table();
        assert!(table.lines().nth(1).unwrap().starts_with("capacitor "));
        assert!(table.contains("electrolytic_capacitor       0       0       0"));
    }
}
