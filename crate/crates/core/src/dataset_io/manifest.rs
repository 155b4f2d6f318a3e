use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bbox::BoxError;
use super::{Annotation, ClassLabel, ClassTable, DatasetError};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
}

impl Split {
    pub const ALL: [Split; 2] = [Split::Train, Split::Val];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    /// Path relative to the images directory; also the record's identity.
    pub image_path: String,
    pub width: u32,
    pub height: u32,
    pub split: Split,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
    /// Where the record came from, e.g. `labelstudio:task/12`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl ImageRecord {
    /// File stem of the image, used to name sibling label/detection files.
    pub fn stem(&self) -> String {
        Path::new(&self.image_path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.image_path.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub class_table: ClassTable,
    #[serde(default)]
    pub records: Vec<ImageRecord>,
}

fn default_version() -> u32 {
    MANIFEST_VERSION
}

impl Default for DatasetManifest {
    fn default() -> Self {
        Self {
            version: MANIFEST_VERSION,
            class_table: ClassTable::default(),
            records: Vec::new(),
        }
    }
}

impl DatasetManifest {
    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        let manifest: Self = serde_json::from_str(text)?;
        if manifest.version != MANIFEST_VERSION {
            return Err(DatasetError::UnsupportedVersion(manifest.version));
        }
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }

    pub fn records_in(&self, split: Split) -> impl Iterator<Item = &ImageRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn find(&self, image_path: &str) -> Option<&ImageRecord> {
        self.records.iter().find(|r| r.image_path == image_path)
    }
}

/// How images are divided between train and val.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SplitSpec {
    #[default]
    AllTrain,
    /// Exactly this many val images, spread evenly over the path-sorted list.
    ValCount(usize),
    /// `round(fraction * n)` val images, chosen as for `ValCount`.
    ValFraction(f64),
    /// Val images named explicitly by image path or file name.
    ValList(BTreeSet<String>),
}

/// Assign a split to every record. Selection depends only on the set of
/// image paths, not on record order.
pub fn assign_splits(records: &mut [ImageRecord], spec: &SplitSpec) {
    let n = records.len();
    let val_count = match spec {
        SplitSpec::AllTrain => 0,
        SplitSpec::ValCount(k) => (*k).min(n),
        SplitSpec::ValFraction(f) => ((f.clamp(0.0, 1.0) * n as f64).round() as usize).min(n),
        SplitSpec::ValList(names) => {
            for r in records.iter_mut() {
                let file_name = Path::new(&r.image_path)
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                r.split = if names.contains(&r.image_path) || names.contains(&file_name) {
                    Split::Val
                } else {
                    Split::Train
                };
            }
            return;
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| records[a].image_path.cmp(&records[b].image_path));
    for (rank, &idx) in order.iter().enumerate() {
        let picked = (rank + 1) * val_count / n.max(1) > rank * val_count / n.max(1);
        records[idx].split = if picked { Split::Val } else { Split::Train };
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FindingKind {
    DuplicatePath {
        image_path: String,
    },
    DuplicateClass {
        class: ClassLabel,
    },
    DanglingClass {
        image_path: String,
        index: usize,
        class: ClassLabel,
    },
    EmptySplit {
        split: Split,
    },
    DegenerateBox {
        image_path: String,
        index: usize,
        reason: String,
    },
    InvalidBox {
        image_path: String,
        index: usize,
        reason: String,
    },
    ZeroDimension {
        image_path: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: FindingKind,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match &self.kind {
            FindingKind::DuplicatePath { image_path } => write!(f, "{level}: duplicate image path {image_path}"),
            FindingKind::DuplicateClass { class } => write!(f, "{level}: class {class} listed twice in class table"),
            FindingKind::DanglingClass {
                image_path,
                index,
                class,
            } => {
                write!(
                    f,
                    "{level}: {image_path} annotation {index}: class {class} not in class table"
                )
            }
            FindingKind::EmptySplit { split } => write!(f, "{level}: split {split} has no images"),
            FindingKind::DegenerateBox {
                image_path,
                index,
                reason,
            } => {
                write!(f, "{level}: {image_path} annotation {index}: degenerate box ({reason})")
            }
            FindingKind::InvalidBox {
                image_path,
                index,
                reason,
            } => {
                write!(f, "{level}: {image_path} annotation {index}: invalid box ({reason})")
            }
            FindingKind::ZeroDimension { image_path } => write!(f, "{level}: {image_path} has zero width or height"),
        }
    }
}

/// Collect every problem with a manifest. An empty result means the manifest
/// is valid; warnings (empty splits) make it non-empty but are not fatal.
pub fn validate_manifest(manifest: &DatasetManifest) -> Vec<Finding> {
    let mut findings = Vec::new();
    let error = |kind| Finding {
        severity: Severity::Error,
        kind,
    };

    let mut seen_classes = BTreeSet::new();
    for &class in manifest.class_table.classes() {
        if !seen_classes.insert(class) {
            findings.push(error(FindingKind::DuplicateClass { class }));
        }
    }

    let mut path_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for record in &manifest.records {
        let count = path_counts.entry(record.image_path.as_str()).or_default();
        *count += 1;
        if *count == 2 {
            findings.push(error(FindingKind::DuplicatePath {
                image_path: record.image_path.clone(),
            }));
        }
        if record.width == 0 || record.height == 0 {
            findings.push(error(FindingKind::ZeroDimension {
                image_path: record.image_path.clone(),
            }));
        }
        for (index, ann) in record.annotations.iter().enumerate() {
            if !manifest.class_table.contains(ann.class) {
                findings.push(error(FindingKind::DanglingClass {
                    image_path: record.image_path.clone(),
                    index,
                    class: ann.class,
                }));
            }
            match ann.bbox.validate() {
                Ok(()) => {}
                Err(err @ BoxError::Degenerate { .. }) => findings.push(error(FindingKind::DegenerateBox {
                    image_path: record.image_path.clone(),
                    index,
                    reason: err.to_string(),
                })),
                Err(err) => findings.push(error(FindingKind::InvalidBox {
                    image_path: record.image_path.clone(),
                    index,
                    reason: err.to_string(),
                })),
            }
        }
    }

    for split in Split::ALL {
        if manifest.records_in(split).next().is_none() {
            findings.push(Finding {
                severity: Severity::Warning,
                kind: FindingKind::EmptySplit { split },
            });
        }
    }
    findings
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}
