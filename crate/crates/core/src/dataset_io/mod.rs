//! Interchange formats: label files, detection files, Label Studio exports
//! and the dataset manifest.

mod bbox;
mod label;
pub mod labelstudio;
pub mod manifest;
pub mod yolo;

use thiserror::Error;

pub use bbox::{quantize, Annotation, BoundingBox, BoxError, Detection, COORD_DIGITS};
pub use label::{ClassLabel, ClassTable};
pub use labelstudio::{parse_labelstudio_export, parse_labelstudio_export_with, FragmentRecord, ManifestFragment};
pub use manifest::{
    assign_splits, validate_manifest, DatasetManifest, Finding, FindingKind, ImageRecord, Severity, Split, SplitSpec,
};
pub use yolo::{
    parse_detections, parse_detections_with, parse_yolo_labels, parse_yolo_labels_with, write_detections,
    write_yolo_labels, ParseError, ParseMode, ParseWarning, Parsed,
};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported manifest version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown class {0:?}")]
    UnknownClass(String),
    #[error("task {task}: {kind}")]
    LabelStudio {
        task: String,
        kind: labelstudio::TaskErrorKind,
    },
}
