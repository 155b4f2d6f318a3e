//! Component-level PCB recycling toolkit.
//!
//! The crate covers the offline half of a board-recycling workflow:
//!
//! - [`dataset_io`]: YOLO label files, detection files, Label Studio exports
//!   and the JSON dataset manifest.
//! - [`preprocess`]: board ROI segmentation, cropping with label remapping,
//!   contrast stretching and label-exact geometric augmentation.
//! - [`stats`]: class histograms, split summaries and augmentation planning.
//! - [`eval`]: IoU matching, precision/recall curves, AP and mAP.
//! - [`crm`]: mapping detected components to critical raw materials.
//! - [`cli`]: the batch commands behind the `pcbcrm` binary.
//!
//! Boxes are always held in normalized center form (`cx`, `cy`, `w`, `h`);
//! every other representation is converted at the boundary.

pub mod cli;
pub mod crm;
pub mod dataset_io;
pub mod eval;
pub mod preprocess;
pub mod stats;

pub use dataset_io::{Annotation, BoundingBox, ClassLabel, DatasetManifest, Detection, Split};
