//! Board image preparation: ROI segmentation, crop with label remapping,
//! contrast stretching and label-exact augmentation.

mod augment;
mod contrast;
mod crop;
mod raster;
mod roi;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use augment::{augment, AugmentOp};
pub use contrast::contrast_stretch;
pub use crop::{crop, crop_and_remap, CropResult, MIN_KEPT_AREA_FRACTION};
pub use raster::{image_dimensions, RasterImage};
pub use roi::{otsu_threshold, segment_board_roi, RoiRect};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("image has zero width or height")]
    EmptyImage,
    #[error("pixel buffer has {actual} bytes, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("ROI {roi:?} does not fit a {width}x{height} image")]
    InvalidRoi { roi: RoiRect, width: u32, height: u32 },
    #[error("no board found: image has no foreground pixels")]
    NoBoardFound,
    #[error("percentiles must satisfy 0 <= low < high <= 100, got {low_pct} and {high_pct}")]
    InvalidPercentiles { low_pct: f64, high_pct: f64 },
    #[error("unknown augmentation {0:?}")]
    UnknownAugmentOp(String),
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

/// `<stem>__<op>.<ext>` next to the original, keeping any directory prefix.
pub fn augmented_file_name(image_path: &str, op: AugmentOp) -> String {
    let path = Path::new(image_path);
    let stem = path.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}__{op}.{}", ext.to_string_lossy()),
        None => format!("{stem}__{op}"),
    };
    match path.parent().filter(|p| !p.as_os_str().is_empty()) {
        Some(parent) => parent.join(name).to_string_lossy().into_owned(),
        None => name,
    }
}
