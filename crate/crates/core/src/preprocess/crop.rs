use crate::dataset_io::{Annotation, BoundingBox};

use super::{PreprocessError, RasterImage, RoiRect};

/// Minimum fraction of a clipped box's area that must survive the crop.
pub const MIN_KEPT_AREA_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct CropResult {
    pub image: RasterImage,
    /// Kept annotations, in input order, normalized to the crop.
    pub annotations: Vec<Annotation>,
    /// Boxes with no overlap with the ROI.
    pub dropped_outside: usize,
    /// Boxes that straddled the ROI border and kept less than half their area.
    pub dropped_clipped: usize,
    /// Boxes that straddled the border and were clipped but kept.
    pub clipped_kept: usize,
}

impl CropResult {
    pub fn dropped(&self) -> usize {
        self.dropped_outside + self.dropped_clipped
    }
}

pub fn crop(image: &RasterImage, roi: RoiRect) -> Result<RasterImage, PreprocessError> {
    roi.check(image.width(), image.height())?;
    let row_bytes = 3 * roi.width() as usize;
    let mut pixels = Vec::with_capacity(row_bytes * roi.height() as usize);
    let stride = 3 * image.width() as usize;
    for y in roi.y0..roi.y1 {
        let start = y as usize * stride + 3 * roi.x0 as usize;
        pixels.extend_from_slice(&image.pixels()[start..start + row_bytes]);
    }
    RasterImage::new(roi.width(), roi.height(), pixels)
}

/// Crop `image` to `roi` and re-express each annotation relative to the crop.
///
/// Boxes entirely outside the ROI are dropped. Boxes crossing the border are
/// clipped and kept only if at least half of their area remains.
pub fn crop_and_remap(
    image: &RasterImage,
    roi: RoiRect,
    annotations: &[Annotation],
) -> Result<CropResult, PreprocessError> {
    let cropped = crop(image, roi)?;
    if roi.is_full(image.width(), image.height()) {
        return Ok(CropResult {
            image: cropped,
            annotations: annotations.to_vec(),
            dropped_outside: 0,
            dropped_clipped: 0,
            clipped_kept: 0,
        });
    }

    let (iw, ih) = (image.width() as f64, image.height() as f64);
    let (rx0, ry0, rx1, ry1) = (roi.x0 as f64, roi.y0 as f64, roi.x1 as f64, roi.y1 as f64);
    let (cw, ch) = (roi.width() as f64, roi.height() as f64);

    let mut result = CropResult {
        image: cropped,
        annotations: Vec::with_capacity(annotations.len()),
        dropped_outside: 0,
        dropped_clipped: 0,
        clipped_kept: 0,
    };
    for ann in annotations {
        let b = ann.bbox;
        let (px0, px1) = (b.x_min() * iw, b.x_max() * iw);
        let (py0, py1) = (b.y_min() * ih, b.y_max() * ih);
        let (qx0, qx1) = (px0.max(rx0), px1.min(rx1));
        let (qy0, qy1) = (py0.max(ry0), py1.min(ry1));
        if qx1 <= qx0 || qy1 <= qy0 {
            result.dropped_outside += 1;
            continue;
        }
        let clipped = qx0 > px0 || qx1 < px1 || qy0 > py0 || qy1 < py1;
        if clipped {
            let original = (px1 - px0) * (py1 - py0);
            let remaining = (qx1 - qx0) * (qy1 - qy0);
            if remaining < MIN_KEPT_AREA_FRACTION * original {
                result.dropped_clipped += 1;
                continue;
            }
            result.clipped_kept += 1;
        }
        let bbox = BoundingBox {
            cx: (((qx0 + qx1) / 2.0 - rx0) / cw).clamp(0.0, 1.0),
            cy: (((qy0 + qy1) / 2.0 - ry0) / ch).clamp(0.0, 1.0),
            w: ((qx1 - qx0) / cw).min(1.0),
            h: ((qy1 - qy0) / ch).min(1.0),
        };
        result.annotations.push(Annotation::new(ann.class, bbox));
    }
    Ok(result)
}
