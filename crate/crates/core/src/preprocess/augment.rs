use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset_io::{quantize, Annotation, BoundingBox};

use super::{PreprocessError, RasterImage};

/// Label-exact geometric augmentation. Rotations are clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentOp {
    Hflip,
    Vflip,
    Rot90,
    Rot180,
    Rot270,
}

impl AugmentOp {
    /// Fixed planning order.
    pub const ALL: [AugmentOp; 5] = [
        AugmentOp::Hflip,
        AugmentOp::Vflip,
        AugmentOp::Rot90,
        AugmentOp::Rot180,
        AugmentOp::Rot270,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AugmentOp::Hflip => "hflip",
            AugmentOp::Vflip => "vflip",
            AugmentOp::Rot90 => "rot90",
            AugmentOp::Rot180 => "rot180",
            AugmentOp::Rot270 => "rot270",
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            AugmentOp::Rot90 => AugmentOp::Rot270,
            AugmentOp::Rot270 => AugmentOp::Rot90,
            other => other,
        }
    }

    pub fn swaps_dimensions(self) -> bool {
        matches!(self, AugmentOp::Rot90 | AugmentOp::Rot270)
    }

    /// Output dimensions for an input of `width x height`.
    pub fn output_size(self, width: u32, height: u32) -> (u32, u32) {
        if self.swaps_dimensions() {
            (height, width)
        } else {
            (width, height)
        }
    }

    /// Source pixel for destination `(x, y)` in an output of size `out_w x out_h`.
    fn source_pixel(self, x: u32, y: u32, out_w: u32, out_h: u32) -> (u32, u32) {
        match self {
            AugmentOp::Hflip => (out_w - 1 - x, y),
            AugmentOp::Vflip => (x, out_h - 1 - y),
            AugmentOp::Rot180 => (out_w - 1 - x, out_h - 1 - y),
            // clockwise: src (sx, sy) lands at (src_h - 1 - sy, sx); src_h == out_w
            AugmentOp::Rot90 => (y, out_w - 1 - x),
            AugmentOp::Rot270 => (out_h - 1 - y, x),
        }
    }

    pub fn apply_image(self, image: &RasterImage) -> RasterImage {
        let (out_w, out_h) = self.output_size(image.width(), image.height());
        let mut pixels = Vec::with_capacity(image.pixels().len());
        for y in 0..out_h {
            for x in 0..out_w {
                let (sx, sy) = self.source_pixel(x, y, out_w, out_h);
                pixels.extend(image.get(sx, sy));
            }
        }
        RasterImage::new(out_w, out_h, pixels).expect("dimensions preserved")
    }

    /// Transform a box. Reflected coordinates (`1 - c`) are snapped to the
    /// 6-decimal label grid so that every op is an exact bijection on boxes
    /// read from label files.
    pub fn apply_box(self, b: &BoundingBox) -> BoundingBox {
        let flip = |c: f64| quantize(1.0 - c);
        let (cx, cy, w, h) = match self {
            AugmentOp::Hflip => (flip(b.cx), b.cy, b.w, b.h),
            AugmentOp::Vflip => (b.cx, flip(b.cy), b.w, b.h),
            AugmentOp::Rot180 => (flip(b.cx), flip(b.cy), b.w, b.h),
            AugmentOp::Rot90 => (flip(b.cy), b.cx, b.h, b.w),
            AugmentOp::Rot270 => (b.cy, flip(b.cx), b.h, b.w),
        };
        BoundingBox { cx, cy, w, h }
    }

    pub fn apply_annotations(self, annotations: &[Annotation]) -> Vec<Annotation> {
        annotations
            .iter()
            .map(|a| Annotation::new(a.class, self.apply_box(&a.bbox)))
            .collect()
    }
}

impl fmt::Display for AugmentOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AugmentOp {
    type Err = PreprocessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|op| op.name() == s)
            .ok_or_else(|| PreprocessError::UnknownAugmentOp(s.to_string()))
    }
}

/// Apply `op` to an image and its annotations together.
pub fn augment(image: &RasterImage, annotations: &[Annotation], op: AugmentOp) -> (RasterImage, Vec<Annotation>) {
    (op.apply_image(image), op.apply_annotations(annotations))
}
