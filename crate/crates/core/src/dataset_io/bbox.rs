use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ClassLabel;

/// Number of fractional digits used for normalized coordinates on disk.
pub const COORD_DIGITS: usize = 6;
const COORD_SCALE: f64 = 1e6;

/// Snap a coordinate to the on-disk grid of `COORD_DIGITS` decimals.
///
/// The result is the f64 nearest to `k / 10^6`, i.e. exactly what parsing
/// the written decimal yields.
pub fn quantize(value: f64) -> f64 {
    (value * COORD_SCALE).round() / COORD_SCALE + 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BoxError {
    #[error("{field} is not a finite number")]
    NonFinite { field: &'static str },
    #[error("{field}={value} is outside [0, 1]")]
    CenterOutOfRange { field: &'static str, value: f64 },
    #[error("{field}={value} is not positive (degenerate box)")]
    Degenerate { field: &'static str, value: f64 },
    #[error("{field}={value} exceeds 1")]
    SizeTooLarge { field: &'static str, value: f64 },
}

/// Axis-aligned box in normalized center form.
///
/// All four values are fractions of the image width (`cx`, `w`) or height
/// (`cy`, `h`). Valid boxes satisfy `0 <= cx, cy <= 1` and `0 < w, h <= 1`.
/// Edges may extend past the image border; nothing clamps them except
/// [`BoundingBox::clamp_to_image`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Result<Self, BoxError> {
        let b = Self { cx, cy, w, h };
        b.validate()?;
        Ok(b)
    }

    /// Builds a box from normalized corner coordinates without validation.
    pub fn from_corners(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            cx: (x0 + x1) / 2.0,
            cy: (y0 + y1) / 2.0,
            w: x1 - x0,
            h: y1 - y0,
        }
    }

    pub fn validate(&self) -> Result<(), BoxError> {
        for (field, value) in [("cx", self.cx), ("cy", self.cy), ("w", self.w), ("h", self.h)] {
            if !value.is_finite() {
                return Err(BoxError::NonFinite { field });
            }
        }
        for (field, value) in [("cx", self.cx), ("cy", self.cy)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(BoxError::CenterOutOfRange { field, value });
            }
        }
        for (field, value) in [("w", self.w), ("h", self.h)] {
            if value <= 0.0 {
                return Err(BoxError::Degenerate { field, value });
            }
            if value > 1.0 {
                return Err(BoxError::SizeTooLarge { field, value });
            }
        }
        Ok(())
    }

    pub fn x_min(&self) -> f64 {
        self.cx - self.w / 2.0
    }

    pub fn x_max(&self) -> f64 {
        self.cx + self.w / 2.0
    }

    pub fn y_min(&self) -> f64 {
        self.cy - self.h / 2.0
    }

    pub fn y_max(&self) -> f64 {
        self.cy + self.h / 2.0
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Clip the box edges into the unit square. Returns `None` when nothing
    /// of the box remains inside the image.
    pub fn clamp_to_image(&self) -> Option<Self> {
        if !(self.cx.is_finite() && self.cy.is_finite() && self.w.is_finite() && self.h.is_finite()) {
            return None;
        }
        let x0 = self.x_min().clamp(0.0, 1.0);
        let x1 = self.x_max().clamp(0.0, 1.0);
        let y0 = self.y_min().clamp(0.0, 1.0);
        let y1 = self.y_max().clamp(0.0, 1.0);
        if x1 <= x0 || y1 <= y0 {
            return None;
        }
        Some(Self::from_corners(x0, y0, x1, y1))
    }

    pub fn quantized(&self) -> Self {
        Self {
            cx: quantize(self.cx),
            cy: quantize(self.cy),
            w: quantize(self.w),
            h: quantize(self.h),
        }
    }
}

/// Ground-truth box with its class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub class: ClassLabel,
    #[serde(flatten)]
    pub bbox: BoundingBox,
}

impl Annotation {
    pub fn new(class: ClassLabel, bbox: BoundingBox) -> Self {
        Self { class, bbox }
    }
}

/// Predicted box with class and confidence in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub class: ClassLabel,
    pub confidence: f64,
    #[serde(flatten)]
    pub bbox: BoundingBox,
}

impl Detection {
    pub fn new(class: ClassLabel, confidence: f64, bbox: BoundingBox) -> Self {
        Self {
            class,
            confidence,
            bbox,
        }
    }
}
