use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{PreprocessError, RasterImage};

/// Pixel rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiRect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl RoiRect {
    /// Checks `0 <= x0 < x1 <= width` and `0 <= y0 < y1 <= height`.
    pub fn new(x0: u32, y0: u32, x1: u32, y1: u32, width: u32, height: u32) -> Result<Self, PreprocessError> {
        let rect = Self { x0, y0, x1, y1 };
        rect.check(width, height)?;
        Ok(rect)
    }

    pub fn full(width: u32, height: u32) -> Self {
        Self {
            x0: 0,
            y0: 0,
            x1: width,
            y1: height,
        }
    }

    pub fn check(&self, width: u32, height: u32) -> Result<(), PreprocessError> {
        if self.x0 < self.x1 && self.x1 <= width && self.y0 < self.y1 && self.y1 <= height {
            Ok(())
        } else {
            Err(PreprocessError::InvalidRoi {
                roi: *self,
                width,
                height,
            })
        }
    }

    pub fn width(&self) -> u32 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn is_full(&self, width: u32, height: u32) -> bool {
        *self == Self::full(width, height)
    }
}

/// Otsu threshold over a 256-level histogram: the level `t` maximizing the
/// between-class variance of `{<= t}` vs `{> t}`. First maximum wins.
/// Returns `None` when the histogram holds a single level.
pub fn otsu_threshold(gray: &[u8]) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &g in gray {
        hist[g as usize] += 1;
    }
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let total = gray.len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let mut weight_bg = 0.0;
    let mut sum_bg = 0.0;
    let mut best = (f64::NEG_INFINITY, 0u8);
    for (t, &count) in hist.iter().enumerate().take(255) {
        weight_bg += count as f64;
        sum_bg += t as f64 * count as f64;
        let weight_fg = total - weight_bg;
        if weight_bg == 0.0 || weight_fg == 0.0 {
            continue;
        }
        let mean_bg = sum_bg / weight_bg;
        let mean_fg = (sum_all - sum_bg) / weight_fg;
        let between = weight_bg * weight_fg * (mean_bg - mean_fg).powi(2);
        if between > best.0 {
            best = (between, t as u8);
        }
    }
    Some(best.1)
}

/// Foreground mask: pixels brighter than the Otsu level. A single-level
/// image is all foreground if it is at least mid-gray, else all background.
fn foreground_mask(gray: &[u8]) -> Vec<bool> {
    match otsu_threshold(gray) {
        Some(t) => gray.iter().map(|&g| g > t).collect(),
        None => gray.iter().map(|&g| g >= 128).collect(),
    }
}

/// Bounding rectangle of the largest 4-connected foreground component.
/// Ties go to the component found first in raster order.
fn largest_component(mask: &[bool], width: u32, height: u32) -> Option<RoiRect> {
    let (w, h) = (width as usize, height as usize);
    let mut visited = vec![false; mask.len()];
    let mut queue = VecDeque::new();
    let mut best: Option<(usize, RoiRect)> = None;
    for start in 0..mask.len() {
        if !mask[start] || visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        let mut size = 0usize;
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0usize, 0usize);
        while let Some(idx) = queue.pop_front() {
            size += 1;
            let (x, y) = (idx % w, idx / w);
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
            let mut visit = |n: usize| {
                if mask[n] && !visited[n] {
                    visited[n] = true;
                    queue.push_back(n);
                }
            };
            if x > 0 {
                visit(idx - 1);
            }
            if x + 1 < w {
                visit(idx + 1);
            }
            if y > 0 {
                visit(idx - w);
            }
            if y + 1 < h {
                visit(idx + w);
            }
        }
        if best.is_none_or(|(s, _)| size > s) {
            let rect = RoiRect {
                x0: x0 as u32,
                y0: y0 as u32,
                x1: x1 as u32 + 1,
                y1: y1 as u32 + 1,
            };
            best = Some((size, rect));
        }
    }
    best.map(|(_, r)| r)
}

/// Locate the board: grayscale, Otsu threshold, largest 4-connected bright
/// component, bounding rectangle grown by `margin` and clamped to the image.
pub fn segment_board_roi(image: &RasterImage, margin: u32) -> Result<RoiRect, PreprocessError> {
    let gray = image.to_gray();
    let mask = foreground_mask(&gray);
    let rect = largest_component(&mask, image.width(), image.height()).ok_or(PreprocessError::NoBoardFound)?;
    Ok(RoiRect {
        x0: rect.x0.saturating_sub(margin),
        y0: rect.y0.saturating_sub(margin),
        x1: rect.x1.saturating_add(margin).min(image.width()),
        y1: rect.y1.saturating_add(margin).min(image.height()),
    })
}
