use super::{PreprocessError, RasterImage};

/// Nearest-rank percentile of a 256-bin histogram (`pct = 0` is the minimum).
fn percentile(hist: &[u64; 256], total: u64, pct: f64) -> u8 {
    let rank = ((pct / 100.0) * total as f64).ceil().max(1.0) as u64;
    let mut seen = 0;
    for (level, &count) in hist.iter().enumerate() {
        seen += count;
        if seen >= rank {
            return level as u8;
        }
    }
    255
}

/// Per-channel linear stretch sending the `low_pct` and `high_pct`
/// percentiles to 0 and 255, clamping values outside. A channel whose two
/// percentiles coincide is left unchanged.
pub fn contrast_stretch(image: &RasterImage, low_pct: f64, high_pct: f64) -> Result<RasterImage, PreprocessError> {
    if !(0.0..=100.0).contains(&low_pct) || !(0.0..=100.0).contains(&high_pct) || low_pct >= high_pct {
        return Err(PreprocessError::InvalidPercentiles { low_pct, high_pct });
    }
    let total = image.width() as u64 * image.height() as u64;
    let mut luts = [[0u8; 256]; 3];
    for (channel, lut) in luts.iter_mut().enumerate() {
        let mut hist = [0u64; 256];
        for px in image.pixels().chunks_exact(3) {
            hist[px[channel] as usize] += 1;
        }
        let lo = percentile(&hist, total, low_pct) as f64;
        let hi = percentile(&hist, total, high_pct) as f64;
        for (v, out) in lut.iter_mut().enumerate() {
            *out = if hi > lo {
                ((v as f64 - lo) * 255.0 / (hi - lo)).round().clamp(0.0, 255.0) as u8
            } else {
                v as u8
            };
        }
    }
    let pixels = image
        .pixels()
        .chunks_exact(3)
        .flat_map(|px| {
            [
                luts[0][px[0] as usize],
                luts[1][px[1] as usize],
                luts[2][px[2] as usize],
            ]
        })
        .collect();
    RasterImage::new(image.width(), image.height(), pixels)
}
