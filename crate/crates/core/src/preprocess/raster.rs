use std::path::Path;

use image::{ImageFormat, RgbImage};

use super::PreprocessError;

/// 8-bit RGB image, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, PreprocessError> {
        if width == 0 || height == 0 {
            return Err(PreprocessError::EmptyImage);
        }
        let expected = 3 * width as usize * height as usize;
        if pixels.len() != expected {
            return Err(PreprocessError::BufferSize {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self, PreprocessError> {
        let n = width as usize * height as usize;
        Self::new(width, height, rgb.iter().copied().cycle().take(3 * n).collect())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        3 * (y as usize * self.width as usize + x as usize)
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = self.offset(x, y);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn put(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = self.offset(x, y);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Paint the half-open pixel rectangle `[x0, x1) x [y0, y1)`, clipped to the image.
    pub fn fill_rect(&mut self, x0: u32, y0: u32, x1: u32, y1: u32, rgb: [u8; 3]) {
        for y in y0..y1.min(self.height) {
            for x in x0..x1.min(self.width) {
                self.put(x, y, rgb);
            }
        }
    }

    /// Luma `0.299 R + 0.587 G + 0.114 B`, rounded to the nearest level.
    pub fn to_gray(&self) -> Vec<u8> {
        self.pixels
            .chunks_exact(3)
            .map(|p| {
                let y = 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
                y.round().clamp(0.0, 255.0) as u8
            })
            .collect()
    }

    pub fn load(path: &Path) -> Result<Self, PreprocessError> {
        let img = image::open(path)
            .map_err(|source| PreprocessError::Image {
                path: path.to_path_buf(),
                source,
            })?
            .to_rgb8();
        let (w, h) = img.dimensions();
        Self::new(w, h, img.into_raw())
    }

    /// Save as PNG or JPEG, chosen by the file extension.
    pub fn save(&self, path: &Path) -> Result<(), PreprocessError> {
        let format = ImageFormat::from_path(path).map_err(|source| PreprocessError::Image {
            path: path.to_path_buf(),
            source,
        })?;
        let buffer = RgbImage::from_raw(self.width, self.height, self.pixels.clone())
            .expect("buffer length checked on construction");
        buffer
            .save_with_format(path, format)
            .map_err(|source| PreprocessError::Image {
                path: path.to_path_buf(),
                source,
            })
    }
}

/// Image dimensions read from the file header only.
pub fn image_dimensions(path: &Path) -> Result<(u32, u32), PreprocessError> {
    image::image_dimensions(path).map_err(|source| PreprocessError::Image {
        path: path.to_path_buf(),
        source,
    })
}
