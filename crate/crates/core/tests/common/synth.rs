//! Synthetic board photographs: a bright board on a dark background with
//! dark component blocks on it.

use std::path::Path;

use rand::Rng;
use serde_json::json;

use pcbcrm::preprocess::RasterImage;
use pcbcrm::{Annotation, BoundingBox, ClassLabel};

pub const BACKGROUND: [u8; 3] = [18, 22, 20];
pub const BOARD: [u8; 3] = [200, 204, 190];
pub const COMPONENT: [u8; 3] = [90, 60, 40];

/// Pixel rectangles are half-open: `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone)]
pub struct SynthBoard {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub board: (u32, u32, u32, u32),
    pub components: Vec<(ClassLabel, (u32, u32, u32, u32))>,
}

impl SynthBoard {
    pub fn random<R: Rng>(rng: &mut R, name: &str, width: u32, height: u32, classes: &[ClassLabel]) -> Self {
        let x0 = rng.gen_range(4..width / 4);
        let y0 = rng.gen_range(4..height / 4);
        let x1 = rng.gen_range(3 * width / 4..width - 4);
        let y1 = rng.gen_range(3 * height / 4..height - 4);
        let mut components = Vec::new();
        for _ in 0..rng.gen_range(1..=5) {
            let w = rng.gen_range(6..16).min(x1 - x0 - 8);
            let h = rng.gen_range(6..16).min(y1 - y0 - 8);
            let cx0 = rng.gen_range(x0 + 3..x1 - 3 - w);
            let cy0 = rng.gen_range(y0 + 3..y1 - 3 - h);
            let class = classes[rng.gen_range(0..classes.len())];
            components.push((class, (cx0, cy0, cx0 + w, cy0 + h)));
        }
        Self {
            name: name.to_string(),
            width,
            height,
            board: (x0, y0, x1, y1),
            components,
        }
    }

    pub fn render(&self) -> RasterImage {
        let mut img = RasterImage::filled(self.width, self.height, BACKGROUND).expect("non-empty image");
        let (x0, y0, x1, y1) = self.board;
        img.fill_rect(x0, y0, x1, y1, BOARD);
        for (_, (a, b, c, d)) in &self.components {
            img.fill_rect(*a, *b, *c, *d, COMPONENT);
        }
        img
    }

    pub fn annotations(&self) -> Vec<Annotation> {
        let (w, h) = (self.width as f64, self.height as f64);
        self.components
            .iter()
            .map(|(class, (a, b, c, d))| {
                let bbox = BoundingBox::from_corners(*a as f64 / w, *b as f64 / h, *c as f64 / w, *d as f64 / h);
                Annotation::new(*class, bbox.quantized())
            })
            .collect()
    }

    pub fn file_name(&self) -> String {
        format!("{}.png", self.name)
    }
}

/// A Label Studio task for the board. Every other board uses the upload
/// naming scheme with a hash prefix.
pub fn labelstudio_task(board: &SynthBoard, id: usize) -> serde_json::Value {
    let (w, h) = (board.width as f64, board.height as f64);
    let results: Vec<serde_json::Value> = board
        .components
        .iter()
        .enumerate()
        .map(|(i, (class, (a, b, c, d)))| {
            json!({
                "id": format!("r{id}_{i}"),
                "type": "rectanglelabels",
                "from_name": "label",
                "to_name": "image",
                "original_width": board.width,
                "original_height": board.height,
                "image_rotation": 0,
                "value": {
                    "x": *a as f64 / w * 100.0,
                    "y": *b as f64 / h * 100.0,
                    "width": (*c - *a) as f64 / w * 100.0,
                    "height": (*d - *b) as f64 / h * 100.0,
                    "rotation": 0,
                    "rectanglelabels": [class.name()]
                }
            })
        })
        .collect();
    let image = if id.is_multiple_of(2) {
        format!("/data/upload/1/{:08x}-{}", 0x1a2b_0000 + id, board.file_name())
    } else {
        format!("/data/upload/1/{}", board.file_name())
    };
    json!({
        "id": id,
        "data": { "image": image },
        "annotations": [{ "id": id, "was_cancelled": false, "result": results }]
    })
}

/// Write `n` boards as PNGs under `dir/images` plus `dir/export.json`.
pub fn write_dataset<R: Rng>(rng: &mut R, dir: &Path, n: usize, classes: &[ClassLabel]) -> Vec<SynthBoard> {
    let images = dir.join("images");
    std::fs::create_dir_all(&images).unwrap();
    let boards: Vec<SynthBoard> = (0..n)
        .map(|i| SynthBoard::random(rng, &format!("board_{i:02}"), 160, 120, classes))
        .collect();
    for b in &boards {
        b.render().save(&images.join(b.file_name())).unwrap();
    }
    let tasks: Vec<serde_json::Value> = boards
        .iter()
        .enumerate()
        .map(|(i, b)| labelstudio_task(b, i + 1))
        .collect();
    std::fs::write(dir.join("export.json"), serde_json::to_string_pretty(&tasks).unwrap()).unwrap();
    boards
}
