//! Shared helpers for the integration tests: random evaluation scenes, an
//! independent reference evaluator and synthetic board datasets.
#![allow(dead_code)]

pub mod cli;
pub mod reference;
pub mod synth;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pcbcrm::eval::ImageSet;
use pcbcrm::{Annotation, BoundingBox, ClassLabel, Detection};

/// Boxes in scenes live on a GRID x GRID lattice so the reference can
/// compute IoU exactly in integers.
pub const GRID: i64 = 20;

/// Axis-aligned box in lattice units, `x0 < x1`, `y0 < y1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridBox {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl GridBox {
    pub fn to_bbox(self) -> BoundingBox {
        let g = GRID as f64;
        BoundingBox::from_corners(
            self.x0 as f64 / g,
            self.y0 as f64 / g,
            self.x1 as f64 / g,
            self.y1 as f64 / g,
        )
    }

    pub fn area(self) -> i64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// (intersection, union) in squared lattice units.
    pub fn overlap(self, other: GridBox) -> (i64, i64) {
        let w = (self.x1.min(other.x1) - self.x0.max(other.x0)).max(0);
        let h = (self.y1.min(other.y1) - self.y0.max(other.y0)).max(0);
        let inter = w * h;
        (inter, self.area() + other.area() - inter)
    }
}

#[derive(Debug, Clone)]
pub struct SceneGt {
    pub class: ClassLabel,
    pub grid: GridBox,
}

#[derive(Debug, Clone)]
pub struct SceneDet {
    pub class: ClassLabel,
    pub grid: GridBox,
    /// Confidence in tenths, so ties are common.
    pub conf_tenths: u32,
}

impl SceneDet {
    pub fn confidence(&self) -> f64 {
        self.conf_tenths as f64 / 10.0
    }
}

/// Images keyed by id; ids sort in generation order.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub images: Vec<(String, Vec<SceneGt>, Vec<SceneDet>)>,
}

impl Scene {
    pub fn ground_truth(&self) -> ImageSet<Annotation> {
        self.images
            .iter()
            .map(|(id, gt, _)| {
                (
                    id.clone(),
                    gt.iter().map(|g| Annotation::new(g.class, g.grid.to_bbox())).collect(),
                )
            })
            .collect()
    }

    pub fn detections(&self) -> ImageSet<Detection> {
        self.images
            .iter()
            .map(|(id, _, det)| {
                let dets = det
                    .iter()
                    .map(|d| Detection::new(d.class, d.confidence(), d.grid.to_bbox()))
                    .collect();
                (id.clone(), dets)
            })
            .collect()
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn random_grid_box<R: Rng>(rng: &mut R) -> GridBox {
    let x0 = rng.gen_range(0..GRID - 1);
    let y0 = rng.gen_range(0..GRID - 1);
    let x1 = rng.gen_range(x0 + 1..=GRID.min(x0 + 10));
    let y1 = rng.gen_range(y0 + 1..=GRID.min(y0 + 10));
    GridBox { x0, y0, x1, y1 }
}

fn jitter<R: Rng>(rng: &mut R, b: GridBox) -> GridBox {
    let mut d = || rng.gen_range(-1..=1);
    let x0 = (b.x0 + d()).clamp(0, GRID - 1);
    let y0 = (b.y0 + d()).clamp(0, GRID - 1);
    let x1 = (b.x1 + d()).clamp(x0 + 1, GRID);
    let y1 = (b.y1 + d()).clamp(y0 + 1, GRID);
    GridBox { x0, y0, x1, y1 }
}

/// A scene with at most 5 ground-truth boxes, at most 5 detections and at
/// most 3 classes, spread over one to three images. Detections are mostly
/// jittered copies of ground truth so matches, near misses and ties occur.
pub fn random_scene<R: Rng>(rng: &mut R) -> Scene {
    let n_classes = rng.gen_range(1..=3);
    let mut pool = ClassLabel::ALL.to_vec();
    let classes: Vec<ClassLabel> = (0..n_classes)
        .map(|_| pool.swap_remove(rng.gen_range(0..pool.len())))
        .collect();
    let n_images = rng.gen_range(1..=3);
    let n_gt = rng.gen_range(0..=5);
    let n_det = rng.gen_range(0..=5);
    let mut scene = Scene {
        images: (0..n_images)
            .map(|i| (format!("img{i}"), Vec::new(), Vec::new()))
            .collect(),
    };
    for _ in 0..n_gt {
        let img = rng.gen_range(0..n_images);
        let g = SceneGt {
            class: classes[rng.gen_range(0..classes.len())],
            grid: random_grid_box(rng),
        };
        scene.images[img].1.push(g);
    }
    for _ in 0..n_det {
        let img = rng.gen_range(0..n_images);
        let gts = &scene.images[img].1;
        let (class, grid) = if !gts.is_empty() && rng.gen_bool(0.7) {
            let g = &gts[rng.gen_range(0..gts.len())];
            let class = if rng.gen_bool(0.85) {
                g.class
            } else {
                classes[rng.gen_range(0..classes.len())]
            };
            (class, if rng.gen_bool(0.3) { g.grid } else { jitter(rng, g.grid) })
        } else {
            (classes[rng.gen_range(0..classes.len())], random_grid_box(rng))
        };
        scene.images[img].2.push(SceneDet {
            class,
            grid,
            conf_tenths: rng.gen_range(1..=10),
        });
    }
    scene
}
