//! Find the board in a photograph, crop to it and remap the labels.
//!
//! ```text
//! cargo run --example board_roi -- [image.png] [out.png]
//! ```
//! Without arguments a synthetic board is generated.

use std::env;
use std::path::Path;

use pcbcrm::preprocess::{contrast_stretch, crop_and_remap, segment_board_roi, RasterImage};
use pcbcrm::{Annotation, BoundingBox, ClassLabel};

fn synthetic() -> (RasterImage, Vec<Annotation>) {
    let mut img = RasterImage::filled(320, 240, [20, 24, 22]).unwrap();
    img.fill_rect(48, 30, 280, 200, [190, 200, 180]);
    img.fill_rect(80, 60, 120, 90, [60, 50, 40]);
    let anns = vec![
        // on the board
        Annotation::new(
            ClassLabel::Ic,
            BoundingBox::from_corners(80.0 / 320.0, 0.25, 0.375, 0.375).quantized(),
        ),
        // a stray label out in the background
        Annotation::new(ClassLabel::Coil, BoundingBox::new(0.05, 0.9, 0.05, 0.05).unwrap()),
    ];
    (img, anns)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = env::args().skip(1).collect();
    let (image, annotations) = match args.first() {
        Some(path) => (RasterImage::load(Path::new(path))?, Vec::new()),
        None => synthetic(),
    };

    let roi = segment_board_roi(&image, 4)?;
    println!("board at x {}..{}, y {}..{}", roi.x0, roi.x1, roi.y0, roi.y1);

    let cropped = crop_and_remap(&image, roi, &annotations)?;
    println!(
        "kept {} labels, dropped {} outside and {} clipped",
        cropped.annotations.len(),
        cropped.dropped_outside,
        cropped.dropped_clipped
    );
    for a in &cropped.annotations {
        println!("  {} {:?}", a.class, a.bbox);
    }

    let enhanced = contrast_stretch(&cropped.image, 2.0, 98.0)?;
    if let Some(out) = args.get(1) {
        enhanced.save(Path::new(out))?;
        println!("wrote {out}");
    }
    Ok(())
}
