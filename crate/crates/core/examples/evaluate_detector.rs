//! Score detector output against ground truth.
//!
//! ```text
//! cargo run --example evaluate_detector
//! ```

use pcbcrm::eval::{evaluate, EvalParams, ImageSet};
use pcbcrm::{Annotation, BoundingBox, ClassLabel, Detection};

fn b(cx: f64, cy: f64, w: f64, h: f64) -> BoundingBox {
    BoundingBox::new(cx, cy, w, h).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut gt = ImageSet::new();
    let mut det = ImageSet::new();
    gt.insert(
        "board_a".to_string(),
        vec![
            Annotation::new(ClassLabel::Capacitor, b(0.2, 0.2, 0.1, 0.1)),
            Annotation::new(ClassLabel::Capacitor, b(0.6, 0.2, 0.1, 0.1)),
            Annotation::new(ClassLabel::Ic, b(0.5, 0.6, 0.3, 0.2)),
        ],
    );
    det.insert(
        "board_a".to_string(),
        vec![
            Detection::new(ClassLabel::Capacitor, 0.92, b(0.2, 0.21, 0.1, 0.1)),
            Detection::new(ClassLabel::Capacitor, 0.40, b(0.9, 0.9, 0.05, 0.05)),
            Detection::new(ClassLabel::Capacitor, 0.35, b(0.61, 0.2, 0.1, 0.12)),
            Detection::new(ClassLabel::Ic, 0.88, b(0.52, 0.6, 0.3, 0.22)),
        ],
    );
    gt.insert(
        "board_b".to_string(),
        vec![Annotation::new(ClassLabel::Resistor, b(0.4, 0.4, 0.05, 0.2))],
    );

    let report = evaluate(&gt, &det, &EvalParams::default())?;
    println!("{}", report.summary_line());
    println!();
    print!("{}", report.to_markdown());
    for c in &report.classes {
        let curve: Vec<String> = c
            .pr_curve
            .iter()
            .map(|p| format!("({:.2}, {:.2})", p.recall, p.precision))
            .collect();
        println!("{} PR: {}", c.class, curve.join(" "));
    }
    Ok(())
}
