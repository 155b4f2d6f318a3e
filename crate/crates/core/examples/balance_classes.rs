//! Plan and apply flip/rotation augmentation so rare classes catch up.
//!
//! ```text
//! cargo run --example balance_classes
//! ```

use pcbcrm::dataset_io::{DatasetManifest, ImageRecord, Split};
use pcbcrm::preprocess::AugmentOp;
use pcbcrm::stats::{augmented_records, class_histogram, plan_augmentation, split_summary};
use pcbcrm::{Annotation, BoundingBox, ClassLabel};

fn record(path: &str, split: Split, classes: &[ClassLabel]) -> ImageRecord {
    let annotations = classes
        .iter()
        .enumerate()
        .map(|(i, &c)| Annotation::new(c, BoundingBox::new(0.1 + 0.1 * i as f64, 0.3, 0.08, 0.1).unwrap()))
        .collect();
    ImageRecord {
        image_path: path.to_string(),
        width: 640,
        height: 480,
        split,
        annotations,
        source: None,
    }
}

fn main() {
    use ClassLabel::*;
    let manifest = DatasetManifest {
        records: vec![
            record(
                "pcb_01.jpg",
                Split::Train,
                &[Capacitor, Capacitor, Resistor, Resistor, Resistor, Ic],
            ),
            record("pcb_02.jpg", Split::Train, &[Capacitor, Resistor, Resistor, Transistor]),
            record("pcb_03.jpg", Split::Train, &[Capacitor, Capacitor, Diode, Coil]),
            record("pcb_04.jpg", Split::Val, &[Capacitor, Resistor, Ic]),
        ],
        ..Default::default()
    };

    let summary = split_summary(&manifest);
    println!(
        "train {} / val {}",
        summary.images_in(Split::Train),
        summary.images_in(Split::Val)
    );
    println!("before:\n{}", class_histogram(&manifest).to_table());

    let plan = plan_augmentation(&manifest, 3, &AugmentOp::ALL);
    for step in &plan.steps {
        println!("  {} <- {}", step.image_path, step.op);
    }
    for (class, missing) in &plan.shortfall {
        println!("  {class}: {missing} short, no train image contains it");
    }

    let mut augmented = manifest.clone();
    augmented.records.extend(augmented_records(&manifest, &plan));
    assert_eq!(class_histogram(&augmented), plan.projected);
    println!("after:\n{}", plan.projected.to_table());
}
