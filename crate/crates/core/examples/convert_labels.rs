//! Convert a Label Studio export into per-image label files.
//!
//! ```text
//! cargo run --example convert_labels -- [export.json]
//! ```
//! Without an argument the bundled three-task fixture is used.

use std::env;
use std::fs;

use pcbcrm::dataset_io::{parse_labelstudio_export, parse_yolo_labels, write_yolo_labels, ClassTable};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/labelstudio_3tasks.json");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = env::args().nth(1).unwrap_or_else(|| FIXTURE.to_string());
    let classes = ClassTable::default();
    let fragment = parse_labelstudio_export(&fs::read_to_string(&path)?, &classes)?;

    for record in &fragment.records {
        let text = write_yolo_labels(&record.annotations);
        println!("# task {} ({})", record.task_id, record.image_ref);
        print!("{text}");
        // the text format is lossless at six decimals
        assert_eq!(parse_yolo_labels(&text, &classes)?, record.annotations);
    }
    for w in &fragment.warnings {
        eprintln!("warning: task #{}: {}", w.line, w.message);
    }
    Ok(())
}
