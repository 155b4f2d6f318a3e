//! Turn component detections into a critical-raw-material inventory.
//!
//! ```text
//! cargo run --example crm_inventory -- [mapping.toml]
//! ```

use std::env;
use std::fs;

use pcbcrm::crm::{aggregate, default_mapping, inventory, load_mapping};
use pcbcrm::{BoundingBox, ClassLabel, Detection};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mapping = match env::args().nth(1) {
        Some(path) => load_mapping(&fs::read_to_string(path)?)?,
        None => default_mapping(),
    };
    let bx = BoundingBox::new(0.5, 0.5, 0.1, 0.1)?;
    let boards = [
        (
            "board_1",
            vec![
                (ClassLabel::Capacitor, 0.9),
                (ClassLabel::Resistor, 0.8),
                (ClassLabel::Coil, 0.7),
            ],
        ),
        (
            "board_2",
            vec![
                (ClassLabel::Ic, 0.95),
                (ClassLabel::Transistor, 0.3),
                (ClassLabel::Diode, 0.6),
            ],
        ),
    ];

    let floor = 0.5;
    let mut per_board = Vec::new();
    for (name, dets) in &boards {
        let dets: Vec<Detection> = dets.iter().map(|&(c, conf)| Detection::new(c, conf, bx)).collect();
        let inv = inventory(name, &dets, &mapping, floor)?;
        println!("{name}:\n{}", inv.to_csv());
        per_board.push(inv);
    }
    let total = aggregate(&per_board)?;
    println!("all boards (confidence >= {floor}):\n{}", total.to_csv());
    for (class, n) in &total.unmapped {
        println!("{n} {class} without a CRM mapping");
    }
    Ok(())
}
