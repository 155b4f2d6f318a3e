use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dataset_io::{ClassLabel, Detection};

use super::{CrmElement, CrmError, CrmMapping};

/// Count basis recorded in every report: these are component counts, not masses.
pub const COUNT_BASIS: &str = "component_count";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ElementTally {
    /// Detections whose category contains the element.
    pub contributing_component_count: u64,
    pub contributing_classes: BTreeSet<ClassLabel>,
}

/// Critical-raw-material tally for one board or a set of boards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrmInventory {
    pub boards: BTreeSet<String>,
    pub confidence_floor: f64,
    pub basis: &'static str,
    /// Detections at or above the floor, per class (mapped or not).
    pub class_counts: BTreeMap<ClassLabel, u64>,
    pub elements: BTreeMap<CrmElement, ElementTally>,
    /// Detections of classes the mapping does not cover.
    pub unmapped: BTreeMap<ClassLabel, u64>,
    pub below_floor: u64,
    #[serde(skip)]
    mapping: CrmMapping,
}

impl CrmInventory {
    /// Identity element of [`CrmInventory::merge`].
    pub fn empty(mapping: &CrmMapping, confidence_floor: f64) -> Self {
        Self {
            boards: BTreeSet::new(),
            confidence_floor,
            basis: COUNT_BASIS,
            class_counts: BTreeMap::new(),
            elements: BTreeMap::new(),
            unmapped: BTreeMap::new(),
            below_floor: 0,
            mapping: mapping.clone(),
        }
    }

    pub fn mapping(&self) -> &CrmMapping {
        &self.mapping
    }

    /// Element-wise and class-wise sum. Both sides must share mapping and floor.
    pub fn merge(&self, other: &Self) -> Result<Self, CrmError> {
        if self.mapping != other.mapping {
            return Err(CrmError::MixedMappings);
        }
        if self.confidence_floor != other.confidence_floor {
            return Err(CrmError::MixedFloors(self.confidence_floor, other.confidence_floor));
        }
        let mut out = self.clone();
        out.boards.extend(other.boards.iter().cloned());
        for (class, n) in &other.class_counts {
            *out.class_counts.entry(*class).or_default() += n;
        }
        for (class, n) in &other.unmapped {
            *out.unmapped.entry(*class).or_default() += n;
        }
        for (element, tally) in &other.elements {
            let t = out.elements.entry(*element).or_default();
            t.contributing_component_count += tally.contributing_component_count;
            t.contributing_classes
                .extend(tally.contributing_classes.iter().copied());
        }
        out.below_floor += other.below_floor;
        Ok(out)
    }

    pub fn is_empty(&self) -> bool {
        self.class_counts.is_empty() && self.below_floor == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("inventory serializes");
        s.push('\n');
        s
    }

    /// CSV with columns `element,contributing_component_count,contributing_classes`;
    /// classes are `;`-separated.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["element", "contributing_component_count", "contributing_classes"])
            .expect("in-memory write");
        for (element, tally) in &self.elements {
            let classes: Vec<&str> = tally.contributing_classes.iter().map(|c| c.name()).collect();
            writer
                .write_record([
                    element.symbol().to_string(),
                    tally.contributing_component_count.to_string(),
                    classes.join(";"),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Tally the critical raw materials behind one board's detections.
///
/// Detections below `confidence_floor` are excluded (and counted in
/// `below_floor`); detections of unmapped classes go to `unmapped`.
pub fn inventory(
    board: &str,
    detections: &[Detection],
    mapping: &CrmMapping,
    confidence_floor: f64,
) -> Result<CrmInventory, CrmError> {
    if !(0.0..=1.0).contains(&confidence_floor) {
        return Err(CrmError::InvalidFloor(confidence_floor));
    }
    let mut inv = CrmInventory::empty(mapping, confidence_floor);
    inv.boards.insert(board.to_string());
    for d in detections {
        if d.confidence < confidence_floor {
            inv.below_floor += 1;
            continue;
        }
        *inv.class_counts.entry(d.class).or_default() += 1;
        match mapping.elements_of(d.class) {
            Some(elements) => {
                for &e in elements {
                    let t = inv.elements.entry(e).or_default();
                    t.contributing_component_count += 1;
                    t.contributing_classes.insert(d.class);
                }
            }
            None => *inv.unmapped.entry(d.class).or_default() += 1,
        }
    }
    Ok(inv)
}

/// Sum per-board inventories. The order of `inventories` does not matter.
pub fn aggregate(inventories: &[CrmInventory]) -> Result<CrmInventory, CrmError> {
    let (first, rest) = inventories.split_first().ok_or(CrmError::NothingToAggregate)?;
    rest.iter().try_fold(first.clone(), |acc, inv| acc.merge(inv))
}
