use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DatasetError;

/// One of the eight PCB component classes.
///
/// The id/name pairing is fixed: ids are the discriminants below and names
/// are the snake_case identifiers used in label files and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    Capacitor = 0,
    ElectrolyticCapacitor = 1,
    Diode = 2,
    Ic = 3,
    Transistor = 4,
    Resistor = 5,
    Coil = 6,
    Transformer = 7,
}

impl ClassLabel {
    pub const COUNT: usize = 8;

    pub const ALL: [ClassLabel; Self::COUNT] = [
        ClassLabel::Capacitor,
        ClassLabel::ElectrolyticCapacitor,
        ClassLabel::Diode,
        ClassLabel::Ic,
        ClassLabel::Transistor,
        ClassLabel::Resistor,
        ClassLabel::Coil,
        ClassLabel::Transformer,
    ];

    pub fn id(self) -> u32 {
        self as u32
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_id(id: u32) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Capacitor => "capacitor",
            ClassLabel::ElectrolyticCapacitor => "electrolytic_capacitor",
            ClassLabel::Diode => "diode",
            ClassLabel::Ic => "ic",
            ClassLabel::Transistor => "transistor",
            ClassLabel::Resistor => "resistor",
            ClassLabel::Coil => "coil",
            ClassLabel::Transformer => "transformer",
        }
    }

    /// Exact lookup by canonical identifier.
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == name)
    }

    /// Lookup tolerant of annotation-tool spelling: case-insensitive, with
    /// runs of spaces and hyphens treated as underscores. "integrated
    /// circuit(s)" is accepted for `ic`.
    pub fn from_loose_name(name: &str) -> Option<Self> {
        let key = normalize_name(name);
        match key.as_str() {
            "integrated_circuit" | "integrated_circuits" => Some(ClassLabel::Ic),
            other => Self::from_name(other),
        }
    }
}

fn normalize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_sep = false;
    for ch in name.trim().chars() {
        if ch == ' ' || ch == '-' || ch == '_' {
            pending_sep = true;
            continue;
        }
        if pending_sep && !out.is_empty() {
            out.push('_');
        }
        pending_sep = false;
        out.extend(ch.to_lowercase());
    }
    out
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassLabel {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s).ok_or_else(|| DatasetError::UnknownClass(s.to_string()))
    }
}

/// The set of classes a dataset is allowed to use.
///
/// Label files store the fixed class id; an id that is valid in general but
/// absent from the table is still rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassTable(Vec<ClassLabel>);

impl ClassTable {
    pub fn new(classes: Vec<ClassLabel>) -> Self {
        Self(classes)
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.0
    }

    pub fn contains(&self, class: ClassLabel) -> bool {
        self.0.contains(&class)
    }

    pub fn by_id(&self, id: u32) -> Option<ClassLabel> {
        ClassLabel::from_id(id).filter(|c| self.contains(*c))
    }

    pub fn match_name(&self, name: &str) -> Option<ClassLabel> {
        ClassLabel::from_loose_name(name).filter(|c| self.contains(*c))
    }
}

impl Default for ClassTable {
    fn default() -> Self {
        Self(ClassLabel::ALL.to_vec())
    }
}
