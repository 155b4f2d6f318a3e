use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CrmError;

/// Critical raw materials found in PCB components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CrmElement {
    Ta,
    Pd,
    Nb,
    Ru,
    Ga,
    Ge,
    In,
    Sb,
    Be,
    Ni,
    Cu,
    Au,
}

impl CrmElement {
    pub const ALL: [CrmElement; 12] = [
        CrmElement::Ta,
        CrmElement::Pd,
        CrmElement::Nb,
        CrmElement::Ru,
        CrmElement::Ga,
        CrmElement::Ge,
        CrmElement::In,
        CrmElement::Sb,
        CrmElement::Be,
        CrmElement::Ni,
        CrmElement::Cu,
        CrmElement::Au,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CrmElement::Ta => "Ta",
            CrmElement::Pd => "Pd",
            CrmElement::Nb => "Nb",
            CrmElement::Ru => "Ru",
            CrmElement::Ga => "Ga",
            CrmElement::Ge => "Ge",
            CrmElement::In => "In",
            CrmElement::Sb => "Sb",
            CrmElement::Be => "Be",
            CrmElement::Ni => "Ni",
            CrmElement::Cu => "Cu",
            CrmElement::Au => "Au",
        }
    }
}

impl fmt::Display for CrmElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for CrmElement {
    type Err = CrmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|e| e.symbol() == s)
            .ok_or_else(|| CrmError::UnknownElement(s.to_string()))
    }
}
