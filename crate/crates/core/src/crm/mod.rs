//! Critical-raw-material accounting for detected PCB components.
//!
//! Each detector class maps to a component category, and each category to
//! the set of critical raw materials it contains. Inventories count
//! contributing components per element; they are a proxy for material
//! presence, not a mass estimate.

mod element;
mod inventory;
mod mapping;

use thiserror::Error;

pub use element::CrmElement;
pub use inventory::{aggregate, inventory, CrmInventory, ElementTally, COUNT_BASIS};
pub use mapping::{default_mapping, load_mapping, CrmMapping, DEFAULT_MAPPING_TOML};

#[derive(Debug, Error)]
pub enum CrmError {
    #[error("unknown element symbol {0:?}")]
    UnknownElement(String),
    #[error("unknown class {0:?} in mapping")]
    UnknownClass(String),
    #[error("class {class:?} maps to undeclared category {category:?}")]
    UndeclaredCategory { class: String, category: String },
    #[error("union category {category:?} references {member:?}, which is not a plain category")]
    UnknownUnionMember { category: String, member: String },
    #[error("category {0:?} does not equal the union of its members")]
    UnionMismatch(String),
    #[error("mapping config: {0}")]
    Config(String),
    #[error("confidence floor {0} is outside [0, 1]")]
    InvalidFloor(f64),
    #[error("inventories were built with different mappings")]
    MixedMappings,
    #[error("inventories were built with different confidence floors ({0} vs {1})")]
    MixedFloors(f64, f64),
    #[error("no inventories to aggregate")]
    NothingToAggregate,
}
