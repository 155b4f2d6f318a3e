use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dataset_io::ClassLabel;

use super::{CrmElement, CrmError};

/// Mapping config equivalent to [`default_mapping`].
///
/// `connectors` and `plating` have no detector class pointing at them; they
/// stay in the table so custom class mappings can use them. `coil` and
/// `transformer` are deliberately left unmapped.
pub const DEFAULT_MAPPING_TOML: &str = r#"# Component category -> critical raw materials present.
[categories]
capacitors = ["Ta", "Pd", "Nb"]
resistors = ["Ru", "Ta"]
semiconductors = ["Ga", "Ge", "In", "Sb", "Ta"]
transistors = ["Ga", "Ge"]
ics = { union_of = ["capacitors", "resistors", "semiconductors", "transistors"] }
connectors = ["Pd", "Ru", "Be"]
plating = ["Ni", "Cu", "Au"]

# Detector class -> component category.
[classes]
capacitor = "capacitors"
electrolytic_capacitor = "capacitors"
resistor = "resistors"
diode = "semiconductors"
transistor = "transistors"
ic = "ics"
"#;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrmMapping {
    /// Resolved element set of every category, unions included.
    pub categories: BTreeMap<String, BTreeSet<CrmElement>>,
    /// Categories declared as the union of other categories.
    pub unions: BTreeMap<String, Vec<String>>,
    pub class_category: BTreeMap<ClassLabel, String>,
}

impl CrmMapping {
    pub fn category_of(&self, class: ClassLabel) -> Option<&str> {
        self.class_category.get(&class).map(String::as_str)
    }

    /// Elements contributed by one detection of `class`; `None` if unmapped.
    pub fn elements_of(&self, class: ClassLabel) -> Option<&BTreeSet<CrmElement>> {
        self.category_of(class).and_then(|c| self.categories.get(c))
    }

    /// Recompute every declared union and compare with the stored sets.
    pub fn check_unions(&self) -> Result<(), CrmError> {
        for (name, members) in &self.unions {
            let expected = union_of(&self.categories, name, members)?;
            if self.categories.get(name) != Some(&expected) {
                return Err(CrmError::UnionMismatch(name.clone()));
            }
        }
        Ok(())
    }
}

fn union_of(
    categories: &BTreeMap<String, BTreeSet<CrmElement>>,
    name: &str,
    members: &[String],
) -> Result<BTreeSet<CrmElement>, CrmError> {
    let mut set = BTreeSet::new();
    for m in members {
        let elements = categories.get(m).ok_or_else(|| CrmError::UnknownUnionMember {
            category: name.to_string(),
            member: m.clone(),
        })?;
        set.extend(elements.iter().copied());
    }
    Ok(set)
}

/// Component categories and the default class assignment.
pub fn default_mapping() -> CrmMapping {
    use CrmElement::*;
    let set = |els: &[CrmElement]| els.iter().copied().collect::<BTreeSet<_>>();
    let mut categories = BTreeMap::new();
    categories.insert("capacitors".to_string(), set(&[Ta, Pd, Nb]));
    categories.insert("resistors".to_string(), set(&[Ru, Ta]));
    categories.insert("semiconductors".to_string(), set(&[Ga, Ge, In, Sb, Ta]));
    categories.insert("transistors".to_string(), set(&[Ga, Ge]));
    categories.insert("connectors".to_string(), set(&[Pd, Ru, Be]));
    categories.insert("plating".to_string(), set(&[Ni, Cu, Au]));
    let ic_members: Vec<String> = ["capacitors", "resistors", "semiconductors", "transistors"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let ics = union_of(&categories, "ics", &ic_members).expect("members declared above");
    categories.insert("ics".to_string(), ics);

    let class_category = [
        (ClassLabel::Capacitor, "capacitors"),
        (ClassLabel::ElectrolyticCapacitor, "capacitors"),
        (ClassLabel::Resistor, "resistors"),
        (ClassLabel::Diode, "semiconductors"),
        (ClassLabel::Transistor, "transistors"),
        (ClassLabel::Ic, "ics"),
    ]
    .into_iter()
    .map(|(c, cat)| (c, cat.to_string()))
    .collect();

    CrmMapping {
        categories,
        unions: BTreeMap::from([("ics".to_string(), ic_members)]),
        class_category,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingConfig {
    #[serde(default)]
    categories: BTreeMap<String, CategorySpec>,
    #[serde(default)]
    classes: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CategorySpec {
    Elements(Vec<String>),
    Union {
        union_of: Vec<String>,
        /// When given, must equal the computed union.
        #[serde(default)]
        elements: Option<Vec<String>>,
    },
}

fn parse_elements(symbols: &[String]) -> Result<BTreeSet<CrmElement>, CrmError> {
    symbols.iter().map(|s| s.parse()).collect()
}

/// Load a mapping from TOML (see [`DEFAULT_MAPPING_TOML`] for the layout).
///
/// A category may be a list of element symbols or `{ union_of = [...] }`;
/// union members must be plain element lists. Classes absent from
/// `[classes]` are unmapped.
pub fn load_mapping(config_text: &str) -> Result<CrmMapping, CrmError> {
    let config: MappingConfig = toml::from_str(config_text).map_err(|e| CrmError::Config(e.to_string()))?;

    let mut categories = BTreeMap::new();
    let mut declared_unions = Vec::new();
    for (name, spec) in &config.categories {
        match spec {
            CategorySpec::Elements(symbols) => {
                categories.insert(name.clone(), parse_elements(symbols)?);
            }
            CategorySpec::Union { union_of, elements } => {
                let explicit = elements.as_deref().map(parse_elements).transpose()?;
                declared_unions.push((name.clone(), union_of.clone(), explicit));
            }
        }
    }
    let mut unions = BTreeMap::new();
    for (name, members, explicit) in declared_unions {
        if let Some(m) = members.iter().find(|m| {
            config
                .categories
                .get(*m)
                .is_some_and(|s| matches!(s, CategorySpec::Union { .. }))
        }) {
            return Err(CrmError::UnknownUnionMember {
                category: name,
                member: format!("{m} (nested unions are not supported)"),
            });
        }
        let set = union_of(&categories, &name, &members)?;
        if explicit.is_some_and(|e| e != set) {
            return Err(CrmError::UnionMismatch(name));
        }
        categories.insert(name.clone(), set);
        unions.insert(name, members);
    }

    let mut class_category = BTreeMap::new();
    for (class_name, category) in &config.classes {
        let class = ClassLabel::from_name(class_name).ok_or_else(|| CrmError::UnknownClass(class_name.clone()))?;
        if !categories.contains_key(category) {
            return Err(CrmError::UndeclaredCategory {
                class: class_name.clone(),
                category: category.clone(),
            });
        }
        class_category.insert(class, category.clone());
    }

    let mapping = CrmMapping {
        categories,
        unions,
        class_category,
    };
    mapping.check_unions()?;
    Ok(mapping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use CrmElement::*;

    fn set(els: &[CrmElement]) -> BTreeSet<CrmElement> {
        els.iter().copied().collect()
    }

    #[test]
    fn default_rows() {
        let m = default_mapping();
        assert_eq!(m.categories["capacitors"], set(&[Ta, Pd, Nb]));
        assert_eq!(m.categories["resistors"], set(&[Ru, Ta]));
        assert_eq!(m.categories["semiconductors"], set(&[Ga, Ge, In, Sb, Ta]));
        assert_eq!(m.categories["transistors"], set(&[Ga, Ge]));
        assert_eq!(m.categories["connectors"], set(&[Pd, Ru, Be]));
        assert_eq!(m.categories["plating"], set(&[Ni, Cu, Au]));
        assert_eq!(m.categories["ics"], set(&[Ta, Pd, Nb, Ru, Ga, Ge, In, Sb]));
        m.check_unions().unwrap();
    }

    #[test]
    fn default_classes() {
        let m = default_mapping();
        assert_eq!(m.category_of(ClassLabel::ElectrolyticCapacitor), Some("capacitors"));
        assert_eq!(m.category_of(ClassLabel::Diode), Some("semiconductors"));
        assert_eq!(m.category_of(ClassLabel::Coil), None);
        assert_eq!(m.category_of(ClassLabel::Transformer), None);
        // connectors/plating are declared but no class reaches them
        assert!(!m.class_category.values().any(|c| c == "connectors" || c == "plating"));
    }

    #[test]
    fn default_config_matches() {
        assert_eq!(load_mapping(DEFAULT_MAPPING_TOML).unwrap(), default_mapping());
    }

    #[test]
    fn unknown_symbol() {
        let err = load_mapping("[categories]\ncapacitors = [\"Ta\", \"Xx\"]\n").unwrap_err();
        assert!(matches!(err, CrmError::UnknownElement(ref s) if s == "Xx"));
        assert!(err.to_string().contains("Xx"));
    }

    #[test]
    fn coil_can_be_mapped() {
        let text = format!("{DEFAULT_MAPPING_TOML}coil = \"windings\"\n")
            .replace("[classes]", "windings = [\"Cu\"]\n\n[classes]");
        let m = load_mapping(&text).unwrap();
        assert_eq!(m.elements_of(ClassLabel::Coil), Some(&set(&[Cu])));
    }

    #[test]
    fn undeclared_category() {
        let err = load_mapping("[classes]\ncoil = \"magnetics\"\n").unwrap_err();
        assert!(matches!(err, CrmError::UndeclaredCategory { ref category, .. } if category == "magnetics"));
    }

    #[test]
    fn unknown_class_name() {
        let err = load_mapping("[categories]\na = [\"Cu\"]\n[classes]\ninductor = \"a\"\n").unwrap_err();
        assert!(matches!(err, CrmError::UnknownClass(_)));
    }

    #[test]
    fn explicit_union_verified() {
        let ok = "[categories]\na = [\"Cu\"]\nb = [\"Au\"]\nab = { union_of = [\"a\", \"b\"], elements = [\"Au\", \"Cu\"] }\n";
        assert_eq!(load_mapping(ok).unwrap().categories["ab"], set(&[Cu, Au]));
        let bad = "[categories]\na = [\"Cu\"]\nb = [\"Au\"]\nab = { union_of = [\"a\", \"b\"], elements = [\"Cu\"] }\n";
        assert!(matches!(load_mapping(bad), Err(CrmError::UnionMismatch(ref n)) if n == "ab"));
        let missing = "[categories]\nab = { union_of = [\"a\"] }\n";
        assert!(matches!(
            load_mapping(missing),
            Err(CrmError::UnknownUnionMember { .. })
        ));
    }

    #[test]
    fn malformed_toml() {
        assert!(matches!(load_mapping("[categories\n"), Err(CrmError::Config(_))));
        assert!(matches!(load_mapping("[other]\n"), Err(CrmError::Config(_))));
    }
}
