//! Data files shipped with the crate.

pub const MAPPING_RULES: &str = include_str!("../data/mapping_rules.csv");
pub const MAPPING_MANIFEST: &str = include_str!("../data/mapping_manifest.csv");
pub const EUROVOC_CRIMINAL_LAW: &str = include_str!("../data/eurovoc_criminal_law.tsv");
pub const EUROVOC_CRIMINAL_LAW_MANIFEST: &str = include_str!("../data/eurovoc_criminal_law.manifest.csv");
pub const EXTENDED_ONTOLOGY: &str = include_str!("../data/extended_ontology.tsv");
pub const EXTENDED_ONTOLOGY_MANIFEST: &str = include_str!("../data/extended_ontology.manifest.csv");
