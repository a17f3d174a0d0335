//! Universal-Dependencies style tag + features -> EAGLES tag conversion.
//!
//! Rules are keyed by `(category, sorted features)`. A lookup that misses
//! falls back to the bare-category rule and the fallback is reported.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::doc_model::Document;

/// The fourteen source categories covered by the conversion table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UdCategory {
    Noun,
    Verb,
    Propn,
    Pron,
    Adj,
    Det,
    Aux,
    Adp,
    Num,
    Punct,
    Cconj,
    Sconj,
    Intj,
    Adv,
}

impl UdCategory {
    pub const ALL: [UdCategory; 14] = [
        UdCategory::Noun,
        UdCategory::Verb,
        UdCategory::Propn,
        UdCategory::Pron,
        UdCategory::Adj,
        UdCategory::Det,
        UdCategory::Aux,
        UdCategory::Adp,
        UdCategory::Num,
        UdCategory::Punct,
        UdCategory::Cconj,
        UdCategory::Sconj,
        UdCategory::Intj,
        UdCategory::Adv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            UdCategory::Noun => "NOUN",
            UdCategory::Verb => "VERB",
            UdCategory::Propn => "PROPN",
            UdCategory::Pron => "PRON",
            UdCategory::Adj => "ADJ",
            UdCategory::Det => "DET",
            UdCategory::Aux => "AUX",
            UdCategory::Adp => "ADP",
            UdCategory::Num => "NUM",
            UdCategory::Punct => "PUNCT",
            UdCategory::Cconj => "CCONJ",
            UdCategory::Sconj => "SCONJ",
            UdCategory::Intj => "INTJ",
            UdCategory::Adv => "ADV",
        }
    }
}

impl fmt::Display for UdCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UdCategory {
    type Err = TagMapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        UdCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| TagMapError::UnknownCategory(s.to_string()))
    }
}

/// Per-category rule counts of the reference conversion table.
pub const REFERENCE_COUNTS: [(UdCategory, usize); 14] = [
    (UdCategory::Noun, 20),
    (UdCategory::Verb, 101),
    (UdCategory::Propn, 39),
    (UdCategory::Pron, 121),
    (UdCategory::Adj, 70),
    (UdCategory::Det, 62),
    (UdCategory::Aux, 149),
    (UdCategory::Adp, 3),
    (UdCategory::Num, 1),
    (UdCategory::Punct, 18),
    (UdCategory::Cconj, 1),
    (UdCategory::Sconj, 1),
    (UdCategory::Intj, 1),
    (UdCategory::Adv, 2),
];

pub const REFERENCE_TOTAL: usize = 589;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TagMapError {
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("line {line}: duplicate rule for ({category}, [{features}])")]
    DuplicateRule {
        line: usize,
        category: UdCategory,
        features: String,
    },
    #[error("category {category}: manifest expects {expected} rules, rule file has {found}")]
    CountMismatch {
        category: UdCategory,
        expected: usize,
        found: usize,
    },
    #[error("manifest declares TOTAL {declared} but its categories sum to {sum}")]
    TotalMismatch { declared: usize, sum: usize },
    #[error("rule file has rules for {0}, which the manifest does not list")]
    Unmanifested(UdCategory),
    #[error("{file} line {line}: {message}")]
    Malformed {
        file: &'static str,
        line: usize,
        message: String,
    },
    #[error("no rule maps ({category}, [{features}])")]
    Unmapped { category: String, features: String },
    #[error("sentence {sentence} token {token}: {source}")]
    InDocument {
        sentence: usize,
        token: usize,
        #[source]
        source: Box<TagMapError>,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub category: UdCategory,
    /// Sorted `key=value` strings.
    pub features: Vec<String>,
    pub eagles: String,
}

/// Result of one lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conversion<'a> {
    pub eagles: &'a str,
    /// True when the bare-category rule was used.
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct MappingTable {
    rules: Vec<MappingRule>,
    index: HashMap<(UdCategory, Vec<String>), usize>,
    manifest: BTreeMap<UdCategory, usize>,
    total: usize,
}

fn canonical_features<S: AsRef<str>>(features: &[S]) -> Vec<String> {
    let mut f: Vec<String> = features
        .iter()
        .map(|s| s.as_ref().trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    f.sort();
    f
}

fn csv_records(content: &str, file: &'static str) -> Result<Vec<(usize, Vec<String>)>, TagMapError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(content.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| TagMapError::Malformed {
            file,
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

/// Parses `category,count` rows plus a `TOTAL,<n>` row.
pub fn parse_manifest(content: &str) -> Result<(BTreeMap<UdCategory, usize>, usize), TagMapError> {
    let mut manifest = BTreeMap::new();
    let mut total = None;
    for (line, rec) in csv_records(content, "manifest")? {
        let malformed = |message: String| TagMapError::Malformed {
            file: "manifest",
            line,
            message,
        };
        let [name, count] = rec.as_slice() else {
            return Err(malformed("expected `category,count`".into()));
        };
        if name == "category" && count == "count" {
            continue;
        }
        let count: usize = count.parse().map_err(|_| malformed(format!("`{count}` is not a count")))?;
        if name == "TOTAL" {
            total = Some(count);
        } else if manifest.insert(name.parse::<UdCategory>()?, count).is_some() {
            return Err(malformed(format!("{name} listed twice")));
        }
    }
    let sum: usize = manifest.values().sum();
    let declared = total.ok_or_else(|| TagMapError::Malformed {
        file: "manifest",
        line: 0,
        message: "missing TOTAL row".into(),
    })?;
    if declared != sum {
        return Err(TagMapError::TotalMismatch { declared, sum });
    }
    Ok((manifest, declared))
}

impl MappingTable {
    /// Loads a `category,features,eagles` rule file and checks it against a
    /// manifest. `features` is `|`-joined `key=value` pairs or empty.
    pub fn load(rules_csv: &str, manifest_csv: &str) -> Result<Self, TagMapError> {
        let (manifest, total) = parse_manifest(manifest_csv)?;
        let mut rules = Vec::new();
        let mut index = HashMap::new();
        for (line, rec) in csv_records(rules_csv, "rules")? {
            let malformed = |message: String| TagMapError::Malformed {
                file: "rules",
                line,
                message,
            };
            let [category, features, eagles] = rec.as_slice() else {
                return Err(malformed("expected `category,features,eagles`".into()));
            };
            if category == "category" && features == "features" {
                continue;
            }
            let category: UdCategory = category.parse()?;
            if eagles.is_empty() {
                return Err(malformed("empty EAGLES tag".into()));
            }
            let features = canonical_features(&features.split('|').collect::<Vec<_>>());
            let key = (category, features.clone());
            if index.contains_key(&key) {
                return Err(TagMapError::DuplicateRule {
                    line,
                    category,
                    features: features.join("|"),
                });
            }
            index.insert(key, rules.len());
            rules.push(MappingRule {
                category,
                features,
                eagles: eagles.clone(),
            });
        }
        let mut found: BTreeMap<UdCategory, usize> = BTreeMap::new();
        for r in &rules {
            *found.entry(r.category).or_default() += 1;
        }
        if let Some(c) = found.keys().find(|c| !manifest.contains_key(c)) {
            return Err(TagMapError::Unmanifested(*c));
        }
        for (&category, &expected) in &manifest {
            let found = found.get(&category).copied().unwrap_or(0);
            if found != expected {
                return Err(TagMapError::CountMismatch {
                    category,
                    expected,
                    found,
                });
            }
        }
        Ok(MappingTable {
            rules,
            index,
            manifest,
            total,
        })
    }

    pub fn load_files(rules: &Path, manifest: &Path) -> Result<Self, TagMapError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|e| TagMapError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })
        };
        MappingTable::load(&read(rules)?, &read(manifest)?)
    }

    pub fn rules(&self) -> &[MappingRule] {
        &self.rules
    }

    pub fn manifest(&self) -> &BTreeMap<UdCategory, usize> {
        &self.manifest
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn count(&self, category: UdCategory) -> usize {
        self.rules.iter().filter(|r| r.category == category).count()
    }

    /// Exact `(category, sorted features)` lookup, then the bare category.
    pub fn lookup<S: AsRef<str>>(&self, category: &str, features: &[S]) -> Result<Conversion<'_>, TagMapError> {
        let features = canonical_features(features);
        let unmapped = || TagMapError::Unmapped {
            category: category.to_string(),
            features: features.join("|"),
        };
        let cat: UdCategory = category.parse().map_err(|_| unmapped())?;
        if let Some(&i) = self.index.get(&(cat, features.clone())) {
            return Ok(Conversion {
                eagles: &self.rules[i].eagles,
                fallback: false,
            });
        }
        match self.index.get(&(cat, Vec::new())) {
            Some(&i) => Ok(Conversion {
                eagles: &self.rules[i].eagles,
                fallback: true,
            }),
            None => Err(unmapped()),
        }
    }

    pub fn convert_tag<S: AsRef<str>>(&self, category: &str, features: &[S]) -> Result<&str, TagMapError> {
        self.lookup(category, features).map(|c| c.eagles)
    }
}

/// Splits a source tag written as `CATEGORY` or `CATEGORY|key=value|...`.
pub fn split_source_tag(tag: &str) -> (&str, Vec<&str>) {
    let mut parts = tag.split('|');
    let category = parts.next().unwrap_or_default();
    (category, parts.filter(|p| !p.is_empty() && *p != "_").collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConversionReport {
    pub converted: usize,
    pub fallbacks: usize,
}

/// Replaces every token's source tag (held in `pos`, see
/// [`split_source_tag`]) with its EAGLES tag. Other layers are untouched.
pub fn convert_document(doc: &Document, table: &MappingTable) -> Result<(Document, ConversionReport), TagMapError> {
    let mut out = doc.clone();
    let mut report = ConversionReport::default();
    for sentence in &mut out.sentences {
        for token in &mut sentence.tokens {
            let (category, features) = split_source_tag(&token.pos);
            let conv = table.lookup(category, &features).map_err(|e| TagMapError::InDocument {
                sentence: sentence.index,
                token: token.index,
                source: Box::new(e),
            })?;
            report.converted += 1;
            report.fallbacks += usize::from(conv.fallback);
            token.pos = conv.eagles.to_string();
        }
        // predicate list depends on the verb class of each token
        let tokens = std::mem::take(&mut sentence.tokens);
        *sentence = crate::doc_model::Sentence::new(sentence.index, tokens);
    }
    Ok((out, report))
}
