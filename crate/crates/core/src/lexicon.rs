//! Classified thesaurus loading and term matching.
//!
//! Mentions are matched against thesaurus terms first by exact lowercase
//! comparison and then by Levenshtein distance under a length-dependent
//! [`FuzzyPolicy`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event_extract::{normalize, Event};
use crate::iri::{encode_segment, is_absolute_iri};

/// Base under which concept IRIs are minted when a data file leaves the
/// `concept_iri` column as `_`.
pub const CONCEPT_BASE: &str = "http://agatha.example/concept/";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LexCategory {
    Actor,
    Event,
    Place,
    Object,
}

impl LexCategory {
    pub const ALL: [LexCategory; 4] = [LexCategory::Actor, LexCategory::Event, LexCategory::Place, LexCategory::Object];

    pub fn as_str(self) -> &'static str {
        match self {
            LexCategory::Actor => "Actor",
            LexCategory::Event => "Event",
            LexCategory::Place => "Place",
            LexCategory::Object => "Object",
        }
    }
}

impl fmt::Display for LexCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LexCategory {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LexCategory::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| LexiconError::UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TermSource {
    EurovocCriminalLaw,
    ExtendedOntology,
}

impl TermSource {
    pub fn as_str(self) -> &'static str {
        match self {
            TermSource::EurovocCriminalLaw => "EUROVOC_CRIMINAL_LAW",
            TermSource::ExtendedOntology => "EXTENDED_ONTOLOGY",
        }
    }

    fn slug(self) -> &'static str {
        match self {
            TermSource::EurovocCriminalLaw => "eurovoc-criminal-law",
            TermSource::ExtendedOntology => "extended-ontology",
        }
    }
}

impl FromStr for TermSource {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "EUROVOC_CRIMINAL_LAW" => Ok(TermSource::EurovocCriminalLaw),
            "EXTENDED_ONTOLOGY" => Ok(TermSource::ExtendedOntology),
            other => Err(LexiconError::UnknownSource(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("unknown source `{0}`")]
    UnknownSource(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate term `{term}` for source {source_name}")]
    Duplicate {
        line: usize,
        term: String,
        source_name: &'static str,
    },
    #[error("category {category}: manifest expects {expected} terms, file has {found}")]
    CountMismatch {
        category: LexCategory,
        expected: usize,
        found: usize,
    },
    #[error("mention `{0}` is not normalized to lowercase")]
    NotLowercase(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub term: String,
    pub category: LexCategory,
    pub concept_iri: String,
    pub source: TermSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchMethod {
    Exact,
    Levenshtein,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub entry: LexiconEntry,
    /// Mention text that matched.
    pub surface: String,
    pub distance: usize,
    pub method: MatchMethod,
}

impl MatchResult {
    fn new(entry: &LexiconEntry, surface: &str, distance: usize) -> Self {
        MatchResult {
            entry: entry.clone(),
            surface: surface.to_string(),
            distance,
            method: if distance == 0 {
                MatchMethod::Exact
            } else {
                MatchMethod::Levenshtein
            },
        }
    }
}

/// Edit distance over Unicode scalar values (insert, delete, substitute).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let prefix = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, lc) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, sc) in short.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if lc == sc {
                diag
            } else {
                1 + diag.min(above).min(row[j])
            };
            diag = above;
        }
    }
    row[short.len()]
}

/// Maximum accepted distance as a function of term length in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzyPolicy {
    /// Terms shorter than 4 characters.
    pub short_max: usize,
    /// Terms of 4 to 7 characters.
    pub medium_max: usize,
    /// Terms of 8 or more characters.
    pub long_max: usize,
}

impl Default for FuzzyPolicy {
    fn default() -> Self {
        FuzzyPolicy {
            short_max: 0,
            medium_max: 1,
            long_max: 2,
        }
    }
}

impl FuzzyPolicy {
    /// The same threshold for every term length.
    pub fn uniform(max: usize) -> Self {
        FuzzyPolicy {
            short_max: max,
            medium_max: max,
            long_max: max,
        }
    }

    pub fn threshold(&self, term_len: usize) -> usize {
        match term_len {
            0..=3 => self.short_max,
            4..=7 => self.medium_max,
            _ => self.long_max,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Thesaurus {
    entries: Vec<LexiconEntry>,
    lowered: Vec<String>,
    index: HashMap<String, Vec<usize>>,
}

/// Parses `category,count` rows; an optional `TOTAL,<n>` row must agree.
pub fn parse_category_manifest(content: &str) -> Result<BTreeMap<LexCategory, usize>, LexiconError> {
    let mut out = BTreeMap::new();
    let mut total = None;
    for (n, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "category,count" {
            continue;
        }
        let malformed = |message: String| LexiconError::Malformed { line: n + 1, message };
        let (name, count) = line
            .split_once(',')
            .ok_or_else(|| malformed("expected `category,count`".into()))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| malformed(format!("`{count}` is not a count")))?;
        if name.trim() == "TOTAL" {
            total = Some(count);
        } else {
            out.insert(name.trim().parse::<LexCategory>()?, count);
        }
    }
    if let Some(t) = total {
        let sum: usize = out.values().sum();
        if t != sum {
            return Err(LexiconError::Malformed {
                line: 0,
                message: format!("TOTAL {t} but categories sum to {sum}"),
            });
        }
    }
    Ok(out)
}

impl Thesaurus {
    pub fn from_entries(entries: Vec<LexiconEntry>) -> Self {
        let lowered: Vec<String> = entries.iter().map(|e| e.term.to_lowercase()).collect();
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, l) in lowered.iter().enumerate() {
            index.entry(l.clone()).or_default().push(i);
        }
        Thesaurus {
            entries,
            lowered,
            index,
        }
    }

    /// Parses `term<TAB>category<TAB>concept_iri<TAB>source` rows (`_` in
    /// the IRI column mints one) and checks category counts against the
    /// manifest.
    pub fn load(tsv: &str, manifest: &str) -> Result<Self, LexiconError> {
        let expected = parse_category_manifest(manifest)?;
        let th = Thesaurus::parse(tsv)?;
        let counts = th.category_counts();
        for c in LexCategory::ALL {
            let expected = expected.get(&c).copied().unwrap_or(0);
            let found = counts.get(&c).copied().unwrap_or(0);
            if expected != found {
                return Err(LexiconError::CountMismatch {
                    category: c,
                    expected,
                    found,
                });
            }
        }
        Ok(th)
    }

    pub fn load_files(tsv: &Path, manifest: &Path) -> Result<Self, LexiconError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|e| LexiconError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })
        };
        Thesaurus::load(&read(tsv)?, &read(manifest)?)
    }

    /// Parses the TSV without a manifest check.
    pub fn parse(tsv: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        let mut seen: HashSet<(String, TermSource)> = HashSet::new();
        for (n, line) in tsv.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: String| LexiconError::Malformed { line: line_no, message };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [term, category, iri, source] = cols.as_slice() else {
                return Err(malformed(format!("expected 4 tab-separated columns, found {}", cols.len())));
            };
            if *term == "term" && *category == "category" {
                continue;
            }
            if term.is_empty() {
                return Err(malformed("empty term".into()));
            }
            let category: LexCategory = category.parse()?;
            let source: TermSource = source.parse()?;
            let concept_iri = if iri.is_empty() || *iri == "_" {
                format!("{CONCEPT_BASE}{}/{}", source.slug(), encode_segment(&term.to_lowercase()))
            } else if is_absolute_iri(iri) {
                iri.to_string()
            } else {
                return Err(malformed(format!("`{iri}` is not an absolute IRI")));
            };
            if !seen.insert((term.to_string(), source)) {
                return Err(LexiconError::Duplicate {
                    line: line_no,
                    term: term.to_string(),
                    source_name: source.as_str(),
                });
            }
            entries.push(LexiconEntry {
                term: term.to_string(),
                category,
                concept_iri,
                source,
            });
        }
        Ok(Thesaurus::from_entries(entries))
    }

    /// Union of several thesauri, keeping order.
    pub fn merge(parts: impl IntoIterator<Item = Thesaurus>) -> Self {
        Thesaurus::from_entries(parts.into_iter().flat_map(|t| t.entries).collect())
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn category_counts(&self) -> BTreeMap<LexCategory, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.category).or_default() += 1;
        }
        out
    }

    pub fn contains_term(&self, term: &str) -> bool {
        self.entries.iter().any(|e| e.term == term)
    }

    /// Candidate order shared by exact and fuzzy matching.
    fn rank_key(&self, i: usize) -> (&str, &str, TermSource, usize) {
        (&self.lowered[i], &self.entries[i].term, self.entries[i].source, i)
    }
}

fn check_lowercase(mention: &str) -> Result<(), LexiconError> {
    if mention.to_lowercase() != mention {
        return Err(LexiconError::NotLowercase(mention.to_string()));
    }
    Ok(())
}

pub fn match_exact(mention: &str, th: &Thesaurus) -> Result<Option<MatchResult>, LexiconError> {
    check_lowercase(mention)?;
    Ok(th
        .index
        .get(mention)
        .and_then(|ids| ids.iter().copied().min_by(|a, b| th.rank_key(*a).cmp(&th.rank_key(*b))))
        .map(|i| MatchResult::new(&th.entries[i], mention, 0)))
}

/// Every entry within the policy threshold, by (distance, term).
pub fn match_fuzzy(mention: &str, th: &Thesaurus, policy: &FuzzyPolicy) -> Result<Vec<MatchResult>, LexiconError> {
    check_lowercase(mention)?;
    let m_len = mention.chars().count();
    let mut hits: Vec<(usize, usize)> = Vec::new();
    for (i, lowered) in th.lowered.iter().enumerate() {
        let t_len = lowered.chars().count();
        let max = policy.threshold(t_len);
        if m_len.abs_diff(t_len) > max {
            continue;
        }
        let d = levenshtein(mention, lowered);
        if d <= max {
            hits.push((d, i));
        }
    }
    hits.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| th.rank_key(a.1).cmp(&th.rank_key(b.1))));
    Ok(hits
        .into_iter()
        .map(|(d, i)| MatchResult::new(&th.entries[i], mention, d))
        .collect())
}

/// Event slot a mention was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Action,
    Actor,
    Object,
    Place,
    Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotMatch {
    pub slot: Slot,
    /// Normalized form of the whole mention.
    pub mention: String,
    pub result: MatchResult,
}

/// Best match for a mention: the whole string and, for multi-word
/// mentions, each word; lowest distance wins, the whole string on ties.
pub fn best_match(mention: &str, th: &Thesaurus, policy: &FuzzyPolicy) -> Option<MatchResult> {
    let mention = normalize(mention);
    if mention.is_empty() {
        return None;
    }
    let mut candidates = vec![mention.clone()];
    let words: Vec<String> = mention
        .split_whitespace()
        .map(normalize)
        .filter(|w| !w.is_empty())
        .collect();
    if words.len() > 1 {
        candidates.extend(words);
    }
    let mut best: Option<MatchResult> = None;
    for c in candidates {
        // normalize() lowercases, so this cannot fail
        let Some(hit) = match_fuzzy(&c, th, policy).ok().and_then(|v| v.into_iter().next()) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| hit.distance < b.distance) {
            best = Some(hit);
        }
    }
    best
}

fn event_mentions(e: &Event) -> Vec<(Slot, String)> {
    let mut out = vec![(Slot::Action, e.action.to_lowercase())];
    out.extend(e.actors.iter().map(|m| (Slot::Actor, m.normalized.clone())));
    out.extend(e.objects.iter().map(|m| (Slot::Object, m.normalized.clone())));
    out.extend(e.place.iter().map(|m| (Slot::Place, m.normalized.clone())));
    out.extend(e.time.iter().map(|m| (Slot::Time, m.normalized.clone())));
    out
}

pub type EventMatches = BTreeMap<String, Vec<SlotMatch>>;

/// Matches action, actor, object, place and time mentions of every event.
pub fn match_events(events: &[Event], th: &Thesaurus, policy: &FuzzyPolicy) -> EventMatches {
    events
        .par_iter()
        .map(|e| {
            let matches = event_mentions(e)
                .into_iter()
                .filter_map(|(slot, mention)| {
                    best_match(&mention, th, policy).map(|result| SlotMatch { slot, mention, result })
                })
                .collect();
            (e.event_id.clone(), matches)
        })
        .collect()
}
