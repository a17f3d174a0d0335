//! End-to-end wiring: corpus → tag mapping → events → matches → graph.
//!
//! Configuration is a TOML file; relative paths are resolved against the
//! file's directory.
//!
//! ```toml
//! corpus = "corpus"            # a .tsv file or a directory of them
//! tagset = "ud"                # or "eagles" (no conversion)
//! raw_dir = "raw"              # input for `annotate`
//! pos_lexicon = "pos_lexicon.tsv"
//! gazetteers = ["gazetteers/person.txt"]
//! subclass_file = "schema.tsv" # optional, adds subclass triples
//! out = "out"
//! namespace = "http://agatha.example/onto#"
//!
//! [[thesauri]]
//! file = "terms.tsv"
//! manifest = "terms.manifest.csv"
//!
//! [fuzzy]
//! short_max = 0
//! medium_max = 1
//! long_max = 2
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data;
use crate::doc_model::Document;
use crate::event_extract::{events_to_jsonl, extract_corpus, Event};
use crate::ingest::{parse_corpus_report, BaselineAnnotator, Gazetteer, IngestError, PosLexicon};
use crate::kb::{
    execute, load_schema, parse_ntriples, parse_query, populate, serialize_ntriples, KbError, SharedStore,
    TripleStore, Vocabulary,
};
use crate::lexicon::{match_events, EventMatches, FuzzyPolicy, LexiconError, MatchMethod, SlotMatch, Thesaurus};
use crate::tagmap::{convert_document, MappingTable, TagMapError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error("ingest {path}: {source}")]
    Ingest {
        path: String,
        #[source]
        source: IngestError,
    },
    #[error("tagmap {path}: {source}")]
    TagMap {
        path: String,
        #[source]
        source: TagMapError,
    },
    #[error("lexicon {path}: {source}")]
    Lexicon {
        path: String,
        #[source]
        source: LexiconError,
    },
    #[error("kb {path}: {source}")]
    Kb {
        path: String,
        #[source]
        source: KbError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl PipelineError {
    /// 1 for bad input, 2 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Invariant(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: display(path),
        source,
    })
}

fn write(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
            path: display(dir),
            source,
        })?;
    }
    fs::write(path, content).map_err(|source| PipelineError::Io {
        path: display(path),
        source,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tagset {
    /// Tags are already EAGLES.
    #[default]
    Eagles,
    /// Tags are `CATEGORY|feat=val|...` and go through the mapping table.
    Ud,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThesaurusFiles {
    pub file: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    #[serde(default)]
    pub tagset: Tagset,
    pub raw_dir: Option<PathBuf>,
    pub language: Option<String>,
    pub pos_lexicon: Option<PathBuf>,
    #[serde(default)]
    pub gazetteers: Vec<PathBuf>,
    pub mapping_rules: Option<PathBuf>,
    pub mapping_manifest: Option<PathBuf>,
    /// Empty means the shipped thesauri.
    #[serde(default)]
    pub thesauri: Vec<ThesaurusFiles>,
    pub subclass_file: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub fuzzy: Option<FuzzyPolicy>,
    pub namespace: Option<String>,
}

impl PipelineConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::Config {
            path: display(base),
            message: e.to_string(),
        })?;
        cfg.resolve(base);
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::parse(&text, base).map_err(|e| match e {
            PipelineError::Config { message, .. } => PipelineError::Config {
                path: display(path),
                message,
            },
            other => other,
        })
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.corpus,
            &mut self.raw_dir,
            &mut self.pos_lexicon,
            &mut self.mapping_rules,
            &mut self.mapping_manifest,
            &mut self.subclass_file,
            &mut self.out,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        self.gazetteers.iter_mut().for_each(fix);
        for t in &mut self.thesauri {
            fix(&mut t.file);
            fix(&mut t.manifest);
        }
    }

    /// Command-line values win over file values.
    pub fn apply_overrides(&mut self, out: Option<PathBuf>, fuzzy_max: Option<usize>, namespace: Option<String>) {
        if out.is_some() {
            self.out = out;
        }
        if let Some(n) = fuzzy_max {
            self.fuzzy = Some(FuzzyPolicy::uniform(n));
        }
        if namespace.is_some() {
            self.namespace = namespace;
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn policy(&self) -> FuzzyPolicy {
        self.fuzzy.unwrap_or_default()
    }

    pub fn vocabulary(&self) -> Result<Vocabulary> {
        match &self.namespace {
            None => Ok(Vocabulary::default()),
            Some(ns) => Vocabulary::new(ns.clone()).map_err(|e| PipelineError::Config {
                path: "namespace".into(),
                message: e.to_string(),
            }),
        }
    }

    fn require_corpus(&self) -> Result<&Path> {
        self.corpus.as_deref().ok_or_else(|| PipelineError::Config {
            path: "corpus".into(),
            message: "no corpus configured".into(),
        })
    }

    /// Every configured input path must exist.
    pub fn check_paths(&self) -> Result<()> {
        let mut paths: Vec<&Path> = Vec::new();
        paths.extend(self.corpus.as_deref());
        paths.extend(self.pos_lexicon.as_deref());
        paths.extend(self.gazetteers.iter().map(PathBuf::as_path));
        paths.extend(self.mapping_rules.as_deref());
        paths.extend(self.mapping_manifest.as_deref());
        paths.extend(self.subclass_file.as_deref());
        for t in &self.thesauri {
            paths.push(&t.file);
            paths.push(&t.manifest);
        }
        require_existing(paths)
    }

    pub fn mapping_table(&self) -> Result<MappingTable> {
        match (&self.mapping_rules, &self.mapping_manifest) {
            (None, None) => MappingTable::load(data::MAPPING_RULES, data::MAPPING_MANIFEST).map_err(|source| {
                PipelineError::TagMap {
                    path: "<shipped mapping_rules.csv>".into(),
                    source,
                }
            }),
            (Some(r), Some(m)) => {
                MappingTable::load_files(r, m).map_err(|source| PipelineError::TagMap { path: display(r), source })
            }
            _ => Err(PipelineError::Config {
                path: "mapping_rules".into(),
                message: "mapping_rules and mapping_manifest must be given together".into(),
            }),
        }
    }

    pub fn thesaurus(&self) -> Result<Thesaurus> {
        if self.thesauri.is_empty() {
            return shipped_thesaurus().map_err(|source| PipelineError::Lexicon {
                path: "<shipped thesauri>".into(),
                source,
            });
        }
        let parts = self
            .thesauri
            .iter()
            .map(|t| {
                Thesaurus::load(&read(&t.file)?, &read(&t.manifest)?).map_err(|source| PipelineError::Lexicon {
                    path: display(&t.file),
                    source,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Thesaurus::merge(parts))
    }

    pub fn annotator(&self) -> Result<BaselineAnnotator> {
        let lexicon = match &self.pos_lexicon {
            Some(p) => PosLexicon::from_file(p).map_err(|source| PipelineError::Ingest { path: display(p), source })?,
            None => PosLexicon::new(),
        };
        let gazetteers = self
            .gazetteers
            .iter()
            .map(|p| Gazetteer::from_file(p).map_err(|source| PipelineError::Ingest { path: display(p), source }))
            .collect::<Result<Vec<_>>>()?;
        Ok(BaselineAnnotator::new(lexicon, gazetteers))
    }
}

fn require_existing<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Result<()> {
    match paths.into_iter().find(|p| !p.exists()) {
        Some(p) => Err(PipelineError::Config {
            path: display(p),
            message: "path does not exist".into(),
        }),
        None => Ok(()),
    }
}

/// Both shipped term lists, checked against their manifests.
pub fn shipped_thesaurus() -> std::result::Result<Thesaurus, LexiconError> {
    Ok(Thesaurus::merge([
        Thesaurus::load(data::EUROVOC_CRIMINAL_LAW, data::EUROVOC_CRIMINAL_LAW_MANIFEST)?,
        Thesaurus::load(data::EXTENDED_ONTOLOGY, data::EXTENDED_ONTOLOGY_MANIFEST)?,
    ]))
}

/// `path` itself, or the `.tsv` files directly inside it in name order.
pub fn corpus_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = fs::read_dir(path).map_err(|source| PipelineError::Io {
        path: display(path),
        source,
    })?;
    let mut files = Vec::new();
    for e in entries {
        let p = e
            .map_err(|source| PipelineError::Io {
                path: display(path),
                source,
            })?
            .path();
        if p.is_file() && p.extension().is_some_and(|x| x == "tsv") {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Parses every corpus file; doc ids must be unique across files.
pub fn load_corpus(path: &Path) -> Result<Vec<Document>> {
    let files = corpus_files(path)?;
    let parsed: Vec<(PathBuf, Vec<Document>)> = files
        .par_iter()
        .map(|f| {
            let report = parse_corpus_report(&read(f)?).map_err(|source| PipelineError::Ingest {
                path: display(f),
                source,
            })?;
            for w in &report.warnings {
                log::warn!("{}: {w}", f.display());
            }
            Ok((f.clone(), report.documents))
        })
        .collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for (file, batch) in parsed {
        for d in batch {
            if !seen.insert(d.doc_id.clone()) {
                return Err(PipelineError::Config {
                    path: display(&file),
                    message: format!("doc_id `{}` already used by an earlier corpus file", d.doc_id),
                });
            }
            docs.push(d);
        }
    }
    Ok(docs)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub exact: usize,
    pub levenshtein: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub document_count: usize,
    pub sentence_count: usize,
    pub event_count: usize,
    pub match_counts: MatchCounts,
    pub triple_count: usize,
    pub tag_conversions: usize,
    pub tag_fallbacks: usize,
}

/// In-memory result of a run, before anything is written.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub events: Vec<Event>,
    pub matches: EventMatches,
    pub store: TripleStore,
    pub stats: RunStats,
}

#[derive(Serialize)]
struct MatchLine<'a> {
    event_id: &'a str,
    matches: &'a [SlotMatch],
}

impl RunOutput {
    pub fn matches_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let matches = self.matches.get(&e.event_id).map(Vec::as_slice).unwrap_or_default();
            let line = MatchLine {
                event_id: &e.event_id,
                matches,
            };
            out.push_str(&serde_json::to_string(&line).expect("matches serialize"));
            out.push('\n');
        }
        out
    }
}

/// Runs every stage in memory.
pub fn execute_run(cfg: &PipelineConfig) -> Result<RunOutput> {
    cfg.check_paths()?;
    let vocab = cfg.vocabulary()?;
    let mut docs = load_corpus(cfg.require_corpus()?)?;
    let mut stats = RunStats {
        document_count: docs.len(),
        sentence_count: docs.iter().map(|d| d.sentences.len()).sum(),
        ..Default::default()
    };

    if cfg.tagset == Tagset::Ud {
        let table = cfg.mapping_table()?;
        let converted = docs
            .par_iter()
            .map(|d| {
                convert_document(d, &table).map_err(|source| PipelineError::TagMap {
                    path: format!("document {}", d.doc_id),
                    source,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        docs = Vec::with_capacity(converted.len());
        for (d, report) in converted {
            stats.tag_conversions += report.converted;
            stats.tag_fallbacks += report.fallbacks;
            docs.push(d);
        }
    }

    let events = extract_corpus(&docs);
    stats.event_count = events.len();
    let expected: usize = docs
        .iter()
        .flat_map(|d| &d.sentences)
        .map(|s| s.predicates.iter().filter(|p| s.fillers(**p).next().is_some()).count())
        .sum();
    if expected != events.len() {
        return Err(PipelineError::Invariant(format!(
            "{} events for {expected} predicates",
            events.len()
        )));
    }

    let thesaurus = cfg.thesaurus()?;
    let matches = match_events(&events, &thesaurus, &cfg.policy());
    for m in matches.values().flatten() {
        match m.result.method {
            MatchMethod::Exact => stats.match_counts.exact += 1,
            MatchMethod::Levenshtein => stats.match_counts.levenshtein += 1,
        }
    }

    let shared = SharedStore::default();
    shared
        .write(|store| populate(store, &events, &matches, &vocab))
        .map_err(|e| PipelineError::Invariant(format!("populate: {e}")))?;
    if let Some(path) = &cfg.subclass_file {
        let text = read(path)?;
        shared
            .write(|store| load_schema(store, &vocab, &text))
            .map_err(|source| PipelineError::Kb {
                path: display(path),
                source,
            })?;
    }
    let store = shared.into_inner();
    if !store.indexes_consistent() {
        return Err(PipelineError::Invariant("triple indexes out of sync".into()));
    }
    stats.triple_count = store.len();
    Ok(RunOutput {
        events,
        matches,
        store,
        stats,
    })
}

/// Runs the pipeline and writes `events.jsonl`, `matches.jsonl`, `kb.nt`
/// and `stats.json` to the output directory.
pub fn run(cfg: &PipelineConfig) -> Result<RunStats> {
    let output = execute_run(cfg)?;
    let out = cfg.out_dir();
    let kb = serialize_ntriples(&output.store);
    if kb.lines().count() != output.stats.triple_count {
        return Err(PipelineError::Invariant("kb.nt line count differs from triple count".into()));
    }
    write(&out.join("events.jsonl"), &events_to_jsonl(&output.events))?;
    write(&out.join("matches.jsonl"), &output.matches_jsonl())?;
    write(&out.join("kb.nt"), &kb)?;
    let stats = serde_json::to_string_pretty(&output.stats).expect("stats serialize") + "\n";
    write(&out.join("stats.json"), &stats)?;
    log::info!(
        "{} documents, {} events, {} triples",
        output.stats.document_count,
        output.stats.event_count,
        output.stats.triple_count
    );
    Ok(output.stats)
}

/// Evaluates a query file against an N-Triples file and renders the result.
pub fn query(kb_file: &Path, query_file: &Path) -> Result<String> {
    let store = parse_ntriples(&read(kb_file)?).map_err(|source| PipelineError::Kb {
        path: display(kb_file),
        source,
    })?;
    let q = parse_query(&read(query_file)?).map_err(|source| PipelineError::Kb {
        path: display(query_file),
        source,
    })?;
    let out = execute(&q, &store).map_err(|source| PipelineError::Kb {
        path: display(query_file),
        source,
    })?;
    Ok(out.render())
}

/// Raw-text files to annotate: `<raw_dir>/<case>/<doc>.txt`, plus
/// `<raw_dir>/<doc>.txt` under `default_case`.
pub fn raw_files(raw_dir: &Path, default_case: &str) -> Result<Vec<(String, String, PathBuf)>> {
    let list = |dir: &Path| -> Result<Vec<PathBuf>> {
        let mut v: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|source| PipelineError::Io {
                path: display(dir),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        v.sort();
        Ok(v)
    };
    let is_txt = |p: &Path| p.is_file() && p.extension().is_some_and(|x| x == "txt");
    let stem = |p: &Path| p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    let mut out = Vec::new();
    for p in list(raw_dir)? {
        if is_txt(&p) {
            out.push((default_case.to_string(), stem(&p), p));
        } else if p.is_dir() {
            let case = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            for f in list(&p)? {
                if is_txt(&f) {
                    out.push((case.clone(), stem(&f), f));
                }
            }
        }
    }
    Ok(out)
}

/// Annotates every raw file with the baseline annotator and returns one
/// corpus text.
pub fn annotate(cfg: &PipelineConfig, raw_dir: &Path, default_case: &str) -> Result<String> {
    require_existing(
        cfg.pos_lexicon
            .iter()
            .chain(&cfg.gazetteers)
            .map(PathBuf::as_path)
            .chain([raw_dir]),
    )?;
    let annotator = cfg.annotator()?;
    let language = cfg.language.as_deref().unwrap_or("pt");
    let files = raw_files(raw_dir, default_case)?;
    let docs = files
        .par_iter()
        .map(|(case, doc, path)| Ok(annotator.annotate(doc, case, language, &read(path)?)))
        .collect::<Result<Vec<Document>>>()?;
    let mut seen = HashSet::new();
    for d in &docs {
        if !seen.insert(&d.doc_id) {
            return Err(PipelineError::Config {
                path: display(raw_dir),
                message: format!("two raw files map to doc_id `{}`", d.doc_id),
            });
        }
    }
    Ok(crate::ingest::serialize_corpus(&docs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    /// Extracted events as JSON lines.
    Events,
    /// Subclass triples of the configured (or shipped) schema file.
    Schema,
    /// The populated graph as N-Triples.
    Kb,
}

pub fn export(cfg: &PipelineConfig, kind: ExportKind) -> Result<String> {
    match kind {
        ExportKind::Events => {
            cfg.check_paths()?;
            Ok(events_to_jsonl(&execute_run(cfg)?.events))
        }
        ExportKind::Kb => Ok(serialize_ntriples(&execute_run(cfg)?.store)),
        ExportKind::Schema => {
            let vocab = cfg.vocabulary()?;
            let (path, text) = match &cfg.subclass_file {
                Some(p) => (display(p), read(p)?),
                None => ("<shipped extended_ontology.tsv>".to_string(), data::EXTENDED_ONTOLOGY.to_string()),
            };
            let mut store = TripleStore::new();
            load_schema(&mut store, &vocab, &text).map_err(|source| PipelineError::Kb { path, source })?;
            Ok(serialize_ntriples(&store))
        }
    }
}
