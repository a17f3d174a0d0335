//! Python bindings. Build with `maturin develop` or copy the cdylib to
//! `crimekb.so` next to a script.

use std::path::Path;

use crimekb::event_extract::{events_to_jsonl, extract_corpus};
use crimekb::ingest::{parse_corpus, serialize_corpus};
use crimekb::kb::{execute, parse_ntriples, parse_query, populate, serialize_ntriples, TripleStore, Vocabulary};
use crimekb::lexicon::{self, match_events, FuzzyPolicy, Thesaurus};
use crimekb::pipeline::{self, shipped_thesaurus, PipelineConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn thesaurus() -> PyResult<Thesaurus> {
    shipped_thesaurus().map_err(err)
}

fn policy(fuzzy_max: Option<usize>) -> FuzzyPolicy {
    fuzzy_max.map(FuzzyPolicy::uniform).unwrap_or_default()
}

#[pyfunction]
fn levenshtein(a: &str, b: &str) -> usize {
    lexicon::levenshtein(a, b)
}

/// Parses and re-serializes a corpus, returning (documents, canonical text).
#[pyfunction]
fn normalize_corpus(text: &str) -> PyResult<(usize, String)> {
    let docs = parse_corpus(text).map_err(err)?;
    Ok((docs.len(), serialize_corpus(&docs)))
}

/// Events of an EAGLES-tagged corpus as JSON lines.
#[pyfunction]
fn extract_events(corpus: &str) -> PyResult<String> {
    let docs = parse_corpus(corpus).map_err(err)?;
    Ok(events_to_jsonl(&extract_corpus(&docs)))
}

/// Best thesaurus entry for a mention as (term, category, iri, distance).
#[pyfunction]
#[pyo3(signature = (mention, fuzzy_max=None))]
fn match_term(mention: &str, fuzzy_max: Option<usize>) -> PyResult<Option<(String, String, String, usize)>> {
    let th = thesaurus()?;
    Ok(lexicon::best_match(mention, &th, &policy(fuzzy_max)).map(|m| {
        (m.entry.term, m.entry.category.as_str().to_string(), m.entry.concept_iri, m.distance)
    }))
}

/// Runs the whole pipeline from a TOML config and returns stats as JSON.
#[pyfunction]
fn run(config: &str) -> PyResult<String> {
    let cfg = PipelineConfig::from_file(Path::new(config)).map_err(err)?;
    let stats = pipeline::run(&cfg).map_err(err)?;
    serde_json::to_string(&stats).map_err(err)
}

#[pyclass]
#[derive(Default)]
struct KnowledgeBase {
    store: TripleStore,
}

#[pymethods]
impl KnowledgeBase {
    #[new]
    fn new() -> Self {
        KnowledgeBase::default()
    }

    #[staticmethod]
    fn from_ntriples(text: &str) -> PyResult<Self> {
        Ok(KnowledgeBase {
            store: parse_ntriples(text).map_err(err)?,
        })
    }

    /// Extracts, matches and adds the events of a corpus; returns the
    /// number of new triples.
    #[pyo3(signature = (corpus, fuzzy_max=None))]
    fn add_corpus(&mut self, corpus: &str, fuzzy_max: Option<usize>) -> PyResult<usize> {
        let docs = parse_corpus(corpus).map_err(err)?;
        let events = extract_corpus(&docs);
        let matches = match_events(&events, &thesaurus()?, &policy(fuzzy_max));
        populate(&mut self.store, &events, &matches, &Vocabulary::default()).map_err(err)
    }

    /// SELECT gives TSV, ASK gives YES/NO, CONSTRUCT and DESCRIBE give N-Triples.
    fn query(&self, text: &str) -> PyResult<String> {
        let q = parse_query(text).map_err(err)?;
        Ok(execute(&q, &self.store).map_err(err)?.render())
    }

    fn serialize(&self) -> String {
        serialize_ntriples(&self.store)
    }

    fn __len__(&self) -> usize {
        self.store.len()
    }
}

#[pymodule]
#[pyo3(name = "crimekb")]
fn crimekb_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(extract_events, m)?)?;
    m.add_function(wrap_pyfunction!(match_term, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_class::<KnowledgeBase>()?;
    Ok(())
}
