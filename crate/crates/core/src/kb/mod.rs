//! In-memory triple store with conjunctive pattern queries.
//!
//! Terms are IRIs or literals; there are no blank nodes. The store keeps
//! set semantics and three position indexes that always mirror the triple
//! set.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{RwLock, RwLockReadGuard};

use thiserror::Error;

use crate::iri::is_absolute_iri;

pub mod ntriples;
pub mod query;
pub mod schema;

pub use ntriples::{parse_ntriples, serialize_ntriples};
pub use query::{execute, parse_query, PatternTerm, Query, QueryOutput, QueryPattern, Solutions, TriplePattern};
pub use schema::{load_schema, populate, EntityClass, Property, Vocabulary, DEFAULT_NAMESPACE};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KbError {
    #[error("literal {literal} in {position} position")]
    LiteralPosition { position: &'static str, literal: String },
    #[error("`{0}` is not an absolute IRI")]
    InvalidIri(String),
    #[error("projected variable ?{0} does not occur in any pattern")]
    UnboundProjection(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown query verb `{verb}`")]
    UnknownVerb { line: usize, verb: String },
    #[error(transparent)]
    Lexicon(#[from] crate::lexicon::LexiconError),
}

pub type Result<T> = std::result::Result<T, KbError>;

/// An RDF term. Literals optionally carry a datatype IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal { value: String, datatype: Option<String> },
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Result<Term> {
        let iri = iri.into();
        if !is_absolute_iri(&iri) {
            return Err(KbError::InvalidIri(iri));
        }
        Ok(Term::Iri(iri))
    }

    pub fn literal(value: impl Into<String>) -> Term {
        Term::Literal {
            value: value.into(),
            datatype: None,
        }
    }

    pub fn typed_literal(value: impl Into<String>, datatype: impl Into<String>) -> Result<Term> {
        let datatype = datatype.into();
        if !is_absolute_iri(&datatype) {
            return Err(KbError::InvalidIri(datatype));
        }
        Ok(Term::Literal {
            value: value.into(),
            datatype: Some(datatype),
        })
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            Term::Literal { .. } => None,
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Term::Iri(i) if !is_absolute_iri(i) => Err(KbError::InvalidIri(i.clone())),
            Term::Literal {
                datatype: Some(dt), ..
            } if !is_absolute_iri(dt) => Err(KbError::InvalidIri(dt.clone())),
            _ => Ok(()),
        }
    }
}

/// N-Triples syntax.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "<{i}>"),
            Term::Literal { value, datatype } => {
                write!(f, "\"{}\"", ntriples::escape_literal(value))?;
                if let Some(dt) = datatype {
                    write!(f, "^^<{dt}>")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    /// Rejects literals in subject or predicate position and malformed IRIs.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Triple> {
        let t = Triple {
            subject,
            predicate,
            object,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (position, term) in [("subject", &self.subject), ("predicate", &self.predicate)] {
            if !term.is_iri() {
                return Err(KbError::LiteralPosition {
                    position,
                    literal: term.to_string(),
                });
            }
        }
        self.subject.check()?;
        self.predicate.check()?;
        self.object.check()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    triples: BTreeSet<Triple>,
    by_subject: HashMap<Term, BTreeSet<Triple>>,
    by_predicate: HashMap<Term, BTreeSet<Triple>>,
    by_object: HashMap<Term, BTreeSet<Triple>>,
}

impl PartialEq for TripleStore {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for TripleStore {}

fn index_add(index: &mut HashMap<Term, BTreeSet<Triple>>, key: &Term, t: &Triple) {
    index.entry(key.clone()).or_default().insert(t.clone());
}

fn index_remove(index: &mut HashMap<Term, BTreeSet<Triple>>, key: &Term, t: &Triple) {
    if let Some(set) = index.get_mut(key) {
        set.remove(t);
        if set.is_empty() {
            index.remove(key);
        }
    }
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    /// Triples in term order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Adds triples with set semantics and returns how many were new. All
    /// triples are validated before any is added.
    pub fn insert<I: IntoIterator<Item = Triple>>(&mut self, triples: I) -> Result<usize> {
        let batch: Vec<Triple> = triples.into_iter().collect();
        for t in &batch {
            t.validate()?;
        }
        Ok(batch.into_iter().filter(|t| self.add_unchecked(t.clone())).count())
    }

    pub fn insert_one(&mut self, t: Triple) -> Result<bool> {
        t.validate()?;
        Ok(self.add_unchecked(t))
    }

    fn add_unchecked(&mut self, t: Triple) -> bool {
        if self.triples.contains(&t) {
            return false;
        }
        index_add(&mut self.by_subject, &t.subject, &t);
        index_add(&mut self.by_predicate, &t.predicate, &t);
        index_add(&mut self.by_object, &t.object, &t);
        self.triples.insert(t);
        true
    }

    fn remove(&mut self, t: &Triple) -> bool {
        if !self.triples.remove(t) {
            return false;
        }
        index_remove(&mut self.by_subject, &t.subject, t);
        index_remove(&mut self.by_predicate, &t.predicate, t);
        index_remove(&mut self.by_object, &t.object, t);
        true
    }

    /// Removes every triple matching `pattern` and returns how many.
    pub fn delete(&mut self, pattern: &TriplePattern) -> usize {
        let doomed: Vec<Triple> = self.pattern_matches(pattern).cloned().collect();
        doomed.iter().filter(|t| self.remove(t)).count()
    }

    /// Triples that could match the given bound positions, using the
    /// smallest applicable index.
    pub(crate) fn candidates<'a>(
        &'a self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        let mut best: Option<&'a BTreeSet<Triple>> = None;
        for (index, key) in [(&self.by_subject, s), (&self.by_predicate, p), (&self.by_object, o)] {
            if let Some(k) = key {
                match index.get(k) {
                    None => return Box::new(std::iter::empty()),
                    Some(set) if best.is_none_or(|b| set.len() < b.len()) => best = Some(set),
                    Some(_) => {}
                }
            }
        }
        match best {
            Some(set) => Box::new(set.iter()),
            None => Box::new(self.triples.iter()),
        }
    }

    /// Triples matching a single pattern (repeated variables must agree).
    pub fn pattern_matches<'a>(&'a self, pattern: &'a TriplePattern) -> impl Iterator<Item = &'a Triple> + 'a {
        self.candidates(pattern.subject.term(), pattern.predicate.term(), pattern.object.term())
            .filter(move |t| pattern.unify(t, &Default::default()).is_some())
    }

    /// Every triple with `iri` as subject or object.
    pub fn describe(&self, iri: &Term) -> TripleStore {
        let mut out = TripleStore::new();
        for index in [&self.by_subject, &self.by_object] {
            if let Some(set) = index.get(iri) {
                for t in set {
                    out.add_unchecked(t.clone());
                }
            }
        }
        out
    }

    /// Checks that the indexes and the triple set agree exactly.
    pub fn indexes_consistent(&self) -> bool {
        let indexed = |index: &HashMap<Term, BTreeSet<Triple>>, key: fn(&Triple) -> &Term| {
            let mut n = 0;
            for (k, set) in index {
                for t in set {
                    if key(t) != k || !self.triples.contains(t) {
                        return false;
                    }
                    n += 1;
                }
            }
            n == self.triples.len()
        };
        indexed(&self.by_subject, |t| &t.subject)
            && indexed(&self.by_predicate, |t| &t.predicate)
            && indexed(&self.by_object, |t| &t.object)
    }
}

impl FromIterator<Triple> for TripleStore {
    /// Collects already-validated triples (e.g. from another store).
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut s = TripleStore::new();
        for t in iter {
            s.add_unchecked(t);
        }
        s
    }
}

/// Single-writer, multi-reader wrapper. A mutation runs entirely under the
/// write lock, so readers see either none or all of it.
#[derive(Debug, Default)]
pub struct SharedStore {
    inner: RwLock<TripleStore>,
}

impl SharedStore {
    pub fn new(store: TripleStore) -> Self {
        SharedStore {
            inner: RwLock::new(store),
        }
    }

    pub fn read(&self) -> RwLockReadGuard<'_, TripleStore> {
        self.inner.read().unwrap_or_else(|e| e.into_inner())
    }

    pub fn write<R>(&self, f: impl FnOnce(&mut TripleStore) -> R) -> R {
        let mut guard = self.inner.write().unwrap_or_else(|e| e.into_inner());
        f(&mut guard)
    }

    pub fn into_inner(self) -> TripleStore {
        self.inner.into_inner().unwrap_or_else(|e| e.into_inner())
    }
}
