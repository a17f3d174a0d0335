//! Annotated Portuguese text to a queryable criminal-domain event graph.
//!
//! Stages: [`ingest`] reads annotated corpora (or annotates raw text with a
//! rule baseline), [`tagmap`] converts universal tags to EAGLES,
//! [`event_extract`] turns semantic roles into events, [`lexicon`] links
//! mentions to thesaurus concepts, and [`kb`] stores and queries the graph.
//! [`pipeline`] wires them together.

pub mod data;
pub mod doc_model;
pub mod event_extract;
pub mod ingest;
pub mod iri;
pub mod kb;
pub mod lexicon;
pub mod pipeline;
pub mod tagmap;
