//! Subject-verb-object event extraction from the semantic-role layer.
//!
//! Every predicate of a sentence becomes one [`Event`]; its role fillers are
//! expanded to their dependency subtree and sorted into slots by label.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doc_model::{Document, NerLabel, RoleLabel, Sentence};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mention {
    /// Space-joined surface of the span.
    pub text: String,
    /// Lowercased text without outer punctuation.
    pub normalized: String,
    /// Token index of the role-bearing (or first) token.
    pub head_index: usize,
}

impl Mention {
    pub fn new(text: String, head_index: usize) -> Self {
        Mention {
            normalized: normalize(&text),
            text,
            head_index,
        }
    }
}

/// Lowercases and strips leading/trailing non-alphanumeric characters.
pub fn normalize(text: &str) -> String {
    text.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub doc_id: String,
    pub case_id: String,
    pub sentence: usize,
    pub predicate: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub event_id: String,
    /// Verb lemma.
    pub action: String,
    pub actors: Vec<Mention>,
    pub objects: Vec<Mention>,
    pub place: Option<Mention>,
    pub time: Option<Mention>,
    pub organizations: Vec<Mention>,
    pub currencies: Vec<Mention>,
    pub provenance: Provenance,
}

pub fn event_id(doc_id: &str, sentence: usize, predicate: usize) -> String {
    format!("{doc_id}:s{sentence}:p{predicate}")
}

/// Events plus notes about role fillers that did not fit a slot.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub events: Vec<Event>,
    pub warnings: Vec<String>,
}

pub fn extract_events(doc: &Document) -> Vec<Event> {
    let Extraction { events, warnings } = extract_events_report(doc);
    for w in warnings {
        log::warn!("{w}");
    }
    events
}

pub fn extract_events_report(doc: &Document) -> Extraction {
    let mut out = Extraction::default();
    for sentence in &doc.sentences {
        let organizations = ner_mentions(sentence, NerLabel::Organization);
        let currencies = ner_mentions(sentence, NerLabel::Currency);
        for &pred in &sentence.predicates {
            let Some(verb) = sentence.token(pred) else { continue };
            let id = event_id(&doc.doc_id, sentence.index, pred);
            let mut event = Event {
                event_id: id.clone(),
                action: if verb.lemma.is_empty() {
                    verb.surface.to_lowercase()
                } else {
                    verb.lemma.clone()
                },
                actors: Vec::new(),
                objects: Vec::new(),
                place: None,
                time: None,
                organizations: organizations.clone(),
                currencies: currencies.clone(),
                provenance: Provenance {
                    doc_id: doc.doc_id.clone(),
                    case_id: doc.case_id.clone(),
                    sentence: sentence.index,
                    predicate: pred,
                },
            };
            let mut fillers: Vec<_> = sentence.fillers(pred).collect();
            fillers.sort_by_key(|(t, _)| t.index);
            for (token, role) in fillers {
                let mention = expand_span(sentence, token.index);
                let single = match role {
                    RoleLabel::A0 => {
                        event.actors.push(mention);
                        continue;
                    }
                    RoleLabel::A1 => {
                        event.objects.push(mention);
                        continue;
                    }
                    RoleLabel::AmLoc => &mut event.place,
                    RoleLabel::AmTmp => &mut event.time,
                };
                if single.is_none() {
                    *single = Some(mention);
                } else {
                    out.warnings.push(format!(
                        "{id}: extra {role} filler `{}` (token {}) dropped",
                        mention.text, token.index
                    ));
                }
            }
            out.events.push(event);
        }
    }
    out
}

/// Extracts a whole corpus in parallel; output keeps corpus order.
pub fn extract_corpus(docs: &[Document]) -> Vec<Event> {
    docs.par_iter().map(extract_events).collect::<Vec<_>>().concat()
}

/// The filler token plus its dependency subtree, joined in index order.
pub fn expand_span(sentence: &Sentence, filler_index: usize) -> Mention {
    let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
    for t in &sentence.tokens {
        if let Some(h) = t.head {
            children.entry(h).or_default().push(t.index);
        }
    }
    let mut span = BTreeSet::new();
    let mut stack = vec![filler_index];
    while let Some(i) = stack.pop() {
        if span.insert(i) {
            if let Some(c) = children.get(&i) {
                stack.extend(c);
            }
        }
    }
    let text = span
        .iter()
        .filter_map(|i| sentence.token(*i))
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    Mention::new(text, filler_index)
}

/// Maximal runs of consecutive tokens sharing `label`.
fn ner_mentions(sentence: &Sentence, label: NerLabel) -> Vec<Mention> {
    let mut out = Vec::new();
    let mut run: Vec<&crate::doc_model::Token> = Vec::new();
    let flush = |run: &mut Vec<&crate::doc_model::Token>, out: &mut Vec<Mention>| {
        if let Some(first) = run.first() {
            let text = run.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
            out.push(Mention::new(text, first.index));
        }
        run.clear();
    };
    for t in &sentence.tokens {
        if t.ner == Some(label) {
            run.push(t);
        } else {
            flush(&mut run, &mut out);
        }
    }
    flush(&mut run, &mut out);
    out
}

pub fn events_to_jsonl(events: &[Event]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}
