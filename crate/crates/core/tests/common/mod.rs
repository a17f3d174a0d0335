//! Random annotated documents and triple stores for integration tests.
#![allow(dead_code)]

use crimekb::doc_model::{Document, NerLabel, RoleLabel, Sentence, Token};
use crimekb::kb::{Term, Triple, TripleStore};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VERB_TAGS: [&str; 3] = ["VMIS3S0", "VMN0000", "VAIP3S0"];
pub const OTHER_TAGS: [&str; 9] = ["NCMS000", "NCFP000", "NP00000", "DA0MS0", "SP", "Fp", "AQ0MS00", "W", "Zm"];
const DEPRELS: [&str; 6] = ["nsubj", "obj", "obl", "det", "amod", "punct"];
const WORDS: [&str; 10] = ["João", "matou", "carro", "Lisboa", "ontem", "o", "polícia", "500", "euros", "."];

/// Field values that stress the corpus escaping rules.
pub const TORTURE: [&str; 16] = [
    "a\tb",
    "linha\nnova",
    "cr\r",
    "back\\slash",
    "_",
    "\\_",
    "\\t",
    "#doc x y pt",
    "  espaço ",
    "ação",
    "𝄞",
    "a;b:c",
    "A|B=C",
    "\\",
    "\"aspas\"",
    "0",
];

fn text<R: Rng>(rng: &mut R, torture: bool, allow_empty: bool) -> String {
    if allow_empty && rng.gen_bool(0.1) {
        return String::new();
    }
    if torture && rng.gen_bool(0.4) {
        let mut s = TORTURE.choose(rng).unwrap().to_string();
        if rng.gen_bool(0.3) {
            s.push_str(TORTURE.choose(rng).unwrap());
        }
        return s;
    }
    WORDS.choose(rng).unwrap().to_string()
}

/// A valid sentence: one random dependency tree, roles only on verbs.
pub fn random_sentence<R: Rng>(rng: &mut R, index: usize, torture: bool) -> Sentence {
    let n = rng.gen_range(1..=12);
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![None; n + 1];
    for (k, &tok) in order.iter().enumerate().skip(1) {
        heads[tok] = Some(order[rng.gen_range(0..k)]);
    }
    let pos: Vec<&str> = (0..=n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                *VERB_TAGS.choose(rng).unwrap()
            } else {
                *OTHER_TAGS.choose(rng).unwrap()
            }
        })
        .collect();
    let verbs: Vec<usize> = (1..=n).filter(|i| pos[*i].starts_with('V')).collect();
    let mut tokens = Vec::with_capacity(n);
    for i in 1..=n {
        let mut t = Token::new(i, text(rng, torture, false), pos[i]);
        t.lemma = text(rng, torture, true);
        t.ner = match pos[i] {
            "W" => rng.gen_bool(0.5).then_some(NerLabel::DateTime),
            "Zm" => rng.gen_bool(0.5).then_some(NerLabel::Currency),
            _ if rng.gen_bool(0.3) => Some(*NerLabel::ALL.choose(rng).unwrap()),
            _ => None,
        };
        t.head = heads[i];
        t.deprel = if torture && rng.gen_bool(0.2) {
            text(rng, true, true)
        } else {
            DEPRELS.choose(rng).unwrap().to_string()
        };
        for &v in &verbs {
            if v != i && rng.gen_bool(0.3) {
                t.roles.insert(v, *RoleLabel::ALL.choose(rng).unwrap());
            }
        }
        tokens.push(t);
    }
    Sentence::new(index, tokens)
}

pub fn random_document<R: Rng>(rng: &mut R, doc_id: &str, case_id: &str, torture: bool) -> Document {
    let mut doc = Document::new(doc_id, case_id, "pt");
    for s in 0..rng.gen_range(0..=5) {
        doc.sentences.push(random_sentence(rng, s, torture));
    }
    doc
}

pub fn random_corpus<R: Rng>(rng: &mut R, torture: bool) -> Vec<Document> {
    (0..rng.gen_range(0..=4))
        .map(|i| {
            let case = format!("case-{}", rng.gen_range(0..2));
            random_document(rng, &format!("doc-{i}"), &case, torture)
        })
        .collect()
}

/// Literal values that stress N-Triples escaping.
pub const LITERAL_TORTURE: [&str; 14] = [
    "",
    "\"",
    "\\",
    "linha\nnova",
    "cr\r",
    "tab\there",
    "\\u0041",
    "^^<http://x/>",
    "@pt",
    " . ",
    "#",
    "ação 𝄞",
    "\u{7}",
    "<http://x/a>",
];

pub fn random_iri<R: Rng>(rng: &mut R) -> Term {
    let locals = ["a", "b", "ação", "x%20y", "e:s0:p1", "𝄞", "Actor/joão", "c#d"];
    Term::iri(format!("http://t.example/{}", locals.choose(rng).unwrap())).unwrap()
}

pub fn random_literal<R: Rng>(rng: &mut R) -> Term {
    let mut v = LITERAL_TORTURE.choose(rng).unwrap().to_string();
    if rng.gen_bool(0.5) {
        v.push_str(LITERAL_TORTURE.choose(rng).unwrap());
    }
    if rng.gen_bool(0.2) {
        Term::typed_literal(v, "http://www.w3.org/2001/XMLSchema#string").unwrap()
    } else {
        Term::literal(v)
    }
}

pub fn random_store<R: Rng>(rng: &mut R, max: usize) -> TripleStore {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| {
            let o = if rng.gen_bool(0.5) { random_iri(rng) } else { random_literal(rng) };
            Triple::new(random_iri(rng), random_iri(rng), o).unwrap()
        })
        .collect()
}
