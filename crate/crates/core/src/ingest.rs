//! Corpus ingestion.
//!
//! The corpus format is an 8-column, tab-separated token table:
//!
//! ```text
//! #doc <doc_id> <case_id> <lang>
//! INDEX  SURFACE  LEMMA  POS  NER  HEAD  DEPREL  ROLES
//! ```
//!
//! Sentences are separated by blank lines. `_` marks an empty field, `HEAD`
//! is `0` for the root and `ROLES` is a `;`-joined list of `pred:label`
//! pairs. Inside string fields tab, newline, carriage return and backslash
//! are escaped as `\t`, `\n`, `\r` and `\\`; a field that is literally `_`
//! is written `\_`.
//!
//! [`BaselineAnnotator`] produces the same model from raw text with a
//! handful of deterministic rules so the rest of the pipeline can run
//! without trained taggers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use crate::doc_model::{
    is_currency_tag, is_date_tag, is_noun_tag, validate_document, Document, NerLabel, RoleLabel, Sentence, Token,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: expected 8 tab-separated columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}: bad {column} field: {message}")]
    Field {
        line: usize,
        column: &'static str,
        message: String,
    },
    #[error("line {line}: HEAD {head} is out of range for this sentence")]
    HeadOutOfRange { line: usize, head: usize },
    #[error("line {line}: ROLES references missing predicate index {predicate}")]
    MissingPredicate { line: usize, predicate: usize },
    #[error("line {line}: duplicate doc_id `{doc_id}`")]
    DuplicateDocId { line: usize, doc_id: String },
    #[error("line {line}: malformed #doc header: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: token line before any #doc header")]
    NoDocument { line: usize },
    #[error("document `{doc_id}` violates the annotation model: {violations}")]
    Invalid { doc_id: String, violations: String },
    #[error("{path}: {message}")]
    Resource { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// Parsed documents plus non-fatal warnings (dropped role labels).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedCorpus {
    pub documents: Vec<Document>,
    pub warnings: Vec<String>,
}

pub fn parse_corpus(content: &str) -> Result<Vec<Document>> {
    let parsed = parse_corpus_report(content)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    Ok(parsed.documents)
}

struct PendingToken {
    line: usize,
    token: Token,
}

struct PendingDoc {
    doc: Document,
    sentence: Vec<PendingToken>,
}

pub fn parse_corpus_report(content: &str) -> Result<ParsedCorpus> {
    let mut out = ParsedCorpus::default();
    let mut ids: HashSet<String> = HashSet::new();
    let mut current: Option<PendingDoc> = None;

    for (n, raw) in content.split('\n').enumerate() {
        let line_no = n + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.starts_with("#doc") && (line.len() == 4 || line[4..].starts_with([' ', '\t'])) {
            if let Some(p) = current.take() {
                out.documents.push(finish_document(p)?);
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(IngestError::Header {
                    line: line_no,
                    message: format!("expected `#doc <doc_id> <case_id> <lang>`, got {} fields", parts.len()),
                });
            }
            if !ids.insert(parts[1].to_string()) {
                return Err(IngestError::DuplicateDocId {
                    line: line_no,
                    doc_id: parts[1].to_string(),
                });
            }
            current = Some(PendingDoc {
                doc: Document::new(parts[1], parts[2], parts[3]),
                sentence: Vec::new(),
            });
        } else if line.starts_with('#') {
            continue;
        } else if line.trim().is_empty() {
            if let Some(p) = current.as_mut() {
                close_sentence(p)?;
            }
        } else {
            let p = current.as_mut().ok_or(IngestError::NoDocument { line: line_no })?;
            let token = parse_token_line(line, line_no, &mut out.warnings)?;
            p.sentence.push(PendingToken { line: line_no, token });
        }
    }
    if let Some(p) = current.take() {
        out.documents.push(finish_document(p)?);
    }
    Ok(out)
}

fn finish_document(mut p: PendingDoc) -> Result<Document> {
    close_sentence(&mut p)?;
    let violations = validate_document(&p.doc);
    if !violations.is_empty() {
        return Err(IngestError::Invalid {
            doc_id: p.doc.doc_id,
            violations: violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
        });
    }
    Ok(p.doc)
}

fn close_sentence(p: &mut PendingDoc) -> Result<()> {
    if p.sentence.is_empty() {
        return Ok(());
    }
    let pending = std::mem::take(&mut p.sentence);
    let present: HashSet<usize> = pending.iter().map(|t| t.token.index).collect();
    for t in &pending {
        if let Some(h) = t.token.head {
            if !present.contains(&h) {
                return Err(IngestError::HeadOutOfRange { line: t.line, head: h });
            }
        }
        if let Some(&predicate) = t.token.roles.keys().find(|k| !present.contains(k)) {
            return Err(IngestError::MissingPredicate { line: t.line, predicate });
        }
    }
    let index = p.doc.sentences.len();
    p.doc
        .sentences
        .push(Sentence::new(index, pending.into_iter().map(|t| t.token).collect()));
    Ok(())
}

fn parse_token_line(line: &str, line_no: usize, warnings: &mut Vec<String>) -> Result<Token> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 8 {
        return Err(IngestError::Columns {
            line: line_no,
            found: cols.len(),
        });
    }
    let field_err = |column: &'static str, message: String| IngestError::Field {
        line: line_no,
        column,
        message,
    };
    let index: usize = cols[0]
        .parse()
        .map_err(|_| field_err("INDEX", format!("`{}` is not a positive integer", cols[0])))?;
    if index == 0 {
        return Err(field_err("INDEX", "token indices start at 1".into()));
    }
    let surface = unescape_field(cols[1]).map_err(|m| field_err("SURFACE", m))?;
    let lemma = unescape_field(cols[2]).map_err(|m| field_err("LEMMA", m))?;
    let pos = unescape_field(cols[3]).map_err(|m| field_err("POS", m))?;
    let ner = match cols[4] {
        "_" => None,
        s => Some(s.parse::<NerLabel>().map_err(|m| field_err("NER", m))?),
    };
    let head = match cols[5] {
        "0" => None,
        s => Some(
            s.parse::<usize>()
                .map_err(|_| field_err("HEAD", format!("`{s}` is not an integer")))?,
        ),
    };
    let deprel = unescape_field(cols[6]).map_err(|m| field_err("DEPREL", m))?;
    let mut roles = BTreeMap::new();
    if cols[7] != "_" {
        for pair in cols[7].split(';') {
            let (pred, label) = pair
                .split_once(':')
                .ok_or_else(|| field_err("ROLES", format!("`{pair}` is not `pred:label`")))?;
            let pred: usize = pred
                .parse()
                .map_err(|_| field_err("ROLES", format!("`{pred}` is not a token index")))?;
            match label.parse::<RoleLabel>() {
                Ok(role) => {
                    if roles.insert(pred, role).is_some() {
                        return Err(field_err("ROLES", format!("predicate {pred} listed twice")));
                    }
                }
                Err(_) => warnings.push(format!("line {line_no}: dropped unsupported role `{label}` for predicate {pred}")),
            }
        }
    }
    Ok(Token {
        index,
        surface,
        lemma,
        pos,
        ner,
        head,
        deprel,
        roles,
    })
}

pub fn serialize_corpus(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        writeln!(out, "#doc {} {} {}", doc.doc_id, doc.case_id, doc.language).unwrap();
        for sentence in &doc.sentences {
            for t in &sentence.tokens {
                let roles = if t.roles.is_empty() {
                    "_".to_string()
                } else {
                    t.roles
                        .iter()
                        .map(|(p, r)| format!("{p}:{r}"))
                        .collect::<Vec<_>>()
                        .join(";")
                };
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    t.index,
                    escape_field(&t.surface),
                    escape_field(&t.lemma),
                    escape_field(&t.pos),
                    t.ner.map_or("_", NerLabel::as_str),
                    t.head.unwrap_or(0),
                    escape_field(&t.deprel),
                    roles
                )
                .unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn escape_field(s: &str) -> String {
    match s {
        "" => "_".to_string(),
        "_" => "\\_".to_string(),
        _ => {
            let mut out = String::with_capacity(s.len());
            for c in s.chars() {
                match c {
                    '\\' => out.push_str("\\\\"),
                    '\t' => out.push_str("\\t"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    c => out.push(c),
                }
            }
            out
        }
    }
}

pub fn unescape_field(s: &str) -> std::result::Result<String, String> {
    if s == "_" {
        return Ok(String::new());
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('_') => out.push('_'),
            Some(other) => return Err(format!("unknown escape `\\{other}`")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}

/// A flat list of known entity surface forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gazetteer {
    pub name: String,
    /// Lowercase entries; multi-word entries are matched token by token.
    pub entries: HashSet<String>,
    pub label: NerLabel,
}

impl Gazetteer {
    pub fn new(name: impl Into<String>, label: NerLabel, entries: impl IntoIterator<Item = impl AsRef<str>>) -> Self {
        Gazetteer {
            name: name.into(),
            label,
            entries: entries
                .into_iter()
                .map(|e| e.as_ref().split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
                .filter(|e| !e.is_empty())
                .collect(),
        }
    }

    /// Parses the gazetteer file format: `#label <NER>` on the first line,
    /// then one entry per line.
    pub fn parse(name: &str, content: &str) -> std::result::Result<Self, String> {
        let mut lines = content.lines();
        let first = lines.next().unwrap_or_default();
        let label = first
            .strip_prefix("#label")
            .ok_or_else(|| "first line must be `#label <NER label>`".to_string())?
            .trim()
            .parse::<NerLabel>()?;
        let g = Gazetteer::new(name, label, lines.filter(|l| !l.trim().is_empty() && !l.starts_with('#')));
        if g.entries.is_empty() {
            return Err("gazetteer has no entries".into());
        }
        Ok(g)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let content = read(path)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("gazetteer");
        Gazetteer::parse(name, &content).map_err(|message| IngestError::Resource {
            path: path.display().to_string(),
            message,
        })
    }

    fn longest_entry_tokens(&self) -> usize {
        self.entries.iter().map(|e| e.split(' ').count()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosEntry {
    pub tag: String,
    pub lemma: Option<String>,
}

/// Surface form -> EAGLES tag, with an optional lemma column.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PosLexicon {
    entries: HashMap<String, PosEntry>,
}

impl PosLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: impl Into<String>, tag: impl Into<String>, lemma: Option<String>) {
        self.entries.insert(
            surface.into(),
            PosEntry {
                tag: tag.into(),
                lemma,
            },
        );
    }

    /// `surface<TAB>tag[<TAB>lemma]` per line; `#` starts a comment line.
    pub fn parse(content: &str) -> std::result::Result<Self, String> {
        let mut lex = PosLexicon::new();
        for (n, line) in content.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            match cols.as_slice() {
                [surface, tag] if !tag.is_empty() => lex.insert(*surface, *tag, None),
                [surface, tag, lemma] if !tag.is_empty() => lex.insert(*surface, *tag, Some(lemma.to_string())),
                _ => return Err(format!("line {}: expected `surface<TAB>tag[<TAB>lemma]`", n + 1)),
            }
        }
        Ok(lex)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let content = read(path)?;
        PosLexicon::parse(&content).map_err(|message| IngestError::Resource {
            path: path.display().to_string(),
            message,
        })
    }

    /// Exact surface first, then its lowercase form.
    pub fn get(&self, surface: &str) -> Option<&PosEntry> {
        self.entries
            .get(surface)
            .or_else(|| self.entries.get(&surface.to_lowercase()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub const FALLBACK_TAG: &str = "NCMS000";
const PROPER_NOUN_TAG: &str = "NP00000";

static DATE_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d{1,2}/\d{1,2}/\d{2,4}$").unwrap());
static NUMBER_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d+([.,]\d+)?$").unwrap());

const MONTHS: &[&str] = &[
    "janeiro", "fevereiro", "março", "marco", "abril", "maio", "junho", "julho", "agosto", "setembro", "outubro",
    "novembro", "dezembro", "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december",
];

const CURRENCY_WORDS: &[&str] = &[
    "€", "$", "£", "r$", "us$", "eur", "usd", "brl", "euro", "euros", "real", "reais", "dólar", "dólares", "dolar",
    "dolares", "libra", "libras",
];

fn is_currency_word(s: &str) -> bool {
    CURRENCY_WORDS.contains(&s.to_lowercase().as_str())
}

fn is_date_word(s: &str) -> bool {
    DATE_RE.is_match(s) || MONTHS.contains(&s.to_lowercase().as_str())
}

fn is_sentence_end(s: &str) -> bool {
    matches!(s, "." | "!" | "?")
}

fn punctuation_tag(s: &str) -> Option<&'static str> {
    if s.chars().any(char::is_alphanumeric) {
        return None;
    }
    Some(match s {
        "." => "Fp",
        "," => "Fc",
        ";" => "Fx",
        ":" => "Fd",
        "!" => "Fat",
        "?" => "Fit",
        "-" => "Fg",
        "(" => "Fpa",
        ")" => "Fpt",
        "\"" | "'" | "«" | "»" => "Fe",
        _ => "Fz",
    })
}

/// Splits on whitespace, then peels leading and trailing punctuation off
/// each chunk. Dates, numbers and currency symbols stay whole.
pub fn tokenize(raw: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in raw.split_whitespace() {
        if is_currency_word(chunk) || DATE_RE.is_match(chunk) || NUMBER_RE.is_match(chunk) {
            out.push(chunk.to_string());
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        while start < end && !chars[start].is_alphanumeric() {
            out.push(chars[start].to_string());
            start += 1;
        }
        let mut trailing = Vec::new();
        while end > start && !chars[end - 1].is_alphanumeric() {
            trailing.push(chars[end - 1].to_string());
            end -= 1;
        }
        if start < end {
            out.push(chars[start..end].iter().collect());
        }
        out.extend(trailing.into_iter().rev());
    }
    out
}

/// Groups tokens into sentences ending at `.`, `!` or `?`; runs of
/// terminators stay with the sentence they close.
pub fn split_sentences(tokens: Vec<String>) -> Vec<Vec<String>> {
    let mut sentences = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let n = tokens.len();
    for (i, tok) in tokens.iter().enumerate() {
        current.push(tok.clone());
        let next_is_end = i + 1 < n && is_sentence_end(&tokens[i + 1]);
        if is_sentence_end(tok) && !next_is_end {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

/// Rule-based stand-in for the tagging, NER, parsing and SRL stages.
#[derive(Debug, Clone, Default)]
pub struct BaselineAnnotator {
    pub pos_lexicon: PosLexicon,
    pub gazetteers: Vec<Gazetteer>,
}

impl BaselineAnnotator {
    pub fn new(pos_lexicon: PosLexicon, gazetteers: Vec<Gazetteer>) -> Self {
        BaselineAnnotator { pos_lexicon, gazetteers }
    }

    pub fn annotate(&self, doc_id: &str, case_id: &str, language: &str, raw: &str) -> Document {
        let mut doc = Document::new(doc_id, case_id, language);
        for (i, words) in split_sentences(tokenize(raw)).into_iter().enumerate() {
            doc.sentences.push(self.annotate_sentence(i, &words));
        }
        doc
    }

    /// Longest gazetteer match starting at each position: (start, len, label).
    fn gazetteer_spans(&self, lower: &[String]) -> Vec<(usize, usize, NerLabel)> {
        let max_len = self.gazetteers.iter().map(Gazetteer::longest_entry_tokens).max().unwrap_or(0);
        let mut spans = Vec::new();
        let mut i = 0;
        while i < lower.len() {
            let mut hit = None;
            'len: for len in (1..=max_len.min(lower.len() - i)).rev() {
                let candidate = lower[i..i + len].join(" ");
                for g in &self.gazetteers {
                    if g.entries.contains(&candidate) {
                        hit = Some((i, len, g.label));
                        break 'len;
                    }
                }
            }
            match hit {
                Some(span) => {
                    spans.push(span);
                    i += span.1;
                }
                None => i += 1,
            }
        }
        spans
    }

    fn annotate_sentence(&self, index: usize, words: &[String]) -> Sentence {
        let lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
        let n = words.len();
        let mut tokens: Vec<Token> = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let entry = self.pos_lexicon.get(w);
                let pos = entry
                    .map(|e| e.tag.clone())
                    .or_else(|| punctuation_tag(w).map(str::to_string))
                    .unwrap_or_else(|| FALLBACK_TAG.to_string());
                let lemma = entry
                    .and_then(|e| e.lemma.clone())
                    .unwrap_or_else(|| lower[i].clone());
                Token::new(i + 1, w.clone(), pos).with_lemma(lemma)
            })
            .collect();

        // continuation token -> span head position
        let mut attach: HashMap<usize, usize> = HashMap::new();
        for (start, len, label) in self.gazetteer_spans(&lower) {
            for offset in 0..len {
                let t = &mut tokens[start + offset];
                t.ner = Some(label);
                t.pos = match label {
                    NerLabel::DateTime => "W".into(),
                    NerLabel::Currency => "Zm".into(),
                    _ => PROPER_NOUN_TAG.into(),
                };
                if offset > 0 {
                    attach.insert(start + offset, start);
                }
            }
        }
        for i in 0..n {
            if is_date_word(words[i].as_str()) {
                tokens[i].pos = "W".into();
                tokens[i].ner = Some(NerLabel::DateTime);
            } else if NUMBER_RE.is_match(&words[i]) && i + 1 < n && is_currency_word(&words[i + 1]) {
                for j in [i, i + 1] {
                    tokens[j].pos = "Zm".into();
                    tokens[j].ner = Some(NerLabel::Currency);
                }
                attach.insert(i + 1, i);
            }
        }
        for t in &mut tokens {
            if is_date_tag(&t.pos) {
                t.ner = Some(NerLabel::DateTime);
            } else if is_currency_tag(&t.pos) {
                t.ner = Some(NerLabel::Currency);
            }
        }

        let root = tokens.iter().position(Token::is_verb).unwrap_or(0);
        for i in 0..n {
            if i == root {
                tokens[i].head = None;
                tokens[i].deprel = "root".into();
            } else if let Some(&h) = attach.get(&i) {
                tokens[i].head = Some(h + 1);
                tokens[i].deprel = "flat".into();
            } else {
                tokens[i].head = Some(root + 1);
                tokens[i].deprel = "dep".into();
            }
        }

        let is_unit_head = |i: usize| !attach.contains_key(&i);
        let participant = |t: &Token| match t.ner {
            Some(NerLabel::Person) | Some(NerLabel::Organization) => true,
            None => is_noun_tag(&t.pos),
            _ => false,
        };
        let verbs: Vec<usize> = (0..n).filter(|&i| tokens[i].is_verb()).collect();
        for &v in &verbs {
            let pred = v + 1;
            let a0 = (0..v).rev().find(|&i| is_unit_head(i) && participant(&tokens[i]));
            let a1 = (v + 1..n).find(|&i| is_unit_head(i) && participant(&tokens[i]));
            if let Some(i) = a0 {
                tokens[i].roles.insert(pred, RoleLabel::A0);
            }
            if let Some(i) = a1 {
                tokens[i].roles.insert(pred, RoleLabel::A1);
            }
            for i in 0..n {
                if i == v || !is_unit_head(i) {
                    continue;
                }
                match tokens[i].ner {
                    Some(NerLabel::Location) => {
                        tokens[i].roles.insert(pred, RoleLabel::AmLoc);
                    }
                    Some(NerLabel::DateTime) => {
                        tokens[i].roles.insert(pred, RoleLabel::AmTmp);
                    }
                    _ => {}
                }
            }
        }
        Sentence::new(index, tokens)
    }
}
