//! Layered annotation model shared by every pipeline stage.
//!
//! A [`Document`] holds sentences of [`Token`]s; each token carries its
//! surface, lemma, EAGLES part-of-speech tag, optional named-entity label,
//! dependency attachment and the semantic roles it fills for verbs of the
//! same sentence.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Named-entity categories.
///
/// `DateTime` and `Currency` are tied to the `W` and `Zm` EAGLES tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NerLabel {
    Person,
    Location,
    Organization,
    DateTime,
    Currency,
}

impl NerLabel {
    pub const ALL: [NerLabel; 5] = [
        NerLabel::Person,
        NerLabel::Location,
        NerLabel::Organization,
        NerLabel::DateTime,
        NerLabel::Currency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NerLabel::Person => "PERSON",
            NerLabel::Location => "LOCATION",
            NerLabel::Organization => "ORGANIZATION",
            NerLabel::DateTime => "DATE_TIME",
            NerLabel::Currency => "CURRENCY",
        }
    }
}

impl fmt::Display for NerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NerLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NerLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown NER label `{s}`"))
    }
}

/// Verb-relative semantic role. The inventory is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RoleLabel {
    /// Actor.
    A0,
    /// Object acted upon.
    A1,
    #[serde(rename = "AM-TMP")]
    AmTmp,
    #[serde(rename = "AM-LOC")]
    AmLoc,
}

impl RoleLabel {
    pub const ALL: [RoleLabel; 4] = [RoleLabel::A0, RoleLabel::A1, RoleLabel::AmTmp, RoleLabel::AmLoc];

    pub fn as_str(self) -> &'static str {
        match self {
            RoleLabel::A0 => "A0",
            RoleLabel::A1 => "A1",
            RoleLabel::AmTmp => "AM-TMP",
            RoleLabel::AmLoc => "AM-LOC",
        }
    }
}

impl fmt::Display for RoleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoleLabel {
    type Err = String;

    /// Accepts both `AM-TMP` and `AM_TMP` spellings.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A0" => Ok(RoleLabel::A0),
            "A1" => Ok(RoleLabel::A1),
            "AM-TMP" | "AM_TMP" => Ok(RoleLabel::AmTmp),
            "AM-LOC" | "AM_LOC" => Ok(RoleLabel::AmLoc),
            other => Err(format!("unknown role label `{other}`")),
        }
    }
}

/// True when an EAGLES tag marks a verb.
pub fn is_verb_tag(pos: &str) -> bool {
    pos.starts_with('V')
}

/// True when an EAGLES tag marks a noun (common or proper).
pub fn is_noun_tag(pos: &str) -> bool {
    pos.starts_with('N')
}

pub fn is_date_tag(pos: &str) -> bool {
    pos.starts_with('W')
}

pub fn is_currency_tag(pos: &str) -> bool {
    pos.starts_with("Zm")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    /// EAGLES tag.
    pub pos: String,
    pub ner: Option<NerLabel>,
    /// 1-based index of the governing token; `None` for the root.
    pub head: Option<usize>,
    pub deprel: String,
    /// Predicate token index -> role this token fills for it.
    pub roles: BTreeMap<usize, RoleLabel>,
}

impl Token {
    pub fn new(index: usize, surface: impl Into<String>, pos: impl Into<String>) -> Self {
        let surface = surface.into();
        Token {
            index,
            lemma: surface.to_lowercase(),
            surface,
            pos: pos.into(),
            ner: None,
            head: None,
            deprel: String::new(),
            roles: BTreeMap::new(),
        }
    }

    pub fn with_lemma(mut self, lemma: impl Into<String>) -> Self {
        self.lemma = lemma.into();
        self
    }

    pub fn with_ner(mut self, ner: NerLabel) -> Self {
        self.ner = Some(ner);
        self
    }

    pub fn with_head(mut self, head: usize, deprel: impl Into<String>) -> Self {
        self.head = Some(head);
        self.deprel = deprel.into();
        self
    }

    pub fn root(mut self) -> Self {
        self.head = None;
        self.deprel = "root".to_string();
        self
    }

    pub fn with_role(mut self, predicate: usize, role: RoleLabel) -> Self {
        self.roles.insert(predicate, role);
        self
    }

    pub fn is_verb(&self) -> bool {
        is_verb_tag(&self.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    /// 0-based position in the document.
    pub index: usize,
    pub tokens: Vec<Token>,
    /// Token indices of verbs that carry at least one role filler, ascending.
    pub predicates: Vec<usize>,
}

impl Sentence {
    /// Builds a sentence and derives its predicate list from the role layer.
    pub fn new(index: usize, tokens: Vec<Token>) -> Self {
        let predicates = derive_predicates(&tokens);
        Sentence {
            index,
            tokens,
            predicates,
        }
    }

    pub fn token(&self, index: usize) -> Option<&Token> {
        self.tokens.iter().find(|t| t.index == index)
    }

    /// Tokens filling some role for `predicate`, in token order.
    pub fn fillers(&self, predicate: usize) -> impl Iterator<Item = (&Token, RoleLabel)> {
        self.tokens
            .iter()
            .filter_map(move |t| t.roles.get(&predicate).map(|r| (t, *r)))
    }
}

fn derive_predicates(tokens: &[Token]) -> Vec<usize> {
    let keys: BTreeSet<usize> = tokens.iter().flat_map(|t| t.roles.keys().copied()).collect();
    keys.into_iter()
        .filter(|k| tokens.iter().any(|t| t.index == *k && t.is_verb()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub case_id: String,
    /// ISO-639-1 code.
    pub language: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, case_id: impl Into<String>, language: impl Into<String>) -> Self {
        Document {
            doc_id: doc_id.into(),
            case_id: case_id.into(),
            language: language.into(),
            sentences: Vec::new(),
        }
    }

    pub fn with_sentence(mut self, tokens: Vec<Token>) -> Self {
        let index = self.sentences.len();
        self.sentences.push(Sentence::new(index, tokens));
        self
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }
}

/// Which invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    EmptyDocId,
    EmptyCaseId,
    /// Identifiers are written whitespace-separated in corpus headers.
    IdWhitespace,
    Language,
    SentenceIndex,
    TokenIndex,
    DuplicateTokenIndex,
    EmptySurface,
    SelfHead,
    DanglingHead,
    RootCount,
    Cycle,
    PosNerMismatch,
    RoleTargetMissing,
    RoleTargetNotVerb,
    PredicateWithoutRoles,
    PredicateNotVerb,
    /// A verb with role fillers is absent from the predicate list, or the
    /// list is not strictly ascending.
    PredicateList,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::EmptyDocId => "empty-doc-id",
            Rule::EmptyCaseId => "empty-case-id",
            Rule::IdWhitespace => "id-whitespace",
            Rule::Language => "language-code",
            Rule::SentenceIndex => "sentence-index",
            Rule::TokenIndex => "token-index",
            Rule::DuplicateTokenIndex => "duplicate-token-index",
            Rule::EmptySurface => "empty-surface",
            Rule::SelfHead => "self-head",
            Rule::DanglingHead => "dangling-head",
            Rule::RootCount => "root-count",
            Rule::Cycle => "dependency-cycle",
            Rule::PosNerMismatch => "pos-ner-mismatch",
            Rule::RoleTargetMissing => "role-target-missing",
            Rule::RoleTargetNotVerb => "role-target-not-verb",
            Rule::PredicateWithoutRoles => "predicate-without-roles",
            Rule::PredicateNotVerb => "predicate-not-verb",
            Rule::PredicateList => "predicate-list",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub sentence: Option<usize>,
    pub token: Option<usize>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        if let Some(s) = self.sentence {
            write!(f, " at sentence {s}")?;
        }
        if let Some(t) = self.token {
            write!(f, " token {t}")?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

/// Checks every model invariant and reports each violation. Never fails.
pub fn validate_document(doc: &Document) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut doc_level = |rule: Rule, detail: String| {
        out.push(Violation {
            sentence: None,
            token: None,
            rule,
            detail,
        })
    };
    if doc.doc_id.is_empty() {
        doc_level(Rule::EmptyDocId, String::new());
    }
    if doc.case_id.is_empty() {
        doc_level(Rule::EmptyCaseId, String::new());
    }
    for (what, id) in [("doc_id", &doc.doc_id), ("case_id", &doc.case_id)] {
        if id.chars().any(char::is_whitespace) {
            doc_level(Rule::IdWhitespace, format!("{what} `{id}`"));
        }
    }
    if !(doc.language.len() == 2 && doc.language.chars().all(|c| c.is_ascii_lowercase())) {
        doc_level(Rule::Language, format!("`{}` is not an ISO-639-1 code", doc.language));
    }
    for (position, sentence) in doc.sentences.iter().enumerate() {
        validate_sentence(position, sentence, &mut out);
    }
    out
}

fn validate_sentence(position: usize, sentence: &Sentence, out: &mut Vec<Violation>) {
    let s = Some(sentence.index);
    let mut push = |token: Option<usize>, rule: Rule, detail: String| {
        out.push(Violation {
            sentence: s,
            token,
            rule,
            detail,
        })
    };
    if sentence.index != position {
        push(None, Rule::SentenceIndex, format!("found at position {position}"));
    }

    let mut seen = HashSet::new();
    for t in &sentence.tokens {
        if t.index == 0 {
            push(Some(t.index), Rule::TokenIndex, "token indices are 1-based".into());
        }
        if !seen.insert(t.index) {
            push(Some(t.index), Rule::DuplicateTokenIndex, String::new());
        }
    }

    let mut roots = 0;
    for t in &sentence.tokens {
        let ti = Some(t.index);
        if t.surface.is_empty() {
            push(ti, Rule::EmptySurface, String::new());
        }
        match t.head {
            None => roots += 1,
            Some(h) if h == t.index => push(ti, Rule::SelfHead, String::new()),
            Some(h) if !seen.contains(&h) => push(ti, Rule::DanglingHead, format!("head {h} does not exist")),
            Some(_) => {}
        }
        match t.ner {
            Some(n) if is_date_tag(&t.pos) && n != NerLabel::DateTime => {
                push(ti, Rule::PosNerMismatch, format!("tag {} requires DATE_TIME, found {n}", t.pos))
            }
            Some(n) if is_currency_tag(&t.pos) && n != NerLabel::Currency => {
                push(ti, Rule::PosNerMismatch, format!("tag {} requires CURRENCY, found {n}", t.pos))
            }
            _ => {}
        }
        for pred in t.roles.keys() {
            match sentence.token(*pred) {
                None => push(ti, Rule::RoleTargetMissing, format!("predicate {pred} does not exist")),
                Some(p) if !p.is_verb() => {
                    push(ti, Rule::RoleTargetNotVerb, format!("predicate {pred} has tag {}", p.pos))
                }
                Some(_) => {}
            }
        }
    }
    if roots != 1 {
        push(None, Rule::RootCount, format!("{roots} roots"));
    }
    if let Some(start) = find_cycle(sentence) {
        push(Some(start), Rule::Cycle, String::new());
    }

    let role_keys: BTreeSet<usize> = sentence.tokens.iter().flat_map(|t| t.roles.keys().copied()).collect();
    for p in &sentence.predicates {
        if !role_keys.contains(p) {
            push(Some(*p), Rule::PredicateWithoutRoles, String::new());
        }
        if sentence.token(*p).is_some_and(|t| !t.is_verb()) {
            push(Some(*p), Rule::PredicateNotVerb, String::new());
        }
    }
    if !sentence.predicates.windows(2).all(|w| w[0] < w[1]) {
        push(None, Rule::PredicateList, "not strictly ascending".into());
    }
    for p in derive_predicates(&sentence.tokens) {
        if !sentence.predicates.contains(&p) {
            push(Some(p), Rule::PredicateList, "verb with role fillers is not listed".into());
        }
    }
}

/// Returns the smallest token index lying on a head cycle, if any.
fn find_cycle(sentence: &Sentence) -> Option<usize> {
    let heads: BTreeMap<usize, Option<usize>> = sentence.tokens.iter().map(|t| (t.index, t.head)).collect();
    let limit = heads.len();
    let mut on_cycle = BTreeSet::new();
    for &start in heads.keys() {
        let mut cur = start;
        let mut steps = 0;
        while let Some(Some(next)) = heads.get(&cur) {
            // self-heads have their own rule
            if *next == cur {
                break;
            }
            cur = *next;
            steps += 1;
            if steps > limit {
                on_cycle.insert(cur);
                break;
            }
        }
    }
    on_cycle.into_iter().next()
}
