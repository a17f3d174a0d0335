//! Conjunctive triple-pattern queries: SELECT, ASK, CONSTRUCT, DESCRIBE.
//!
//! Query text is line oriented:
//!
//! ```text
//! SELECT ?e ?a
//! ?e <http://agatha.example/onto#hasActor> ?a .
//! ?a <http://www.w3.org/2000/01/rdf-schema#label> "joão" .
//! ```
//!
//! The first line may be `SELECT ?v ...`, `SELECT *`, `ASK`,
//! `CONSTRUCT { template }` or `DESCRIBE <iri>`; without it the query is a
//! `SELECT *`. Each further line holds one pattern (several may share a
//! line when separated by ` . `). `WHERE {` and `}` lines are ignored.

use std::collections::{BTreeMap, BTreeSet};

use super::ntriples::{parse_iri_ref, parse_literal_at};
use super::{serialize_ntriples, KbError, Result, Term, Triple, TripleStore};

pub type Binding = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternTerm {
    Term(Term),
    Var(String),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }

    pub fn term(&self) -> Option<&Term> {
        match self {
            PatternTerm::Term(t) => Some(t),
            PatternTerm::Var(_) => None,
        }
    }

    fn resolve<'a>(&'a self, binding: &'a Binding) -> Option<&'a Term> {
        match self {
            PatternTerm::Term(t) => Some(t),
            PatternTerm::Var(v) => binding.get(v),
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

impl std::fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PatternTerm::Term(t) => write!(f, "{t}"),
            PatternTerm::Var(v) => write!(f, "?{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: PatternTerm, object: PatternTerm) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
        }
    }

    fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.positions().into_iter().filter_map(|p| match p {
            PatternTerm::Var(v) => Some(v.as_str()),
            PatternTerm::Term(_) => None,
        })
    }

    fn bound_count(&self, binding: &Binding) -> usize {
        self.positions().iter().filter(|p| p.resolve(binding).is_some()).count()
    }

    /// Extends `binding` so that the pattern equals `t`, if possible.
    pub fn unify(&self, t: &Triple, binding: &Binding) -> Option<Binding> {
        let mut out = binding.clone();
        for (p, value) in self.positions().into_iter().zip([&t.subject, &t.predicate, &t.object]) {
            match p {
                PatternTerm::Term(c) if c != value => return None,
                PatternTerm::Term(_) => {}
                PatternTerm::Var(v) => match out.get(v) {
                    Some(bound) if bound != value => return None,
                    Some(_) => {}
                    None => {
                        out.insert(v.clone(), value.clone());
                    }
                },
            }
        }
        Some(out)
    }

    /// `None` when a variable is unbound or the result is not a valid triple.
    pub fn instantiate(&self, binding: &Binding) -> Option<Triple> {
        let [s, p, o] = self.positions().map(|x| x.resolve(binding).cloned());
        Triple::new(s?, p?, o?).ok()
    }
}

impl std::fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryPattern {
    pub patterns: Vec<TriplePattern>,
    /// `None` projects every variable.
    pub projection: Option<Vec<String>>,
}

impl QueryPattern {
    pub fn new(patterns: Vec<TriplePattern>) -> Self {
        QueryPattern {
            patterns,
            projection: None,
        }
    }

    pub fn project(mut self, vars: &[&str]) -> Self {
        self.projection = Some(vars.iter().map(|v| v.to_string()).collect());
        self
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for p in &self.patterns {
            for v in p.variables() {
                if seen.insert(v) {
                    out.push(v.to_string());
                }
            }
        }
        out
    }

    pub fn output_variables(&self) -> Result<Vec<String>> {
        let all = self.variables();
        match &self.projection {
            None => Ok(all),
            Some(proj) => {
                if let Some(v) = proj.iter().find(|v| !all.contains(v)) {
                    return Err(KbError::UnboundProjection(v.clone()));
                }
                Ok(proj.clone())
            }
        }
    }
}

/// Tabular SELECT result: deduplicated rows in ascending order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Solutions {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl Solutions {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Header of variable names, then one row per solution; cells use
    /// N-Triples term syntax with tabs escaped.
    pub fn to_tsv(&self) -> String {
        let mut out = self.variables.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|t| t.to_string().replace('\t', "\\t")).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

impl TripleStore {
    /// All full bindings satisfying every pattern. An empty pattern list
    /// has no solutions.
    pub fn solve(&self, patterns: &[TriplePattern]) -> Vec<Binding> {
        let mut out = Vec::new();
        if !patterns.is_empty() {
            let remaining: Vec<&TriplePattern> = patterns.iter().collect();
            self.extend(remaining, Binding::new(), &mut out);
        }
        out
    }

    fn extend(&self, mut remaining: Vec<&TriplePattern>, binding: Binding, out: &mut Vec<Binding>) {
        if remaining.is_empty() {
            out.push(binding);
            return;
        }
        let next = (0..remaining.len())
            .max_by_key(|&i| (remaining[i].bound_count(&binding), std::cmp::Reverse(i)))
            .expect("non-empty");
        let pattern = remaining.swap_remove(next);
        let [s, p, o] = pattern.positions().map(|x| x.resolve(&binding));
        for t in self.candidates(s, p, o) {
            if let Some(b) = pattern.unify(t, &binding) {
                self.extend(remaining.clone(), b, out);
            }
        }
    }

    pub fn select(&self, query: &QueryPattern) -> Result<Solutions> {
        let variables = query.output_variables()?;
        let rows: BTreeSet<Vec<Term>> = self
            .solve(&query.patterns)
            .into_iter()
            .map(|b| variables.iter().map(|v| b[v].clone()).collect())
            .collect();
        Ok(Solutions {
            variables,
            rows: rows.into_iter().collect(),
        })
    }

    pub fn ask(&self, query: &QueryPattern) -> Result<bool> {
        Ok(!self.select(query)?.is_empty())
    }

    /// Instantiates `template` once per solution of `where_`; instantiations
    /// with unbound variables are skipped.
    pub fn construct(&self, where_: &QueryPattern, template: &[TriplePattern]) -> Result<TripleStore> {
        where_.output_variables()?;
        Ok(self
            .solve(&where_.patterns)
            .iter()
            .flat_map(|b| template.iter().filter_map(move |t| t.instantiate(b)))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Select(QueryPattern),
    Ask(QueryPattern),
    Construct {
        template: Vec<TriplePattern>,
        pattern: QueryPattern,
    },
    Describe(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryOutput {
    Table(Solutions),
    Boolean(bool),
    Graph(TripleStore),
}

impl QueryOutput {
    /// TSV for tables, `YES`/`NO` for booleans, N-Triples for graphs.
    pub fn render(&self) -> String {
        match self {
            QueryOutput::Table(s) => s.to_tsv(),
            QueryOutput::Boolean(true) => "YES\n".to_string(),
            QueryOutput::Boolean(false) => "NO\n".to_string(),
            QueryOutput::Graph(g) => serialize_ntriples(g),
        }
    }
}

pub fn execute(query: &Query, store: &TripleStore) -> Result<QueryOutput> {
    Ok(match query {
        Query::Select(q) => QueryOutput::Table(store.select(q)?),
        Query::Ask(q) => QueryOutput::Boolean(store.ask(q)?),
        Query::Construct { template, pattern } => QueryOutput::Graph(store.construct(pattern, template)?),
        Query::Describe(iri) => QueryOutput::Graph(store.describe(iri)),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Term(PatternTerm),
    Dot,
    LBrace,
    RBrace,
    Star,
    Word(String),
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<Tok>> {
    let err = |message: String| KbError::Parse { line: line_no, message };
    let mut out = Vec::new();
    let mut rest = line.trim_start();
    while !rest.is_empty() {
        let c = rest.chars().next().unwrap();
        match c {
            '#' => break,
            '.' => {
                out.push(Tok::Dot);
                rest = &rest[1..];
            }
            '{' => {
                out.push(Tok::LBrace);
                rest = &rest[1..];
            }
            '}' => {
                out.push(Tok::RBrace);
                rest = &rest[1..];
            }
            '*' => {
                out.push(Tok::Star);
                rest = &rest[1..];
            }
            '<' => {
                let (iri, tail) = parse_iri_ref(rest).map_err(err)?;
                out.push(Tok::Term(PatternTerm::Term(Term::iri(iri).map_err(|e| err(e.to_string()))?)));
                rest = tail;
            }
            '"' => {
                let (lit, tail) = parse_literal_at(rest).map_err(err)?;
                out.push(Tok::Term(PatternTerm::Term(lit)));
                rest = tail;
            }
            '?' | '$' => {
                let name: String = rest[1..]
                    .chars()
                    .take_while(|c| c.is_alphanumeric() || *c == '_')
                    .collect();
                if name.is_empty() {
                    return Err(err("empty variable name".into()));
                }
                rest = &rest[1 + name.len()..];
                out.push(Tok::Term(PatternTerm::Var(name)));
            }
            c if c.is_alphabetic() => {
                let word: String = rest.chars().take_while(|c| c.is_alphanumeric()).collect();
                rest = &rest[word.len()..];
                out.push(Tok::Word(word));
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
        rest = rest.trim_start();
    }
    Ok(out)
}

fn patterns_from(tokens: Vec<Tok>, line_no: usize) -> Result<Vec<TriplePattern>> {
    let mut out = Vec::new();
    let mut group: Vec<PatternTerm> = Vec::new();
    let mut flush = |group: &mut Vec<PatternTerm>| -> Result<()> {
        if group.is_empty() {
            return Ok(());
        }
        if group.len() != 3 {
            return Err(KbError::Parse {
                line: line_no,
                message: format!("a triple pattern needs 3 terms, found {}", group.len()),
            });
        }
        let o = group.pop().unwrap();
        let p = group.pop().unwrap();
        let s = group.pop().unwrap();
        out.push(TriplePattern::new(s, p, o));
        Ok(())
    };
    for tok in tokens {
        match tok {
            Tok::Term(t) => group.push(t),
            Tok::Dot => flush(&mut group)?,
            other => {
                return Err(KbError::Parse {
                    line: line_no,
                    message: format!("unexpected {other:?} in pattern"),
                })
            }
        }
    }
    flush(&mut group)?;
    Ok(out)
}

pub fn parse_query(text: &str) -> Result<Query> {
    let lines: Vec<(usize, Vec<Tok>)> = text
        .lines()
        .enumerate()
        .map(|(n, l)| lex_line(l, n + 1).map(|toks| (n + 1, toks)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, toks)| !toks.is_empty())
        .collect();
    let mut lines = lines.into_iter().peekable();

    enum Verb {
        Select(Option<Vec<String>>),
        Ask,
        Construct(Vec<TriplePattern>),
        Describe(Term),
    }

    let verb = match lines.peek() {
        Some((line, toks)) if matches!(toks.first(), Some(Tok::Word(_))) => {
            let line = *line;
            let (_, mut toks) = lines.next().unwrap();
            let Tok::Word(word) = toks.remove(0) else { unreachable!() };
            let err = |message: &str| KbError::Parse {
                line,
                message: message.to_string(),
            };
            match word.to_ascii_uppercase().as_str() {
                "SELECT" => {
                    if toks == [Tok::Star] {
                        Verb::Select(None)
                    } else {
                        let vars = toks
                            .into_iter()
                            .map(|t| match t {
                                Tok::Term(PatternTerm::Var(v)) => Ok(v),
                                _ => Err(err("SELECT takes `*` or a list of variables")),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        if vars.is_empty() {
                            Verb::Select(None)
                        } else {
                            Verb::Select(Some(vars))
                        }
                    }
                }
                "ASK" if toks.is_empty() => Verb::Ask,
                "ASK" => return Err(err("ASK takes no arguments on its line")),
                "DESCRIBE" => match toks.as_slice() {
                    [Tok::Term(PatternTerm::Term(t @ Term::Iri(_)))] => Verb::Describe(t.clone()),
                    _ => return Err(err("DESCRIBE takes exactly one <iri>")),
                },
                "CONSTRUCT" => {
                    if toks.first() != Some(&Tok::LBrace) {
                        return Err(err("CONSTRUCT must be followed by `{`"));
                    }
                    toks.remove(0);
                    let mut body = Vec::new();
                    let mut closed = false;
                    loop {
                        for (i, t) in toks.iter().enumerate() {
                            if *t == Tok::RBrace {
                                if i + 1 != toks.len() {
                                    return Err(err("unexpected tokens after `}`"));
                                }
                                closed = true;
                                break;
                            }
                            body.push(t.clone());
                        }
                        if closed {
                            break;
                        }
                        body.push(Tok::Dot);
                        match lines.next() {
                            Some((_, next)) => toks = next,
                            None => return Err(err("unterminated CONSTRUCT template")),
                        }
                    }
                    Verb::Construct(patterns_from(body, line)?)
                }
                _ => return Err(KbError::UnknownVerb { line, verb: word }),
            }
        }
        _ => Verb::Select(None),
    };

    let mut patterns = Vec::new();
    for (line, toks) in lines {
        let toks: Vec<Tok> = match toks.as_slice() {
            [Tok::RBrace] | [Tok::LBrace] => continue,
            [Tok::Word(w), rest @ ..] if w.eq_ignore_ascii_case("WHERE") => match rest {
                [] | [Tok::LBrace] => continue,
                [Tok::LBrace, more @ ..] => more.to_vec(),
                _ => rest.to_vec(),
            },
            _ => toks,
        };
        let toks: Vec<Tok> = toks.into_iter().filter(|t| *t != Tok::RBrace).collect();
        patterns.extend(patterns_from(toks, line)?);
    }

    let mut pattern = QueryPattern::new(patterns);
    Ok(match verb {
        Verb::Select(projection) => {
            pattern.projection = projection;
            pattern.output_variables()?;
            Query::Select(pattern)
        }
        Verb::Ask => Query::Ask(pattern),
        Verb::Construct(template) => Query::Construct { template, pattern },
        Verb::Describe(iri) => {
            if !pattern.patterns.is_empty() {
                return Err(KbError::Parse {
                    line: 1,
                    message: "DESCRIBE takes no patterns".into(),
                });
            }
            Query::Describe(iri)
        }
    })
}
