//! N-Triples reading and canonical writing.

use super::{KbError, Result, Term, Triple, TripleStore};

/// Escapes the four characters a quoted literal may not hold raw.
pub fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// One triple per line, lines in byte order, each ending with a newline.
pub fn serialize_ntriples(store: &TripleStore) -> String {
    let mut lines: Vec<String> = store.iter().map(|t| t.to_string()).collect();
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn read_uchar(chars: &mut std::str::Chars<'_>, width: usize) -> std::result::Result<char, String> {
    let hex: String = chars.by_ref().take(width).collect();
    if hex.len() != width || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(format!("bad \\u escape `{hex}`"));
    }
    let code = u32::from_str_radix(&hex, 16).expect("hex digits");
    char::from_u32(code).ok_or_else(|| format!("escape {hex} is not a scalar value"))
}

/// Parses `<iri>` at the start of `s`, returning the IRI and the rest.
pub(crate) fn parse_iri_ref(s: &str) -> std::result::Result<(String, &str), String> {
    let body = s.strip_prefix('<').ok_or("expected `<`")?;
    let mut out = String::new();
    let mut chars = body.chars();
    loop {
        match chars.next() {
            None => return Err("unterminated IRI".into()),
            Some('>') => break,
            Some('\\') => match chars.next() {
                Some('u') => out.push(read_uchar(&mut chars, 4)?),
                Some('U') => out.push(read_uchar(&mut chars, 8)?),
                _ => return Err("bad escape in IRI".into()),
            },
            Some(c) => out.push(c),
        }
    }
    Ok((out, chars.as_str()))
}

/// Parses a quoted literal with optional `^^<datatype>` at the start of `s`.
pub(crate) fn parse_literal_at(s: &str) -> std::result::Result<(Term, &str), String> {
    let body = s.strip_prefix('"').ok_or("expected `\"`")?;
    let mut value = String::new();
    let mut chars = body.chars();
    loop {
        match chars.next() {
            None => return Err("unterminated literal".into()),
            Some('"') => break,
            Some('\n') | Some('\r') => return Err("raw line break in literal".into()),
            Some('\\') => match chars.next() {
                Some('t') => value.push('\t'),
                Some('b') => value.push('\u{8}'),
                Some('n') => value.push('\n'),
                Some('r') => value.push('\r'),
                Some('f') => value.push('\u{c}'),
                Some('"') => value.push('"'),
                Some('\'') => value.push('\''),
                Some('\\') => value.push('\\'),
                Some('u') => value.push(read_uchar(&mut chars, 4)?),
                Some('U') => value.push(read_uchar(&mut chars, 8)?),
                other => return Err(format!("bad escape `\\{}`", other.map(String::from).unwrap_or_default())),
            },
            Some(c) => value.push(c),
        }
    }
    let rest = chars.as_str();
    if rest.starts_with('@') {
        return Err("language-tagged literals are not supported".into());
    }
    if let Some(dt) = rest.strip_prefix("^^") {
        let (dt, rest) = parse_iri_ref(dt)?;
        let term = Term::typed_literal(value, dt).map_err(|e| e.to_string())?;
        return Ok((term, rest));
    }
    Ok((Term::literal(value), rest))
}

fn parse_term(s: &str) -> std::result::Result<(Term, &str), String> {
    let s = s.trim_start();
    if s.starts_with('<') {
        let (iri, rest) = parse_iri_ref(s)?;
        Ok((Term::iri(iri).map_err(|e| e.to_string())?, rest))
    } else if s.starts_with('"') {
        parse_literal_at(s)
    } else if s.starts_with("_:") {
        Err("blank nodes are not supported".into())
    } else {
        Err(format!("expected a term at `{}`", s.chars().take(20).collect::<String>()))
    }
}

fn parse_line(line: &str) -> std::result::Result<Option<Triple>, String> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let (s, rest) = parse_term(trimmed)?;
    let (p, rest) = parse_term(rest)?;
    let (o, rest) = parse_term(rest)?;
    let rest = rest.trim_start().strip_prefix('.').ok_or("expected `.` after object")?;
    let rest = rest.trim();
    if !rest.is_empty() && !rest.starts_with('#') {
        return Err(format!("trailing text `{rest}`"));
    }
    Triple::new(s, p, o).map(Some).map_err(|e| e.to_string())
}

pub fn parse_ntriples(text: &str) -> Result<TripleStore> {
    let mut store = TripleStore::new();
    for (n, line) in text.lines().enumerate() {
        match parse_line(line) {
            Ok(Some(t)) => {
                store.insert_one(t)?;
            }
            Ok(None) => {}
            Err(message) => return Err(KbError::Parse { line: n + 1, message }),
        }
    }
    Ok(store)
}
