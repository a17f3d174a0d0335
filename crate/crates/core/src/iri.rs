//! IRI checks and deterministic minting.

/// Characters that may not appear raw inside an N-Triples IRI reference.
fn forbidden(c: char) -> bool {
    c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

/// `scheme:rest` with an RFC 3987 scheme and no characters that would need
/// escaping in N-Triples.
pub fn is_absolute_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    let scheme_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok && !rest.is_empty() && !s.chars().any(forbidden)
}

/// Percent-encodes a label so it can be appended to an IRI as one path or
/// fragment segment. Injective: distinct labels give distinct segments.
/// Non-ASCII letters are kept as-is (IRIs allow them).
pub fn encode_segment(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        if forbidden(c) || matches!(c, '%' | '#' | '/' | '?') {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        } else {
            out.push(c);
        }
    }
    out
}
