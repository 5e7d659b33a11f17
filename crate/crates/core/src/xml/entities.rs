//! Character and entity references.

use std::collections::BTreeMap;

/// ISO-8859-1 entity names for code points 160..=255, in order.
const LATIN1: [&str; 96] = [
    "nbsp", "iexcl", "cent", "pound", "curren", "yen", "brvbar", "sect", "uml", "copy", "ordf",
    "laquo", "not", "shy", "reg", "macr", "deg", "plusmn", "sup2", "sup3", "acute", "micro", "para",
    "middot", "cedil", "sup1", "ordm", "raquo", "frac14", "frac12", "frac34", "iquest", "Agrave",
    "Aacute", "Acirc", "Atilde", "Auml", "Aring", "AElig", "Ccedil", "Egrave", "Eacute", "Ecirc",
    "Euml", "Igrave", "Iacute", "Icirc", "Iuml", "ETH", "Ntilde", "Ograve", "Oacute", "Ocirc",
    "Otilde", "Ouml", "times", "Oslash", "Ugrave", "Uacute", "Ucirc", "Uuml", "Yacute", "THORN",
    "szlig", "agrave", "aacute", "acirc", "atilde", "auml", "aring", "aelig", "ccedil", "egrave",
    "eacute", "ecirc", "euml", "igrave", "iacute", "icirc", "iuml", "eth", "ntilde", "ograve",
    "oacute", "ocirc", "otilde", "ouml", "divide", "oslash", "ugrave", "uacute", "ucirc", "uuml",
    "yacute", "thorn", "yuml",
];

/// Resolves a builtin entity name: the five XML entities and the
/// ISO-Latin-1 table.
pub fn builtin(name: &str) -> Option<char> {
    match name {
        "lt" => Some('<'),
        "gt" => Some('>'),
        "amp" => Some('&'),
        "apos" => Some('\''),
        "quot" => Some('"'),
        _ => LATIN1.iter().position(|n| *n == name).and_then(|i| char::from_u32(160 + i as u32)),
    }
}

/// Decodes the body of a numeric reference (`#38`, `#x26`).
pub fn char_ref(body: &str) -> Option<char> {
    let digits = body.strip_prefix('#')?;
    let code = match digits.strip_prefix('x').or_else(|| digits.strip_prefix('X')) {
        Some(hex) if !hex.is_empty() => u32::from_str_radix(hex, 16).ok()?,
        Some(_) => return None,
        None if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => digits.parse().ok()?,
        None => return None,
    };
    char::from_u32(code).filter(|c| *c != '\0')
}

/// Outcome of expanding one reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    Text(String),
    Unknown,
    /// An internal entity refers back to itself.
    Recursive,
}

/// Expands a reference body (the text between `&` and `;`) against the
/// builtin table and `declared` internal entities. Declared replacement
/// text is itself expanded.
pub fn expand_reference(body: &str, declared: &BTreeMap<String, String>) -> Expansion {
    let mut stack = Vec::new();
    expand_in(body, declared, &mut stack)
}

fn expand_in(body: &str, declared: &BTreeMap<String, String>, stack: &mut Vec<String>) -> Expansion {
    if body.starts_with('#') {
        return char_ref(body).map_or(Expansion::Unknown, |c| Expansion::Text(c.to_string()));
    }
    if let Some(c) = builtin(body) {
        return Expansion::Text(c.to_string());
    }
    let Some(value) = declared.get(body) else { return Expansion::Unknown };
    if stack.iter().any(|s| s == body) {
        return Expansion::Recursive;
    }
    stack.push(body.to_string());
    let mut out = String::new();
    let mut rest = value.as_str();
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let after = &rest[amp + 1..];
        match after.find(';') {
            Some(semi) => {
                match expand_in(&after[..semi], declared, stack) {
                    Expansion::Text(t) => out.push_str(&t),
                    other => {
                        stack.pop();
                        return other;
                    }
                }
                rest = &after[semi + 1..];
            }
            None => {
                out.push('&');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    stack.pop();
    Expansion::Text(out)
}

/// Resolves builtin and numeric references in `text`. Unknown or malformed
/// references are kept verbatim.
pub fn resolve_entities(text: &str) -> String {
    let none = BTreeMap::new();
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let after = &rest[amp + 1..];
        let body_len = after.find(|c: char| !(c.is_alphanumeric() || c == '#' || c == '_' || c == '-' || c == '.'));
        match body_len {
            Some(n) if after[n..].starts_with(';') => match expand_reference(&after[..n], &none) {
                Expansion::Text(t) => {
                    out.push_str(&t);
                    rest = &after[n + 1..];
                }
                _ => {
                    out.push('&');
                    rest = after;
                }
            },
            _ => {
                out.push('&');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Escapes character data.
pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

/// Escapes an attribute value for a double-quoted attribute. Tabs and
/// newlines become character references so value normalization on
/// reparse leaves them intact.
pub fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latin1_table_is_aligned() {
        assert_eq!(builtin("nbsp"), Some('\u{A0}'));
        assert_eq!(builtin("auml"), Some('ä'));
        assert_eq!(builtin("szlig"), Some('ß'));
        assert_eq!(builtin("yuml"), Some('ÿ'));
        assert_eq!(builtin("Uuml"), Some('Ü'));
    }

    #[test]
    fn numeric_references() {
        assert_eq!(char_ref("#228"), Some('ä'));
        assert_eq!(char_ref("#xE4"), Some('ä'));
        assert_eq!(char_ref("#x"), None);
        assert_eq!(char_ref("#0"), None);
        assert_eq!(char_ref("#12a"), None);
    }

    #[test]
    fn declared_entities_nest_and_cycles_are_caught() {
        let mut d = BTreeMap::new();
        d.insert("inst".to_string(), "Institut f&uuml;r &org;".to_string());
        d.insert("org".to_string(), "AIFB".to_string());
        d.insert("loop".to_string(), "x&loop;".to_string());
        assert_eq!(expand_reference("inst", &d), Expansion::Text("Institut für AIFB".into()));
        assert_eq!(expand_reference("loop", &d), Expansion::Recursive);
        assert_eq!(expand_reference("nope", &d), Expansion::Unknown);
    }

    #[test]
    fn resolve_keeps_unknown_references() {
        assert_eq!(resolve_entities("M&uuml;ller &amp; &foo; & co"), "Müller & &foo; & co");
    }
}
