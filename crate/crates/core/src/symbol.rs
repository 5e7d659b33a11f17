//! Interned names and ground values.

use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

/// An identifier: class, attribute, variable or object-id.
///
/// Cheap to clone; ordered lexically so every enumeration over names is
/// reproducible.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::ops::Deref for Name {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Name {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A ground value: an object-id or a string literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Object(Name),
    Literal(Arc<str>),
}

impl Value {
    pub fn object(s: &str) -> Self {
        Value::Object(Name::new(s))
    }

    pub fn literal(s: &str) -> Self {
        Value::Literal(Arc::from(s))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Value::Literal(_))
    }

    pub fn as_object(&self) -> Option<&Name> {
        match self {
            Value::Object(n) => Some(n),
            Value::Literal(_) => None,
        }
    }

    /// Result-table rendering: `"literal"` or bare object-id.
    pub fn render(&self) -> String {
        match self {
            Value::Object(n) => n.to_string(),
            Value::Literal(s) => quote_literal(s),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Double-quotes `s`, escaping `"` and `\`.
pub fn quote_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}
