//! Element trees and namespace scopes.

use crate::diag::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(Element),
    Text(String),
}

/// An element with its attributes in document order.
///
/// Equality is structural: source positions are ignored.
#[derive(Debug, Clone)]
pub struct Element {
    /// Qualified name as written, e.g. `rdf:Description`.
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
    pub pos: Pos,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.attrs == other.attrs && self.children == other.children
    }
}

impl Eq for Element {}

impl Element {
    pub fn new(name: impl Into<String>, pos: Pos) -> Self {
        Element { name: name.into(), attrs: Vec::new(), children: Vec::new(), pos }
    }

    pub fn prefix(&self) -> Option<&str> {
        split_qname(&self.name).0
    }

    pub fn local_name(&self) -> &str {
        split_qname(&self.name).1
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|c| match c {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    /// The first child element named `name`.
    pub fn child(&self, name: &str) -> Option<&Element> {
        self.elements().find(|e| e.name == name)
    }

    /// Concatenated direct text content.
    pub fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.children {
            if let Node::Text(t) = c {
                s.push_str(t);
            }
        }
        s
    }

    /// True if some direct text child has non-whitespace content.
    pub fn has_text(&self) -> bool {
        self.children.iter().any(|c| matches!(c, Node::Text(t) if !t.trim().is_empty()))
    }

    /// Appends text, merging with a preceding text node.
    pub fn push_text(&mut self, text: &str) {
        if text.is_empty() {
            return;
        }
        if let Some(Node::Text(t)) = self.children.last_mut() {
            t.push_str(text);
        } else {
            self.children.push(Node::Text(text.to_string()));
        }
    }

    /// Namespace declarations made on this element, `""` for the default.
    pub fn ns_decls(&self) -> impl Iterator<Item = (&str, &str)> {
        self.attrs.iter().filter_map(|(n, v)| {
            if n == "xmlns" {
                Some(("", v.as_str()))
            } else {
                n.strip_prefix("xmlns:").map(|p| (p, v.as_str()))
            }
        })
    }

    /// First descendant-or-self element satisfying `pred`, depth first.
    pub fn find(&self, pred: &dyn Fn(&Element) -> bool) -> Option<&Element> {
        if pred(self) {
            return Some(self);
        }
        self.elements().find_map(|e| e.find(pred))
    }
}

/// Splits `p:local` into its prefix and local part.
pub fn split_qname(name: &str) -> (Option<&str>, &str) {
    match name.split_once(':') {
        Some((p, l)) => (Some(p), l),
        None => (None, name),
    }
}

pub const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";

/// In-scope prefix bindings while walking a tree.
#[derive(Debug, Clone, Default)]
pub struct NsScope {
    frames: Vec<Vec<(String, String)>>,
}

impl NsScope {
    pub fn new() -> Self {
        NsScope::default()
    }

    pub fn push(&mut self, element: &Element) {
        self.frames.push(element.ns_decls().map(|(p, u)| (p.to_string(), u.to_string())).collect());
    }

    pub fn pop(&mut self) {
        self.frames.pop();
    }

    /// Resolves a prefix (`""` for the default namespace).
    pub fn resolve(&self, prefix: &str) -> Option<&str> {
        if prefix == "xml" {
            return Some(XML_NS);
        }
        self.frames.iter().rev().flat_map(|f| f.iter().rev()).find(|(p, _)| p == prefix).map(|(_, u)| u.as_str())
    }

    /// All visible bindings, innermost winning, sorted by prefix.
    pub fn bindings(&self) -> Vec<(String, String)> {
        let mut out: std::collections::BTreeMap<String, String> = Default::default();
        for f in &self.frames {
            for (p, u) in f {
                out.insert(p.clone(), u.clone());
            }
        }
        out.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlDecl {
    pub version: String,
    pub encoding: Option<String>,
    pub standalone: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Doctype {
    pub root: String,
    pub public_id: Option<String>,
    pub system_id: Option<String>,
    /// Raw text between `[` and `]`.
    pub internal_subset: Option<String>,
    /// Where the internal subset starts, for positioned DTD diagnostics.
    pub subset_pos: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub decl: Option<XmlDecl>,
    pub doctype: Option<Doctype>,
    pub root: Element,
}
