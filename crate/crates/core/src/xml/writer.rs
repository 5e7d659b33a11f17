//! Serialization back to XML text.

use std::fmt::Write;

use super::entities::{escape_attr, escape_text};
use super::tree::{Document, Element, Node};

pub fn serialize(doc: &Document) -> String {
    let mut out = String::new();
    if let Some(d) = &doc.decl {
        let _ = write!(out, "<?xml version=\"{}\"", d.version);
        if d.encoding.is_some() {
            // the output is a Rust string, so whatever was read is now UTF-8
            out.push_str(" encoding=\"UTF-8\"");
        }
        if let Some(s) = &d.standalone {
            let _ = write!(out, " standalone=\"{s}\"");
        }
        out.push_str("?>\n");
    }
    if let Some(dt) = &doc.doctype {
        let _ = write!(out, "<!DOCTYPE {}", dt.root);
        match (&dt.public_id, &dt.system_id) {
            (Some(p), Some(s)) => {
                let _ = write!(out, " PUBLIC \"{p}\" \"{s}\"");
            }
            (None, Some(s)) => {
                let _ = write!(out, " SYSTEM \"{s}\"");
            }
            _ => {}
        }
        if let Some(sub) = &dt.internal_subset {
            let _ = write!(out, " [{sub}]");
        }
        out.push_str(">\n");
    }
    write_element(&doc.root, &mut out);
    out
}

pub fn serialize_element(el: &Element) -> String {
    let mut out = String::new();
    write_element(el, &mut out);
    out
}

fn write_element(el: &Element, out: &mut String) {
    out.push('<');
    out.push_str(&el.name);
    for (n, v) in &el.attrs {
        let _ = write!(out, " {n}=\"{}\"", escape_attr(v));
    }
    if el.children.is_empty() {
        out.push_str("/>");
        return;
    }
    out.push('>');
    for c in &el.children {
        match c {
            Node::Text(t) => out.push_str(&escape_text(t)),
            Node::Element(e) => write_element(e, out),
        }
    }
    let _ = write!(out, "</{}>", el.name);
}
