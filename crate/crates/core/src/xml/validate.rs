//! Validity against a DTD.

use super::dtd::{parse_dtd, parse_dtd_at, ContentSpec, Dtd};
use super::tree::{Document, Element, Node};
use crate::diag::{Code, Diagnostics};

/// The DTD a document's DOCTYPE designates. An internal subset wins over a
/// system identifier; `load` fetches external subsets by system id.
pub fn doctype_dtd(doc: &Document, load: &mut dyn FnMut(&str) -> Result<String, String>, diags: &mut Diagnostics) -> Option<Dtd> {
    let dt = doc.doctype.as_ref()?;
    if let Some(subset) = &dt.internal_subset {
        if let Some(sys) = &dt.system_id {
            diags.warning(Code::DoctypeSource, None, format!("DOCTYPE has both an internal subset and `{sys}`; using the internal subset"));
        }
        return Some(match dt.subset_pos {
            Some(p) => parse_dtd_at(subset, p, diags),
            None => parse_dtd(subset, diags),
        });
    }
    let sys = dt.system_id.as_ref()?;
    match load(sys) {
        Ok(src) => Some(parse_dtd(&src, diags)),
        Err(e) => {
            diags.error(Code::DoctypeSource, None, format!("cannot load DTD `{sys}`: {e}"));
            None
        }
    }
}

/// Validates a document, including that its root matches the DOCTYPE name.
/// Returns the number of violations.
pub fn validate_document(doc: &Document, dtd: &Dtd, diags: &mut Diagnostics) -> usize {
    let mut n = 0;
    if let Some(dt) = &doc.doctype {
        if dt.root != doc.root.name {
            diags.error(Code::InvalidContent, doc.root.pos, format!("root element is <{}>, DOCTYPE declares <{}>", doc.root.name, dt.root));
            n += 1;
        }
    }
    n + validate(&doc.root, dtd, diags)
}

/// Checks every element's content against its declaration. At most one
/// content violation is reported per element. Returns the violation count.
pub fn validate(root: &Element, dtd: &Dtd, diags: &mut Diagnostics) -> usize {
    let mut count = 0;
    let mut path = Vec::new();
    walk(root, dtd, &mut path, &mut count, diags);
    count
}

fn walk<'a>(el: &'a Element, dtd: &Dtd, path: &mut Vec<&'a str>, count: &mut usize, diags: &mut Diagnostics) {
    path.push(&el.name);
    let at = format!("/{}", path.join("/"));
    let mut violation = |msg: String, pos| {
        *count += 1;
        diags.error(Code::InvalidContent, pos, format!("{at}: {msg}"));
    };
    match dtd.element(&el.name) {
        None => {
            *count += 1;
            diags.error(Code::UnknownElement, el.pos, format!("{at}: element <{}> is not declared", el.name));
        }
        Some(decl) => match &decl.content {
            ContentSpec::Any => {}
            ContentSpec::Empty => {
                if !el.children.is_empty() {
                    violation(format!("<{}> is declared EMPTY but has content", el.name), el.pos);
                }
            }
            ContentSpec::Mixed(allowed) => {
                if let Some(bad) = el.elements().find(|c| !allowed.contains(&c.name)) {
                    let msg = if allowed.is_empty() {
                        format!("<{}> may contain only text, found <{}>", el.name, bad.name)
                    } else {
                        format!("<{}> is not allowed in mixed content of <{}>", bad.name, el.name)
                    };
                    violation(msg, bad.pos);
                }
            }
            ContentSpec::Children(_) => {
                if el.has_text() {
                    let pos = el.pos;
                    violation(format!("<{}> has element content; text is not allowed", el.name), pos);
                } else if let Some(model) = dtd.model(&el.name) {
                    let kids: Vec<&Element> = el.elements().collect();
                    let names: Vec<&str> = kids.iter().map(|k| k.name.as_str()).collect();
                    if let Err(m) = model.matches(&names) {
                        let expected = m.expected.iter().map(|e| format!("<{e}>")).collect::<Vec<_>>().join(" or ");
                        let whereabouts = match m.index {
                            0 => "first".to_string(),
                            i => format!("after <{}>", names[i - 1]),
                        };
                        let (msg, pos) = match &m.found {
                            Some(found) if expected.is_empty() => (format!("unexpected <{found}> {whereabouts}"), kids[m.index].pos),
                            Some(found) => (format!("expected {expected} {whereabouts}, found <{found}>"), kids[m.index].pos),
                            None => (format!("expected {expected} {whereabouts}, found end of <{}>", el.name), el.pos),
                        };
                        violation(msg, pos);
                    }
                }
            }
        },
    }
    for c in &el.children {
        if let Node::Element(child) = c {
            walk(child, dtd, path, count, diags);
        }
    }
    path.pop();
}
