//! Well-formedness-checking XML reader.

use std::collections::BTreeMap;

use super::cursor::{is_space, normalize_newlines, Cursor};
use super::dtd::scan_entities;
use super::entities::{expand_reference, Expansion};
use super::tree::{Doctype, Document, Element, XmlDecl};
use crate::diag::{Code, Diagnostics, Mode, Pos};

const ENCODINGS: [&str; 8] = ["utf-8", "utf8", "us-ascii", "ascii", "iso-8859-1", "iso8859-1", "latin1", "latin-1"];

fn is_latin1_label(label: &str) -> bool {
    matches!(label.to_ascii_lowercase().as_str(), "iso-8859-1" | "iso8859-1" | "latin1" | "latin-1")
}

/// Decodes raw document bytes. UTF-8 is the default; a prolog declaring
/// ISO-8859-1 switches to Latin-1 decoding.
pub fn decode_bytes(bytes: &[u8], diags: &mut Diagnostics) -> Option<String> {
    let head = &bytes[..bytes.len().min(200)];
    let head = String::from_utf8_lossy(head);
    let declared = head
        .strip_prefix('\u{FEFF}')
        .unwrap_or(&head)
        .strip_prefix("<?xml")
        .and_then(|d| d.split("?>").next())
        .and_then(|d| pseudo_attr(d, "encoding"));
    if let Some(label) = &declared {
        if is_latin1_label(label) {
            return Some(bytes.iter().map(|&b| b as char).collect());
        }
    }
    match std::str::from_utf8(bytes) {
        Ok(s) => Some(s.to_string()),
        Err(e) => {
            diags.error(Code::Encoding, None, format!("input is not valid UTF-8 (byte offset {})", e.valid_up_to()));
            None
        }
    }
}

fn pseudo_attr(decl: &str, name: &str) -> Option<String> {
    let at = decl.find(name)?;
    let rest = decl[at + name.len()..].trim_start().strip_prefix('=')?.trim_start();
    let quote = rest.chars().next().filter(|q| *q == '"' || *q == '\'')?;
    let body = &rest[1..];
    Some(body[..body.find(quote)?].to_string())
}

/// Parses a complete document. Returns `None` if it is not well-formed.
///
/// Unknown entity references are errors in strict mode; in lenient mode
/// they are kept verbatim with a warning.
pub fn parse_xml(src: &str, mode: Mode, diags: &mut Diagnostics) -> Option<Document> {
    let src = normalize_newlines(src);
    let mut r = Reader { cur: Cursor::new(&src), mode, diags, entities: BTreeMap::new(), errors: 0 };
    r.document()
}

/// Parses a standalone element fragment (no prolog).
pub fn parse_fragment(src: &str, mode: Mode, diags: &mut Diagnostics) -> Option<Element> {
    parse_xml(src, mode, diags).map(|d| d.root)
}

struct Reader<'a, 'd> {
    cur: Cursor<'a>,
    mode: Mode,
    diags: &'d mut Diagnostics,
    entities: BTreeMap<String, String>,
    errors: usize,
}

impl Reader<'_, '_> {
    fn error(&mut self, code: Code, pos: Pos, msg: impl Into<String>) {
        self.errors += 1;
        self.diags.error(code, pos, msg);
    }

    fn document(&mut self) -> Option<Document> {
        self.cur.eat("\u{FEFF}");
        let decl = if self.cur.starts_with("<?xml") && self.cur.peek_nth(5).is_some_and(is_space) {
            self.xml_decl()
        } else {
            None
        };
        let mut doctype = None;
        let mut root: Option<Element> = None;
        let mut stack: Vec<Element> = Vec::new();

        while !self.cur.is_eof() {
            let pos = self.cur.pos();
            if self.cur.starts_with("<!--") {
                self.comment();
            } else if self.cur.starts_with("<?") {
                self.cur.eat("<?");
                if self.cur.take_until("?>").is_none() {
                    self.error(Code::UnterminatedTag, pos, "processing instruction is never closed");
                }
                self.cur.eat("?>");
            } else if self.cur.starts_with("<![CDATA[") {
                self.cur.eat("<![CDATA[");
                let text = match self.cur.take_until("]]>") {
                    Some(t) => t.to_string(),
                    None => {
                        self.error(Code::UnterminatedTag, pos, "CDATA section is never closed");
                        break;
                    }
                };
                self.cur.eat("]]>");
                match stack.last_mut() {
                    Some(top) => top.push_text(&text),
                    None => self.error(Code::XmlSyntax, pos, "character data outside the root element"),
                }
            } else if self.cur.starts_with("<!DOCTYPE") {
                if doctype.is_some() || root.is_some() || !stack.is_empty() {
                    self.error(Code::XmlSyntax, pos, "DOCTYPE must appear once, before the root element");
                }
                let d = self.doctype(pos);
                if doctype.is_none() && root.is_none() && stack.is_empty() {
                    doctype = d;
                }
            } else if self.cur.starts_with("<!") {
                self.error(Code::XmlSyntax, pos, "unexpected markup declaration");
                self.cur.take_until(">");
                self.cur.eat(">");
            } else if self.cur.starts_with("</") {
                self.end_tag(pos, &mut stack, &mut root);
            } else if self.cur.starts_with("<") {
                let Some((el, empty)) = self.start_tag() else { continue };
                if stack.is_empty() && root.is_some() {
                    self.error(Code::XmlSyntax, pos, format!("second root element <{}>", el.name));
                }
                if empty {
                    attach(el, &mut stack, &mut root);
                } else {
                    stack.push(el);
                }
            } else {
                let text = self.text();
                match stack.last_mut() {
                    Some(top) => top.push_text(&text),
                    None if text.trim().is_empty() => {}
                    None => self.error(Code::XmlSyntax, pos, "text outside the root element"),
                }
            }
        }
        for open in stack.iter().rev() {
            self.errors += 1;
            self.diags.error(Code::UnterminatedTag, open.pos, format!("element <{}> is never closed", open.name));
        }
        if root.is_none() && stack.is_empty() && self.errors == 0 {
            self.error(Code::XmlSyntax, self.cur.pos(), "document has no root element");
        }
        if self.errors > 0 {
            return None;
        }
        Some(Document { decl, doctype, root: root? })
    }

    fn xml_decl(&mut self) -> Option<XmlDecl> {
        let pos = self.cur.pos();
        self.cur.eat("<?xml");
        let Some(body) = self.cur.take_until("?>") else {
            self.error(Code::UnterminatedTag, pos, "XML declaration is never closed");
            return None;
        };
        self.cur.eat("?>");
        let version = pseudo_attr(body, "version").unwrap_or_else(|| "1.0".into());
        let encoding = pseudo_attr(body, "encoding");
        if let Some(e) = &encoding {
            if !ENCODINGS.contains(&e.to_ascii_lowercase().as_str()) {
                self.error(Code::Encoding, pos, format!("unsupported encoding `{e}` (expected UTF-8, ASCII or ISO-8859-1)"));
            }
        }
        Some(XmlDecl { version, encoding, standalone: pseudo_attr(body, "standalone") })
    }

    fn comment(&mut self) {
        let pos = self.cur.pos();
        self.cur.eat("<!--");
        if self.cur.take_until("-->").is_none() {
            self.error(Code::UnterminatedTag, pos, "comment is never closed");
        }
        self.cur.eat("-->");
    }

    fn quoted(&mut self) -> Option<String> {
        let q = self.cur.peek().filter(|c| *c == '"' || *c == '\'')?;
        self.cur.bump();
        let s = self.cur.take_until(&q.to_string())?.to_string();
        self.cur.bump();
        Some(s)
    }

    fn doctype(&mut self, pos: Pos) -> Option<Doctype> {
        self.cur.eat("<!DOCTYPE");
        self.cur.skip_ws();
        let Some(root) = self.cur.take_name().map(str::to_string) else {
            self.error(Code::XmlSyntax, self.cur.pos(), "DOCTYPE without a root element name");
            self.cur.take_until(">");
            self.cur.eat(">");
            return None;
        };
        let mut d = Doctype { root, public_id: None, system_id: None, internal_subset: None, subset_pos: None };
        self.cur.skip_ws();
        if self.cur.eat("SYSTEM") {
            self.cur.skip_ws();
            d.system_id = self.quoted();
        } else if self.cur.eat("PUBLIC") {
            self.cur.skip_ws();
            d.public_id = self.quoted();
            self.cur.skip_ws();
            d.system_id = self.quoted();
        }
        self.cur.skip_ws();
        if self.cur.eat("[") {
            d.subset_pos = Some(self.cur.pos());
            let start = self.cur.offset();
            let full = self.cur.rest();
            let mut quote: Option<char> = None;
            loop {
                if quote.is_none() && self.cur.starts_with("<!--") {
                    self.cur.eat("<!--");
                    self.cur.take_until("-->");
                    self.cur.eat("-->");
                    continue;
                }
                match self.cur.peek() {
                    None => {
                        self.error(Code::UnterminatedTag, pos, "DOCTYPE internal subset is never closed");
                        return None;
                    }
                    Some(c) if Some(c) == quote => quote = None,
                    Some(c @ ('"' | '\'')) if quote.is_none() => quote = Some(c),
                    Some(']') if quote.is_none() => break,
                    _ => {}
                }
                self.cur.bump();
            }
            let subset = full[..self.cur.offset() - start].to_string();
            self.cur.eat("]");
            self.entities.extend(scan_entities(&subset));
            d.internal_subset = Some(subset);
            self.cur.skip_ws();
        }
        if !self.cur.eat(">") {
            self.error(Code::XmlSyntax, self.cur.pos(), "malformed DOCTYPE declaration");
            self.cur.take_until(">");
            self.cur.eat(">");
        }
        Some(d)
    }

    /// Parses `<name attrs>` or `<name attrs/>`; the flag is true for the
    /// empty-tag form.
    fn start_tag(&mut self) -> Option<(Element, bool)> {
        let pos = self.cur.pos();
        self.cur.bump();
        let Some(name) = self.cur.take_name() else {
            self.error(Code::XmlSyntax, pos, "`<` not followed by an element name");
            return None;
        };
        let mut el = Element::new(name, pos);
        loop {
            let had_space = self.cur.skip_ws();
            if self.cur.eat("/>") {
                return Some((el, true));
            }
            if self.cur.eat(">") {
                return Some((el, false));
            }
            let at = self.cur.pos();
            match self.cur.peek() {
                None => {
                    self.error(Code::UnterminatedTag, pos, format!("start tag <{}> is never closed", el.name));
                    return None;
                }
                Some('<') => {
                    self.error(Code::UnterminatedTag, pos, format!("start tag <{}> runs into another tag", el.name));
                    return None;
                }
                _ => {}
            }
            let Some(an) = self.cur.take_name() else {
                self.error(Code::XmlSyntax, at, format!("unexpected `{}` in start tag", self.cur.peek().unwrap_or(' ')));
                self.cur.bump();
                continue;
            };
            if !had_space {
                self.error(Code::XmlSyntax, at, "attributes must be separated by whitespace");
            }
            self.cur.skip_ws();
            if !self.cur.eat("=") {
                self.error(Code::XmlSyntax, self.cur.pos(), format!("attribute `{an}` has no value"));
                continue;
            }
            self.cur.skip_ws();
            let Some(value) = self.attr_value() else {
                self.error(Code::XmlSyntax, self.cur.pos(), format!("attribute `{an}` needs a quoted value"));
                return None;
            };
            if el.attr(an).is_some() {
                self.error(Code::XmlSyntax, at, format!("duplicate attribute `{an}`"));
            } else {
                el.attrs.push((an.to_string(), value));
            }
        }
    }

    fn attr_value(&mut self) -> Option<String> {
        let q = self.cur.peek().filter(|c| *c == '"' || *c == '\'')?;
        self.cur.bump();
        let mut out = String::new();
        loop {
            let pos = self.cur.pos();
            match self.cur.peek()? {
                c if c == q => {
                    self.cur.bump();
                    return Some(out);
                }
                '<' => {
                    self.error(Code::XmlSyntax, pos, "`<` is not allowed in attribute values");
                    self.cur.bump();
                }
                '&' => {
                    let t = self.reference();
                    out.push_str(&t);
                }
                c => {
                    self.cur.bump();
                    out.push(if is_space(c) { ' ' } else { c });
                }
            }
        }
    }

    fn end_tag(&mut self, pos: Pos, stack: &mut Vec<Element>, root: &mut Option<Element>) {
        self.cur.eat("</");
        let name = self.cur.take_name().unwrap_or("").to_string();
        self.cur.skip_ws();
        if !self.cur.eat(">") {
            self.error(Code::UnterminatedTag, pos, format!("end tag </{name}> is not terminated"));
            self.cur.take_until(">");
            self.cur.eat(">");
        }
        match stack.last() {
            Some(top) if top.name == name => {
                let el = stack.pop().expect("non-empty");
                attach(el, stack, root);
            }
            Some(top) => {
                let expected = top.name.clone();
                self.error(Code::MismatchedTag, pos, format!("expected </{expected}>, found </{name}>"));
                // close up to a matching ancestor, if any
                if let Some(depth) = stack.iter().rposition(|e| e.name == name) {
                    while stack.len() > depth {
                        let el = stack.pop().expect("non-empty");
                        attach(el, stack, root);
                    }
                }
            }
            None => self.error(Code::MismatchedTag, pos, format!("end tag </{name}> without a matching start tag")),
        }
    }

    fn text(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.cur.peek() {
            match c {
                '<' => break,
                '&' => {
                    let t = self.reference();
                    out.push_str(&t);
                }
                _ => {
                    self.cur.bump();
                    out.push(c);
                }
            }
        }
        out
    }

    /// Reads `&...;` at the cursor and returns its replacement text.
    fn reference(&mut self) -> String {
        let pos = self.cur.pos();
        self.cur.bump();
        let body = self.cur.take_while(|c| c.is_alphanumeric() || matches!(c, '#' | '_' | '-' | '.' | ':'));
        if body.is_empty() || !self.cur.eat(";") {
            self.error(Code::XmlSyntax, pos, "`&` must start an entity or character reference");
            return format!("&{body}");
        }
        match expand_reference(body, &self.entities) {
            Expansion::Text(t) => t,
            Expansion::Recursive => {
                self.error(Code::UnknownEntity, pos, format!("entity `{body}` refers to itself"));
                String::new()
            }
            Expansion::Unknown => {
                let msg = format!("unknown entity `&{body};`");
                if self.mode == Mode::Strict {
                    self.error(Code::UnknownEntity, pos, msg);
                } else {
                    self.diags.warning(Code::UnknownEntity, pos, format!("{msg}; kept verbatim"));
                }
                format!("&{body};")
            }
        }
    }
}

fn attach(el: Element, stack: &mut [Element], root: &mut Option<Element>) {
    match stack.last_mut() {
        Some(parent) => parent.children.push(super::tree::Node::Element(el)),
        None => {
            if root.is_none() {
                *root = Some(el);
            }
        }
    }
}
