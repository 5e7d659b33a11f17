//! Error-tolerant extraction of embedded XML islands (such as `rdf`
//! blocks) from HTML or sloppy markup.
//!
//! Outside the islands nothing is parsed. Inside, markup errors are
//! repaired with a warning instead of rejected:
//! - a start tag that runs into the next `<` is closed there;
//! - `<p:Name="value"/>` is read as an element with text content;
//! - a record element (see [`Islands::records`]) cannot directly contain
//!   another of its kind, so a new one closes the open one;
//! - a self-closed record followed by a child start tag is read as open;
//! - unmatched end tags are dropped, and elements still open at the end
//!   of input are closed.

use std::collections::BTreeMap;

use super::cursor::{is_name_start, is_space, normalize_newlines, Cursor};
use super::entities::{expand_reference, Expansion};
use super::tree::{split_qname, Element, Node};
use crate::diag::{Code, Diagnostics, Pos};

pub struct Islands<'a> {
    /// Selects island roots by qualified name.
    pub is_root: &'a dyn Fn(&str) -> bool,
    /// Local names of record elements.
    pub records: &'a [&'a str],
}

impl Islands<'_> {
    fn is_record(&self, qname: &str) -> bool {
        let local = split_qname(qname).1;
        self.records.contains(&local)
    }
}

/// Every island in `src`, in document order.
pub fn scan_islands(src: &str, islands: &Islands<'_>, diags: &mut Diagnostics) -> Vec<Element> {
    let src = normalize_newlines(src);
    let mut cur = Cursor::new(&src);
    let mut out = Vec::new();
    while !cur.is_eof() {
        if cur.starts_with("<!--") {
            cur.eat("<!--");
            cur.take_until("-->");
            cur.eat("-->");
            continue;
        }
        if cur.peek() == Some('<') && cur.peek_nth(1).is_some_and(is_name_start) {
            let name: String = cur.rest()[1..].chars().take_while(|c| super::cursor::is_name_char(*c)).collect();
            if (islands.is_root)(&name) {
                let mut b = Builder { cur: &mut cur, islands, diags };
                if let Some(el) = b.island() {
                    out.push(el);
                }
                continue;
            }
        }
        cur.bump();
    }
    out
}

struct Builder<'c, 's, 'i, 'd> {
    cur: &'c mut Cursor<'s>,
    islands: &'i Islands<'i>,
    diags: &'d mut Diagnostics,
}

enum Tag {
    Open(Element),
    Empty(Element),
}

impl Builder<'_, '_, '_, '_> {
    fn repaired(&mut self, pos: Pos, msg: impl Into<String>) {
        self.diags.warning(Code::MarkupRepaired, pos, msg);
    }

    fn island(&mut self) -> Option<Element> {
        let mut stack: Vec<Element> = Vec::new();
        loop {
            if self.cur.is_eof() {
                while let Some(el) = stack.pop() {
                    self.repaired(el.pos, format!("<{}> is not closed before end of input; closed there", el.name));
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(Node::Element(el)),
                        None => return Some(el),
                    }
                }
                return None;
            }
            let pos = self.cur.pos();
            if self.cur.eat("<!--") {
                self.cur.take_until("-->");
                self.cur.eat("-->");
            } else if self.cur.eat("<![CDATA[") {
                let t = self.cur.take_until("]]>").unwrap_or("").to_string();
                self.cur.eat("]]>");
                if let Some(top) = stack.last_mut() {
                    top.push_text(&t);
                }
            } else if self.cur.starts_with("<?") || self.cur.starts_with("<!") {
                self.cur.take_until(">");
                self.cur.eat(">");
            } else if self.cur.starts_with("</") {
                self.cur.eat("</");
                let name = self.cur.take_name().unwrap_or("").to_string();
                self.cur.take_until(">");
                self.cur.eat(">");
                match stack.iter().rposition(|e| e.name == name) {
                    Some(depth) => {
                        while stack.len() > depth + 1 {
                            let el = stack.pop().expect("non-empty");
                            self.repaired(el.pos, format!("<{}> is not closed; closed by </{name}>", el.name));
                            stack.last_mut().expect("non-empty").children.push(Node::Element(el));
                        }
                        let el = stack.pop().expect("non-empty");
                        match stack.last_mut() {
                            Some(parent) => parent.children.push(Node::Element(el)),
                            None => return Some(el),
                        }
                    }
                    None => self.repaired(pos, format!("stray </{name}> ignored")),
                }
            } else if self.cur.peek() == Some('<') && self.cur.peek_nth(1).is_some_and(is_name_start) {
                let tag = self.start_tag();
                let el = match &tag {
                    Tag::Open(e) | Tag::Empty(e) => e,
                };
                if self.islands.is_record(&el.name) {
                    if let Some(top) = stack.last() {
                        if stack.len() > 1 && self.islands.is_record(&top.name) {
                            self.repaired(pos, format!("<{}> opened inside <{}>; closing the latter first", el.name, top.name));
                            let done = stack.pop().expect("non-empty");
                            stack.last_mut().expect("non-empty").children.push(Node::Element(done));
                        }
                    }
                }
                let tag = match tag {
                    Tag::Empty(e) if self.islands.is_record(&e.name) && self.content_follows() => {
                        self.repaired(pos, format!("self-closed <{}> is followed by its content; read as a start tag", e.name));
                        Tag::Open(e)
                    }
                    t => t,
                };
                match tag {
                    Tag::Open(e) => stack.push(e),
                    Tag::Empty(e) => match stack.last_mut() {
                        Some(parent) => parent.children.push(Node::Element(e)),
                        None => return Some(e),
                    },
                }
            } else {
                let text = self.text();
                if let Some(top) = stack.last_mut() {
                    top.push_text(&text);
                }
            }
        }
    }

    /// True if the next tag after whitespace starts a non-record element.
    fn content_follows(&self) -> bool {
        let rest = self.cur.rest().trim_start_matches(is_space);
        let Some(after) = rest.strip_prefix('<') else { return false };
        if !after.chars().next().is_some_and(is_name_start) {
            return false;
        }
        let name: String = after.chars().take_while(|c| super::cursor::is_name_char(*c)).collect();
        !self.islands.is_record(&name)
    }

    fn start_tag(&mut self) -> Tag {
        let pos = self.cur.pos();
        self.cur.bump();
        let name = self.cur.take_name().unwrap_or("").to_string();
        let mut el = Element::new(name, pos);
        if self.cur.peek() == Some('=') {
            // <p:Name="value"/>
            self.cur.bump();
            self.cur.skip_ws();
            let value = self.attr_value().unwrap_or_default();
            self.cur.skip_ws();
            if !self.cur.eat("/>") {
                self.cur.eat(">");
            }
            self.repaired(pos, format!("<{}=\"...\"/> read as an element with text content", el.name));
            el.push_text(&value);
            return Tag::Empty(el);
        }
        loop {
            self.cur.skip_ws();
            if self.cur.eat("/>") {
                return Tag::Empty(el);
            }
            if self.cur.eat(">") {
                return Tag::Open(el);
            }
            match self.cur.peek() {
                None => return Tag::Open(el),
                Some('<') => {
                    self.repaired(pos, format!("start tag <{}> runs into the next tag; closed there", el.name));
                    return Tag::Open(el);
                }
                _ => {}
            }
            let Some(an) = self.cur.take_name().map(str::to_string) else {
                self.cur.bump();
                continue;
            };
            self.cur.skip_ws();
            if !self.cur.eat("=") {
                self.repaired(pos, format!("attribute `{an}` has no value"));
                el.attrs.push((an, String::new()));
                continue;
            }
            self.cur.skip_ws();
            let value = match self.attr_value() {
                Some(v) => v,
                None => {
                    let raw = self.cur.take_while(|c| !is_space(c) && c != '>' && c != '<').to_string();
                    self.repaired(pos, format!("unquoted value for attribute `{an}`"));
                    raw
                }
            };
            if el.attr(&an).is_none() {
                el.attrs.push((an, value));
            }
        }
    }

    fn attr_value(&mut self) -> Option<String> {
        let q = self.cur.peek().filter(|c| *c == '"' || *c == '\'')?;
        self.cur.bump();
        let raw = self.cur.take_until(&q.to_string()).unwrap_or("").to_string();
        self.cur.bump();
        let pos = self.cur.pos();
        Some(self.resolve(&raw, pos).chars().map(|c| if is_space(c) { ' ' } else { c }).collect())
    }

    fn text(&mut self) -> String {
        let pos = self.cur.pos();
        let mut raw = String::new();
        while let Some(c) = self.cur.peek() {
            if c == '<' && (self.cur.peek_nth(1).is_some_and(|n| is_name_start(n) || n == '/' || n == '!' || n == '?')) {
                break;
            }
            raw.push(c);
            self.cur.bump();
        }
        self.resolve(&raw, pos)
    }

    fn resolve(&mut self, raw: &str, pos: Pos) -> String {
        let none = BTreeMap::new();
        let mut out = String::new();
        let mut rest = raw;
        while let Some(amp) = rest.find('&') {
            out.push_str(&rest[..amp]);
            let after = &rest[amp + 1..];
            let n = after.find(|c: char| !(c.is_alphanumeric() || c == '#')).unwrap_or(after.len());
            if n > 0 && after[n..].starts_with(';') {
                match expand_reference(&after[..n], &none) {
                    Expansion::Text(t) => out.push_str(&t),
                    _ => {
                        self.diags.warning(Code::UnknownEntity, pos, format!("unknown entity `&{};` kept verbatim", &after[..n]));
                        out.push_str(&rest[amp..amp + n + 2]);
                    }
                }
                rest = &after[n + 1..];
            } else {
                out.push('&');
                rest = after;
            }
        }
        out.push_str(rest);
        out
    }
}
