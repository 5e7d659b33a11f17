//! Document type definitions: ELEMENT, ATTLIST and internal ENTITY
//! declarations.

use std::collections::BTreeMap;
use std::fmt;

use super::content_model::{ContentModel, Particle, Repeat};
use super::cursor::{is_space, Cursor};
use crate::diag::{Code, Diagnostics, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContentSpec {
    Empty,
    Any,
    /// `(#PCDATA)` when empty, otherwise `(#PCDATA | a | b)*`.
    Mixed(Vec<String>),
    Children(Particle),
}

impl fmt::Display for ContentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContentSpec::Empty => f.write_str("EMPTY"),
            ContentSpec::Any => f.write_str("ANY"),
            ContentSpec::Mixed(names) if names.is_empty() => f.write_str("(#PCDATA)"),
            ContentSpec::Mixed(names) => write!(f, "(#PCDATA | {})*", names.join(" | ")),
            ContentSpec::Children(p @ Particle::Name(..)) => write!(f, "({p})"),
            ContentSpec::Children(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementDecl {
    pub name: String,
    pub content: ContentSpec,
    pub pos: Pos,
}

/// Kept verbatim; attribute lists are not validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttlistDecl {
    pub element: String,
    pub body: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, Default)]
pub struct Dtd {
    pub elements: BTreeMap<String, ElementDecl>,
    pub attlists: Vec<AttlistDecl>,
    pub entities: BTreeMap<String, String>,
    models: BTreeMap<String, ContentModel>,
}

impl Dtd {
    pub fn element(&self, name: &str) -> Option<&ElementDecl> {
        self.elements.get(name)
    }

    /// The compiled automaton for an element with element content.
    pub fn model(&self, name: &str) -> Option<&ContentModel> {
        self.models.get(name)
    }
}

/// Parses a DTD, then checks that every referenced element is declared and
/// that every element content model is deterministic.
pub fn parse_dtd(src: &str, diags: &mut Diagnostics) -> Dtd {
    parse_dtd_at(src, Pos::new(1, 1), diags)
}

/// As [`parse_dtd`], with positions shifted to start at `origin` (for
/// internal subsets).
pub fn parse_dtd_at(src: &str, origin: Pos, diags: &mut Diagnostics) -> Dtd {
    let src = super::cursor::normalize_newlines(src);
    let mut p = DtdParser { cur: Cursor::new(&src), origin, diags };
    let mut dtd = Dtd::default();
    p.declarations(&mut dtd);
    check(&mut dtd, p.diags);
    dtd
}

/// Internal general entities only, without diagnostics. Used by the reader
/// to expand references before the DTD itself is checked.
pub fn scan_entities(src: &str) -> BTreeMap<String, String> {
    let mut scratch = Diagnostics::new();
    let mut p = DtdParser { cur: Cursor::new(src), origin: Pos::new(1, 1), diags: &mut scratch };
    let mut dtd = Dtd::default();
    p.declarations(&mut dtd);
    dtd.entities
}

fn check(dtd: &mut Dtd, diags: &mut Diagnostics) {
    for decl in dtd.elements.values() {
        let referenced: Vec<&str> = match &decl.content {
            ContentSpec::Mixed(names) => names.iter().map(String::as_str).collect(),
            ContentSpec::Children(p) => p.names().into_iter().collect(),
            _ => Vec::new(),
        };
        for r in referenced {
            if !dtd.elements.contains_key(r) {
                diags.error(Code::DtdIncomplete, decl.pos, format!("element `{}` refers to undeclared element `{r}`", decl.name));
            }
        }
        if let ContentSpec::Children(p) = &decl.content {
            match ContentModel::compile(p) {
                Ok(m) => {
                    dtd.models.insert(decl.name.clone(), m);
                }
                Err(a) => diags.error(
                    Code::AmbiguousContentModel,
                    decl.pos,
                    format!("content model of `{}` is ambiguous: `{}` can match in more than one place", decl.name, a.name),
                ),
            }
        }
    }
}

struct DtdParser<'a, 'd> {
    cur: Cursor<'a>,
    origin: Pos,
    diags: &'d mut Diagnostics,
}

impl DtdParser<'_, '_> {
    fn pos(&self) -> Pos {
        let p = self.cur.pos();
        if p.line == 1 {
            Pos::new(self.origin.line, self.origin.col + p.col - 1)
        } else {
            Pos::new(self.origin.line + p.line - 1, p.col)
        }
    }

    fn error(&mut self, pos: Pos, msg: impl Into<String>) {
        self.diags.error(Code::DtdSyntax, pos, msg);
    }

    /// Skips to just past the next `>` outside quotes.
    fn recover(&mut self) {
        let mut quote = None;
        while let Some(c) = self.cur.bump() {
            match c {
                '"' | '\'' if quote.is_none() => quote = Some(c),
                c if Some(c) == quote => quote = None,
                '>' if quote.is_none() => return,
                _ => {}
            }
        }
    }

    fn declarations(&mut self, dtd: &mut Dtd) {
        loop {
            self.cur.skip_ws();
            if self.cur.is_eof() {
                return;
            }
            let pos = self.pos();
            if self.cur.eat("<!--") {
                if self.cur.take_until("-->").is_none() {
                    self.error(pos, "comment is never closed");
                }
                self.cur.eat("-->");
            } else if self.cur.eat("<?") {
                self.cur.take_until("?>");
                self.cur.eat("?>");
            } else if self.cur.eat("<!ELEMENT") {
                self.element(pos, dtd);
            } else if self.cur.eat("<!ATTLIST") {
                self.cur.skip_ws();
                let element = self.cur.take_name().unwrap_or("").to_string();
                let start = self.cur.rest();
                let before = start.len();
                self.recover();
                let consumed = before - self.cur.rest().len();
                let body = start[..consumed].trim_end_matches('>').trim().to_string();
                dtd.attlists.push(AttlistDecl { element, body, pos });
            } else if self.cur.eat("<!ENTITY") {
                self.entity(pos, dtd);
            } else if self.cur.eat("<!NOTATION") {
                self.recover();
            } else if self.cur.peek() == Some('%') {
                self.error(pos, "parameter entity references are not supported");
                self.cur.take_until(";");
                self.cur.eat(";");
            } else {
                self.error(pos, "expected a markup declaration");
                self.recover();
            }
        }
    }

    fn element(&mut self, pos: Pos, dtd: &mut Dtd) {
        if !self.cur.skip_ws() {
            self.error(self.pos(), "expected whitespace after <!ELEMENT");
        }
        let Some(name) = self.cur.take_name().map(str::to_string) else {
            self.error(self.pos(), "expected an element name");
            return self.recover();
        };
        self.cur.skip_ws();
        let content = match self.content_spec() {
            Ok(c) => c,
            Err(msg) => {
                self.error(self.pos(), format!("in declaration of `{name}`: {msg}"));
                return self.recover();
            }
        };
        self.cur.skip_ws();
        if !self.cur.eat(">") {
            self.error(self.pos(), format!("declaration of `{name}` is not terminated by `>`"));
            return self.recover();
        }
        if let Some(prev) = dtd.elements.get(&name) {
            let line = prev.pos.line;
            self.error(pos, format!("element `{name}` is already declared (line {line})"));
            return;
        }
        dtd.elements.insert(name.clone(), ElementDecl { name, content, pos });
    }

    fn content_spec(&mut self) -> Result<ContentSpec, String> {
        if self.cur.eat("EMPTY") {
            return Ok(ContentSpec::Empty);
        }
        if self.cur.eat("ANY") {
            return Ok(ContentSpec::Any);
        }
        if !self.cur.starts_with("(") {
            return Err("expected EMPTY, ANY or `(`".into());
        }
        let save_rest = self.cur.rest();
        let after_paren = save_rest[1..].trim_start_matches(is_space);
        if after_paren.starts_with("#PCDATA") {
            self.cur.eat("(");
            self.cur.skip_ws();
            self.cur.eat("#PCDATA");
            let mut names = Vec::new();
            loop {
                self.cur.skip_ws();
                if self.cur.eat(")") {
                    break;
                }
                if !self.cur.eat("|") {
                    return Err("expected `|` or `)` in mixed content".into());
                }
                self.cur.skip_ws();
                let n = self.cur.take_name().ok_or("expected an element name after `|`")?;
                if names.iter().any(|x| x == n) {
                    return Err(format!("`{n}` appears twice in mixed content"));
                }
                names.push(n.to_string());
            }
            let star = self.cur.eat("*");
            if !names.is_empty() && !star {
                return Err("mixed content with element names must end in `)*`".into());
            }
            return Ok(ContentSpec::Mixed(names));
        }
        self.particle().map(ContentSpec::Children)
    }

    fn repeat(&mut self) -> Repeat {
        if self.cur.eat("?") {
            Repeat::Opt
        } else if self.cur.eat("*") {
            Repeat::Star
        } else if self.cur.eat("+") {
            Repeat::Plus
        } else {
            Repeat::One
        }
    }

    fn particle(&mut self) -> Result<Particle, String> {
        if let Some(n) = self.cur.take_name() {
            let n = n.to_string();
            return Ok(Particle::Name(n, self.repeat()));
        }
        if !self.cur.eat("(") {
            return Err(format!("expected a name or `(`, found `{}`", self.cur.peek().map_or("end of input".into(), String::from)));
        }
        let mut items = Vec::new();
        let mut sep: Option<char> = None;
        loop {
            self.cur.skip_ws();
            items.push(self.particle()?);
            self.cur.skip_ws();
            match self.cur.bump() {
                Some(')') => break,
                Some(c @ (',' | '|')) => match sep {
                    Some(s) if s != c => return Err("cannot mix `,` and `|` in one group".into()),
                    _ => sep = Some(c),
                },
                Some(c) => return Err(format!("unexpected `{c}` in content model")),
                None => return Err("content model is not closed".into()),
            }
        }
        let rep = self.repeat();
        Ok(match sep {
            Some('|') => Particle::Choice(items, rep),
            _ => Particle::Seq(items, rep),
        })
    }

    fn entity(&mut self, pos: Pos, dtd: &mut Dtd) {
        self.cur.skip_ws();
        if self.cur.eat("%") {
            self.diags.warning(Code::DtdSyntax, pos, "parameter entity declarations are not supported; ignored");
            return self.recover();
        }
        let Some(name) = self.cur.take_name().map(str::to_string) else {
            self.error(self.pos(), "expected an entity name");
            return self.recover();
        };
        self.cur.skip_ws();
        let q = match self.cur.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => {
                self.diags.warning(Code::DtdSyntax, pos, format!("external entity `{name}` is not supported; ignored"));
                return self.recover();
            }
        };
        self.cur.bump();
        let Some(value) = self.cur.take_until(&q.to_string()).map(str::to_string) else {
            self.error(pos, format!("value of entity `{name}` is not closed"));
            return;
        };
        self.cur.bump();
        self.cur.skip_ws();
        if !self.cur.eat(">") {
            self.error(self.pos(), format!("declaration of entity `{name}` is not terminated by `>`"));
            return self.recover();
        }
        // the first declaration is binding
        dtd.entities.entry(name).or_insert(value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_text_element() {
        let mut d = Diagnostics::new();
        let dtd = parse_dtd("<!ELEMENT a (#PCDATA)>", &mut d);
        assert!(d.is_empty());
        assert_eq!(dtd.element("a").unwrap().content, ContentSpec::Mixed(vec![]));
    }

    #[test]
    fn undeclared_reference_is_incomplete() {
        let mut d = Diagnostics::new();
        parse_dtd("<!ELEMENT a (b)>", &mut d);
        assert_eq!(d.with_code(Code::DtdIncomplete).count(), 1);
    }

    #[test]
    fn operators_and_display() {
        let mut d = Diagnostics::new();
        let src = "<!ELEMENT a ((b | c)+, d?)>\n<!ELEMENT b EMPTY><!ELEMENT c ANY>\n<!ELEMENT d (#PCDATA | b)*>";
        let dtd = parse_dtd(src, &mut d);
        assert!(d.is_empty(), "{d}");
        assert_eq!(dtd.element("a").unwrap().content.to_string(), "((b | c)+, d?)");
        assert_eq!(dtd.element("d").unwrap().content.to_string(), "(#PCDATA | b)*");
        assert_eq!(dtd.element("d").unwrap().pos, Pos::new(3, 1));
    }

    #[test]
    fn syntax_errors_recover() {
        let mut d = Diagnostics::new();
        let dtd = parse_dtd("<!ELEMENT a (b, c | d)>\n<!ELEMENT b (#PCDATA)>\n<!BOGUS>\n<!ELEMENT b EMPTY>", &mut d);
        assert_eq!(d.with_code(Code::DtdSyntax).count(), 3);
        assert!(dtd.element("b").is_some());
    }

    #[test]
    fn ambiguity_is_reported() {
        let mut d = Diagnostics::new();
        parse_dtd("<!ELEMENT a ((b, c) | (b, d))><!ELEMENT b EMPTY><!ELEMENT c EMPTY><!ELEMENT d EMPTY>", &mut d);
        assert!(d.has_code(Code::AmbiguousContentModel));
    }

    #[test]
    fn internal_subset_positions_are_shifted() {
        let mut d = Diagnostics::new();
        parse_dtd_at("\n<!ELEMENT a (b)>", Pos::new(4, 12), &mut d);
        assert_eq!(d.iter().next().unwrap().pos, Some(Pos::new(5, 1)));
    }
}
