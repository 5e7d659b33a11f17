//! Statement extraction from `rdf` elements, in both the serialization and
//! the abbreviated syntax.

use std::collections::{BTreeMap, BTreeSet};

use super::version::parse_version;
use super::{Container, ContainerKind, Member, NamespaceBinding, Property, RdfGraph, RdfObject, Statement, RDF_NS};
use crate::diag::{Code, Diagnostics, Pos};
use crate::xml::tree::split_qname;
use crate::xml::{scan_islands, Element, Islands, Node, NsScope};

#[derive(Debug, Clone)]
pub struct ExtractOptions {
    /// Bindings used for prefixes the document does not declare.
    pub prefixes: BTreeMap<String, String>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { prefixes: [("rdf".to_string(), RDF_NS.to_string())].into() }
    }
}

impl ExtractOptions {
    pub fn with_prefix(mut self, prefix: &str, uri: &str) -> Self {
        self.prefixes.insert(prefix.to_string(), uri.to_string());
        self
    }
}

/// True for `rdf:RDF`-like elements (any case, `rdf` prefix or no prefix).
pub fn is_rdf_root(el: &Element) -> bool {
    el.local_name().eq_ignore_ascii_case("rdf") && matches!(el.prefix(), None | Some("rdf"))
}

/// Finds `rdf` islands in HTML or otherwise malformed markup.
pub fn scan_rdf(src: &str, diags: &mut Diagnostics) -> Vec<Element> {
    let is_root = |n: &str| {
        let (p, l) = split_qname(n);
        l.eq_ignore_ascii_case("rdf") && matches!(p, None | Some("rdf"))
    };
    scan_islands(src, &Islands { is_root: &is_root, records: &["Description"] }, diags)
}

/// Extracts from every `rdf` element in a well-formed document tree.
pub fn extract_document(root: &Element, opts: &ExtractOptions, diags: &mut Diagnostics) -> RdfGraph {
    let mut x = Extractor::new(opts);
    x.find_roots(root, diags);
    x.finish()
}

/// Extracts from `rdf` islands found by [`scan_rdf`]; anonymous ids are
/// numbered across all islands.
pub fn extract_islands(islands: &[Element], opts: &ExtractOptions, diags: &mut Diagnostics) -> RdfGraph {
    let mut x = Extractor::new(opts);
    for el in islands {
        x.find_roots(el, diags);
    }
    x.finish()
}

enum Name {
    /// An RDF syntax term such as `Description` or `li`.
    Vocab(String),
    Property(Property),
}

struct Extractor<'o> {
    opts: &'o ExtractOptions,
    scope: NsScope,
    graph: RdfGraph,
    next_anon: usize,
    seen_bindings: BTreeSet<(String, String)>,
    unresolved: BTreeSet<String>,
}

fn is_vocab(local: &str) -> bool {
    matches!(local, "RDF" | "rdf" | "Description" | "Bag" | "Seq" | "Alt" | "li" | "about" | "ID" | "resource" | "parseType")
        || local.strip_prefix('_').is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
}

fn clean_uri(uri: &str) -> String {
    uri.chars().filter(|c| !c.is_whitespace()).collect()
}

impl<'o> Extractor<'o> {
    fn new(opts: &'o ExtractOptions) -> Self {
        Extractor {
            opts,
            scope: NsScope::new(),
            graph: RdfGraph::default(),
            next_anon: 0,
            seen_bindings: BTreeSet::new(),
            unresolved: BTreeSet::new(),
        }
    }

    fn finish(self) -> RdfGraph {
        self.graph
    }

    fn anon(&mut self) -> String {
        self.next_anon += 1;
        format!("_:n{}", self.next_anon)
    }

    fn enter(&mut self, el: &Element, diags: &mut Diagnostics) {
        for (p, u) in el.ns_decls() {
            let uri = clean_uri(u);
            if uri != u {
                diags.warning(Code::RdfStructure, el.pos, format!("namespace URI for `{p}` contains whitespace; read as `{uri}`"));
            }
            if self.seen_bindings.insert((p.to_string(), uri.clone())) {
                self.graph.namespaces.push(NamespaceBinding { prefix: p.to_string(), version: parse_version(&uri), uri });
            }
        }
        self.scope.push(el);
    }

    fn leave(&mut self) {
        self.scope.pop();
    }

    fn find_roots(&mut self, el: &Element, diags: &mut Diagnostics) {
        self.enter(el, diags);
        if is_rdf_root(el) {
            self.rdf_root(el, diags);
        } else {
            for c in el.elements() {
                self.find_roots(c, diags);
            }
        }
        self.leave();
    }

    fn lookup(&self, prefix: &str) -> Option<String> {
        self.scope.resolve(prefix).map(clean_uri).or_else(|| self.opts.prefixes.get(prefix).cloned())
    }

    /// Resolves an element or attribute name. `None` (after an error) if
    /// the prefix is unbound.
    fn resolve(&mut self, qname: &str, pos: Pos, is_attr: bool, diags: &mut Diagnostics) -> Option<Name> {
        let (prefix, local) = split_qname(qname);
        let ns = match prefix {
            Some(p) => match self.lookup(p) {
                Some(ns) => Some(ns),
                None => {
                    if self.unresolved.insert(p.to_string()) {
                        diags.error(Code::UnresolvedPrefix, pos, format!("prefix `{p}` is not bound to a namespace"));
                    }
                    return None;
                }
            },
            // unprefixed attributes never take the default namespace
            None if is_attr => None,
            None => self.lookup(""),
        };
        let rdf_ns = ns.as_deref() == Some(RDF_NS);
        if (rdf_ns || ns.is_none()) && is_vocab(local) {
            return Some(Name::Vocab(local.to_string()));
        }
        if rdf_ns && !matches!(local, "type" | "value") {
            // a schema name written under the rdf prefix
            return Some(Name::Property(Property { ns: None, local: local.to_string(), qname: qname.to_string() }));
        }
        Some(Name::Property(Property { ns, local: local.to_string(), qname: qname.to_string() }))
    }

    fn rdf_root(&mut self, root: &Element, diags: &mut Diagnostics) {
        for c in &root.children {
            match c {
                Node::Text(t) if !t.trim().is_empty() => {
                    diags.error(Code::RdfStructure, root.pos, format!("text `{}` outside a Description", t.trim()));
                }
                Node::Text(_) => {}
                Node::Element(el) => {
                    self.enter(el, diags);
                    match self.resolve(&el.name, el.pos, false, diags) {
                        Some(Name::Vocab(v)) if v == "Description" => {
                            self.description(el, diags);
                        }
                        Some(Name::Vocab(v)) if v == "li" => {
                            diags.error(Code::RdfStructure, el.pos, format!("<{}> outside a container", el.name));
                        }
                        Some(Name::Vocab(v)) if matches!(v.as_str(), "Bag" | "Seq" | "Alt") => {
                            diags.error(Code::RdfStructure, el.pos, format!("container <{}> must be a property value", el.name));
                        }
                        Some(_) => {
                            diags.error(Code::RdfStructure, el.pos, format!("property element <{}> outside a Description", el.name));
                        }
                        None => {}
                    }
                    self.leave();
                }
            }
        }
    }

    fn subject_of(&mut self, el: &Element) -> String {
        for key in ["about", "rdf:about", "ID", "rdf:ID"] {
            if let Some(v) = el.attr(key) {
                return v.trim().to_string();
            }
        }
        self.anon()
    }

    fn resource_attr(&self, el: &Element, diags: &mut Diagnostics) -> Option<String> {
        for key in ["rdf:resource", "resource"] {
            if let Some(v) = el.attr(key) {
                return Some(v.trim().to_string());
            }
        }
        for key in ["rdf:ressource", "ressource"] {
            if let Some(v) = el.attr(key) {
                diags.warning(Code::ResourceSpelling, el.pos, format!("`{key}` read as `resource`"));
                return Some(v.trim().to_string());
            }
        }
        None
    }

    /// Property-valued attributes (the abbreviated syntax).
    fn attr_properties(&mut self, el: &Element, diags: &mut Diagnostics) -> Vec<(Property, String)> {
        let mut out = Vec::new();
        for (n, v) in &el.attrs {
            if n == "xmlns" || n.starts_with("xmlns:") || n == "ressource" || n == "rdf:ressource" {
                continue;
            }
            match self.resolve(n, el.pos, true, diags) {
                Some(Name::Property(p)) => out.push((p, v.trim().to_string())),
                Some(Name::Vocab(_)) | None => {}
            }
        }
        out
    }

    /// A Description; returns its subject id.
    fn description(&mut self, el: &Element, diags: &mut Diagnostics) -> String {
        let subject = self.subject_of(el);
        if self.resource_attr(el, diags).is_some() {
            diags.warning(Code::RdfStructure, el.pos, "`resource` on a Description is ignored");
        }
        for (p, v) in self.attr_properties(el, diags) {
            self.push(&subject, p, RdfObject::Literal(v));
        }
        for c in &el.children {
            match c {
                Node::Text(t) if !t.trim().is_empty() => {
                    diags.error(Code::RdfStructure, el.pos, format!("text `{}` directly inside a Description", t.trim()));
                }
                Node::Text(_) => {}
                Node::Element(child) => {
                    self.enter(child, diags);
                    self.property(&subject, child, diags);
                    self.leave();
                }
            }
        }
        subject
    }

    fn push(&mut self, subject: &str, property: Property, object: RdfObject) {
        self.graph.statements.push(Statement { subject: subject.to_string(), property, object });
    }

    fn property(&mut self, subject: &str, el: &Element, diags: &mut Diagnostics) {
        let prop = match self.resolve(&el.name, el.pos, false, diags) {
            None => return,
            Some(Name::Property(p)) => p,
            Some(Name::Vocab(v)) => {
                let msg = match v.as_str() {
                    "li" => format!("<{}> outside a container", el.name),
                    "Description" => format!("<{}> directly inside a Description; wrap it in a property", el.name),
                    _ => format!("<{}> cannot be a property", el.name),
                };
                diags.error(Code::RdfStructure, el.pos, msg);
                return;
            }
        };
        let resource = self.resource_attr(el, diags);
        let attr_props = self.attr_properties(el, diags);
        let kids: Vec<&Element> = el.elements().collect();
        if el.has_text() && !kids.is_empty() {
            diags.error(Code::RdfStructure, el.pos, format!("property <{}> mixes text and elements", el.name));
            return;
        }
        if el.attr("rdf:parseType") == Some("Resource") || el.attr("parseType") == Some("Resource") {
            let node = self.anon();
            for k in kids {
                self.enter(k, diags);
                self.property(&node, k, diags);
                self.leave();
            }
            self.push(subject, prop, RdfObject::Resource(node));
            return;
        }
        let object = match (kids.as_slice(), resource) {
            ([], Some(r)) => {
                for (p, v) in attr_props {
                    self.push(&r, p, RdfObject::Literal(v));
                }
                RdfObject::Resource(r)
            }
            ([], None) if !attr_props.is_empty() && !el.has_text() => {
                let node = self.anon();
                for (p, v) in attr_props {
                    self.push(&node, p, RdfObject::Literal(v));
                }
                RdfObject::Resource(node)
            }
            ([], None) => RdfObject::Literal(el.text().trim().to_string()),
            ([_, ..], Some(_)) => {
                diags.error(Code::RdfStructure, el.pos, format!("property <{}> has both `resource` and content", el.name));
                return;
            }
            ([only], None) => {
                self.enter(only, diags);
                let obj = match self.resolve(&only.name, only.pos, false, diags) {
                    Some(Name::Vocab(v)) if v == "Description" => Some(RdfObject::Resource(self.description(only, diags))),
                    Some(Name::Vocab(v)) if matches!(v.as_str(), "Bag" | "Seq" | "Alt") => self.container(only, &v, diags),
                    Some(_) => {
                        diags.error(Code::RdfStructure, only.pos, format!("<{}> cannot be the value of <{}>", only.name, el.name));
                        None
                    }
                    None => None,
                };
                self.leave();
                match obj {
                    Some(o) => o,
                    None => return,
                }
            }
            (_, None) => {
                diags.error(Code::RdfStructure, el.pos, format!("property <{}> has more than one value element", el.name));
                return;
            }
        };
        self.push(subject, prop, object);
    }

    fn container(&mut self, el: &Element, kind: &str, diags: &mut Diagnostics) -> Option<RdfObject> {
        let kind = match kind {
            "Bag" => ContainerKind::Bag,
            "Seq" => ContainerKind::Seq,
            _ => ContainerKind::Alt,
        };
        let id = self.anon();
        let mut members = Vec::new();
        for item in el.elements() {
            self.enter(item, diags);
            let ok = matches!(self.resolve(&item.name, item.pos, false, diags), Some(Name::Vocab(v)) if v == "li" || v.starts_with('_'));
            if !ok {
                diags.error(Code::RdfStructure, item.pos, format!("only rdf:li may appear in rdf:{kind}, found <{}>", item.name));
                self.leave();
                continue;
            }
            if let Some(r) = self.resource_attr(item, diags) {
                members.push(Member::Resource(r));
            } else if let Some(node) = item.elements().next() {
                self.enter(node, diags);
                if matches!(self.resolve(&node.name, node.pos, false, diags), Some(Name::Vocab(v)) if v == "Description") {
                    let s = self.description(node, diags);
                    members.push(Member::Resource(s));
                } else {
                    diags.error(Code::RdfStructure, node.pos, format!("<{}> cannot be a container member", node.name));
                }
                self.leave();
            } else {
                members.push(Member::Literal(item.text().trim().to_string()));
            }
            self.leave();
        }
        if kind == ContainerKind::Alt && members.is_empty() {
            diags.error(Code::EmptyAlternative, el.pos, "rdf:Alt needs at least one member");
            return None;
        }
        self.graph.containers.push(Container { id, kind, members });
        Some(RdfObject::Container(self.graph.containers.len() - 1))
    }
}
