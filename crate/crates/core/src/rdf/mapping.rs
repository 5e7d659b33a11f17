//! The mapping sidecar: RDF properties to ontology attributes.
//!
//! ```text
//! # comment
//! prefix s = http://description.org/schema/
//! http://muster.org/onto#Autor -> HatAutor @ TVeroeffentlichung
//! s:Name -> HatName @ TPerson
//! ```

use std::collections::{BTreeMap, BTreeSet};

use super::extract::ExtractOptions;
use super::{Member, Property, RdfGraph, RdfObject, ContainerKind};
use crate::diag::{Code, Diagnostics, Mode, Pos};
use crate::ontology::{Fact, Schema, STRING_TYPE};
use crate::symbol::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub attribute: Name,
    pub domain: Name,
    pub line: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappingConfig {
    pub prefixes: BTreeMap<String, String>,
    /// Keyed by normalized namespace and local name.
    rules: BTreeMap<(String, String), MappingRule>,
}

/// Strips whitespace, a `#vN` version fragment and a trailing `#`, so that
/// all versions of a namespace share one key.
pub fn normalize_ns(uri: &str) -> String {
    let mut s: String = uri.chars().filter(|c| !c.is_whitespace()).collect();
    if super::parse_version(&s).is_some() {
        let cut = s.rfind('#').expect("version fragment");
        s.truncate(cut);
    }
    while s.ends_with('#') {
        s.pop();
    }
    s
}

pub fn parse_mapping(src: &str, diags: &mut Diagnostics) -> MappingConfig {
    let mut cfg = MappingConfig::default();
    let mut pending: Vec<(String, String, u32)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i as u32 + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with("//") {
            continue;
        }
        let pos = Pos::new(line, 1);
        if let Some(rest) = text.strip_prefix("prefix ") {
            match rest.split_once('=') {
                Some((p, uri)) if !p.trim().is_empty() && !uri.trim().is_empty() => {
                    cfg.prefixes.insert(p.trim().to_string(), uri.trim().to_string());
                }
                _ => diags.error(Code::MappingSyntax, pos, "expected `prefix <name> = <uri>`"),
            }
            continue;
        }
        let Some((lhs, rhs)) = text.split_once("->") else {
            diags.error(Code::MappingSyntax, pos, "expected `<property> -> <Attribute> @ <Class>`");
            continue;
        };
        pending.push((lhs.trim().to_string(), rhs.trim().to_string(), line));
    }
    // prefixes may be declared after their first use
    for (lhs, rhs, line) in pending {
        let pos = Pos::new(line, 1);
        let key = if lhs.contains("://") {
            match lhs.rsplit_once('#') {
                Some((ns, local)) if !local.is_empty() => (normalize_ns(ns), local.to_string()),
                _ => {
                    diags.error(Code::MappingSyntax, pos, format!("`{lhs}` must have the form <namespace>#<local>"));
                    continue;
                }
            }
        } else {
            match lhs.split_once(':') {
                Some((p, local)) => match cfg.prefixes.get(p) {
                    Some(ns) => (normalize_ns(ns), local.to_string()),
                    None => {
                        diags.error(Code::MappingSyntax, pos, format!("prefix `{p}` is not declared in the mapping"));
                        continue;
                    }
                },
                None => {
                    diags.error(Code::MappingSyntax, pos, format!("`{lhs}` is neither a URI nor a prefixed name"));
                    continue;
                }
            }
        };
        let Some((attr, domain)) = rhs.split_once('@').map(|(a, d)| (a.trim(), d.trim())) else {
            diags.error(Code::MappingSyntax, pos, "expected `<Attribute> @ <Class>` after `->`");
            continue;
        };
        let ident = |s: &str| !s.is_empty() && !s.contains(char::is_whitespace);
        if !ident(attr) || !ident(domain) {
            diags.error(Code::MappingSyntax, pos, "attribute and class must be single identifiers");
            continue;
        }
        let rule = MappingRule { attribute: Name::new(attr), domain: Name::new(domain), line };
        if let Some(prev) = cfg.rules.get(&key) {
            if prev.attribute != rule.attribute || prev.domain != rule.domain {
                diags.error(Code::MappingSyntax, pos, format!("`{lhs}` is already mapped on line {}", prev.line));
            }
            continue;
        }
        cfg.rules.insert(key, rule);
    }
    cfg
}

impl MappingConfig {
    pub fn rules(&self) -> impl Iterator<Item = (&(String, String), &MappingRule)> {
        self.rules.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Checks domain classes and attributes against the schema.
    pub fn check(&self, schema: &Schema, diags: &mut Diagnostics) {
        for ((ns, local), r) in &self.rules {
            let pos = Pos::new(r.line, 1);
            match schema.effective_signature(&r.domain) {
                Err(_) => diags.error(Code::MappingSyntax, pos, format!("{ns}#{local}: class `{}` is not declared", r.domain)),
                Ok(sig) if !sig.contains_key(&r.attribute) => diags.error(
                    Code::MappingSyntax,
                    pos,
                    format!("{ns}#{local}: `{}` has no attribute `{}`", r.domain, r.attribute),
                ),
                Ok(_) => {}
            }
        }
    }

    /// Extraction options that fall back to the mapping's prefixes.
    pub fn extract_options(&self) -> ExtractOptions {
        let mut opts = ExtractOptions::default();
        for (p, u) in &self.prefixes {
            opts = opts.with_prefix(p, u);
        }
        opts
    }

    /// The rule for a property. A property without a namespace matches by
    /// local name if exactly one rule has it.
    pub fn lookup(&self, p: &Property) -> Option<&MappingRule> {
        match &p.ns {
            Some(ns) => self.rules.get(&(normalize_ns(ns), p.local.clone())),
            None => {
                let mut hits = self.rules.iter().filter(|((_, l), _)| *l == p.local);
                let first = hits.next()?;
                hits.next().is_none().then_some(first.1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MapOptions {
    pub mode: Mode,
    /// Map every member of an `rdf:Alt`, not just the default (first) one.
    pub all_alternatives: bool,
}

/// Turns statements into facts. Every subject becomes a member of its
/// property's domain class; resource values become members of the
/// attribute's declared value class. Container values expand to one fact
/// per member. Output is sorted and duplicate-free.
pub fn map_to_facts(graph: &RdfGraph, schema: &Schema, config: &MappingConfig, opts: MapOptions, diags: &mut Diagnostics) -> Vec<Fact> {
    let mut facts: BTreeSet<Fact> = BTreeSet::new();
    let mut unmapped: BTreeSet<String> = BTreeSet::new();
    for st in &graph.statements {
        let Some(rule) = config.lookup(&st.property) else {
            if unmapped.insert(st.property.qname.clone()) {
                let what = match &st.property.ns {
                    Some(ns) => format!("{} ({ns})", st.property),
                    None => st.property.to_string(),
                };
                let tail = if opts.mode == Mode::Strict { "" } else { "; skipped" };
                diags.report(opts.mode, Code::UnmappedProperty, None, format!("no mapping for property {what}{tail}"));
            }
            continue;
        };
        let subject = Name::new(&st.subject);
        facts.insert(Fact::Member { object: subject.clone(), class: rule.domain.clone() });
        let values: Vec<Value> = match &st.object {
            RdfObject::Literal(s) => vec![Value::literal(s)],
            RdfObject::Resource(r) => vec![Value::object(r)],
            RdfObject::Container(i) => {
                let c = graph.container(*i);
                let take = if c.kind == ContainerKind::Alt && !opts.all_alternatives { 1 } else { c.members.len() };
                c.members
                    .iter()
                    .take(take)
                    .map(|m| match m {
                        Member::Resource(r) => Value::object(r),
                        Member::Literal(s) => Value::literal(s),
                    })
                    .collect()
            }
        };
        let value_class = schema
            .effective_signature(&rule.domain)
            .ok()
            .and_then(|s| s.get(&rule.attribute))
            .filter(|t| t.as_str() != STRING_TYPE)
            .cloned();
        for v in values {
            if let (Value::Object(o), Some(c)) = (&v, &value_class) {
                facts.insert(Fact::Member { object: o.clone(), class: c.clone() });
            }
            facts.insert(Fact::Attr { object: subject.clone(), attribute: rule.attribute.clone(), value: v });
        }
    }
    facts.into_iter().collect()
}
