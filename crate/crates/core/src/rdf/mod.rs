//! RDF statements from annotated documents, and their mapping onto
//! ontology facts.

mod equiv;
mod extract;
mod mapping;
mod version;

use std::fmt;

pub use equiv::equivalent_statement_sets;
pub use extract::{extract_document, extract_islands, is_rdf_root, scan_rdf, ExtractOptions};
pub use mapping::{map_to_facts, normalize_ns, parse_mapping, MapOptions, MappingConfig, MappingRule};
pub use version::{check_version, parse_version};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";

/// A namespace-qualified property name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Property {
    /// Resolved namespace URI; `None` for names whose prefix carries no
    /// schema (such as non-vocabulary names under the `rdf` prefix).
    pub ns: Option<String>,
    pub local: String,
    /// The name as written.
    pub qname: String,
}

impl Property {
    /// Same property: equal namespace and local name, or equal local name
    /// when either side has no namespace.
    pub fn same(&self, other: &Property) -> bool {
        self.local == other.local
            && match (&self.ns, &other.ns) {
                (Some(a), Some(b)) => normalize_ns(a) == normalize_ns(b),
                _ => true,
            }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.qname)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContainerKind {
    Bag,
    Seq,
    Alt,
}

impl fmt::Display for ContainerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContainerKind::Bag => "Bag",
            ContainerKind::Seq => "Seq",
            ContainerKind::Alt => "Alt",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Member {
    Resource(String),
    Literal(String),
}

impl fmt::Display for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Member::Resource(r) => f.write_str(r),
            Member::Literal(s) => f.write_str(&crate::symbol::quote_literal(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub id: String,
    pub kind: ContainerKind,
    pub members: Vec<Member>,
}

impl fmt::Display for Container {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.kind)?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RdfObject {
    Literal(String),
    Resource(String),
    /// Index into [`RdfGraph::containers`].
    Container(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub subject: String,
    pub property: Property,
    pub object: RdfObject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceBinding {
    pub prefix: String,
    pub uri: String,
    /// From a `#vN` fragment.
    pub version: Option<u32>,
}

/// Statements, containers and namespace bindings of one document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RdfGraph {
    pub statements: Vec<Statement>,
    pub containers: Vec<Container>,
    pub namespaces: Vec<NamespaceBinding>,
}

impl RdfGraph {
    pub fn container(&self, idx: usize) -> &Container {
        &self.containers[idx]
    }

    /// `(subject, property, object)` with containers written inline.
    pub fn render_statement(&self, s: &Statement) -> String {
        let obj = match &s.object {
            RdfObject::Literal(l) => crate::symbol::quote_literal(l),
            RdfObject::Resource(r) => r.clone(),
            RdfObject::Container(i) => self.containers[*i].to_string(),
        };
        format!("({}, {}, {obj})", s.subject, s.property)
    }

    /// One statement per line, in extraction order.
    pub fn render(&self) -> String {
        self.statements.iter().map(|s| self.render_statement(s) + "\n").collect()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}
