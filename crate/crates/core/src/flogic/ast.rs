use std::collections::BTreeSet;
use std::sync::Arc;

use crate::diag::Pos;
use crate::ontology::{AttributeSignature, ClassDecl, Fact};
use crate::symbol::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Name),
    Object(Name),
    Literal(Arc<str>),
}

impl Term {
    pub fn var(&self) -> Option<&Name> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn ground(&self) -> Option<Value> {
        match self {
            Term::Var(_) => None,
            Term::Object(o) => Some(Value::Object(o.clone())),
            Term::Literal(s) => Some(Value::Literal(s.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Member { term: Term, class: Name },
    Attr { subject: Term, attribute: Name, value: Term },
}

impl Atom {
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        let (a, b) = match self {
            Atom::Member { term, .. } => (term, None),
            Atom::Attr { subject, value, .. } => (subject, Some(value)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Name> {
        self.terms().filter_map(Term::var)
    }
}

pub fn vars_of<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Name> {
    atoms.into_iter().flat_map(|a| a.vars().cloned()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Implication,
    Equivalence,
}

/// `FORALL vars body -> head.` or `FORALL vars lhs <-> rhs.`
///
/// For an equivalence, `body` holds the left side and `head` the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub kind: RuleKind,
    pub vars: Vec<Name>,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
    pub pos: Option<Pos>,
}

/// `FORALL vars <- body.` Non-projected body variables are existential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub vars: Vec<Name>,
    pub body: Vec<Atom>,
    pub pos: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactDecl {
    pub fact: Fact,
    pub pos: Option<Pos>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub class_decls: Vec<ClassDecl>,
    pub signatures: Vec<AttributeSignature>,
    pub facts: Vec<FactDecl>,
    pub rules: Vec<Rule>,
    pub queries: Vec<Query>,
}

impl Program {
    pub fn is_empty(&self) -> bool {
        self.class_decls.is_empty()
            && self.signatures.is_empty()
            && self.facts.is_empty()
            && self.rules.is_empty()
            && self.queries.is_empty()
    }

    /// Appends another program's items.
    pub fn merge(&mut self, other: Program) {
        self.class_decls.extend(other.class_decls);
        self.signatures.extend(other.signatures);
        self.facts.extend(other.facts);
        self.rules.extend(other.rules);
        self.queries.extend(other.queries);
    }

    /// Copy with every source position cleared, for structural comparison.
    pub fn without_positions(&self) -> Program {
        let mut p = self.clone();
        p.class_decls.iter_mut().for_each(|d| d.pos = None);
        p.signatures.iter_mut().for_each(|s| s.pos = None);
        p.facts.iter_mut().for_each(|f| f.pos = None);
        p.rules.iter_mut().for_each(|r| r.pos = None);
        p.queries.iter_mut().for_each(|q| q.pos = None);
        p
    }
}
