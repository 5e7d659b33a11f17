//! Statement-set equivalence up to renaming of anonymous nodes.

use std::collections::BTreeMap;

use super::{ContainerKind, Member, Property, RdfGraph, RdfObject};

#[derive(Debug, Clone, PartialEq)]
enum Obj {
    Literal(String),
    Resource(String),
    Container(ContainerKind, Vec<Member>),
}

#[derive(Debug, Clone, PartialEq)]
struct Triple {
    subject: String,
    property: Property,
    object: Obj,
}

fn triples(g: &RdfGraph) -> Vec<Triple> {
    let mut out: Vec<Triple> = Vec::new();
    for s in &g.statements {
        let object = match &s.object {
            RdfObject::Literal(l) => Obj::Literal(l.clone()),
            RdfObject::Resource(r) => Obj::Resource(r.clone()),
            RdfObject::Container(i) => {
                let c = g.container(*i);
                Obj::Container(c.kind, c.members.clone())
            }
        };
        let t = Triple { subject: s.subject.clone(), property: s.property.clone(), object };
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

fn is_anon(id: &str) -> bool {
    id.starts_with("_:")
}

/// A partial bijection between the anonymous ids of the two sides.
#[derive(Clone, Default)]
struct Renaming {
    fwd: BTreeMap<String, String>,
    bwd: BTreeMap<String, String>,
}

impl Renaming {
    fn unify(&mut self, a: &str, b: &str) -> bool {
        match (is_anon(a), is_anon(b)) {
            (false, false) => a == b,
            (true, true) => match (self.fwd.get(a), self.bwd.get(b)) {
                (Some(x), Some(y)) => x == b && y == a,
                (None, None) => {
                    self.fwd.insert(a.to_string(), b.to_string());
                    self.bwd.insert(b.to_string(), a.to_string());
                    true
                }
                _ => false,
            },
            _ => false,
        }
    }

    fn member(&mut self, a: &Member, b: &Member) -> bool {
        match (a, b) {
            (Member::Literal(x), Member::Literal(y)) => x == y,
            (Member::Resource(x), Member::Resource(y)) => self.unify(x, y),
            _ => false,
        }
    }
}

fn same_property(a: &Property, b: &Property) -> bool {
    a.same(b)
}

/// Members of a bag, matched as a multiset.
fn bag(a: &[Member], b: &[Member], used: &mut Vec<bool>, r: &Renaming) -> Option<Renaming> {
    let Some((first, rest)) = a.split_first() else { return Some(r.clone()) };
    for j in 0..b.len() {
        if used[j] {
            continue;
        }
        let mut r2 = r.clone();
        if r2.member(first, &b[j]) {
            used[j] = true;
            let found = bag(rest, b, used, &r2);
            used[j] = false;
            if found.is_some() {
                return found;
            }
        }
    }
    None
}

fn object(a: &Obj, b: &Obj, r: &Renaming) -> Option<Renaming> {
    let mut r = r.clone();
    match (a, b) {
        (Obj::Literal(x), Obj::Literal(y)) => (x == y).then_some(r),
        (Obj::Resource(x), Obj::Resource(y)) => r.unify(x, y).then_some(r),
        (Obj::Container(ka, ma), Obj::Container(kb, mb)) if ka == kb && ma.len() == mb.len() => {
            if *ka == ContainerKind::Bag {
                bag(ma, mb, &mut vec![false; mb.len()], &r)
            } else {
                ma.iter().zip(mb).all(|(x, y)| r.member(x, y)).then_some(r)
            }
        }
        _ => None,
    }
}

fn search(a: &[Triple], b: &[Triple], used: &mut Vec<bool>, r: &Renaming) -> bool {
    let Some((first, rest)) = a.split_first() else { return true };
    for j in 0..b.len() {
        if used[j] || !same_property(&first.property, &b[j].property) {
            continue;
        }
        let mut r2 = r.clone();
        if !r2.unify(&first.subject, &b[j].subject) {
            continue;
        }
        if let Some(r3) = object(&first.object, &b[j].object, &r2) {
            used[j] = true;
            let ok = search(rest, b, used, &r3);
            used[j] = false;
            if ok {
                return true;
            }
        }
    }
    false
}

/// True iff both graphs hold the same statements once anonymous ids are
/// renamed consistently and bag members are compared as multisets.
/// Sequences and alternatives compare in order.
pub fn equivalent_statement_sets(a: &RdfGraph, b: &RdfGraph) -> bool {
    let mut ta = triples(a);
    let tb = triples(b);
    if ta.len() != tb.len() {
        return false;
    }
    // named statements first: they fix the renaming early
    ta.sort_by_key(|t| is_anon(&t.subject));
    search(&ta, &tb, &mut vec![false; tb.len()], &Renaming::default())
}
