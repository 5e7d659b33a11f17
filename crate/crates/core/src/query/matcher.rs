//! Single-atom matching against a fact store: the join step shared by rule
//! evaluation and query answering.

use std::collections::{BTreeMap, BTreeSet};

use crate::flogic::{Atom, Term};
use crate::ontology::{Fact, FactStore};
use crate::symbol::{Name, Value};

/// A variable assignment.
pub type Binding = BTreeMap<Name, Value>;

fn resolve(term: &Term, b: &Binding) -> Option<Value> {
    match term {
        Term::Var(v) => b.get(v).cloned(),
        other => other.ground(),
    }
}

fn extend(partial: &Binding, var: &Name, value: Value) -> Binding {
    let mut b = partial.clone();
    b.insert(var.clone(), value);
    b
}

/// All consistent extensions of `partial` under which `atom` holds in
/// `store`. Membership atoms match the stored (upward-closed) memberships.
pub fn match_atom(atom: &Atom, store: &FactStore, partial: &Binding) -> Vec<Binding> {
    match atom {
        Atom::Member { term, class } => match resolve(term, partial) {
            Some(Value::Object(o)) => {
                if store.is_member(&o, class) {
                    vec![partial.clone()]
                } else {
                    Vec::new()
                }
            }
            Some(Value::Literal(_)) => Vec::new(),
            None => {
                let var = term.var().expect("unresolved term is a variable");
                store.members_of(class).iter().map(|o| extend(partial, var, Value::Object(o.clone()))).collect()
            }
        },
        Atom::Attr { subject, attribute, value } => {
            let s = resolve(subject, partial);
            let v = resolve(value, partial);
            match (s, v) {
                (Some(Value::Literal(_)), _) => Vec::new(),
                (Some(Value::Object(s)), Some(v)) => {
                    if store.values(attribute, &s).contains(&v) {
                        vec![partial.clone()]
                    } else {
                        Vec::new()
                    }
                }
                (Some(Value::Object(s)), None) => {
                    let var = value.var().expect("unresolved term is a variable");
                    store.values(attribute, &s).iter().map(|v| extend(partial, var, v.clone())).collect()
                }
                (None, Some(v)) => {
                    let var = subject.var().expect("unresolved term is a variable");
                    store.subjects_with(attribute, &v).iter().map(|s| extend(partial, var, Value::Object(s.clone()))).collect()
                }
                (None, None) => {
                    let sv = subject.var().expect("unresolved term is a variable");
                    let vv = value.var().expect("unresolved term is a variable");
                    store
                        .pairs(attribute)
                        .filter(|(s, v)| sv != vv || v.as_object() == Some(*s))
                        .map(|(s, v)| {
                            let mut b = extend(partial, sv, Value::Object(s.clone()));
                            b.insert(vv.clone(), v.clone());
                            b
                        })
                        .collect()
                }
            }
        }
    }
}

/// Number of atom positions already fixed under the bound variable set.
pub(crate) fn bound_positions(atom: &Atom, bound: &BTreeSet<Name>) -> usize {
    let fixed = |t: &Term| match t {
        Term::Var(v) => bound.contains(v),
        _ => true,
    };
    match atom {
        // the class is always fixed; count it so memberships rank as selective
        Atom::Member { term, .. } => 1 + usize::from(fixed(term)) * 2,
        Atom::Attr { subject, value, .. } => 1 + usize::from(fixed(subject)) + usize::from(fixed(value)),
    }
}

/// Greedy most-bound-first evaluation order over `atoms`, starting from
/// `first` when given. Ties keep source order.
pub(crate) fn join_order(atoms: &[Atom], first: Option<usize>, mut bound: BTreeSet<Name>) -> Vec<usize> {
    let mut order = Vec::with_capacity(atoms.len());
    let mut remaining: Vec<usize> = (0..atoms.len()).collect();
    if let Some(f) = first {
        remaining.retain(|&i| i != f);
        bound.extend(atoms[f].vars().cloned());
        order.push(f);
    }
    while !remaining.is_empty() {
        let (slot, _) = remaining
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| {
                bound_positions(&atoms[**a], &bound).cmp(&bound_positions(&atoms[**b], &bound)).then(ib.cmp(ia))
            })
            .expect("non-empty");
        let idx = remaining.remove(slot);
        bound.extend(atoms[idx].vars().cloned());
        order.push(idx);
    }
    order
}

/// Instantiates an atom under a binding that covers all its variables.
/// Returns `None` if a literal lands in an object position.
pub fn instantiate(atom: &Atom, b: &Binding) -> Option<Fact> {
    match atom {
        Atom::Member { term, class } => match resolve(term, b)? {
            Value::Object(o) => Some(Fact::Member { object: o, class: class.clone() }),
            Value::Literal(_) => None,
        },
        Atom::Attr { subject, attribute, value } => match resolve(subject, b)? {
            Value::Object(o) => Some(Fact::Attr { object: o, attribute: attribute.clone(), value: resolve(value, b)? }),
            Value::Literal(_) => None,
        },
    }
}
