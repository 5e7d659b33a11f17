//! Indexed set of facts.

use std::collections::{BTreeMap, BTreeSet};

use super::Fact;
use crate::symbol::{Name, Value};

/// A mathematical set of facts, indexed by class, by attribute and by
/// (attribute, value).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactStore {
    members: BTreeMap<Name, BTreeSet<Name>>,
    classes_of: BTreeMap<Name, BTreeSet<Name>>,
    attrs: BTreeMap<Name, BTreeMap<Name, BTreeSet<Value>>>,
    by_value: BTreeMap<Name, BTreeMap<Value, BTreeSet<Name>>>,
    len: usize,
}

static EMPTY_NAMES: BTreeSet<Name> = BTreeSet::new();
static EMPTY_VALUES: BTreeSet<Value> = BTreeSet::new();

impl FactStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `fact`; returns false if it was already present.
    pub fn insert(&mut self, fact: &Fact) -> bool {
        let added = match fact {
            Fact::Member { object, class } => {
                let added = self.members.entry(class.clone()).or_default().insert(object.clone());
                if added {
                    self.classes_of.entry(object.clone()).or_default().insert(class.clone());
                }
                added
            }
            Fact::Attr { object, attribute, value } => {
                let added = self
                    .attrs
                    .entry(attribute.clone())
                    .or_default()
                    .entry(object.clone())
                    .or_default()
                    .insert(value.clone());
                if added {
                    self.by_value
                        .entry(attribute.clone())
                        .or_default()
                        .entry(value.clone())
                        .or_default()
                        .insert(object.clone());
                }
                added
            }
        };
        if added {
            self.len += 1;
        }
        added
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        match fact {
            Fact::Member { object, class } => self.members.get(class).is_some_and(|s| s.contains(object)),
            Fact::Attr { object, attribute, value } => self
                .attrs
                .get(attribute)
                .and_then(|m| m.get(object))
                .is_some_and(|s| s.contains(value)),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn members_of(&self, class: &Name) -> &BTreeSet<Name> {
        self.members.get(class).unwrap_or(&EMPTY_NAMES)
    }

    pub fn classes_of(&self, object: &Name) -> &BTreeSet<Name> {
        self.classes_of.get(object).unwrap_or(&EMPTY_NAMES)
    }

    pub fn is_member(&self, object: &Name, class: &Name) -> bool {
        self.members.get(class).is_some_and(|s| s.contains(object))
    }

    pub fn values(&self, attribute: &Name, subject: &Name) -> &BTreeSet<Value> {
        self.attrs.get(attribute).and_then(|m| m.get(subject)).unwrap_or(&EMPTY_VALUES)
    }

    pub fn subjects_with(&self, attribute: &Name, value: &Value) -> &BTreeSet<Name> {
        self.by_value.get(attribute).and_then(|m| m.get(value)).unwrap_or(&EMPTY_NAMES)
    }

    /// All (subject, value) pairs of one attribute.
    pub fn pairs(&self, attribute: &Name) -> impl Iterator<Item = (&Name, &Value)> + '_ {
        self.attrs
            .get(attribute)
            .into_iter()
            .flat_map(|m| m.iter().flat_map(|(s, vs)| vs.iter().map(move |v| (s, v))))
    }

    pub fn has_attribute(&self, attribute: &Name) -> bool {
        self.attrs.contains_key(attribute)
    }

    pub fn attributes(&self) -> impl Iterator<Item = &Name> {
        self.attrs.keys()
    }

    pub fn classes(&self) -> impl Iterator<Item = &Name> {
        self.members.keys()
    }

    /// All facts: memberships first, then attribute facts, each in lexical order.
    pub fn iter(&self) -> impl Iterator<Item = Fact> + '_ {
        let members = self.members.iter().flat_map(|(c, objs)| {
            objs.iter().map(move |o| Fact::Member { object: o.clone(), class: c.clone() })
        });
        let attrs = self.attrs.iter().flat_map(|(a, subjects)| {
            subjects.iter().flat_map(move |(s, vs)| {
                vs.iter().map(move |v| Fact::Attr { object: s.clone(), attribute: a.clone(), value: v.clone() })
            })
        });
        members.chain(attrs)
    }

    /// Every object-id that occurs anywhere, including as an attribute value.
    pub fn objects(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.classes_of.keys().cloned().collect();
        for subjects in self.attrs.values() {
            for (s, vs) in subjects {
                out.insert(s.clone());
                out.extend(vs.iter().filter_map(|v| v.as_object().cloned()));
            }
        }
        out
    }

    pub fn extend<'a>(&mut self, facts: impl IntoIterator<Item = &'a Fact>) {
        for f in facts {
            self.insert(f);
        }
    }
}

impl FromIterator<Fact> for FactStore {
    fn from_iter<T: IntoIterator<Item = Fact>>(iter: T) -> Self {
        let mut store = FactStore::new();
        for f in iter {
            store.insert(&f);
        }
        store
    }
}
