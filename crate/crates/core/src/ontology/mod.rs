//! Knowledge-base data model: classes, the subclass lattice, set-valued
//! attribute signatures with inheritance, and typed fact storage.
//!
//! Schema construction goes through [`OntologyBuilder`]; [`OntologyBuilder::finalize`]
//! checks the lattice and signatures and yields an immutable [`Schema`].
//! Facts are asserted into a [`KnowledgeBase`] that shares the schema.

mod store;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use store::FactStore;

use crate::diag::{Code, Diagnostics, Mode, Pos};
use crate::symbol::{quote_literal, Name, Value};

/// The predefined root of every class hierarchy.
pub const ROOT_CLASS: &str = "Object";
/// The only builtin literal type.
pub const STRING_TYPE: &str = "STRING";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: Name,
    pub supers: BTreeSet<Name>,
    pub pos: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSignature {
    pub owner: Name,
    pub attribute: Name,
    pub value_type: Name,
    pub pos: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fact {
    Member { object: Name, class: Name },
    Attr { object: Name, attribute: Name, value: Value },
}

impl Fact {
    pub fn member(object: &str, class: &str) -> Self {
        Fact::Member { object: Name::new(object), class: Name::new(class) }
    }

    pub fn attr(object: &str, attribute: &str, value: Value) -> Self {
        Fact::Attr { object: Name::new(object), attribute: Name::new(attribute), value }
    }

    pub fn object(&self) -> &Name {
        match self {
            Fact::Member { object, .. } | Fact::Attr { object, .. } => object,
        }
    }
}

/// Renders in frame-logic source syntax, without the terminating `.`.
impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Member { object, class } => write!(f, "{} : {}", object_token(object), class),
            Fact::Attr { object, attribute, value } => {
                write!(f, "{}[{} ->> {}]", object_token(object), attribute, value_token(value))
            }
        }
    }
}

/// Source token for an object-id: bare when it lexes back as a plain
/// identifier, backquoted otherwise.
pub fn object_token(name: &Name) -> String {
    if crate::flogic::is_plain_constant(name.as_str()) {
        name.to_string()
    } else {
        format!("`{}`", name.as_str().replace('\\', "\\\\").replace('`', "\\`"))
    }
}

/// Source token for a value: an object token or a quoted literal.
pub fn value_token(value: &Value) -> String {
    match value {
        Value::Object(o) => object_token(o),
        Value::Literal(s) => quote_literal(s),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown class `{0}`")]
    UnknownClass(Name),
}

#[derive(Debug, Clone)]
struct ClassEntry {
    supers: BTreeSet<Name>,
    pos: Option<Pos>,
}

/// Mutable schema under construction.
#[derive(Debug, Clone)]
pub struct OntologyBuilder {
    classes: BTreeMap<Name, ClassEntry>,
    signatures: Vec<AttributeSignature>,
}

impl Default for OntologyBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl OntologyBuilder {
    pub fn new() -> Self {
        let mut classes = BTreeMap::new();
        classes.insert(Name::new(ROOT_CLASS), ClassEntry { supers: BTreeSet::new(), pos: None });
        OntologyBuilder { classes, signatures: Vec::new() }
    }

    /// Records a class and (some of) its direct superclasses.
    ///
    /// Repeated declarations accumulate superclasses, which is how multiple
    /// inheritance is written. Undeclared superclasses are resolved at
    /// [`finalize`](Self::finalize).
    pub fn declare_class(&mut self, decl: &ClassDecl, diags: &mut Diagnostics) {
        if decl.name.as_str() == STRING_TYPE {
            diags.error(Code::ReservedName, decl.pos, format!("`{STRING_TYPE}` is a builtin type and cannot be declared as a class"));
            return;
        }
        if decl.name.as_str() == ROOT_CLASS {
            if !decl.supers.is_empty() {
                diags.error(Code::ClassConflict, decl.pos, format!("the root class `{ROOT_CLASS}` cannot have superclasses"));
            }
            return;
        }
        for s in &decl.supers {
            if s.as_str() == STRING_TYPE {
                diags.error(Code::ReservedName, decl.pos, format!("`{}` cannot be a subclass of the builtin type `{STRING_TYPE}`", decl.name));
            }
        }
        let entry = self
            .classes
            .entry(decl.name.clone())
            .or_insert_with(|| ClassEntry { supers: BTreeSet::new(), pos: decl.pos });
        entry.pos = entry.pos.or(decl.pos);
        entry.supers.extend(decl.supers.iter().filter(|s| s.as_str() != STRING_TYPE).cloned());
    }

    pub fn declare_signature(&mut self, sig: &AttributeSignature) {
        self.signatures.push(sig.clone());
    }

    /// Declares every class and signature of a parsed program. The owner of
    /// a signature block counts as declared (directly under the root unless
    /// declared elsewhere).
    pub fn from_program(program: &crate::flogic::Program, diags: &mut Diagnostics) -> Self {
        let mut b = OntologyBuilder::new();
        for d in &program.class_decls {
            b.declare_class(d, diags);
        }
        for s in &program.signatures {
            if !b.classes.contains_key(&s.owner) && s.owner.as_str() != STRING_TYPE {
                b.declare_class(&ClassDecl { name: s.owner.clone(), supers: BTreeSet::new(), pos: s.pos }, diags);
            }
            b.declare_signature(s);
        }
        b
    }

    /// Resolves forward references, rejects cycles and signature conflicts,
    /// and computes the lattice and effective signatures.
    ///
    /// Returns `None` if any error-severity diagnostic was produced here.
    pub fn finalize(mut self, diags: &mut Diagnostics) -> Option<Schema> {
        let errors_before = diags.error_count();
        let root = Name::new(ROOT_CLASS);

        // superclasses referenced but never declared
        let referenced: BTreeSet<Name> = self.classes.values().flat_map(|e| e.supers.iter().cloned()).collect();
        for name in referenced {
            if !self.classes.contains_key(&name) {
                let pos = self.classes.values().find(|e| e.supers.contains(&name)).and_then(|e| e.pos);
                diags.warning(Code::ImplicitClass, pos, format!("class `{name}` is used as a superclass but never declared; placing it under `{ROOT_CLASS}`"));
                self.classes.insert(name, ClassEntry { supers: BTreeSet::new(), pos: None });
            }
        }

        let cyclic = find_cycles(&self.classes, diags);

        let mut ancestors: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
        for name in self.classes.keys() {
            let mut seen = BTreeSet::new();
            let mut stack = vec![name.clone()];
            while let Some(c) = stack.pop() {
                if seen.insert(c.clone()) {
                    if let Some(e) = self.classes.get(&c) {
                        stack.extend(e.supers.iter().cloned());
                    }
                }
            }
            seen.insert(root.clone());
            ancestors.insert(name.clone(), seen);
        }

        // own signatures
        let mut own: BTreeMap<Name, BTreeMap<Name, (Name, Option<Pos>)>> = BTreeMap::new();
        for sig in &self.signatures {
            if !self.classes.contains_key(&sig.owner) {
                diags.error(Code::UnknownClass, sig.pos, format!("signature on undeclared class `{}`", sig.owner));
                continue;
            }
            let vt = &sig.value_type;
            if vt.as_str() != STRING_TYPE {
                if !self.classes.contains_key(vt) {
                    diags.error(Code::UnknownClass, sig.pos, format!("attribute `{}` of `{}` has undeclared value type `{vt}`", sig.attribute, sig.owner));
                    continue;
                }
                if vt != &sig.owner && ancestors.get(vt).is_some_and(|a| a.contains(&sig.owner)) {
                    diags.error(
                        Code::SignatureType,
                        sig.pos,
                        format!("attribute `{}` of `{}` has value type `{vt}`, a subclass of its own class", sig.attribute, sig.owner),
                    );
                    continue;
                }
            }
            let slot = own.entry(sig.owner.clone()).or_default();
            match slot.get(&sig.attribute) {
                Some((existing, _)) if existing != vt => {
                    diags.error(
                        Code::SignatureConflict,
                        sig.pos,
                        format!("`{}[{} ==> {vt}]` conflicts with earlier `{}[{} ==> {existing}]`", sig.owner, sig.attribute, sig.owner, sig.attribute),
                    );
                }
                Some(_) => {}
                None => {
                    slot.insert(sig.attribute.clone(), (vt.clone(), sig.pos));
                }
            }
        }

        // effective signatures; each conflicting pair of sources reported once
        let mut effective: BTreeMap<Name, BTreeMap<Name, Name>> = BTreeMap::new();
        let mut reported: BTreeSet<(Name, Name, Name)> = BTreeSet::new();
        for (class, ancs) in &ancestors {
            let mut eff: BTreeMap<Name, (Name, Name)> = BTreeMap::new();
            // own class first so conflicts name the subclass as the redeclaring source
            let order = std::iter::once(class).chain(ancs.iter().filter(|a| *a != class));
            for source in order {
                let Some(sigs) = own.get(source) else { continue };
                for (attr, (vt, pos)) in sigs {
                    match eff.get(attr) {
                        Some((other_vt, other_src)) if other_vt != vt => {
                            let (a, b) = if other_src < source { (other_src.clone(), source.clone()) } else { (source.clone(), other_src.clone()) };
                            if reported.insert((attr.clone(), a, b)) {
                                diags.error(
                                    Code::SignatureConflict,
                                    *pos,
                                    format!(
                                        "attribute `{attr}` of `{class}`: `{source}[{attr} ==> {vt}]` conflicts with `{other_src}[{attr} ==> {other_vt}]`"
                                    ),
                                );
                            }
                        }
                        Some(_) => {}
                        None => {
                            eff.insert(attr.clone(), (vt.clone(), source.clone()));
                        }
                    }
                }
            }
            effective.insert(class.clone(), eff.into_iter().map(|(a, (t, _))| (a, t)).collect());
        }

        let mut attribute_types: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
        for sigs in own.values() {
            for (attr, (vt, _)) in sigs {
                attribute_types.entry(attr.clone()).or_default().insert(vt.clone());
            }
        }

        if cyclic || diags.error_count() > errors_before {
            return None;
        }

        let classes = self
            .classes
            .into_iter()
            .map(|(name, e)| {
                let ancs = ancestors.remove(&name).unwrap_or_default();
                (name, ClassInfo { supers: e.supers, ancestors: ancs, pos: e.pos })
            })
            .collect();
        Some(Schema {
            classes,
            own_signatures: own.into_iter().map(|(c, m)| (c, m.into_iter().map(|(a, (t, _))| (a, t)).collect())).collect(),
            effective,
            attribute_types,
        })
    }
}

/// Reports every cycle in the direct-superclass graph. Returns true if any.
fn find_cycles(classes: &BTreeMap<Name, ClassEntry>, diags: &mut Diagnostics) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    let mut marks: BTreeMap<&Name, Mark> = classes.keys().map(|k| (k, Mark::Fresh)).collect();
    let mut found = false;

    fn visit<'a>(
        node: &'a Name,
        classes: &'a BTreeMap<Name, ClassEntry>,
        marks: &mut BTreeMap<&'a Name, Mark>,
        path: &mut Vec<&'a Name>,
        diags: &mut Diagnostics,
        found: &mut bool,
    ) {
        marks.insert(node, Mark::Active);
        path.push(node);
        if let Some(entry) = classes.get(node) {
            for sup in &entry.supers {
                match marks.get(sup).copied().unwrap_or(Mark::Done) {
                    Mark::Fresh => visit(sup, classes, marks, path, diags, found),
                    Mark::Active => {
                        let start = path.iter().position(|n| *n == sup).unwrap_or(0);
                        let mut names: Vec<&str> = path[start..].iter().map(|n| n.as_str()).collect();
                        names.push(sup.as_str());
                        diags.error(Code::ClassCycle, classes.get(sup).and_then(|e| e.pos), format!("subclass cycle: {}", names.join(" :: ")));
                        *found = true;
                    }
                    Mark::Done => {}
                }
            }
        }
        path.pop();
        marks.insert(node, Mark::Done);
    }

    for name in classes.keys() {
        if marks[name] == Mark::Fresh {
            visit(name, classes, &mut marks, &mut Vec::new(), diags, &mut found);
        }
    }
    found
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub supers: BTreeSet<Name>,
    /// Reflexive-transitive superclasses, always including the root.
    pub ancestors: BTreeSet<Name>,
    pub pos: Option<Pos>,
}

/// Finalized class lattice and signatures. Immutable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    classes: BTreeMap<Name, ClassInfo>,
    own_signatures: BTreeMap<Name, BTreeMap<Name, Name>>,
    effective: BTreeMap<Name, BTreeMap<Name, Name>>,
    attribute_types: BTreeMap<Name, BTreeSet<Name>>,
}

/// Why an attribute fact does not type-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeProblem {
    UnknownAttribute,
    KindMismatch { expected: Name },
}

impl Schema {
    pub fn has_class(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub fn class(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.get(name)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&Name, &ClassInfo)> {
        self.classes.iter()
    }

    /// Reflexive-transitive subclass test.
    pub fn is_subclass(&self, sub: &str, sup: &str) -> Result<bool, SchemaError> {
        let info = self.classes.get(sub).ok_or_else(|| SchemaError::UnknownClass(Name::new(sub)))?;
        if !self.classes.contains_key(sup) {
            return Err(SchemaError::UnknownClass(Name::new(sup)));
        }
        Ok(info.ancestors.contains(sup))
    }

    /// Strict and non-strict superclasses of `class` (including itself).
    pub fn ancestors(&self, class: &str) -> Option<&BTreeSet<Name>> {
        self.classes.get(class).map(|c| &c.ancestors)
    }

    pub fn effective_signature(&self, class: &str) -> Result<&BTreeMap<Name, Name>, SchemaError> {
        self.effective.get(class).ok_or_else(|| SchemaError::UnknownClass(Name::new(class)))
    }

    pub fn own_signature(&self, class: &str) -> Option<&BTreeMap<Name, Name>> {
        self.own_signatures.get(class)
    }

    /// Whether any class declares `attribute`.
    pub fn attribute_declared(&self, attribute: &str) -> bool {
        self.attribute_types.contains_key(attribute)
    }

    /// Checks an attribute value for an object that is a member of `classes`.
    ///
    /// Effective signatures already contain inherited attributes, so direct
    /// classes suffice. The fact is accepted if any class carries the
    /// attribute with a type of the right kind.
    pub fn check_attribute<'a>(
        &self,
        classes: impl IntoIterator<Item = &'a Name>,
        attribute: &Name,
        value: &Value,
    ) -> Result<(), TypeProblem> {
        let mut expected = None;
        for class in classes {
            if let Some(vt) = self.effective.get(class).and_then(|sig| sig.get(attribute)) {
                if (vt.as_str() == STRING_TYPE) == value.is_literal() {
                    return Ok(());
                }
                expected.get_or_insert_with(|| vt.clone());
            }
        }
        match expected {
            Some(expected) => Err(TypeProblem::KindMismatch { expected }),
            None => Err(TypeProblem::UnknownAttribute),
        }
    }
}

/// A schema plus the asserted (base) facts.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    schema: Arc<Schema>,
    facts: FactStore,
    mode: Mode,
}

impl KnowledgeBase {
    pub fn new(schema: Arc<Schema>, mode: Mode) -> Self {
        KnowledgeBase { schema, facts: FactStore::new(), mode }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_arc(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn facts(&self) -> &FactStore {
        &self.facts
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Asserts one fact. Returns true if the fact was new and accepted.
    ///
    /// Strict mode rejects ill-typed facts; lenient mode keeps facts with an
    /// unknown attribute but still rejects unknown classes and kind
    /// mismatches. An attribute fact is checked against the memberships
    /// asserted so far (see [`assert_all`](Self::assert_all)).
    pub fn assert_fact(&mut self, fact: &Fact, pos: Option<Pos>, diags: &mut Diagnostics) -> bool {
        match fact {
            Fact::Member { class, .. } => {
                if !self.schema.has_class(class) {
                    diags.error(Code::UnknownClass, pos, format!("`{fact}`: unknown class `{class}`"));
                    return false;
                }
            }
            Fact::Attr { object, attribute, value } => {
                match self.schema.check_attribute(self.facts.classes_of(object), attribute, value) {
                    Ok(()) => {}
                    Err(TypeProblem::UnknownAttribute) => {
                        diags.report(
                            self.mode,
                            Code::UnknownAttribute,
                            pos,
                            format!("`{fact}`: no class of `{object}` declares attribute `{attribute}`"),
                        );
                        if self.mode == Mode::Strict {
                            return false;
                        }
                    }
                    Err(TypeProblem::KindMismatch { expected }) => {
                        let found = if value.is_literal() { "a string literal" } else { "an object-id" };
                        diags.error(Code::KindMismatch, pos, format!("`{fact}`: `{attribute}` expects {expected}, found {found}"));
                        return false;
                    }
                }
            }
        }
        self.facts.insert(fact)
    }

    /// Asserts a batch: memberships first, so attribute facts see every
    /// membership of the batch regardless of input order.
    pub fn assert_all<'a, I>(&mut self, facts: I, diags: &mut Diagnostics) -> usize
    where
        I: IntoIterator<Item = (&'a Fact, Option<Pos>)>,
    {
        let (members, attrs): (Vec<_>, Vec<_>) = facts.into_iter().partition(|(f, _)| matches!(f, Fact::Member { .. }));
        let mut added = 0;
        for (f, pos) in members.into_iter().chain(attrs) {
            if self.assert_fact(f, pos, diags) {
                added += 1;
            }
        }
        added
    }
}
