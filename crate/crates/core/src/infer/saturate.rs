//! Semi-naive forward chaining to the least fixpoint.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::compile::RuleSet;
use crate::diag::{Code, Diagnostics, Mode};
use crate::flogic::Atom;
use crate::ontology::{Fact, FactStore, KnowledgeBase, Schema, TypeProblem};
use crate::query::matcher::{instantiate, join_order, match_atom, Binding};
use crate::symbol::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SaturationError {
    #[error("saturation did not reach a fixpoint within {limit} rounds")]
    RoundLimit { limit: usize },
}

/// How a derived fact was first obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Rule { rule: usize, binding: Binding, premises: Vec<Fact> },
    /// Membership in a superclass of a class the object belongs to.
    Inherited { premise: Fact },
}

/// Base facts plus everything derivable from them.
#[derive(Debug, Clone)]
pub struct SaturatedKb {
    base: KnowledgeBase,
    rules: RuleSet,
    derived: FactStore,
    all: FactStore,
    provenance: BTreeMap<Fact, Derivation>,
    rounds: usize,
}

impl SaturatedKb {
    pub fn base(&self) -> &KnowledgeBase {
        &self.base
    }

    pub fn schema(&self) -> &Schema {
        self.base.schema()
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    /// Derived facts only; disjoint from the base facts.
    pub fn derived(&self) -> &FactStore {
        &self.derived
    }

    /// Base and derived facts together.
    pub fn facts(&self) -> &FactStore {
        &self.all
    }

    pub fn provenance(&self, fact: &Fact) -> Option<&Derivation> {
        self.provenance.get(fact)
    }

    pub fn is_asserted(&self, fact: &Fact) -> bool {
        self.base.facts().contains(fact)
    }

    /// Number of evaluation rounds of the final (accepted) run.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Rebuilds a saturation from a previously computed derived set, e.g.
    /// one read back from a cache. No provenance is available, so derived
    /// facts explain as not derived; re-saturate when traces are needed.
    pub fn restore(base: &KnowledgeBase, rules: &RuleSet, derived: FactStore) -> SaturatedKb {
        let mut all = base.facts().clone();
        all.extend(derived.iter().collect::<Vec<_>>().iter());
        SaturatedKb { base: base.clone(), rules: rules.clone(), derived, all, provenance: BTreeMap::new(), rounds: 0 }
    }

    pub fn has_provenance(&self) -> bool {
        !self.provenance.is_empty() || self.derived.is_empty()
    }
}

struct Run {
    all: FactStore,
    derived: FactStore,
    provenance: BTreeMap<Fact, Derivation>,
    rounds: usize,
}

/// Computes the deductive closure of `kb` under `rules` and subclass
/// upward-closure of memberships.
///
/// In strict mode, derived attribute facts that do not type-check against
/// the final memberships are reported and blocked, and the closure is
/// recomputed without them until no ill-typed derivation remains. The
/// result depends only on the fact and rule sets, never on their order.
/// Lenient mode keeps such facts with a warning.
pub fn saturate(kb: &KnowledgeBase, rules: &RuleSet, diags: &mut Diagnostics) -> Result<SaturatedKb, SaturationError> {
    let limit = round_limit(kb, rules);
    let mut blocked: BTreeSet<Fact> = BTreeSet::new();
    loop {
        let run = run(kb, rules, &blocked, limit)?;
        let ill = ill_typed(kb.schema(), &run);
        if ill.is_empty() || kb.mode() == Mode::Lenient {
            for (fact, problem) in &ill {
                diags.warning(Code::IllTypedDerivation, None, format!("{}; kept", describe_ill(fact, problem, &run, rules)));
            }
            return Ok(SaturatedKb {
                base: kb.clone(),
                rules: rules.clone(),
                derived: run.derived,
                all: run.all,
                provenance: run.provenance,
                rounds: run.rounds,
            });
        }
        for (fact, problem) in ill {
            diags.warning(Code::IllTypedDerivation, None, format!("{}; dropped", describe_ill(&fact, &problem, &run, rules)));
            blocked.insert(fact);
        }
    }
}

/// Every round adds at least one fact, so the number of distinct facts over
/// the constants in play bounds the number of rounds.
fn round_limit(kb: &KnowledgeBase, rules: &RuleSet) -> usize {
    let mut objects: BTreeSet<Name> = kb.facts().objects();
    let mut literals: BTreeSet<Value> = BTreeSet::new();
    let mut attributes: BTreeSet<Name> = kb.facts().attributes().cloned().collect();
    let mut classes: BTreeSet<Name> = kb.schema().classes().map(|(c, _)| c.clone()).collect();
    for f in kb.facts().iter() {
        if let Fact::Attr { value: v @ Value::Literal(_), .. } = f {
            literals.insert(v);
        }
    }
    for rule in rules.rules() {
        for atom in rule.body.iter().chain(&rule.head) {
            for t in atom.terms() {
                match t.ground() {
                    Some(Value::Object(o)) => {
                        objects.insert(o);
                    }
                    Some(v) => {
                        literals.insert(v);
                    }
                    None => {}
                }
            }
            match atom {
                Atom::Member { class, .. } => classes.insert(class.clone()),
                Atom::Attr { attribute, .. } => attributes.insert(attribute.clone()),
            };
        }
    }
    let o = objects.len();
    let values = o + literals.len();
    o.saturating_mul(values).saturating_mul(attributes.len()).saturating_add(o.saturating_mul(classes.len())).saturating_add(2)
}

fn run(kb: &KnowledgeBase, rules: &RuleSet, blocked: &BTreeSet<Fact>, limit: usize) -> Result<Run, SaturationError> {
    let schema = kb.schema();
    let mut st = Run { all: kb.facts().clone(), derived: FactStore::new(), provenance: BTreeMap::new(), rounds: 0 };
    let mut delta = kb.facts().clone();
    let base_members: Vec<Fact> = kb.facts().iter().filter(|f| matches!(f, Fact::Member { .. })).collect();
    for m in &base_members {
        close_up(schema, m, &mut st, &mut delta);
    }

    while !delta.is_empty() {
        st.rounds += 1;
        if st.rounds > limit {
            return Err(SaturationError::RoundLimit { limit });
        }
        let mut fresh: Vec<(Fact, Derivation)> = Vec::new();
        let mut seen = FactStore::new();
        for (ri, rule) in rules.rules().iter().enumerate() {
            for pivot in 0..rule.body.len() {
                if !can_match(&rule.body[pivot], &delta) {
                    continue;
                }
                let order = join_order(&rule.body, Some(pivot), BTreeSet::new());
                let mut bindings = vec![Binding::new()];
                for &i in &order {
                    let store = if i == pivot { &delta } else { &st.all };
                    bindings = bindings.iter().flat_map(|b| match_atom(&rule.body[i], store, b)).collect();
                    if bindings.is_empty() {
                        break;
                    }
                }
                for b in bindings {
                    for atom in &rule.head {
                        let Some(fact) = instantiate(atom, &b) else { continue };
                        if blocked.contains(&fact) || st.all.contains(&fact) || seen.contains(&fact) {
                            continue;
                        }
                        seen.insert(&fact);
                        let premises = rule.body.iter().filter_map(|a| instantiate(a, &b)).collect();
                        fresh.push((fact, Derivation::Rule { rule: ri, binding: b.clone(), premises }));
                    }
                }
            }
        }
        delta = FactStore::new();
        for (fact, how) in fresh {
            st.all.insert(&fact);
            st.derived.insert(&fact);
            delta.insert(&fact);
            st.provenance.insert(fact.clone(), how);
            close_up(schema, &fact, &mut st, &mut delta);
        }
    }
    Ok(st)
}

/// Cheap pre-check: the delta store holds facts of the atom's class/attribute.
fn can_match(atom: &Atom, delta: &FactStore) -> bool {
    match atom {
        Atom::Member { class, .. } => !delta.members_of(class).is_empty(),
        Atom::Attr { attribute, .. } => delta.has_attribute(attribute),
    }
}

/// Adds the superclass memberships implied by a membership fact.
fn close_up(schema: &Schema, fact: &Fact, st: &mut Run, delta: &mut FactStore) {
    let Fact::Member { object, class } = fact else { return };
    let Some(ancestors) = schema.ancestors(class) else { return };
    for sup in ancestors {
        if sup == class {
            continue;
        }
        let up = Fact::Member { object: object.clone(), class: sup.clone() };
        if st.all.insert(&up) {
            st.derived.insert(&up);
            delta.insert(&up);
            st.provenance.insert(up, Derivation::Inherited { premise: fact.clone() });
        }
    }
}

fn ill_typed(schema: &Schema, run: &Run) -> Vec<(Fact, TypeProblem)> {
    let mut out = Vec::new();
    for fact in run.derived.iter() {
        if let Fact::Attr { object, attribute, value } = &fact {
            if let Err(p) = schema.check_attribute(run.all.classes_of(object), attribute, value) {
                out.push((fact, p));
            }
        }
    }
    out
}

fn describe_ill(fact: &Fact, problem: &TypeProblem, run: &Run, rules: &RuleSet) -> String {
    let why = match problem {
        TypeProblem::UnknownAttribute => format!("no class of `{}` declares the attribute", fact.object()),
        TypeProblem::KindMismatch { expected } => format!("the attribute expects {expected}"),
    };
    let origin = match run.provenance.get(fact) {
        Some(Derivation::Rule { rule, binding, .. }) => {
            let r = &rules.rules()[*rule];
            format!(" (derived by {} with {})", r.label(), render_binding(binding))
        }
        _ => String::new(),
    };
    format!("derived fact `{fact}` is ill-typed: {why}{origin}")
}

pub fn render_binding(b: &Binding) -> String {
    b.iter().map(|(k, v)| format!("{k} = {}", crate::ontology::value_token(v))).collect::<Vec<_>>().join(", ")
}
