//! Reference implementations used as test oracles, plus seeded generators
//! for random programs, queries and content models.
//!
//! The oracles work from the parsed program alone and are deliberately
//! naive: every rule is tried under every assignment of its variables.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use ontokb::ontology::{OntologyBuilder, ROOT_CLASS, STRING_TYPE};
use ontokb::xml::content_model::{Particle, Repeat};
use ontokb::{
    compile_rules, parse_program, saturate, Atom, Diagnostics, Fact, KnowledgeBase, Mode, Name, Program, Query,
    RuleKind, RuleSet, SaturatedKb, Term, Value,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub type FactSet = BTreeSet<Fact>;
type Assignment = BTreeMap<Name, Value>;

/// A program loaded through the production pipeline.
pub struct Loaded {
    pub program: Program,
    pub kb: KnowledgeBase,
    pub rules: RuleSet,
}

pub fn load(src: &str, mode: Mode) -> Loaded {
    let mut d = Diagnostics::new();
    let program = parse_program(src, &mut d);
    assert!(!d.has_errors(), "generated program does not parse:\n{src}\n{d}");
    let schema = OntologyBuilder::from_program(&program, &mut d).finalize(&mut d).unwrap_or_else(|| panic!("{src}\n{d}"));
    let mut kb = KnowledgeBase::new(Arc::new(schema), mode);
    kb.assert_all(program.facts.iter().map(|f| (&f.fact, f.pos)), &mut d);
    let rules = compile_rules(&program.rules, kb.schema(), mode, &mut d);
    Loaded { program, kb, rules }
}

pub fn saturated(l: &Loaded) -> SaturatedKb {
    let mut d = Diagnostics::new();
    saturate(&l.kb, &l.rules, &mut d).expect("saturation terminates")
}

pub fn fact_set(skb: &SaturatedKb) -> FactSet {
    skb.facts().iter().collect()
}

// ---------------------------------------------------------------------------
// Saturation oracle

struct Lattice {
    ancestors: BTreeMap<Name, BTreeSet<Name>>,
    /// Attribute -> value type, per class, inherited entries included.
    signatures: BTreeMap<Name, BTreeMap<Name, Name>>,
}

impl Lattice {
    fn new(p: &Program) -> Self {
        let root = Name::new(ROOT_CLASS);
        let mut parents: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
        parents.entry(root.clone()).or_default();
        for d in &p.class_decls {
            let e = parents.entry(d.name.clone()).or_default();
            e.extend(d.supers.iter().cloned());
            for s in &d.supers {
                parents.entry(s.clone()).or_default();
            }
        }
        for s in &p.signatures {
            parents.entry(s.owner.clone()).or_default();
        }
        let mut ancestors = BTreeMap::new();
        for c in parents.keys() {
            let mut seen: BTreeSet<Name> = BTreeSet::new();
            let mut stack = vec![c.clone()];
            while let Some(x) = stack.pop() {
                if seen.insert(x.clone()) {
                    stack.extend(parents[&x].iter().cloned());
                }
            }
            seen.insert(root.clone());
            ancestors.insert(c.clone(), seen);
        }
        let mut signatures: BTreeMap<Name, BTreeMap<Name, Name>> = BTreeMap::new();
        for (c, anc) in &ancestors {
            let sig = signatures.entry(c.clone()).or_default();
            for s in &p.signatures {
                if anc.contains(&s.owner) {
                    sig.insert(s.attribute.clone(), s.value_type.clone());
                }
            }
        }
        Lattice { ancestors, signatures }
    }

    fn well_typed(&self, facts: &FactSet, object: &Name, attribute: &Name, value: &Value) -> bool {
        facts.iter().any(|f| match f {
            Fact::Member { object: o, class } if o == object => self
                .signatures
                .get(class)
                .and_then(|s| s.get(attribute))
                .is_some_and(|t| (t.as_str() == STRING_TYPE) == value.is_literal()),
            _ => false,
        })
    }
}

fn ground(t: &Term, a: &Assignment) -> Option<Value> {
    match t {
        Term::Var(v) => a.get(v).cloned(),
        Term::Object(o) => Some(Value::Object(o.clone())),
        Term::Literal(s) => Some(Value::Literal(s.clone())),
    }
}

fn instance(atom: &Atom, a: &Assignment) -> Option<Fact> {
    match atom {
        Atom::Member { term, class } => match ground(term, a)? {
            Value::Object(o) => Some(Fact::Member { object: o, class: class.clone() }),
            Value::Literal(_) => None,
        },
        Atom::Attr { subject, attribute, value } => match ground(subject, a)? {
            Value::Object(o) => Some(Fact::Attr { object: o, attribute: attribute.clone(), value: ground(value, a)? }),
            Value::Literal(_) => None,
        },
    }
}

fn holds(atom: &Atom, a: &Assignment, facts: &FactSet) -> bool {
    instance(atom, a).is_some_and(|f| facts.contains(&f))
}

/// Every assignment of `vars` over `domain`.
fn assignments(vars: &[Name], domain: &[Value]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                domain.iter().map(move |x| {
                    let mut b = a.clone();
                    b.insert(v.clone(), x.clone());
                    b
                })
            })
            .collect();
    }
    out
}

fn constants(facts: &FactSet, atoms: &[&Atom]) -> Vec<Value> {
    let mut dom: BTreeSet<Value> = BTreeSet::new();
    for f in facts {
        match f {
            Fact::Member { object, .. } => {
                dom.insert(Value::Object(object.clone()));
            }
            Fact::Attr { object, value, .. } => {
                dom.insert(Value::Object(object.clone()));
                dom.insert(value.clone());
            }
        }
    }
    for a in atoms {
        for t in a.terms() {
            if let Some(v) = ground(t, &Assignment::new()) {
                dom.insert(v);
            }
        }
    }
    dom.into_iter().collect()
}

fn atom_vars(atoms: &[Atom]) -> Vec<Name> {
    let set: BTreeSet<Name> = atoms.iter().flat_map(|a| a.vars().cloned()).collect();
    set.into_iter().collect()
}

fn closure(base: &FactSet, implications: &[(Vec<Atom>, Vec<Atom>)], lattice: &Lattice, blocked: &FactSet) -> FactSet {
    let all_atoms: Vec<&Atom> = implications.iter().flat_map(|(b, h)| b.iter().chain(h)).collect();
    let mut facts = base.clone();
    loop {
        let mut next = facts.clone();
        for f in &facts {
            if let Fact::Member { object, class } = f {
                for sup in lattice.ancestors.get(class).into_iter().flatten() {
                    next.insert(Fact::Member { object: object.clone(), class: sup.clone() });
                }
            }
        }
        let domain = constants(&facts, &all_atoms);
        for (body, head) in implications {
            for a in assignments(&atom_vars(body), &domain) {
                if body.iter().all(|atom| holds(atom, &a, &facts)) {
                    for h in head {
                        if let Some(f) = instance(h, &a) {
                            if !blocked.contains(&f) {
                                next.insert(f);
                            }
                        }
                    }
                }
            }
        }
        if next.len() == facts.len() {
            return facts;
        }
        facts = next;
    }
}

/// Naive saturation. In strict mode, derived attribute facts that are
/// ill-typed under the final memberships are blocked and the closure is
/// recomputed until none remain.
pub fn naive_saturation(program: &Program, base: &FactSet, mode: Mode) -> FactSet {
    let lattice = Lattice::new(program);
    let mut implications = Vec::new();
    for r in &program.rules {
        implications.push((r.body.clone(), r.head.clone()));
        if r.kind == RuleKind::Equivalence {
            implications.push((r.head.clone(), r.body.clone()));
        }
    }
    let mut blocked = FactSet::new();
    loop {
        let facts = closure(base, &implications, &lattice, &blocked);
        if mode == Mode::Lenient {
            return facts;
        }
        let ill: Vec<Fact> = facts
            .iter()
            .filter(|f| !base.contains(f))
            .filter(|f| match f {
                Fact::Attr { object, attribute, value } => !lattice.well_typed(&facts, object, attribute, value),
                Fact::Member { .. } => false,
            })
            .cloned()
            .collect();
        if ill.is_empty() {
            return facts;
        }
        blocked.extend(ill);
    }
}

// ---------------------------------------------------------------------------
// Query oracle

/// Every projected tuple of every assignment satisfying the body.
pub fn enumerate_query(query: &Query, facts: &FactSet) -> BTreeSet<Vec<Value>> {
    let atoms: Vec<&Atom> = query.body.iter().collect();
    let domain = constants(facts, &atoms);
    assignments(&atom_vars(&query.body), &domain)
        .into_iter()
        .filter(|a| query.body.iter().all(|atom| holds(atom, a, facts)))
        .map(|a| query.vars.iter().map(|v| a[v].clone()).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Content-model oracle

fn ends(p: &Particle, word: &[&str], start: usize) -> BTreeSet<usize> {
    let once = |i: usize| -> BTreeSet<usize> {
        match p {
            Particle::Name(n, _) => (i < word.len() && word[i] == n).then_some(i + 1).into_iter().collect(),
            Particle::Seq(items, _) => items.iter().fold([i].into(), |acc: BTreeSet<usize>, q| {
                acc.iter().flat_map(|&j| ends(q, word, j)).collect()
            }),
            Particle::Choice(items, _) => items.iter().flat_map(|q| ends(q, word, i)).collect(),
        }
    };
    let star = |from: BTreeSet<usize>| -> BTreeSet<usize> {
        let mut seen = from.clone();
        let mut todo: Vec<usize> = from.into_iter().collect();
        while let Some(j) = todo.pop() {
            for k in once(j) {
                if seen.insert(k) {
                    todo.push(k);
                }
            }
        }
        seen
    };
    match p.repeat() {
        Repeat::One => once(start),
        Repeat::Opt => {
            let mut s = once(start);
            s.insert(start);
            s
        }
        Repeat::Star => star([start].into()),
        Repeat::Plus => star(once(start)),
    }
}

/// Backtracking word acceptance for a content model.
pub fn backtrack_accepts(p: &Particle, word: &[&str]) -> bool {
    ends(p, word, 0).contains(&word.len())
}

// ---------------------------------------------------------------------------
// Generators

pub const CLASSES: [&str; 5] = ["K0", "K1", "K2", "K3", "K4"];
pub const OBJECT_ATTRS: [&str; 3] = ["a0", "a1", "a2"];
pub const STRING_ATTR: &str = "s0";
pub const LITERALS: [&str; 2] = ["v0", "v1"];
const VARS: [&str; 3] = ["X", "Y", "Z"];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn pick<'a>(r: &mut StdRng, xs: &[&'a str]) -> &'a str {
    xs.choose(r).copied().unwrap()
}

fn schema_text(r: &mut StdRng) -> String {
    let mut s = String::from("K0.\n");
    for i in 1..CLASSES.len() {
        let mut supers: BTreeSet<&str> = BTreeSet::new();
        for _ in 0..r.gen_range(1..=2) {
            supers.insert(CLASSES[r.gen_range(0..i)]);
        }
        for sup in supers {
            s += &format!("{} :: {sup}.\n", CLASSES[i]);
        }
    }
    for a in OBJECT_ATTRS {
        s += &format!("{}[{a} ==> Object].\n", pick(r, &CLASSES));
    }
    s += &format!("{}[{STRING_ATTR} ==> STRING].\n", pick(r, &CLASSES));
    s
}

fn object(i: usize) -> String {
    format!("o{i}")
}

fn facts_text(r: &mut StdRng, objects: usize) -> String {
    let mut s = String::new();
    for i in 0..objects {
        for _ in 0..r.gen_range(0..=2) {
            s += &format!("{} : {}.\n", object(i), pick(r, &CLASSES));
        }
    }
    for _ in 0..r.gen_range(0..=objects * 2) {
        let (a, b) = (r.gen_range(0..objects), r.gen_range(0..objects));
        s += &format!("{}[{} ->> {}].\n", object(a), pick(r, &OBJECT_ATTRS), object(b));
    }
    for _ in 0..r.gen_range(0..=objects) {
        s += &format!("{}[{STRING_ATTR} ->> \"{}\"].\n", object(r.gen_range(0..objects)), pick(r, &LITERALS));
    }
    s
}

fn var_or_const(r: &mut StdRng, vars: &[&str], objects: usize) -> String {
    if vars.is_empty() || r.gen_bool(0.1) {
        object(r.gen_range(0..objects))
    } else {
        pick(r, vars).to_string()
    }
}

/// A random atom; `bound` restricts subject variables to those already used.
fn atom_text(r: &mut StdRng, subjects: &[&str], values: &[&str], objects: usize, member_ok: bool) -> String {
    let subj = var_or_const(r, subjects, objects);
    match r.gen_range(0..if member_ok { 4 } else { 3 }) {
        3 => format!("{subj} : {}", pick(r, &CLASSES)),
        2 if r.gen_bool(0.5) => {
            let v = if values.is_empty() || r.gen_bool(0.3) {
                format!("\"{}\"", pick(r, &LITERALS))
            } else {
                pick(r, values).to_string()
            };
            format!("{subj}[{STRING_ATTR} ->> {v}]")
        }
        _ => format!("{subj}[{} ->> {}]", pick(r, &OBJECT_ATTRS), var_or_const(r, values, objects)),
    }
}

fn vars_in(text: &str) -> BTreeSet<&'static str> {
    VARS.iter().copied().filter(|v| text.split(|c: char| !c.is_alphanumeric()).any(|t| t == *v)).collect()
}

fn conjunction(r: &mut StdRng, max: usize, allowed: &[&str], objects: usize, member_ok: bool) -> String {
    let n = r.gen_range(1..=max);
    (0..n).map(|_| atom_text(r, allowed, allowed, objects, member_ok)).collect::<Vec<_>>().join(" and ")
}

fn rule_text(r: &mut StdRng, objects: usize) -> String {
    loop {
        let nv = r.gen_range(1..=3);
        let vars = &VARS[..nv];
        let body = conjunction(r, 3, vars, objects, true);
        let bv = vars_in(&body);
        if bv.is_empty() {
            continue;
        }
        let bound: Vec<&str> = bv.iter().copied().collect();
        let head = conjunction(r, 2, &bound, objects, true);
        let hv = vars_in(&head);
        let forall = bound.join(", ");
        if r.gen_bool(0.25) && hv == bv {
            return format!("FORALL {forall} {body} <-> {head}.\n");
        }
        return format!("FORALL {forall} {body} -> {head}.\n");
    }
}

/// A random program with at most `max_objects` objects and `max_rules` rules.
pub fn random_program(seed: u64, max_objects: usize, max_rules: usize) -> String {
    let mut r = rng(seed);
    let objects = r.gen_range(1..=max_objects);
    let mut s = schema_text(&mut r);
    s += &facts_text(&mut r, objects);
    for _ in 0..r.gen_range(0..=max_rules) {
        s += &rule_text(&mut r, objects);
    }
    s
}

/// A random safe query of one to three atoms over the same vocabulary.
pub fn random_query(seed: u64, objects: usize) -> String {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    loop {
        let body = conjunction(&mut r, 3, &VARS, objects.max(1), true);
        let vars: Vec<&str> = vars_in(&body).into_iter().collect();
        if vars.is_empty() {
            continue;
        }
        let mut proj: Vec<&str> = vars.iter().copied().filter(|_| r.gen_bool(0.6)).collect();
        if proj.is_empty() {
            proj.push(vars[0]);
        }
        return format!("FORALL {} <- {body}.", proj.join(", "));
    }
}

pub fn random_particle(r: &mut StdRng, depth: u32) -> Particle {
    let rep = *[Repeat::One, Repeat::Opt, Repeat::Star, Repeat::Plus].choose(r).unwrap();
    if depth == 0 || r.gen_bool(0.4) {
        return Particle::Name(pick(r, &["a", "b", "c"]).to_string(), rep);
    }
    let items = (0..r.gen_range(1..=3)).map(|_| random_particle(r, depth - 1)).collect();
    if r.gen_bool(0.5) {
        Particle::Seq(items, rep)
    } else {
        Particle::Choice(items, rep)
    }
}

pub fn random_word(r: &mut StdRng, max_len: usize) -> Vec<&'static str> {
    (0..r.gen_range(0..=max_len)).map(|_| pick(r, &["a", "b", "c"])).collect()
}

// ---------------------------------------------------------------------------
// The research ontology

pub fn fixture(rel: &str) -> String {
    let path = format!("{}/../../fixtures/{rel}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Hierarchy, signatures and the three rules, as one source text.
pub fn research_ontology() -> String {
    ["flogic/hierarchy.flo", "flogic/signatures.flo", "flogic/rules.flo"].map(fixture).join("\n")
}

/// Random instance data over the research ontology.
pub fn research_facts(seed: u64, max_objects: usize) -> String {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_objects);
    let classes = ["TForscher", "TPerson", "TAngestellter", "TVeroeffentlichung", "TProjekt", "TOrganisation"];
    let mut s = String::new();
    let mut kind: Vec<&str> = Vec::new();
    for i in 0..n {
        let c = pick(&mut r, &classes);
        kind.push(c);
        s += &format!("{} : {c}.\n", object(i));
    }
    let of = |k: &[&str], kind: &[&str]| -> Vec<usize> { (0..kind.len()).filter(|&i| k.contains(&kind[i])).collect() };
    let people = of(&["TForscher", "TPerson", "TAngestellter"], &kind);
    let researchers = of(&["TForscher"], &kind);
    let pubs = of(&["TVeroeffentlichung"], &kind);
    for _ in 0..r.gen_range(0..=2 * n) {
        match r.gen_range(0..3) {
            0 if !researchers.is_empty() => {
                let a = *researchers.choose(&mut r).unwrap();
                let b = *people.choose(&mut r).unwrap();
                s += &format!("{}[KooperiertMit ->> {}].\n", object(a), object(b));
            }
            1 if !pubs.is_empty() && !people.is_empty() => {
                let p = *pubs.choose(&mut r).unwrap();
                let a = *people.choose(&mut r).unwrap();
                s += &format!("{}[HatAutor ->> {}].\n", object(p), object(a));
            }
            2 if !pubs.is_empty() && !people.is_empty() => {
                let p = *pubs.choose(&mut r).unwrap();
                let a = *people.choose(&mut r).unwrap();
                s += &format!("{}[HatVeroeffentlicht ->> {}].\n", object(a), object(p));
            }
            _ => {}
        }
    }
    s
}

/// Counterexamples to author/publication inversion and cooperation symmetry.
pub fn equivalence_counterexamples(facts: &FactSet) -> Vec<String> {
    let attr = |o: &Name, a: &str, v: &Name| facts.contains(&Fact::Attr { object: o.clone(), attribute: a.into(), value: Value::Object(v.clone()) });
    let member = |o: &Name, c: &str| facts.contains(&Fact::Member { object: o.clone(), class: c.into() });
    let mut bad = Vec::new();
    for f in facts {
        let Fact::Attr { object, attribute, value: Value::Object(v) } = f else { continue };
        match attribute.as_str() {
            "HatAutor" if !attr(v, "HatVeroeffentlicht", object) => bad.push(format!("{f} without inverse")),
            "HatVeroeffentlicht" if !attr(v, "HatAutor", object) => bad.push(format!("{f} without inverse")),
            "KooperiertMit" if member(object, "TForscher") && member(v, "TForscher") && !attr(v, "KooperiertMit", object) => {
                bad.push(format!("{f} not symmetric"))
            }
            _ => {}
        }
    }
    bad
}

/// The program restricted to the rules the compiler accepted.
pub fn accepted_program(l: &Loaded) -> Program {
    let kept: BTreeSet<usize> = l.rules.rules().iter().map(|r| r.source).collect();
    let mut p = l.program.clone();
    p.rules = p.rules.into_iter().enumerate().filter(|(i, _)| kept.contains(i)).map(|(_, r)| r).collect();
    p
}

/// Checks semi-naive saturation against the naive oracle; returns a
/// description of the first difference.
pub fn saturation_mismatch(src: &str, mode: Mode) -> Option<String> {
    let l = load(src, mode);
    let base: FactSet = l.kb.facts().iter().collect();
    let expected = naive_saturation(&accepted_program(&l), &base, mode);
    let actual = fact_set(&saturated(&l));
    (expected != actual).then(|| {
        let missing: Vec<String> = expected.difference(&actual).map(|f| f.to_string()).collect();
        let extra: Vec<String> = actual.difference(&expected).map(|f| f.to_string()).collect();
        format!("{src}\nmissing: {missing:?}\nextra: {extra:?}")
    })
}

/// Checks query evaluation against exhaustive enumeration.
pub fn query_mismatch(program: &str, query: &str) -> Option<String> {
    let l = load(program, Mode::Lenient);
    let skb = saturated(&l);
    let mut d = Diagnostics::new();
    let q = ontokb::parse_query(query, &mut d).unwrap_or_else(|| panic!("{query}\n{d}"));
    let result = ontokb::evaluate(&q, &skb, &mut d);
    let rows: Vec<Vec<Value>> = result.rows().to_vec();
    let expected = enumerate_query(&q, &fact_set(&skb));
    let actual: BTreeSet<Vec<Value>> = rows.iter().cloned().collect();
    if actual.len() != rows.len() {
        return Some(format!("{query}: duplicate rows"));
    }
    (expected != actual).then(|| format!("{program}\n{query}\nexpected {expected:?}\nactual {actual:?}"))
}
