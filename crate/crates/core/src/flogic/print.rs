//! Canonical source rendering. Output reparses to a structurally identical
//! program.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::ast::*;
use crate::ontology::{object_token, ClassDecl};
use crate::symbol::{quote_literal, Name};

pub fn term_to_string(term: &Term, vars: &BTreeSet<Name>) -> String {
    match term {
        Term::Var(v) => v.to_string(),
        Term::Object(o) if vars.contains(o) => format!("`{o}`"),
        Term::Object(o) => object_token(o),
        Term::Literal(s) => quote_literal(s),
    }
}

pub fn atom_to_string(atom: &Atom, vars: &BTreeSet<Name>) -> String {
    match atom {
        Atom::Member { term, class } => format!("{} : {class}", term_to_string(term, vars)),
        Atom::Attr { subject, attribute, value } => {
            format!("{}[{attribute} ->> {}]", term_to_string(subject, vars), term_to_string(value, vars))
        }
    }
}

pub fn conjunction_to_string(atoms: &[Atom], vars: &BTreeSet<Name>) -> String {
    atoms.iter().map(|a| atom_to_string(a, vars)).collect::<Vec<_>>().join(" and ")
}

fn var_list(vars: &[Name]) -> String {
    vars.iter().map(Name::as_str).collect::<Vec<_>>().join(", ")
}

pub fn rule_to_string(rule: &Rule) -> String {
    let bound: BTreeSet<Name> = rule.vars.iter().cloned().collect();
    let arrow = match rule.kind {
        RuleKind::Implication => "->",
        RuleKind::Equivalence => "<->",
    };
    format!(
        "FORALL {} {} {arrow} {}.",
        var_list(&rule.vars),
        conjunction_to_string(&rule.body, &bound),
        conjunction_to_string(&rule.head, &bound)
    )
}

pub fn query_to_string(query: &Query) -> String {
    let vars = vars_of(&query.body);
    format!("FORALL {} <- {}.", var_list(&query.vars), conjunction_to_string(&query.body, &vars))
}

fn class_to_string(decl: &ClassDecl) -> String {
    if decl.supers.is_empty() {
        format!("{}.", decl.name)
    } else {
        format!("{} :: {}.", decl.name, decl.supers.iter().map(Name::as_str).collect::<Vec<_>>().join(", "))
    }
}

/// Renders a whole program, one statement per line, in section order.
pub fn program_to_string(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.class_decls {
        let _ = writeln!(out, "{}", class_to_string(d));
    }
    for s in &p.signatures {
        let _ = writeln!(out, "{}[{} ==> {}].", s.owner, s.attribute, s.value_type);
    }
    for f in &p.facts {
        let _ = writeln!(out, "{}.", f.fact);
    }
    for r in &p.rules {
        let _ = writeln!(out, "{}", rule_to_string(r));
    }
    for q in &p.queries {
        let _ = writeln!(out, "{}", query_to_string(q));
    }
    out
}
