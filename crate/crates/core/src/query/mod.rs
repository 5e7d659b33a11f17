//! Conjunctive query evaluation over a saturated knowledge base.

pub mod matcher;

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{Code, Diagnostics};
use crate::flogic::{Atom, Query};
use crate::infer::SaturatedKb;
use crate::ontology::Fact;
use crate::symbol::{Name, Value};
use matcher::{instantiate, join_order, match_atom, Binding};

/// Answers to a query: one row per distinct projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingSet {
    columns: Vec<Name>,
    rows: Vec<Vec<Value>>,
    /// A full binding (existentials included) per row, for explanations.
    witnesses: Vec<Binding>,
}

impl BindingSet {
    pub fn empty(columns: Vec<Name>) -> Self {
        BindingSet { columns, rows: Vec::new(), witnesses: Vec::new() }
    }

    pub fn columns(&self) -> &[Name] {
        &self.columns
    }

    /// Rows in lexicographic order of their rendered values.
    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn witness(&self, row: usize) -> Option<&Binding> {
        self.witnesses.get(row)
    }

    /// Values of one column, in row order.
    pub fn column(&self, name: &str) -> Vec<&Value> {
        match self.columns.iter().position(|c| c.as_str() == name) {
            Some(i) => self.rows.iter().map(|r| &r[i]).collect(),
            None => Vec::new(),
        }
    }

    /// Header line of variable names, then one line per row. Cells are
    /// tab-separated in `tsv` mode and space-padded otherwise.
    pub fn render(&self, tsv: bool) -> String {
        let header: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        let body: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Value::render).collect()).collect();
        let mut out = String::new();
        if tsv {
            out.push_str(&header.join("\t"));
            out.push('\n');
            for r in &body {
                out.push_str(&r.join("\t"));
                out.push('\n');
            }
            return out;
        }
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for r in &body {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
                if i + 1 == cells.len() {
                    s.push_str(cell);
                } else {
                    s.push_str(cell);
                    s.push_str(&" ".repeat(w - cell.chars().count() + 2));
                }
            }
            s.push('\n');
            s
        };
        out.push_str(&line(&header));
        for r in &body {
            out.push_str(&line(r));
        }
        out
    }
}

/// Evaluates `query` against base and derived facts.
///
/// A query naming an undeclared class or attribute yields no rows and a
/// diagnostic: an error in strict mode, a warning in lenient mode.
pub fn evaluate(query: &Query, skb: &SaturatedKb, diags: &mut Diagnostics) -> BindingSet {
    let schema = skb.schema();
    let mode = skb.base().mode();
    let mut unknown = false;
    for atom in &query.body {
        match atom {
            Atom::Member { class, .. } if !schema.has_class(class) => {
                diags.report(mode, Code::UnknownClass, query.pos, format!("query uses undeclared class `{class}`"));
                unknown = true;
            }
            Atom::Attr { attribute, .. } if !schema.attribute_declared(attribute) => {
                diags.report(mode, Code::UnknownAttribute, query.pos, format!("query uses undeclared attribute `{attribute}`"));
                unknown = true;
            }
            _ => {}
        }
    }
    if unknown {
        return BindingSet::empty(query.vars.clone());
    }
    let bindings = solve(&query.body, skb);
    project(&query.vars, bindings)
}

/// All full bindings satisfying the conjunction, in greedy join order.
pub fn solve(body: &[Atom], skb: &SaturatedKb) -> Vec<Binding> {
    let facts = skb.facts();
    let mut bindings = vec![Binding::new()];
    for i in join_order(body, None, BTreeSet::new()) {
        bindings = bindings.iter().flat_map(|b| match_atom(&body[i], facts, b)).collect();
        if bindings.is_empty() {
            break;
        }
    }
    bindings
}

fn project(columns: &[Name], bindings: Vec<Binding>) -> BindingSet {
    // keyed by rendering so the order is lexicographic over what is printed
    let mut rows: BTreeMap<Vec<String>, (Vec<Value>, Binding)> = BTreeMap::new();
    for b in bindings {
        let row: Vec<Value> = columns.iter().map(|c| b[c].clone()).collect();
        let key = row.iter().map(Value::render).collect();
        match rows.get_mut(&key) {
            Some((_, w)) if *w <= b => {}
            Some(slot) => slot.1 = b,
            None => {
                rows.insert(key, (row, b));
            }
        }
    }
    let (rows, witnesses) = rows.into_values().unzip();
    BindingSet { columns: columns.to_vec(), rows, witnesses }
}

/// The body facts that hold for row `row` of `result`.
pub fn supporting_facts(query: &Query, result: &BindingSet, row: usize) -> Vec<Fact> {
    let Some(w) = result.witness(row) else { return Vec::new() };
    let mut out: Vec<Fact> = Vec::new();
    for atom in &query.body {
        if let Some(f) = instantiate(atom, w) {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}
