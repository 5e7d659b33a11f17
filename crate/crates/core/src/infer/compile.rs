use std::collections::BTreeSet;

use crate::diag::{Code, Diagnostics, Mode};
use crate::flogic::{check_rule_safety, rule_to_string, Atom, Rule, RuleKind};
use crate::ontology::Schema;
use crate::symbol::Name;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// An implication, or the left-to-right half of an equivalence.
    Forward,
    /// The right-to-left half of an equivalence.
    Backward,
}

/// A safe implication `body -> head` ready for evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledRule {
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
    pub vars: Vec<Name>,
    /// Index of the source rule in the compiled slice.
    pub source: usize,
    pub direction: Direction,
    pub kind: RuleKind,
    pub line: Option<u32>,
}

impl CompiledRule {
    /// Human-readable name: position and the implication it performs.
    pub fn label(&self) -> String {
        let mut s = match self.line {
            Some(l) => format!("rule #{} (line {l})", self.source + 1),
            None => format!("rule #{}", self.source + 1),
        };
        if self.kind == RuleKind::Equivalence {
            s.push_str(match self.direction {
                Direction::Forward => " <-> left-to-right",
                Direction::Backward => " <-> right-to-left",
            });
        }
        s
    }

    /// The implication as source text.
    pub fn text(&self) -> String {
        rule_to_string(&Rule {
            kind: RuleKind::Implication,
            vars: self.vars.clone(),
            body: self.body.clone(),
            head: self.head.clone(),
            pos: None,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<CompiledRule>,
}

impl RuleSet {
    pub fn rules(&self) -> &[CompiledRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Builds a rule set from already-checked implications.
    pub fn from_compiled(rules: Vec<CompiledRule>) -> Self {
        RuleSet { rules }
    }
}

/// Splits equivalences into implication pairs and checks rule heads (and,
/// with warnings only, bodies) against the schema.
///
/// In strict mode a rule whose head names an undeclared class or attribute
/// is dropped with an error; lenient mode keeps it with a warning. Unsafe
/// rules are always dropped.
pub fn compile_rules(rules: &[Rule], schema: &Schema, mode: Mode, diags: &mut Diagnostics) -> RuleSet {
    let mut out = Vec::new();
    for (idx, rule) in rules.iter().enumerate() {
        if !check_rule_safety(rule, diags) {
            continue;
        }
        let errors_before = diags.error_count();
        let sides: &[(&[Atom], bool)] = match rule.kind {
            RuleKind::Implication => &[(&rule.body, false), (&rule.head, true)],
            // both sides of an equivalence act as heads
            RuleKind::Equivalence => &[(&rule.body, true), (&rule.head, true)],
        };
        for (atoms, is_head) in sides {
            check_atoms(atoms, *is_head, schema, mode, rule, diags);
        }
        if diags.error_count() > errors_before {
            continue;
        }
        let line = rule.pos.map(|p| p.line);
        out.push(CompiledRule {
            body: rule.body.clone(),
            head: rule.head.clone(),
            vars: rule.vars.clone(),
            source: idx,
            direction: Direction::Forward,
            kind: rule.kind,
            line,
        });
        if rule.kind == RuleKind::Equivalence {
            out.push(CompiledRule {
                body: rule.head.clone(),
                head: rule.body.clone(),
                vars: rule.vars.clone(),
                source: idx,
                direction: Direction::Backward,
                kind: rule.kind,
                line,
            });
        }
    }
    RuleSet { rules: out }
}

fn check_atoms(atoms: &[Atom], is_head: bool, schema: &Schema, mode: Mode, rule: &Rule, diags: &mut Diagnostics) {
    let side = if is_head { "head" } else { "body" };
    let report = |diags: &mut Diagnostics, code: Code, msg: String| {
        if is_head {
            diags.report(mode, code, rule.pos, msg);
        } else {
            diags.warning(code, rule.pos, msg);
        }
    };
    for atom in atoms {
        match atom {
            Atom::Member { class, .. } => {
                if !schema.has_class(class) {
                    report(diags, Code::UnknownClass, format!("rule {side} uses undeclared class `{class}`"));
                }
            }
            Atom::Attr { subject, attribute, .. } => {
                // classes the same molecule places its subject in
                let classes: BTreeSet<&Name> = atoms
                    .iter()
                    .filter_map(|a| match a {
                        Atom::Member { term, class } if term == subject && schema.has_class(class) => Some(class),
                        _ => None,
                    })
                    .collect();
                let known = if classes.is_empty() {
                    schema.attribute_declared(attribute)
                } else {
                    classes.iter().any(|c| schema.effective_signature(c).is_ok_and(|s| s.contains_key(attribute)))
                };
                if !known {
                    let scope = if classes.is_empty() {
                        "any class".to_string()
                    } else {
                        classes.iter().map(|c| format!("`{c}`")).collect::<Vec<_>>().join(", ")
                    };
                    report(diags, Code::UnknownAttribute, format!("rule {side} uses attribute `{attribute}`, which is not declared on {scope}"));
                }
            }
        }
    }
}
