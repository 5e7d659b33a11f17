//! Derivation traces from recorded provenance.

use std::fmt::Write;

use super::saturate::{render_binding, Derivation, SaturatedKb};
use crate::ontology::Fact;
use crate::query::matcher::Binding;

/// One step of a derivation trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Rule { label: String, text: String, binding: Binding },
    Inherited,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Explanation {
    Asserted(Fact),
    Derived { fact: Fact, step: Step, premises: Vec<Explanation> },
    NotDerived(Fact),
}

impl Explanation {
    pub fn fact(&self) -> &Fact {
        match self {
            Explanation::Asserted(f) | Explanation::NotDerived(f) => f,
            Explanation::Derived { fact, .. } => fact,
        }
    }

    /// Indented multi-line trace, premises below their conclusion.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        match self {
            Explanation::Asserted(f) => {
                let _ = writeln!(out, "{pad}{f}  [asserted]");
            }
            Explanation::NotDerived(f) => {
                let _ = writeln!(out, "{pad}{f}  [not derived]");
            }
            Explanation::Derived { fact, step, premises } => {
                match step {
                    Step::Rule { label, text, binding } => {
                        let _ = writeln!(out, "{pad}{fact}  [by {label}]");
                        let _ = writeln!(out, "{pad}  rule: {text}");
                        let _ = writeln!(out, "{pad}  with: {}", render_binding(binding));
                    }
                    Step::Inherited => {
                        let _ = writeln!(out, "{pad}{fact}  [by subclass inheritance]");
                    }
                }
                for p in premises {
                    p.render_into(out, depth + 1);
                }
            }
        }
    }
}

/// Traces `fact` back to asserted facts along first derivations.
pub fn explain(skb: &SaturatedKb, fact: &Fact) -> Explanation {
    if skb.is_asserted(fact) {
        return Explanation::Asserted(fact.clone());
    }
    match skb.provenance(fact) {
        None => Explanation::NotDerived(fact.clone()),
        // first derivations only use earlier facts, so the recursion is well-founded
        Some(Derivation::Rule { rule, binding, premises }) => {
            let r = &skb.rules().rules()[*rule];
            Explanation::Derived {
                fact: fact.clone(),
                step: Step::Rule { label: r.label(), text: r.text(), binding: binding.clone() },
                premises: premises.iter().map(|p| explain(skb, p)).collect(),
            }
        }
        Some(Derivation::Inherited { premise }) => Explanation::Derived {
            fact: fact.clone(),
            step: Step::Inherited,
            premises: vec![explain(skb, premise)],
        },
    }
}
