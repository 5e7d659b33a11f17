//! A deductive knowledge base over a frame-logic subset.
//!
//! The pipeline: parse an ontology ([`flogic`]), build and check its class
//! lattice and signatures ([`ontology`]), saturate the fact base with
//! implication and equivalence rules ([`infer`]), and answer conjunctive
//! queries ([`query`]). Instance data can also be ingested from XML and
//! RDF-annotated documents ([`xml`], [`rdf`]).

pub mod diag;
pub mod flogic;
pub mod infer;
pub mod ontology;
pub mod query;
pub mod rdf;
pub mod symbol;
pub mod xml;

pub use diag::{Code, Diagnostic, Diagnostics, Mode, Pos, Severity};
pub use flogic::{parse_program, parse_query, Atom, Program, Query, Rule, RuleKind, Term};
pub use infer::{compile_rules, explain, saturate, Explanation, RuleSet, SaturatedKb};
pub use ontology::{Fact, FactStore, KnowledgeBase, OntologyBuilder, Schema};
pub use query::{evaluate, supporting_facts, BindingSet};
pub use symbol::{Name, Value};
