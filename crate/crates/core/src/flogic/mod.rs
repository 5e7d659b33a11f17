//! Parser and printer for the frame-logic subset: class declarations,
//! attribute signatures, facts, implication/equivalence rules and queries.

mod ast;
mod lexer;
mod parser;
mod print;

pub use ast::{vars_of, Atom, FactDecl, Program, Query, Rule, RuleKind, Term};
pub use lexer::{tokenize, Tok, Token};
pub use parser::{check_rule_safety, is_existential_name, is_plain_constant, parse_program, parse_query};
pub use print::{atom_to_string, conjunction_to_string, program_to_string, query_to_string, rule_to_string, term_to_string};
