//! Rule compilation and saturation of a knowledge base.

mod compile;
mod explain;
mod saturate;

pub use compile::{compile_rules, CompiledRule, Direction, RuleSet};
pub use explain::{explain, Explanation, Step};
pub use saturate::{render_binding, saturate, Derivation, SaturatedKb, SaturationError};
