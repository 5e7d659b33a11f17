//! Benchmark workloads: the research ontology and synthetic instance data
//! of adjustable size.

use std::fmt::Write;
use std::sync::Arc;

use ontokb::ontology::OntologyBuilder;
use ontokb::{compile_rules, parse_program, Diagnostics, KnowledgeBase, Mode, RuleSet};

pub const HIERARCHY: &str = include_str!("../../../fixtures/flogic/hierarchy.flo");
pub const SIGNATURES: &str = include_str!("../../../fixtures/flogic/signatures.flo");
pub const RULES: &str = include_str!("../../../fixtures/flogic/rules.flo");
pub const QUERY: &str = include_str!("../../../fixtures/flogic/query.flo");
pub const BAG_RDF: &str = include_str!("../../../fixtures/rdf/bag_serialization.rdf");
pub const PERSON_DTD: &str = include_str!("../../../fixtures/xml/person.dtd");
pub const PERSON_XML: &str = include_str!("../../../fixtures/xml/person.xml");

pub fn ontology() -> String {
    [HIERARCHY, SIGNATURES, RULES].join("\n")
}

/// `people` researchers spread over projects of four, each cooperating
/// with the next and authoring one publication. The first is named
/// Mustermann so the cooperation query has answers. Deterministic.
pub fn instance(people: usize) -> String {
    let mut s = String::new();
    let orgs = people.div_ceil(20).max(1);
    for o in 0..orgs {
        let _ = writeln!(s, "org{o} : TOrganisation[HatName ->> \"Org {o}\"].");
    }
    for p in 0..people {
        let name = if p == 0 { "Mustermann".to_string() } else { format!("Person {p}") };
        let _ = writeln!(s, "pe{p} : TForscher[HatName ->> \"{name}\"; KooperiertMit ->> pe{}].", (p + 1) % people);
        let _ = writeln!(s, "ve{p} : TVeroeffentlichung[HatAutor ->> pe{p}].");
    }
    for j in 0..people.div_ceil(4) {
        let _ = write!(s, "prj{j} : TProjekt[HatKunde ->> org{}", j % orgs);
        for p in (4 * j..people.min(4 * j + 4)).map(|p| format!("pe{p}")) {
            let _ = write!(s, "; HatMitglied ->> {p}");
        }
        s.push_str("].\n");
    }
    s
}

/// Parses and loads ontology plus instance data.
pub fn load(src: &str, mode: Mode) -> (KnowledgeBase, RuleSet) {
    let mut d = Diagnostics::new();
    let program = parse_program(src, &mut d);
    let schema = OntologyBuilder::from_program(&program, &mut d).finalize(&mut d).expect("workload finalizes");
    let mut kb = KnowledgeBase::new(Arc::new(schema), mode);
    kb.assert_all(program.facts.iter().map(|f| (&f.fact, f.pos)), &mut d);
    let rules = compile_rules(&program.rules, kb.schema(), mode, &mut d);
    assert!(!d.has_errors(), "{d}");
    (kb, rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_load_cleanly() {
        for n in [1, 7, 40] {
            let (kb, rules) = load(&format!("{}\n{}", ontology(), instance(n)), Mode::Strict);
            assert_eq!(rules.len(), 5);
            assert!(kb.facts().len() > 3 * n);
        }
    }
}
