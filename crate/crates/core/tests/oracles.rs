mod support;

use ontokb::xml::content_model::ContentModel;
use ontokb::Mode;
use support::*;

#[test]
fn semi_naive_matches_naive_lenient() {
    for seed in 0..200 {
        if let Some(m) = saturation_mismatch(&random_program(seed, 8, 5), Mode::Lenient) {
            panic!("seed {seed}: {m}");
        }
    }
}

#[test]
fn semi_naive_matches_naive_strict() {
    for seed in 0..200 {
        if let Some(m) = saturation_mismatch(&random_program(seed, 8, 5), Mode::Strict) {
            panic!("seed {seed}: {m}");
        }
    }
}

#[test]
fn query_matches_enumeration() {
    for seed in 0..200 {
        let program = random_program(seed, 8, 3);
        if let Some(m) = query_mismatch(&program, &random_query(seed, 8)) {
            panic!("seed {seed}: {m}");
        }
    }
}

#[test]
fn content_model_matches_backtracking() {
    let mut r = rng(7);
    let mut checked = 0;
    while checked < 300 {
        let p = random_particle(&mut r, 3);
        let Ok(model) = ContentModel::compile(&p) else { continue };
        for _ in 0..20 {
            let w = random_word(&mut r, 6);
            assert_eq!(model.matches(&w).is_ok(), backtrack_accepts(&p, &w), "{p} on {w:?}");
        }
        checked += 1;
    }
}

#[test]
fn generated_programs_are_nontrivial() {
    let mut derived = 0;
    for seed in 0..50 {
        let l = load(&random_program(seed, 8, 5), Mode::Lenient);
        derived += saturated(&l).derived().len();
    }
    assert!(derived > 100, "only {derived} derived facts");
}
