mod common;

use std::collections::HashSet;

use common::*;
use fungll::dsl::elaborate;
use fungll::{
    parse, run_prefix, run_recognize, BsrElement, Descriptor, ParseError, ParseOptions, Schedule,
    Slot, SymbolId,
};
use proptest::prelude::*;

fn e() -> SymbolId {
    SymbolId::nonterminal("E")
}

fn a() -> SymbolId {
    SymbolId::token("'a'")
}

fn slot(pre: &[SymbolId], post: &[SymbolId]) -> Slot {
    Slot::new(e(), pre, post)
}

fn d(pre: &[SymbolId], post: &[SymbolId], left: usize, right: usize) -> Descriptor {
    Descriptor {
        slot: slot(pre, post),
        left,
        right,
    }
}

fn b(pre: &[SymbolId], post: &[SymbolId], left: usize, pivot: usize, right: usize) -> BsrElement {
    BsrElement {
        slot: slot(pre, post),
        left,
        pivot,
        right,
    }
}

#[test]
fn golden_descriptors_for_e_on_a() {
    let (e, a) = (e(), a());
    let expected: HashSet<Descriptor> = [
        d(&[], &[e, e, e], 0, 0),
        d(&[], &[a], 0, 0),
        d(&[], &[], 0, 0),
        d(&[a], &[], 0, 1),
        d(&[e], &[e, e], 0, 0),
        d(&[e], &[e, e], 0, 1),
        d(&[e, e], &[e], 0, 0),
        d(&[e, e], &[e], 0, 1),
        d(&[], &[e, e, e], 1, 1),
        d(&[], &[a], 1, 1),
        d(&[], &[], 1, 1),
        d(&[e, e, e], &[], 0, 0),
        d(&[e, e, e], &[], 0, 1),
        d(&[e], &[e, e], 1, 1),
        d(&[e, e], &[e], 1, 1),
        d(&[e, e, e], &[], 1, 1),
    ]
    .into();
    let state = state_of(&e_grammar(), "a", &ParseOptions::default());
    assert_eq!(snapshot(&state).uset, expected);
    assert_eq!(state.stats().descriptors_processed, 16);
}

#[test]
fn golden_bsrs_for_e_on_a() {
    let (e, a) = (e(), a());
    let expected: HashSet<BsrElement> = [
        b(&[], &[], 0, 0, 0),
        b(&[e], &[e, e], 0, 0, 0),
        b(&[e, e], &[e], 0, 0, 0),
        b(&[e, e, e], &[], 0, 0, 0),
        b(&[a], &[], 0, 0, 1),
        b(&[e], &[e, e], 0, 0, 1),
        b(&[e, e], &[e], 0, 0, 1),
        b(&[e, e], &[e], 0, 1, 1),
        b(&[e, e, e], &[], 0, 0, 1),
        b(&[e, e, e], &[], 0, 1, 1),
        b(&[], &[], 1, 1, 1),
        b(&[e], &[e, e], 1, 1, 1),
        b(&[e, e], &[e], 1, 1, 1),
        b(&[e, e, e], &[], 1, 1, 1),
    ]
    .into();
    let state = state_of(&e_grammar(), "a", &ParseOptions::default());
    assert_eq!(snapshot(&state).bsrs, expected);
    assert!(state.accepted());
}

#[test]
fn prefixes_of_e() {
    let (prefixes, _) = run_prefix(&e_grammar(), chars("aab")).unwrap();
    assert_eq!(prefixes, vec![0, 1, 2]);
}

#[test]
fn recognition_verdicts() {
    let s1 = load("s1.grammar", "S1");
    for (input, want) in [("", true), ("a", true), ("aaa", true), ("b", false)] {
        assert_eq!(
            run_recognize(&s1, chars(input)).unwrap().0,
            want,
            "{input:?}"
        );
    }
}

#[test]
fn left_recursive_csv_terminates() {
    let csv = load("csv.grammar", "CSV(alpha)");
    let mut input = String::from("a");
    while input.len() <= 12 {
        let (ok, state) = run_recognize(&csv, chars(&input)).unwrap();
        assert!(ok, "{input}");
        assert_eq!(
            state.stats().next_effect_invocations,
            state.uset().len() as u64
        );
        input.push_str(",b");
    }
    assert!(!run_recognize(&csv, chars("a,,b")).unwrap().0);
}

#[test]
fn fuel_is_enforced() {
    let f = load("f.grammar", "Start");
    match parse(&f, chars("abc"), &ParseOptions::with_fuel(10_000)) {
        Err(ParseError::ResourceExhausted { budget, processed }) => {
            assert_eq!(budget, 10_000);
            assert!(processed > budget);
        }
        other => panic!("expected exhaustion, got {:?}", other.map(|p| p.accepted())),
    }
}

#[test]
fn unlimited_fuel_on_finite_run() {
    let options = ParseOptions {
        fuel: None,
        ..Default::default()
    };
    assert!(parse(&e_grammar(), chars("aa"), &options)
        .unwrap()
        .accepted());
}

fn schedules() -> [ParseOptions; 4] {
    let mk = |schedule, reverse_order| ParseOptions {
        fuel: Some(1_000_000),
        schedule,
        reverse_order,
    };
    [
        mk(Schedule::Fifo, false),
        mk(Schedule::Lifo, false),
        mk(Schedule::Fifo, true),
        mk(Schedule::Lifo, true),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn final_state_is_order_independent(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let ast = fungll::dsl::parse_grammar(&random_grammar(&mut rng)).unwrap();
        let symbol = elaborate::<char>(&ast, "N0").unwrap();
        let input = derived_or_random(&ast, &mut rng, 8);
        let runs: Vec<_> = schedules()
            .iter()
            .map(|o| snapshot(&state_of(&symbol, &input, o)))
            .collect();
        for run in &runs[1..] {
            prop_assert_eq!(run, &runs[0]);
        }
    }

    #[test]
    fn each_descriptor_is_processed_once(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let ast = fungll::dsl::parse_grammar(&random_grammar(&mut rng)).unwrap();
        let symbol = elaborate::<char>(&ast, "N0").unwrap();
        let state = state_of(&symbol, &derived_or_random(&ast, &mut rng, 8), &ParseOptions::default());
        let stats = state.stats();
        prop_assert_eq!(stats.next_effect_invocations, state.uset().len() as u64);
        prop_assert_eq!(stats.descriptors_processed, state.uset().len() as u64);
    }

    /// Every BSR is well-formed and every complete one is backed by `prel`.
    #[test]
    fn bsrs_are_sound(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let ast = fungll::dsl::parse_grammar(&random_grammar(&mut rng)).unwrap();
        let symbol = elaborate::<char>(&ast, "N0").unwrap();
        let input = derived_or_random(&ast, &mut rng, 8);
        let state = state_of(&symbol, &input, &ParseOptions::default());
        let n = input.len();
        for bsr in state.bsrs().iter() {
            prop_assert!(bsr.left <= bsr.pivot && bsr.pivot <= bsr.right && bsr.right <= n);
            if bsr.slot.is_complete() && bsr.slot.lhs() != SymbolId::start() {
                let c = fungll::Commencement { nonterminal: bsr.slot.lhs(), left: bsr.left };
                prop_assert!(state.prel().contains(c, bsr.right), "{}", bsr);
            }
            if let Some(last) = bsr.slot.previous_symbol() {
                if last.is_token() {
                    prop_assert_eq!(bsr.pivot + 1, bsr.right);
                }
            }
        }
    }
}
