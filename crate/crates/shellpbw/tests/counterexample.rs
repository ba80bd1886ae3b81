use std::collections::BTreeSet;
use std::sync::OnceLock;

use shellpbw::counterexample::{
    chain_word, first_counterexample, normal_form_designations, second_counterexample, show_cycle, tally, word, word_chain,
    CaseVerdict, FirstReport, SecondReport,
};
use shellpbw::fixtures;
use shellpbw::pbw::{orient, MonomialOrder};
use shellpbw::poset::build_poset_below;
use shellpbw::shelling::Obstruction;

fn first() -> &'static FirstReport {
    static R: OnceLock<FirstReport> = OnceLock::new();
    R.get_or_init(|| first_counterexample(4).unwrap())
}

fn second() -> &'static SecondReport {
    static R: OnceLock<SecondReport> = OnceLock::new();
    R.get_or_init(|| second_counterexample(4).unwrap())
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn chains_and_words_are_inverse() {
    let p = fixtures::bundled("cex1");
    let poset = build_poset_below(&p, 1, 3, &[vec![word(&p, "jda").unwrap()]]).unwrap();
    for w in ["jda", "jeb", "kfb", "lgb", "khc", "lic"] {
        let m = word(&p, w).unwrap();
        let chain = word_chain(&poset, &m).unwrap();
        assert_eq!(chain.len(), 4);
        assert_eq!(chain_word(&poset, &chain), m);
    }
    assert!(word(&p, "xyz").is_err());
}

#[test]
fn first_counterexample_rewriting_side() {
    let r = first();
    assert!(r.basic_set);
    assert!(r.terminating);
    assert_eq!(r.rules.len(), 6);
    assert_eq!(r.critical_pairs, [("lgb".to_string(), true)]);
    assert_eq!((r.poset.len(), r.poset.edges.len()), (8, 12));
}

#[test]
fn first_counterexample_declared_order_is_contradictory() {
    let r = first();
    let Obstruction::Contradiction { cycle } = &r.declared else { panic!("{:?}", r.declared) };
    assert_eq!(cycle.len(), 2);
    // Both edges leave the bottom and end at the generators b and c.
    for (_, chain) in cycle {
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0], r.poset.bottom);
    }
    let ends: BTreeSet<String> = cycle.iter().map(|(_, c)| r.poset.display(c[1])).collect();
    assert_eq!(ends, set(&["b", "c"]));
    assert_eq!(show_cycle(&r.poset, cycle), "l(1 < b) < l(1 < c) < l(1 < b)");
}

#[test]
fn exchanging_i_and_g_is_consistent_and_certified() {
    let r = first();
    assert!(r.swapped_rules.contains(&"ic -> gb".to_string()));
    assert!(!r.swapped.is_contradiction());
    let labels = r.swapped_certificate.as_ref().expect("an EL-labelling exists");
    assert_eq!(labels.len(), r.poset.edges.len());
}

#[test]
fn designations_follow_normal_forms() {
    let p = fixtures::bundled("cex1");
    let rs = orient(&p, &MonomialOrder::from_presentation(&p).unwrap()).unwrap();
    let poset = build_poset_below(&p, 1, 3, &[vec![word(&p, "jda").unwrap()]]).unwrap();
    let d = normal_form_designations(&poset, &rs).unwrap();
    let from_bottom: BTreeSet<String> = d
        .iter()
        .filter(|d| d.chain[0] == poset.bottom)
        .map(|d| p.show(&chain_word(&poset, &d.chain)))
        .collect();
    assert_eq!(from_bottom, set(&["da", "fb", "ic", "jda"]));
    for x in &d {
        assert!(rs.is_normal(&chain_word(&poset, &x.chain)));
    }
}

#[test]
fn second_counterexample_rewriting_side() {
    let r = second();
    assert!(r.basic_set);
    assert!(r.terminating);
    assert_eq!(r.rules.len(), 10);
    assert_eq!(r.critical_pairs, [("pid".to_string(), true), ("pjb".to_string(), true)]);
}

#[test]
fn mixed_orientations_die_on_labels() {
    let r = second();
    assert_eq!(r.cases.len(), 4);
    for c in r.cases.iter().filter(|c| c.hb_to_id != c.jb_to_kd) {
        assert!(c.fixed.is_contradiction(), "{}", c.title());
        assert!(matches!(c.verdict, CaseVerdict::LabelContradiction { .. }));
        // No completion escapes the cycle either.
        assert!(c.completions.iter().all(|x| !x.label_consistent()));
    }
}

#[test]
fn aligned_orientations_die_on_confluence() {
    let r = second();
    let case = |h: bool, j: bool| r.cases.iter().find(|c| c.hb_to_id == h && c.jb_to_kd == j).unwrap();

    let both_down = case(true, true);
    let CaseVerdict::NonConfluent { witnesses } = &both_down.verdict else { panic!("{:?}", both_down.verdict) };
    assert!(witnesses.contains("jba"));
    for c in both_down.completions.iter().filter(|c| c.label_consistent()) {
        assert!(c.rules.contains(&"ba -> ed".to_string()));
        assert!(c.rules.contains(&"ea -> fb".to_string()));
        assert!(c.convergence.as_ref().unwrap().non_confluent.contains(&"jba".to_string()));
    }

    // The other aligned case fails too, on lea rather than jba.
    let both_up = case(false, false);
    let CaseVerdict::NonConfluent { witnesses } = &both_up.verdict else { panic!("{:?}", both_up.verdict) };
    assert!(witnesses.contains("lea"));
    assert!(!witnesses.contains("jba"));

    for c in &r.cases {
        assert_eq!(c.completions.len(), 144);
        assert_eq!(tally(c).values().sum::<usize>(), 144);
        assert!(!matches!(c.verdict, CaseVerdict::Survives { .. }));
    }
}
