use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_rational::BigRational;
use proptest::prelude::*;
use shellpbw::fixtures;
use shellpbw::pbw::{
    check_fiber_minimum, check_normal_forms, check_termination, critical_pairs, derived_order, extract_pbw, orient,
    pointed_shuffles, quadratic_restrictions, verify_pbw, verify_pbw_in, LemmaViolation, MonomialOrder, PbwCondition, PbwError,
    RewriteRule, RewriteSystem, Termination,
};
use shellpbw::poset::{build_poset, PartitionPoset};
use shellpbw::presentation::{compose, parse_presentation, Presentation, TreeMonomial};
use shellpbw::shelling::{certified_labelling, check_iso_compatibility, ComLabelling, PermLabelling};

fn word(p: &Presentation, s: &str) -> TreeMonomial {
    let letters: Vec<usize> = s.chars().map(|c| p.generator_id(&c.to_string()).unwrap()).collect();
    TreeMonomial::word(&letters)
}

fn rules(rs: &RewriteSystem) -> BTreeSet<String> {
    (0..rs.rules.len()).map(|i| rs.show_rule(i)).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn declared(p: &Presentation) -> RewriteSystem {
    orient(p, &MonomialOrder::from_presentation(p).unwrap()).unwrap()
}

#[test]
fn first_counterexample_orientation() {
    let p = fixtures::bundled("cex1");
    let rs = declared(&p);
    assert_eq!(rules(&rs), set(&["eb -> da", "hc -> fb", "gb -> ic", "kf -> je", "lg -> je", "li -> kh"]));
    let trace: Vec<String> = rs.trace(&word(&p, "lgb")).unwrap().iter().map(|m| p.show(m)).collect();
    assert_eq!(trace, ["lgb", "jeb", "jda"]);
    assert_eq!(rs.normal_monomial(&word(&p, "jda")).unwrap(), word(&p, "jda"));

    let pairs = critical_pairs(&rs).unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(p.show(&pairs[0].overlap), "lgb");
    assert!(pairs[0].confluent);
    assert!(check_termination(&rs, 4).unwrap().is_ok());
}

#[test]
fn second_counterexample_orientation() {
    let p = fixtures::bundled("cex2");
    let rs = declared(&p);
    assert_eq!(
        rules(&rs),
        set(&[
            "ed -> ba", "fb -> ea", "id -> hb", "jb -> kd", "pk -> oi", "ph -> ej", "ek -> le", "pi -> le",
            "oh -> nf", "pj -> nf",
        ])
    );
    let pairs = critical_pairs(&rs).unwrap();
    let overlaps: BTreeSet<String> = pairs.iter().map(|c| p.show(&c.overlap)).collect();
    assert_eq!(overlaps, set(&["pid", "pjb"]));
    assert!(pairs.iter().all(|c| c.confluent));
    assert!(check_termination(&rs, 4).unwrap().is_ok());
}

#[test]
fn flipped_orientation_breaks_confluence_at_jba() {
    let p = fixtures::bundled("cex2");
    let base = declared(&p);
    let flip = ["ed", "id", "jb"];
    let mut new_rules = Vec::new();
    for r in &base.rules {
        let lhs = p.show(&r.lhs);
        if flip.contains(&lhs.as_str()) {
            new_rules.push(RewriteRule::set(r.monomial_rhs().unwrap().clone(), r.lhs.clone()));
        } else {
            new_rules.push(r.clone());
        }
    }
    // ba -> ed, hb -> id, kd -> jb is the wrong way for jb: use jb -> kd.
    let rs = RewriteSystem::new(p.clone(), new_rules, None);
    let shown = rules(&rs);
    assert!(shown.contains("ba -> ed") && shown.contains("hb -> id") && shown.contains("kd -> jb"));
    let mut rules2 = rs.rules.clone();
    let kd = rules2.iter().position(|r| p.show(&r.lhs) == "kd").unwrap();
    rules2[kd] = RewriteRule::set(word(&p, "jb"), word(&p, "kd"));
    let rs = RewriteSystem::new(p.clone(), rules2, None);
    let pairs = critical_pairs(&rs).unwrap();
    let jba = pairs.iter().find(|c| p.show(&c.overlap) == "jba").expect("jba is an overlap");
    assert!(!jba.confluent);
}

#[test]
fn cycles_are_reported() {
    let p = parse_presentation("algebra T; gens a b;").unwrap();
    let rs = RewriteSystem::new(
        p.clone(),
        vec![RewriteRule::set(word(&p, "ab"), word(&p, "ba")), RewriteRule::set(word(&p, "ba"), word(&p, "ab"))],
        None,
    );
    match check_termination(&rs, 3).unwrap() {
        Termination::Cycle { witness } => {
            assert_eq!(witness.iter().map(|m| p.show(m)).collect::<Vec<_>>(), ["ab", "ba"])
        }
        other => panic!("expected a cycle, got {other:?}"),
    }
    let ordered = RewriteSystem::new(
        p.clone(),
        vec![RewriteRule::set(word(&p, "ab"), word(&p, "ba"))],
        Some(MonomialOrder::from_presentation(&parse_presentation("algebra T; gens a b; order a < b;").unwrap()).unwrap()),
    );
    assert_eq!(check_termination(&ordered, 3).unwrap(), Termination::RuleNotDecreasing { rule: 0 });
}

#[test]
fn incomparable_sides_are_an_error() {
    let p = parse_presentation("algebra T; gens a b c; rel ab = cb;").unwrap();
    let err = orient(&p, &MonomialOrder::from_presentation(&p).unwrap()).unwrap_err();
    assert!(matches!(err, PbwError::Incomparable { relation: 0, .. }));
}

#[test]
fn linear_rules_rewrite_combinations() {
    let p = parse_presentation("algebra L; gens a b; rel ba = 2*ab; order a < b;").unwrap();
    let rs = declared(&p);
    assert_eq!(rules(&rs), set(&["ba -> 2*ab"]));
    let nf = rs.normal_form(&word(&p, "bba")).unwrap();
    assert_eq!(nf.len(), 1);
    assert_eq!(nf[&word(&p, "abb")], BigRational::from_integer(4.into()));
    assert!(rs.trace(&word(&p, "ba")).is_err());
}

fn com_family() -> Vec<PartitionPoset> {
    (3..=5).map(|n| build_poset(&fixtures::com(), n, n - 1).unwrap()).collect()
}

fn mu(a: TreeMonomial, b: TreeMonomial) -> TreeMonomial {
    TreeMonomial::Node(0, vec![a, b])
}

fn leaf(i: u32) -> TreeMonomial {
    TreeMonomial::Leaf(i)
}

fn left_comb(n: u32) -> TreeMonomial {
    (2..=n).fold(leaf(1), |acc, i| mu(acc, leaf(i)))
}

#[test]
fn com_derived_order_and_rules() {
    let family = com_family();
    let refs: Vec<&PartitionPoset> = family.iter().collect();
    let order = derived_order(&refs, &ComLabelling).unwrap();
    let pairs: BTreeSet<(TreeMonomial, TreeMonomial)> = order.quadratic_pairs().into_iter().collect();
    let lc = left_comb(3);
    assert_eq!(
        pairs,
        BTreeSet::from([(lc.clone(), mu(mu(leaf(1), leaf(3)), leaf(2))), (lc.clone(), mu(leaf(1), mu(leaf(2), leaf(3))))])
    );
    let p = fixtures::com();
    let rs = orient(&p, &MonomialOrder::Derived(order)).unwrap();
    assert_eq!(rules(&rs), set(&["mu(1,mu(2,3)) -> mu(mu(1,2),3)", "mu(mu(1,3),2) -> mu(mu(1,2),3)"]));
    assert_eq!(rs.normal_monomial(&mu(leaf(1), mu(leaf(2), leaf(3)))).unwrap(), lc);
    assert!(critical_pairs(&rs).unwrap().iter().all(|c| c.confluent));
    assert!(check_termination(&rs, 4).unwrap().is_ok());
}

#[test]
fn com_basis_is_left_combs() {
    let family = com_family();
    let refs: Vec<&PartitionPoset> = family.iter().collect();
    let p = fixtures::com();
    let ex = extract_pbw(&p, &refs, &ComLabelling, 6, 5).unwrap();
    for n in 1..=6u32 {
        assert_eq!(ex.basis.cell(n as usize, n as usize - 1), [left_comb(n)]);
    }
    verify_pbw(&p, &ex.basis, &ex.system).unwrap();

    let mut broken = ex.basis.clone();
    broken.cells.remove(&(4, 3));
    let v = verify_pbw(&p, &broken, &ex.system).unwrap_err();
    assert_eq!(v.condition, PbwCondition::RepresentsBasis);
}

fn perm_family() -> Vec<PartitionPoset> {
    (3..=4).map(|n| build_poset(&fixtures::perm(), n, n - 1).unwrap()).collect()
}

#[test]
fn perm_basis_has_n_combs_per_arity() {
    let family = perm_family();
    let refs: Vec<&PartitionPoset> = family.iter().collect();
    let lab = PermLabelling::for_poset(&family[0]).unwrap();
    let p = fixtures::perm();
    let ex = extract_pbw(&p, &refs, &lab, 6, 5).unwrap();
    verify_pbw_in(&ex.table, &p, &ex.basis, &ex.system).unwrap();
    for n in 1..=6usize {
        let cell = ex.basis.cell(n, n - 1);
        assert_eq!(cell.len(), n, "arity {n}");
        for m in cell {
            // Left combs: the second input of every vertex is a leaf.
            let mut t = m;
            while let TreeMonomial::Node(_, ch) = t {
                assert!(matches!(ch[1], TreeMonomial::Leaf(_)), "{}", p.show(m));
                t = &ch[0];
            }
        }
    }
}

#[test]
fn free_operad_keeps_every_monomial() {
    let p = parse_presentation("operad F; gen m/2;").unwrap();
    let family = [build_poset(&p, 3, 2).unwrap()];
    let refs: Vec<&PartitionPoset> = family.iter().collect();
    let order = derived_order(&refs, &ComLabelling).unwrap();
    assert!(order.is_empty());
    let ex = extract_pbw(&p, &refs, &ComLabelling, 4, 3).unwrap();
    assert!(ex.system.rules.is_empty());
    assert_eq!(ex.basis.cell(3, 2).len(), 3);
    assert_eq!(ex.basis.cell(4, 3).len(), 15);
}

#[test]
fn pointed_shuffle_counts() {
    // Σ_i C(m + k - 1 - i, k - 1)
    assert_eq!(pointed_shuffles(2, 2).len(), 3);
    assert_eq!(pointed_shuffles(3, 2).len(), 6);
    assert_eq!(pointed_shuffles(1, 3).len(), 1);
    assert_eq!(pointed_shuffles(2, 1).len(), 2);
}

#[test]
fn normal_form_characterization_holds_for_com() {
    let p = fixtures::com();
    let family = com_family();
    let refs: Vec<&PartitionPoset> = family.iter().collect();
    let rs = orient(&p, &MonomialOrder::Derived(derived_order(&refs, &ComLabelling).unwrap())).unwrap();
    for poset in &family {
        assert!(check_normal_forms(poset, &ComLabelling, &rs).is_empty(), "n={}", poset.arity);
    }
}

#[test]
fn fiber_minimum_fails_on_a_nested_diamond() {
    let family = com_family();
    let refs: Vec<&PartitionPoset> = family.iter().collect();
    let order = derived_order(&refs, &ComLabelling).unwrap();
    assert!(check_fiber_minimum(&family[0], &ComLabelling, &order).is_empty());
    // a = mu(mu(1,mu(2,4)),3) lies below b = mu(mu(1,3),mu(2,4)) through a
    // relation diamond, yet b's fiber contains the chain labelled (3,4,2),
    // smaller than a's only chain (4,2,3).
    let found = check_fiber_minimum(&family[1], &ComLabelling, &order);
    assert_eq!(
        found,
        vec![
            LemmaViolation::FiberMinimum { smaller: "mu(mu(1,mu(2,4)),3)".into(), larger: "mu(mu(1,3),mu(2,4))".into() },
            LemmaViolation::FiberMinimum { smaller: "mu(mu(mu(1,4),2),3)".into(), larger: "mu(mu(1,4),mu(2,3))".into() },
        ]
    );
    let a = mu(mu(leaf(1), mu(leaf(2), leaf(4))), leaf(3));
    let b = mu(mu(leaf(1), leaf(3)), mu(leaf(2), leaf(4)));
    assert!(MonomialOrder::Derived(order).less(&a, &b));
}

#[test]
fn algebra_labellings_give_pbw_bases() {
    for (name, sizes) in [("algA", vec![1, 2, 3, 4, 5]), ("algB", vec![1, 2, 2, 2, 2])] {
        let p = fixtures::bundled(name);
        let poset = build_poset(&p, 1, 3).unwrap();
        let l = certified_labelling(&poset, 4).unwrap().expect("small EL-shellable poset");
        assert!(check_iso_compatibility(&[&poset], &l).is_ok());
        let ex = extract_pbw(&p, &[&poset], &l, 1, 4).unwrap();
        let got: Vec<usize> = (0..=4).map(|w| ex.basis.cell(1, w).len()).collect();
        assert_eq!(got, sizes, "{name}");
        verify_pbw(&p, &ex.basis, &ex.system).unwrap();
        assert!(check_fiber_minimum(&poset, &l, &ex.order).is_empty());
        assert!(check_normal_forms(&poset, &l, &ex.system).is_empty());
    }
}

#[test]
fn quadratic_restrictions_of_a_comb() {
    let m = left_comb(4);
    assert_eq!(quadratic_restrictions(&m), vec![left_comb(3), left_comb(3)]);
}

fn perm_system() -> &'static RewriteSystem {
    static RS: OnceLock<RewriteSystem> = OnceLock::new();
    RS.get_or_init(|| {
        let family = perm_family();
        let refs: Vec<&PartitionPoset> = family.iter().collect();
        let lab = PermLabelling::for_poset(&family[0]).unwrap();
        orient(&fixtures::perm(), &MonomialOrder::Derived(derived_order(&refs, &lab).unwrap())).unwrap()
    })
}

proptest! {
    #[test]
    fn rewriting_is_context_free(outer_i in 0usize..100, inner_i in 0usize..100, ps_i in 0usize..100, side in 0usize..2) {
        let p = fixtures::perm();
        let rs = perm_system();
        let rule = &rs.rules[inner_i % rs.rules.len()];
        let contexts = shellpbw::presentation::enumerate_monomials(&p, 2, 1).unwrap()[1].clone();
        let u = &contexts[outer_i % contexts.len()];
        let (lhs, rhs) = (&rule.lhs, rule.monomial_rhs().unwrap());
        let (a, b) = if side == 0 {
            let shuffles = pointed_shuffles(2, 3);
            let ps = &shuffles[ps_i % shuffles.len()];
            (compose(u, ps, lhs).unwrap(), compose(u, ps, rhs).unwrap())
        } else {
            let shuffles = pointed_shuffles(3, 2);
            let ps = &shuffles[ps_i % shuffles.len()];
            (compose(lhs, ps, u).unwrap(), compose(rhs, ps, u).unwrap())
        };
        let steps: Vec<TreeMonomial> = rs.redexes(&a).iter().flat_map(|r| rs.apply(&a, r)).map(|(_, t)| t).collect();
        prop_assert!(steps.contains(&b));
    }
}
