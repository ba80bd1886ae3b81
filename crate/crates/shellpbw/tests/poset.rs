use std::collections::BTreeSet;

use shellpbw::bar::{count_levelled_trees, enumerate_levelled_trees, forget_levels};
use shellpbw::fixtures;
use shellpbw::poset::{build_poset, build_poset_below, leq, DiamondKind, PartitionPoset};
use shellpbw::presentation::{parse_presentation, support_of, Presentation, TreeMonomial};

fn leaf(i: u32) -> TreeMonomial {
    TreeMonomial::Leaf(i)
}

fn mu(a: TreeMonomial, b: TreeMonomial) -> TreeMonomial {
    TreeMonomial::Node(0, vec![a, b])
}

fn mut_(a: TreeMonomial, b: TreeMonomial) -> TreeMonomial {
    TreeMonomial::Node(1, vec![a, b])
}

/// Pointed element of a Perm monomial: `mu` keeps its first input's point,
/// `mut` its second.
fn pointed(t: &TreeMonomial) -> u32 {
    match t {
        TreeMonomial::Leaf(i) => *i,
        TreeMonomial::Node(0, ch) => pointed(&ch[0]),
        TreeMonomial::Node(_, ch) => pointed(&ch[1]),
    }
}

/// `{1,2*}{3*}` style rendering of an element.
fn pointed_name(p: &PartitionPoset, x: usize) -> String {
    p.elements[x]
        .blocks
        .iter()
        .map(|b| {
            let star = pointed(&p.table.block_tree(b));
            let items: Vec<String> =
                b.elements().iter().map(|&i| if i == star { format!("{i}*") } else { i.to_string() }).collect();
            format!("{{{}}}", items.join(","))
        })
        .collect()
}

fn set_name(p: &PartitionPoset, x: usize) -> String {
    p.elements[x]
        .blocks
        .iter()
        .map(|b| format!("{{{}}}", b.elements().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
        .collect()
}

fn edges_by(p: &PartitionPoset, name: impl Fn(&PartitionPoset, usize) -> String, among: &[usize]) -> BTreeSet<String> {
    p.edges
        .iter()
        .filter(|e| among.contains(&e.lower) && among.contains(&e.upper))
        .map(|e| format!("{} < {}", name(p, e.lower), name(p, e.upper)))
        .collect()
}

fn strings(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[test]
fn com_arity_three_is_the_partition_lattice() {
    let p = build_poset(&fixtures::com(), 3, 2).unwrap();
    assert_eq!(p.len(), 5);
    assert_eq!(p.edges.len(), 6);
    let all: Vec<usize> = (0..p.len()).collect();
    assert_eq!(
        edges_by(&p, set_name, &all),
        strings(&[
            "{1}{2}{3} < {1,2}{3}",
            "{1}{2}{3} < {1,3}{2}",
            "{1}{2}{3} < {1}{2,3}",
            "{1,2}{3} < {1,2,3}",
            "{1,3}{2} < {1,2,3}",
            "{1}{2,3} < {1,2,3}",
        ])
    );
    assert_eq!(p.tops.len(), 1);
    assert_eq!(p.display(p.bottom), "1|2|3");
}

fn perm_interval_edges(top: &str) -> BTreeSet<String> {
    let p = build_poset(&fixtures::perm(), 3, 2).unwrap();
    let t = p.tops.iter().copied().find(|&t| pointed_name(&p, t) == top).unwrap();
    let iv = p.interval(p.bottom, t).unwrap();
    assert_eq!(iv.elements.len(), 6);
    edges_by(&p, pointed_name, &iv.elements)
}

#[test]
fn perm_arity_three_posets() {
    let p = build_poset(&fixtures::perm(), 3, 2).unwrap();
    assert_eq!(p.len(), 10);
    assert_eq!(p.tops.len(), 3);
    assert_eq!(p.edges.len(), 18);
    for &t in &p.tops {
        assert_eq!(p.lower_covers(t).count(), 4);
    }
    let bottom = "{1*}{2*}{3*}";
    let expect = |top: &str, middles: [&str; 4]| -> BTreeSet<String> {
        middles.iter().flat_map(|m| [format!("{bottom} < {m}"), format!("{m} < {top}")]).collect()
    };
    assert_eq!(
        perm_interval_edges("{1,2,3*}"),
        expect("{1,2,3*}", ["{1*}{2,3*}", "{1*,2}{3*}", "{1,3*}{2*}", "{1,2*}{3*}"])
    );
    assert_eq!(
        perm_interval_edges("{1*,2,3}"),
        expect("{1*,2,3}", ["{1*}{2,3*}", "{1*}{2*,3}", "{1*,3}{2*}", "{1*,2}{3*}"])
    );
    assert_eq!(
        perm_interval_edges("{1,2*,3}"),
        expect("{1,2*,3}", ["{1*,3}{2*}", "{1*}{2*,3}", "{1,2*}{3*}", "{1,3*}{2*}"])
    );
}

#[test]
fn algebra_posets() {
    let a = build_poset(&fixtures::bundled("algA"), 1, 2).unwrap();
    assert_eq!(a.len(), 6);
    assert_eq!(
        a.edge_strings(),
        vec!["1 -> a", "1 -> b", "a -> aa", "a -> ab", "b -> ab", "b -> bb"]
    );
    let b = build_poset(&fixtures::bundled("algB"), 1, 2).unwrap();
    assert_eq!(b.len(), 5);
    assert_eq!(b.tops.len(), 2);
    for &t in &b.tops {
        assert_eq!(b.lower_covers(t).count(), 2);
    }
    assert_eq!(b.edge_strings(), vec!["1 -> x", "1 -> y", "x -> xx", "x -> yx", "y -> xx", "y -> yx"]);
}

#[test]
fn trivial_presentation_gives_one_element() {
    let p = build_poset(&Presentation::trivial(), 1, 0).unwrap();
    assert_eq!(p.len(), 1);
    assert!(p.edges.is_empty());
    assert!(build_poset(&Presentation::trivial(), 1, 2).is_err());
}

#[test]
fn leq_examples_and_order_axioms() {
    let p = build_poset(&fixtures::perm(), 3, 2).unwrap();
    for x in 0..p.len() {
        assert!(p.le(p.bottom, x));
        assert!(leq(&p.table, &p.elements[p.bottom], &p.elements[x]));
    }
    let find = |s: &str| (0..p.len()).find(|&x| pointed_name(&p, x) == s).unwrap();
    let lam = find("{1*}{2,3*}");
    assert!(p.le(lam, find("{1,2,3*}")));
    assert!(p.le(lam, find("{1*,2,3}")));
    assert!(!p.le(lam, find("{1,2*,3}")));
    assert!(!p.le(find("{1,2*,3}"), lam));
}

fn bundled_posets() -> Vec<(String, PartitionPoset)> {
    let mut out = Vec::new();
    for name in fixtures::NAMES {
        let pres = fixtures::bundled(name);
        let arities: Vec<usize> = if pres.is_algebra() { vec![1] } else { (1..=5).collect() };
        for &n in &arities {
            for d in 0..=3 {
                if let Ok(p) = build_poset(&pres, n, d) {
                    out.push((format!("{name} n={n} d={d}"), p));
                }
            }
        }
    }
    out
}

#[test]
fn hasse_order_matches_direct_decomposition() {
    for (label, p) in bundled_posets() {
        if p.len() > 400 {
            continue;
        }
        for x in 0..p.len() {
            for y in 0..p.len() {
                assert_eq!(p.le(x, y), leq(&p.table, &p.elements[x], &p.elements[y]), "{label}: {x} {y}");
            }
        }
    }
}

#[test]
fn posets_are_pure_and_chains_match_levelled_trees() {
    for (label, p) in bundled_posets() {
        let chains = p.maximal_chains();
        assert!(chains.iter().all(|c| c.len() == p.weight + 1), "{label} is not pure");
        assert!(p.tops.iter().all(|&t| p.weights[t] == p.weight));
        let count = count_levelled_trees(&p.presentation, p.arity, p.weight);
        assert_eq!(chains.len() as u128, count, "{label}");
        let mut back = BTreeSet::new();
        for c in &chains {
            let t = p.chain_to_levelled(c);
            assert_eq!(p.levelled_to_chain(&t).as_ref(), Some(c), "{label}");
            back.insert(t);
        }
        assert_eq!(back.len(), chains.len());
        if p.arity <= 4 {
            let all: BTreeSet<_> = enumerate_levelled_trees(&p.presentation, p.arity, p.weight).into_iter().collect();
            assert_eq!(all, back, "{label}");
        }
        // The top of a chain carries the class of its levelled tree.
        for c in chains.iter().take(200) {
            let t = p.chain_to_levelled(c);
            let a = forget_levels(&p.presentation, &t);
            let top = &p.elements[*c.last().unwrap()];
            assert_eq!(top.blocks.len(), 1);
            assert_eq!(p.table.class_of(&a), Some(top.blocks[0].class), "{label}");
        }
    }
}

#[test]
fn chain_counts_from_the_figures() {
    assert_eq!(build_poset(&fixtures::com(), 3, 2).unwrap().maximal_chains().len(), 3);
    assert_eq!(build_poset(&fixtures::perm(), 3, 2).unwrap().maximal_chains().len(), 12);
    let a = build_poset(&fixtures::bundled("algA"), 1, 2).unwrap();
    let words: BTreeSet<String> = a
        .maximal_chains()
        .iter()
        .map(|c| a.presentation.show(&forget_levels(&a.presentation, &a.chain_to_levelled(c))))
        .collect();
    assert_eq!(words, strings(&["aa", "ab", "ba", "bb"]));
}

#[test]
fn covers_have_single_indecomposable_delta() {
    for (label, p) in bundled_posets() {
        for e in &p.edges {
            let d = p.difference(e.lower, e.upper).unwrap();
            assert_eq!(d.blocks.len(), 1, "{label}");
            assert_eq!(d.blocks[0], e.delta);
            assert_eq!(p.table.class(d.blocks[0].class).weight, 1);
        }
    }
}

#[test]
fn difference_examples() {
    let p = build_poset(&fixtures::com(), 3, 2).unwrap();
    let lam = p.find(&[mu(leaf(1), leaf(2)), leaf(3)]).unwrap();
    let top = p.tops[0];
    let d = p.difference(lam, top).unwrap();
    assert_eq!(d.support, support_of(&[1, 3]));
    assert_eq!(d.blocks.len(), 1);
    assert_eq!(p.display_block(&d.blocks[0]), "mu(1,3)");
    let same = p.difference(lam, lam).unwrap();
    assert_eq!(same.support, 0);
    assert!(same.blocks.is_empty());
    let other = p.find(&[leaf(1), mu(leaf(2), leaf(3))]).unwrap();
    assert!(p.difference(lam, other).is_err());
    let a = build_poset(&fixtures::bundled("algA"), 1, 2).unwrap();
    for x in 0..a.len() {
        for y in 0..a.len() {
            if x != y && a.le(x, y) {
                assert_eq!(a.difference(x, y).unwrap().blocks.len(), 1);
            }
        }
    }
}

#[test]
fn intervals() {
    let p = build_poset(&fixtures::com(), 3, 2).unwrap();
    let full = p.interval(p.bottom, p.tops[0]).unwrap();
    assert_eq!(full.elements.len(), p.len());
    let lam = p.find(&[mu(leaf(1), leaf(2)), leaf(3)]).unwrap();
    let iv = p.interval(p.bottom, lam).unwrap();
    assert_eq!(iv.elements, vec![p.bottom, lam]);
    assert!(p.interval(lam, p.bottom).is_err());
    let rooted = p.rooted_interval(vec![p.bottom], p.bottom, lam).unwrap();
    assert_eq!(rooted.interval, iv);
    assert!(p.rooted_interval(vec![lam], lam, p.tops[0]).is_err());
    let r = p.rooted_interval(vec![p.bottom, lam], lam, p.tops[0]).unwrap();
    assert_eq!(r.interval.elements.len(), 2);
}

#[test]
fn diamonds_examples() {
    let a = build_poset(&fixtures::bundled("algA"), 1, 2).unwrap();
    let d = a.diamonds();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].kind, DiamondKind::Relation);
    let q = |x| a.quadratic_monomial(d[0].bottom, x, d[0].top).unwrap();
    let mut words = vec![a.presentation.show(&q(d[0].left)), a.presentation.show(&q(d[0].right))];
    words.sort();
    assert_eq!(words, vec!["ab", "ba"]);

    let c = build_poset(&fixtures::com(), 3, 2).unwrap();
    let d = c.diamonds();
    assert_eq!(d.len(), 3);
    assert!(d.iter().all(|x| x.kind == DiamondKind::Relation));

    let free = parse_presentation("algebra F; gens a;").unwrap();
    let f = build_poset(&free, 1, 3).unwrap();
    assert!(f.diamonds().is_empty());

    let c4 = build_poset(&fixtures::com(), 4, 3).unwrap();
    let kinds: BTreeSet<DiamondKind> = c4.diamonds().iter().map(|x| x.kind).collect();
    assert_eq!(kinds.len(), 2);
    for x in c4.diamonds() {
        if x.kind == DiamondKind::Exchange {
            assert!(c4.quadratic_monomial(x.bottom, x.left, x.top).is_none());
        }
    }
}

#[test]
fn perm_intervals_and_the_six_element_subposet() {
    let p3 = build_poset(&fixtures::perm(), 3, 2).unwrap();
    let ivs: Vec<_> = p3.tops.iter().map(|&t| p3.interval(p3.bottom, t).unwrap()).collect();
    for (i, a) in ivs.iter().enumerate() {
        let id = p3.is_isomorphic(a, &p3, a).expect("reflexive");
        assert!(id.g.iter().all(|(x, y)| x == y));
        for b in &ivs[i + 1..] {
            assert!(p3.is_isomorphic(a, &p3, b).is_none());
        }
    }
    let top6 = mut_(mu(mu(leaf(1), leaf(2)), leaf(3)), mu(mu(leaf(4), leaf(5)), leaf(6)));
    assert_eq!(pointed(&top6), 4);
    let p6 = build_poset_below(&fixtures::perm(), 6, 5, &[vec![top6.clone()]]).unwrap();
    let bottom = p6.find(&[leaf(1), mu(mu(leaf(2), leaf(5)), leaf(6)), mut_(leaf(3), leaf(4))]).unwrap();
    let iv6 = p6.interval(bottom, p6.find(&[top6]).unwrap()).unwrap();
    assert_eq!(iv6.elements.len(), 6);
    let names: BTreeSet<String> = iv6.elements.iter().map(|&x| pointed_name(&p6, x)).collect();
    assert_eq!(
        names,
        strings(&[
            "{1,2,3,4*,5,6}",
            "{1*}{2,3,4*,5,6}",
            "{1*,2,5,6}{3,4*}",
            "{1,3,4*}{2*,5,6}",
            "{1,2*,5,6}{3,4*}",
            "{1*}{2*,5,6}{3,4*}",
        ])
    );
    let target = p3.tops.iter().copied().find(|&t| pointed_name(&p3, t) == "{1,2,3*}").unwrap();
    let first = p3.interval(p3.bottom, target).unwrap();
    let iso = p3.is_isomorphic(&first, &p6, &iv6).expect("isomorphic");
    assert_eq!(iso.f.into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 2), (3, 3)]);
    assert!(p6.is_isomorphic(&iv6, &p3, &first).is_some());
    for (j, iv) in ivs.iter().enumerate() {
        if iv.top != target {
            assert!(p3.is_isomorphic(iv, &p6, &iv6).is_none(), "interval {j}");
        }
    }
}

#[test]
fn isomorphism_restricts_to_subintervals() {
    let p = build_poset(&fixtures::com(), 4, 3).unwrap();
    let mut pairs = 0;
    let ivs: Vec<_> = (0..p.len())
        .flat_map(|x| (0..p.len()).filter(move |&y| x != y).map(move |y| (x, y)))
        .filter(|&(x, y)| p.le(x, y))
        .map(|(x, y)| p.interval(x, y).unwrap())
        .collect();
    for a in &ivs {
        for b in &ivs {
            if let Some(iso) = p.is_isomorphic(a, &p, b) {
                pairs += 1;
                assert!(p.is_isomorphic(b, &p, a).is_some(), "not symmetric");
                for &(x, gx) in &iso.g {
                    let sub = p.interval(a.bottom, x).unwrap();
                    let img = p.interval(b.bottom, gx).unwrap();
                    assert!(p.is_isomorphic(&sub, &p, &img).is_some());
                }
            }
        }
    }
    assert!(pairs > ivs.len());
}

#[test]
fn not_basic_set_is_reported_during_construction() {
    let bad = parse_presentation("algebra T; gens u v; rel uu = vu;").unwrap();
    assert!(build_poset(&bad, 1, 2).is_err());
}

#[test]
fn exports_are_deterministic() {
    let p = build_poset(&fixtures::com(), 3, 2).unwrap();
    let dot = p.to_dot(true, &[]);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 6);
    assert_eq!(dot, build_poset(&fixtures::com(), 3, 2).unwrap().to_dot(true, &[]));
    let json = p.to_json();
    assert_eq!(json["elements"].as_array().unwrap().len(), 5);
    assert_eq!(json["edges"].as_array().unwrap().len(), 6);
}
