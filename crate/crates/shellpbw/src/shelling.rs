//! Chain-edge labellings: CL/EL checks, the Com and Perm labellings,
//! compatibility with subposet isomorphisms and the bottom-edge obstruction
//! engine.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::poset::{Interval, PartitionPoset};
use crate::presentation::{Block, GenId, TreeMonomial};

/// Labels are compared lexicographically as integer vectors.
pub type Label = Vec<i64>;

/// A chain-edge labelling. `chain` runs from `0̂` and ends with the labelled
/// edge, so the prefix condition holds by construction.
pub trait Labelling {
    fn name(&self) -> &str;
    /// Labels depend on the last edge only.
    fn is_el(&self) -> bool;
    fn label(&self, poset: &PartitionPoset, chain: &[usize]) -> Label;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabelError {
    #[error("the {labelling} labelling needs {requirement}")]
    Unsupported { labelling: String, requirement: String },
}

fn merge_parts(poset: &PartitionPoset, chain: &[usize]) -> (Vec<Block>, Block) {
    let n = chain.len();
    let e = poset.edge_between(chain[n - 2], chain[n - 1]).expect("chain steps are covers");
    (e.parts.clone(), e.merged)
}

/// `max(min A_i, min A_j)`: the largest minimum among the merged parts.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComLabelling;

pub fn com_label(parts: &[Block]) -> i64 {
    parts.iter().map(|b| b.min() as i64).max().unwrap_or(0)
}

impl Labelling for ComLabelling {
    fn name(&self) -> &str {
        "com"
    }

    fn is_el(&self) -> bool {
        true
    }

    fn label(&self, poset: &PartitionPoset, chain: &[usize]) -> Label {
        vec![com_label(&merge_parts(poset, chain).0)]
    }
}

/// Pointed element of a monomial when the generator `left` keeps the point
/// of its first input and `right` the point of its second.
pub fn pointed_element(t: &TreeMonomial, left: GenId, right: GenId) -> Option<u32> {
    match t {
        TreeMonomial::Leaf(i) => Some(*i),
        TreeMonomial::Node(g, ch) if *g == left && ch.len() == 2 => pointed_element(&ch[0], left, right),
        TreeMonomial::Node(g, ch) if *g == right && ch.len() == 2 => pointed_element(&ch[1], left, right),
        _ => None,
    }
}

/// `(max(min A_i, min A_j), a + n - p)` where `a` is the minimum of the part
/// whose pointed element is forgotten and `p` the number of parts before the
/// merge.
#[derive(Clone, Copy, Debug)]
pub struct PermLabelling {
    left: GenId,
    right: GenId,
}

impl PermLabelling {
    /// The first two binary generators play `μ` (point of the first input)
    /// and `μ^τ` (point of the second input). Every class in the poset's
    /// table must have a well-defined pointed element.
    pub fn for_poset(poset: &PartitionPoset) -> Result<Self, LabelError> {
        let err = |req: &str| LabelError::Unsupported { labelling: "perm".into(), requirement: req.into() };
        let p = &poset.presentation;
        if p.generators.len() != 2 || p.generators.iter().any(|g| g.arity != 2) {
            return Err(err("pointed blocks: exactly two binary generators"));
        }
        let lab = PermLabelling { left: 0, right: 1 };
        for c in poset.table.classes() {
            let points: BTreeSet<Option<u32>> =
                c.members.iter().map(|m| pointed_element(m, lab.left, lab.right)).collect();
            if points.len() != 1 || points.contains(&None) {
                return Err(err("every element to have one pointed input"));
            }
        }
        Ok(lab)
    }

    pub fn pointed(&self, poset: &PartitionPoset, b: &Block) -> u32 {
        pointed_element(&poset.table.block_tree(b), self.left, self.right).expect("checked in for_poset")
    }
}

/// `kept` is the index of the part whose pointed element survives; `p` is
/// the number of parts of the lower partition.
pub fn perm_label(parts: &[Block], kept: usize, n: usize, p: usize) -> Label {
    let forgotten = parts.iter().enumerate().find(|(i, _)| *i != kept).map_or(0, |(_, b)| b.min() as i64);
    vec![com_label(parts), forgotten + n as i64 - p as i64]
}

impl Labelling for PermLabelling {
    fn name(&self) -> &str {
        "perm"
    }

    fn is_el(&self) -> bool {
        true
    }

    fn label(&self, poset: &PartitionPoset, chain: &[usize]) -> Label {
        let (parts, merged) = merge_parts(poset, chain);
        let point = self.pointed(poset, &merged);
        let kept = parts.iter().position(|b| b.support >> (point - 1) & 1 == 1).expect("point lies in a part");
        let p = poset.elements[chain[chain.len() - 2]].blocks.len();
        perm_label(&parts, kept, poset.arity, p)
    }
}

/// Labels along `chain` (a maximal chain of `[x, y]`) under the rooted
/// restriction to `root`, which ends at `x`.
pub fn label_tuple(l: &dyn Labelling, poset: &PartitionPoset, root: &[usize], chain: &[usize]) -> Vec<Label> {
    let mut full: Vec<usize> = root.to_vec();
    debug_assert_eq!(root.last(), chain.first());
    let mut out = Vec::with_capacity(chain.len().saturating_sub(1));
    for &z in &chain[1..] {
        full.push(z);
        out.push(l.label(poset, &full));
    }
    out
}

pub fn is_increasing(t: &[Label]) -> bool {
    t.windows(2).all(|w| w[0] < w[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClViolation {
    NoIncreasingChain,
    SeveralIncreasingChains(usize),
    IncreasingChainNotLexMinimal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClFailure {
    pub root: Vec<usize>,
    pub bottom: usize,
    pub top: usize,
    pub violation: ClViolation,
}

#[derive(Clone, Debug, Default)]
pub struct ClReport {
    pub intervals_checked: usize,
    pub failures: Vec<ClFailure>,
}

impl ClReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
struct Stats {
    increasing: usize,
    min: Option<Vec<Label>>,
    min_count: usize,
    min_is_increasing: bool,
}

/// Checks every closed rooted interval of length at least one. EL labellings
/// are checked on plain intervals with one root each.
pub fn is_cl_labelling(poset: &PartitionPoset, l: &dyn Labelling) -> ClReport {
    let mut report = ClReport::default();
    for x in 0..poset.len() {
        let roots = poset.chains_between(poset.bottom, x);
        let roots: Vec<Vec<usize>> = if l.is_el() { roots.into_iter().take(1).collect() } else { roots };
        for root in roots {
            let mut stats: BTreeMap<usize, Stats> = BTreeMap::new();
            let mut full = root.clone();
            let mut tuple = Vec::new();
            explore(poset, l, &mut full, &mut tuple, &mut stats);
            for (y, s) in stats {
                report.intervals_checked += 1;
                let violation = if s.increasing == 0 {
                    Some(ClViolation::NoIncreasingChain)
                } else if s.increasing > 1 {
                    Some(ClViolation::SeveralIncreasingChains(s.increasing))
                } else if !(s.min_is_increasing && s.min_count == 1) {
                    Some(ClViolation::IncreasingChainNotLexMinimal)
                } else {
                    None
                };
                if let Some(violation) = violation {
                    report.failures.push(ClFailure { root: root.clone(), bottom: x, top: y, violation });
                }
            }
        }
    }
    report
}

fn explore(
    poset: &PartitionPoset,
    l: &dyn Labelling,
    full: &mut Vec<usize>,
    tuple: &mut Vec<Label>,
    stats: &mut BTreeMap<usize, Stats>,
) {
    let last = *full.last().unwrap();
    let mut next: Vec<usize> = poset.upper_covers(last).collect();
    next.sort_unstable();
    for z in next {
        full.push(z);
        tuple.push(l.label(poset, full));
        let inc = is_increasing(tuple);
        let s = stats.entry(z).or_default();
        if inc {
            s.increasing += 1;
        }
        match s.min.as_ref().map(|m| tuple.as_slice().cmp(m.as_slice())) {
            None | Some(Ordering::Less) => {
                s.min = Some(tuple.clone());
                s.min_count = 1;
                s.min_is_increasing = inc;
            }
            Some(Ordering::Equal) => {
                s.min_count += 1;
                s.min_is_increasing |= inc;
            }
            Some(Ordering::Greater) => {}
        }
        explore(poset, l, full, tuple, stats);
        tuple.pop();
        full.pop();
    }
}

/// One chain of an interval with its labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledChain {
    pub chain: Vec<usize>,
    pub labels: Vec<Label>,
    pub increasing: bool,
}

/// All maximal chains of `[x, y]_root`, sorted by label tuple.
pub fn interval_chains(
    poset: &PartitionPoset,
    l: &dyn Labelling,
    root: &[usize],
    x: usize,
    y: usize,
) -> Vec<LabelledChain> {
    let mut out: Vec<LabelledChain> = poset
        .chains_between(x, y)
        .into_iter()
        .map(|c| {
            let labels = label_tuple(l, poset, root, &c);
            let increasing = is_increasing(&labels);
            LabelledChain { chain: c, labels, increasing }
        })
        .collect();
    out.sort_by(|a, b| a.labels.cmp(&b.labels).then_with(|| a.chain.cmp(&b.chain)));
    out
}

/// The chain of `[x, y]` built by the merge rules for pointed partitions:
/// repeatedly merge the two parts with the smallest minima inside a block
/// of `y` (the block whose second-smallest minimum is least), keeping the
/// point that survives in `y`, otherwise the point of the part with the
/// larger minimum.
pub fn perm_rule_chain(poset: &PartitionPoset, lab: &PermLabelling, x: usize, y: usize) -> Option<Vec<usize>> {
    let top = &poset.elements[y];
    let mut chain = vec![x];
    let mut cur = x;
    while cur != y {
        let blocks = &poset.elements[cur].blocks;
        let mut best: Option<(u32, usize, usize, &Block)> = None;
        for c in &top.blocks {
            let inside: Vec<usize> =
                (0..blocks.len()).filter(|&i| blocks[i].support & !c.support == 0).collect();
            if inside.len() >= 2 {
                let key = Block::min(&blocks[inside[1]]);
                if best.is_none_or(|b| key < b.0) {
                    best = Some((key, inside[0], inside[1], c));
                }
            }
        }
        let (_, i, j, c) = best?;
        let point_top = lab.pointed(poset, c);
        let (pa, pb) = (lab.pointed(poset, &blocks[i]), lab.pointed(poset, &blocks[j]));
        // The top's pointed element survives if present; otherwise B's does.
        let keep = if pa == point_top { pa } else { pb };
        let merged_support = blocks[i].support | blocks[j].support;
        let next = poset.upper_covers(cur).find(|&z| {
            poset.le(z, y)
                && poset.elements[z].blocks.iter().any(|b| b.support == merged_support && lab.pointed(poset, b) == keep)
        })?;
        chain.push(next);
        cur = next;
    }
    Some(chain)
}

/// A pair of isomorphic intervals on which the labelling is not compatible.
#[derive(Clone, Debug)]
pub struct CompatWitness {
    pub first: (usize, Interval),
    pub second: (usize, Interval),
    pub chains: (Vec<usize>, Vec<usize>),
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct CompatReport {
    pub intervals: usize,
    pub isomorphic_pairs: usize,
    pub witness: Option<CompatWitness>,
}

impl CompatReport {
    pub fn is_ok(&self) -> bool {
        self.witness.is_none()
    }
}

/// For every pair of isomorphic intervals of length at least two across the
/// family, corresponding chains must agree on being increasing and on every
/// pairwise lexicographic comparison. Labels are taken with the first root
/// of each interval.
pub fn check_iso_compatibility(family: &[&PartitionPoset], l: &dyn Labelling) -> CompatReport {
    let mut report = CompatReport::default();
    let mut buckets: BTreeMap<String, Vec<(usize, Interval)>> = BTreeMap::new();
    for (pi, p) in family.iter().enumerate() {
        for x in 0..p.len() {
            for y in x + 1..p.len() {
                if !p.le(x, y) || p.weights[y] < p.weights[x] + 2 {
                    continue;
                }
                let iv = p.interval(x, y).expect("comparable");
                buckets.entry(interval_signature(p, &iv)).or_default().push((pi, iv));
                report.intervals += 1;
            }
        }
    }
    for group in buckets.values() {
        for (i, (pa, a)) in group.iter().enumerate() {
            for (pb, b) in &group[i + 1..] {
                let (p1, p2) = (family[*pa], family[*pb]);
                let Some(iso) = p1.is_isomorphic(a, p2, b) else { continue };
                report.isomorphic_pairs += 1;
                let g: HashMap<usize, usize> = iso.g.iter().copied().collect();
                let root1 = p1.chains_between(p1.bottom, a.bottom).into_iter().next().unwrap();
                let root2 = p2.chains_between(p2.bottom, b.bottom).into_iter().next().unwrap();
                let chains1 = p1.chains_between(a.bottom, a.top);
                let t1: Vec<Vec<Label>> = chains1.iter().map(|c| label_tuple(l, p1, &root1, c)).collect();
                let images: Vec<Vec<usize>> = chains1.iter().map(|c| c.iter().map(|z| g[z]).collect()).collect();
                let t2: Vec<Vec<Label>> = images.iter().map(|c| label_tuple(l, p2, &root2, c)).collect();
                let mut fail = None;
                for u in 0..t1.len() {
                    if is_increasing(&t1[u]) != is_increasing(&t2[u]) {
                        fail = Some((u, u, "increasing status differs".to_string()));
                        break;
                    }
                    for v in u + 1..t1.len() {
                        if t1[u].cmp(&t1[v]) != t2[u].cmp(&t2[v]) {
                            fail = Some((u, v, "lexicographic comparison differs".to_string()));
                            break;
                        }
                    }
                    if fail.is_some() {
                        break;
                    }
                }
                if let Some((u, v, reason)) = fail {
                    report.witness = Some(CompatWitness {
                        first: (*pa, a.clone()),
                        second: (*pb, b.clone()),
                        chains: (chains1[u].clone(), chains1[v].clone()),
                        reason,
                    });
                    return report;
                }
            }
        }
    }
    report
}

/// Cheap invariant shared by isomorphic intervals.
fn interval_signature(p: &PartitionPoset, iv: &Interval) -> String {
    let mut deltas: Vec<String> = Vec::new();
    let mut edges = 0;
    for &x in &iv.elements {
        for &e in p.up_edges(x) {
            let edge = &p.edges[e];
            if p.le(edge.upper, iv.top) {
                edges += 1;
                let rank = p.weights[x] - p.weights[iv.bottom];
                deltas.push(format!("{rank}:{:?}", p.table.class(edge.delta.class).representative()));
            }
        }
    }
    deltas.sort();
    let support = p.support_set(iv).len();
    format!("{}/{}/{edges}/{support}/{}", p.weights[iv.top] - p.weights[iv.bottom], iv.elements.len(), deltas.join(","))
}

/// A required lexicographically minimal increasing chain of `[g, h]_root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Designation {
    pub root: Vec<usize>,
    /// Maximal chain of the interval, from `g` to `h`.
    pub chain: Vec<usize>,
}

/// A label variable: component index and the chain from `0̂` ending with the
/// labelled edge.
pub type EdgeVar = (usize, Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// `cycle[0] < cycle[1] < … < cycle[0]`.
    Contradiction { cycle: Vec<EdgeVar> },
    /// A label per constrained variable satisfying every inequality.
    Consistent { assignment: BTreeMap<EdgeVar, u32> },
}

impl Obstruction {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, Obstruction::Contradiction { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ObstructionError {
    #[error("designation {0} is not a maximal chain of a rooted interval")]
    BadDesignation(usize),
}

/// Strict inequalities between bottom-edge labels forced by designated
/// chains: in `[g, h]_r` the first edge of the designated chain must be
/// labelled below every other first edge. Variables identified through
/// `identifications` (e.g. corresponding edges of isomorphic intervals) are
/// merged first.
pub fn obstruction_check(
    components: &[&PartitionPoset],
    designations: &[(usize, Designation)],
    identifications: &[(EdgeVar, EdgeVar)],
) -> Result<Obstruction, ObstructionError> {
    let mut ids: BTreeMap<EdgeVar, usize> = BTreeMap::new();
    let mut vars: Vec<EdgeVar> = Vec::new();
    let mut intern = |v: EdgeVar, vars: &mut Vec<EdgeVar>| -> usize {
        *ids.entry(v.clone()).or_insert_with(|| {
            vars.push(v);
            vars.len() - 1
        })
    };
    let mut less: Vec<(usize, usize)> = Vec::new();
    for (k, (c, d)) in designations.iter().enumerate() {
        let p = components[*c];
        let (g, h) = match (d.chain.first(), d.chain.last()) {
            (Some(&g), Some(&h)) if d.chain.len() >= 2 => (g, h),
            _ => return Err(ObstructionError::BadDesignation(k)),
        };
        let valid = d.root.last() == Some(&g)
            && d.root.first() == Some(&p.bottom)
            && d.root.windows(2).chain(d.chain.windows(2)).all(|w| p.edge_between(w[0], w[1]).is_some())
            && p.le(h, h);
        if !valid {
            return Err(ObstructionError::BadDesignation(k));
        }
        let mut first = d.root.clone();
        first.push(d.chain[1]);
        let a = intern((*c, first), &mut vars);
        let mut others: Vec<usize> = p.upper_covers(g).filter(|&y| y != d.chain[1] && p.le(y, h)).collect();
        others.sort_unstable();
        for y in others {
            let mut other = d.root.clone();
            other.push(y);
            let b = intern((*c, other), &mut vars);
            less.push((a, b));
        }
    }
    let mut uf: Vec<usize> = (0..vars.len()).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for (a, b) in identifications {
        let (Some(&ia), Some(&ib)) = (ids.get(a), ids.get(b)) else { continue };
        let (ra, rb) = (find(&mut uf, ia), find(&mut uf, ib));
        uf[ra.max(rb)] = ra.min(rb);
    }
    let mut succ: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(a, b) in &less {
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        succ.entry(ra).or_default().insert(rb);
    }
    let roots: BTreeSet<usize> = (0..vars.len()).map(|v| find(&mut uf, v)).collect();
    // Iterative DFS for a cycle.
    let mut state: BTreeMap<usize, u8> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();
    for &start in &roots {
        if state.contains_key(&start) {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, succ.get(&start).map(|s| s.iter().rev().copied().collect()).unwrap_or_default())];
        state.insert(start, 1);
        while let Some((u, pending)) = stack.last_mut() {
            let u = *u;
            if let Some(v) = pending.pop() {
                match state.get(&v) {
                    Some(1) => {
                        let pos = stack.iter().position(|(w, _)| *w == v).unwrap();
                        let cycle = stack[pos..].iter().map(|(w, _)| vars[*w].clone()).collect();
                        return Ok(Obstruction::Contradiction { cycle });
                    }
                    Some(_) => {}
                    None => {
                        state.insert(v, 1);
                        let next = succ.get(&v).map(|s| s.iter().rev().copied().collect()).unwrap_or_default();
                        stack.push((v, next));
                    }
                }
            } else {
                state.insert(u, 2);
                order.push(u);
                stack.pop();
            }
        }
    }
    // Longest-path layering in reverse post-order.
    let mut level: BTreeMap<usize, u32> = roots.iter().map(|&r| (r, 1)).collect();
    for &u in order.iter().rev() {
        let lu = level[&u];
        if let Some(next) = succ.get(&u) {
            for &v in next {
                let lv = level.get_mut(&v).unwrap();
                *lv = (*lv).max(lu + 1);
            }
        }
    }
    let assignment = (0..vars.len()).map(|v| (vars[v].clone(), level[&find(&mut uf, v)])).collect();
    Ok(Obstruction::Consistent { assignment })
}

/// Corresponding first edges of two isomorphic intervals, as variable pairs.
pub fn isomorphism_identifications(
    first: (usize, &PartitionPoset, &Interval),
    second: (usize, &PartitionPoset, &Interval),
) -> Vec<(EdgeVar, EdgeVar)> {
    let (ca, pa, a) = first;
    let (cb, pb, b) = second;
    let Some(iso) = pa.is_isomorphic(a, pb, b) else { return Vec::new() };
    let g: HashMap<usize, usize> = iso.g.into_iter().collect();
    let mut out = Vec::new();
    for ra in pa.chains_between(pa.bottom, a.bottom) {
        for rb in pb.chains_between(pb.bottom, b.bottom) {
            for x in pa.upper_covers(a.bottom).filter(|&x| pa.le(x, a.top)) {
                let mut va = ra.clone();
                va.push(x);
                let mut vb = rb.clone();
                vb.push(g[&x]);
                out.push(((ca, va), (cb, vb)));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("{edges} edges exceed the exhaustive search limit of {limit}")]
    TooLarge { edges: usize, limit: usize },
}

pub const CERTIFY_EDGE_LIMIT: usize = 16;

/// Exhaustive search for an edge labelling with values in `1..=alphabet`
/// that is an EL-labelling of the whole poset and whose increasing chains
/// are the designated ones. Returns a label per edge index.
pub fn certify_el(
    poset: &PartitionPoset,
    designations: &[Designation],
    alphabet: i64,
) -> Result<Option<Vec<i64>>, CertifyError> {
    let m = poset.edges.len();
    if m > CERTIFY_EDGE_LIMIT {
        return Err(CertifyError::TooLarge { edges: m, limit: CERTIFY_EDGE_LIMIT });
    }
    let designated: HashMap<(usize, usize), Vec<usize>> =
        designations.iter().map(|d| ((d.chain[0], *d.chain.last().unwrap()), d.chain.clone())).collect();
    // Edges are sorted by lower element; process them by upper element so
    // that every interval [x, y] is complete once y's edges are assigned.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&e| (poset.edges[e].upper, poset.edges[e].lower));
    let edge_index: HashMap<(usize, usize), usize> =
        poset.edges.iter().enumerate().map(|(i, e)| ((e.lower, e.upper), i)).collect();
    let mut labels = vec![0i64; m];
    let ok_at = |labels: &[i64], y: usize| -> bool {
        for x in 0..y {
            if !poset.le(x, y) {
                continue;
            }
            let chains = poset.chains_between(x, y);
            let tuples: Vec<Vec<i64>> = chains
                .iter()
                .map(|c| c.windows(2).map(|w| labels[edge_index[&(w[0], w[1])]]).collect())
                .collect();
            let inc: Vec<usize> = (0..chains.len()).filter(|&i| tuples[i].windows(2).all(|w| w[0] < w[1])).collect();
            if inc.len() != 1 {
                return false;
            }
            let i = inc[0];
            if (0..chains.len()).any(|j| j != i && tuples[j] <= tuples[i]) {
                return false;
            }
            if let Some(d) = designated.get(&(x, y)) {
                if chains[i] != *d {
                    return false;
                }
            }
        }
        true
    };
    fn go(
        k: usize,
        order: &[usize],
        labels: &mut Vec<i64>,
        alphabet: i64,
        poset: &PartitionPoset,
        ok_at: &dyn Fn(&[i64], usize) -> bool,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let e = order[k];
        let y = poset.edges[e].upper;
        let closes = k + 1 == order.len() || poset.edges[order[k + 1]].upper != y;
        for v in 1..=alphabet {
            labels[e] = v;
            if closes && !ok_at(labels, y) {
                continue;
            }
            if go(k + 1, order, labels, alphabet, poset, ok_at) {
                return true;
            }
        }
        labels[e] = 0;
        false
    }
    Ok(go(0, &order, &mut labels, alphabet, poset, &ok_at).then_some(labels))
}

/// Labelling given by a table of edge labels (EL).
#[derive(Clone, Debug)]
pub struct TableLabelling {
    pub name: String,
    pub labels: HashMap<(usize, usize), Label>,
}

impl Labelling for TableLabelling {
    fn name(&self) -> &str {
        &self.name
    }

    fn is_el(&self) -> bool {
        true
    }

    fn label(&self, _poset: &PartitionPoset, chain: &[usize]) -> Label {
        let n = chain.len();
        self.labels.get(&(chain[n - 2], chain[n - 1])).cloned().unwrap_or_default()
    }
}

/// An EL-labelling found by [`certify_el`], as a table.
pub fn certified_labelling(poset: &PartitionPoset, alphabet: i64) -> Result<Option<TableLabelling>, CertifyError> {
    Ok(certify_el(poset, &[], alphabet)?.map(|labels| TableLabelling {
        name: "certified".into(),
        labels: poset.edges.iter().zip(labels).map(|(e, l)| ((e.lower, e.upper), vec![l])).collect(),
    }))
}
