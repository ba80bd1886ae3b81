//! Monomial orders, rewriting systems and PBW bases.
//!
//! An order either comes from declared generator chains (extended
//! lexicographically along the preorder token sequence) or is derived from a
//! labelling: in every length-two interval whose difference partition has a
//! single block, the lexicographically least chain spells the smaller
//! quadratic monomial. Orders are partial and never totalized.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bar::fiber;
use crate::poset::PartitionPoset;
use crate::presentation::{
    compose, congruence_classes, match_at, restrict_to_edge, substitute, ElementTable, EnumError, Enumerator,
    GeneratorOrder, Path, PointedShuffle, Presentation, Relation, TableError, Token, TreeMonomial,
};
use crate::shelling::{interval_chains, label_tuple, Label, Labelling};

/// Rational linear combination of monomials with no zero coefficients.
pub type LinComb = BTreeMap<TreeMonomial, BigRational>;

/// Upper bound on rewriting steps for one normal form computation.
pub const STEP_LIMIT: usize = 100_000;

/// Upper bound on monomials explored when comparing under a derived order.
const SEARCH_LIMIT: usize = 200_000;

#[derive(Debug, thiserror::Error)]
pub enum PbwError {
    #[error("derived order is not antisymmetric: {first} and {second} each lie below the other")]
    NotAntisymmetric { first: String, second: String, evidence: Vec<String> },
    #[error("relation {relation} has no unique minimal term under the order (terms {})", terms.join(", "))]
    Incomparable { relation: usize, terms: Vec<String> },
    #[error("linear relation {relation} has no strictly largest term")]
    NoLeadingTerm { relation: usize },
    #[error("rewriting {start} did not stop within {limit} steps")]
    StepLimit { start: String, limit: usize },
    #[error("rule {rule} has a linear right-hand side where a monomial was required")]
    LinearRule { rule: usize },
    #[error("basis mismatch in arity {arity}, weight {weight}: {detail}")]
    BasisMismatch { arity: usize, weight: usize, detail: String },
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// `a < b` recorded from one interval of one poset of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderEvidence {
    pub smaller: TreeMonomial,
    pub larger: TreeMonomial,
    pub poset: usize,
    pub bottom: usize,
    pub top: usize,
}

/// Order on quadratic monomials generated by labelled intervals, extended to
/// all monomials by replacing quadratic subtrees.
#[derive(Clone, Debug, Default)]
pub struct DerivedOrder {
    /// For each quadratic monomial, every strictly smaller one.
    below: BTreeMap<TreeMonomial, BTreeSet<TreeMonomial>>,
    pub evidence: Vec<OrderEvidence>,
}

impl DerivedOrder {
    pub fn quadratic_pairs(&self) -> Vec<(TreeMonomial, TreeMonomial)> {
        self.below.iter().flat_map(|(b, s)| s.iter().map(move |a| (a.clone(), b.clone()))).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    /// Monomials obtained from `m` by lowering one quadratic subtree.
    pub fn decrease_steps(&self, m: &TreeMonomial) -> Vec<TreeMonomial> {
        let mut out = Vec::new();
        for (parent, child) in m.internal_edges() {
            let q = restrict_to_edge(m, &parent, child).expect("internal edge");
            if let Some(smaller) = self.below.get(&q) {
                for s in smaller {
                    out.push(replace_quadratic(m, &parent, child, s));
                }
            }
        }
        out
    }

    fn reaches(&self, from: &TreeMonomial, to: &TreeMonomial) -> Option<bool> {
        let mut seen: HashSet<TreeMonomial> = HashSet::from([from.clone()]);
        let mut queue = VecDeque::from([from.clone()]);
        while let Some(m) = queue.pop_front() {
            for next in self.decrease_steps(&m) {
                if &next == to {
                    return Some(true);
                }
                if seen.insert(next.clone()) {
                    if seen.len() > SEARCH_LIMIT {
                        return None;
                    }
                    queue.push_back(next);
                }
            }
        }
        Some(false)
    }
}

/// Replaces the two-vertex subtree on the edge `(parent, child)` by the
/// standardized quadratic monomial `q` on the same hanging subtrees.
pub fn replace_quadratic(m: &TreeMonomial, parent: &[usize], child: usize, q: &TreeMonomial) -> TreeMonomial {
    let node = m.at(parent);
    let mut hanging: Vec<TreeMonomial> = Vec::new();
    for (i, c) in node.children().iter().enumerate() {
        if i == child {
            hanging.extend(c.children().iter().cloned());
        } else {
            hanging.push(c.clone());
        }
    }
    hanging.sort_by_key(|h| h.min_leaf());
    m.replaced(parent, substitute(q, &hanging)).normalized()
}

/// Quadratic monomials carried by the internal edges of `m`.
pub fn quadratic_restrictions(m: &TreeMonomial) -> Vec<TreeMonomial> {
    m.internal_edges().iter().map(|(p, c)| restrict_to_edge(m, p, *c).expect("internal edge")).collect()
}

#[derive(Clone, Debug)]
pub enum MonomialOrder {
    /// Preorder tokens compared lexicographically; generators through the
    /// declared partial order, leaves by label and below generators.
    GeneratorLex(GeneratorOrder),
    Derived(DerivedOrder),
}

impl MonomialOrder {
    /// The generator-lex order of the presentation's `order` clauses.
    pub fn from_presentation(p: &Presentation) -> Result<Self, crate::presentation::ParseError> {
        Ok(MonomialOrder::GeneratorLex(p.generator_order()?))
    }

    /// `None` when the monomials are incomparable (including different
    /// arity or weight).
    pub fn compare(&self, a: &TreeMonomial, b: &TreeMonomial) -> Option<Ordering> {
        if a == b {
            return Some(Ordering::Equal);
        }
        if a.arity() != b.arity() || a.weight() != b.weight() {
            return None;
        }
        match self {
            MonomialOrder::GeneratorLex(gens) => {
                let (ta, tb) = (a.tokens(), b.tokens());
                let (x, y) = ta.iter().zip(&tb).find(|(x, y)| x != y)?;
                match (x, y) {
                    (Token::Gen(g), Token::Gen(h)) => gens.compare(*g, *h),
                    _ => Some(x.cmp(y)),
                }
            }
            MonomialOrder::Derived(d) => {
                if d.reaches(b, a)? {
                    Some(Ordering::Less)
                } else if d.reaches(a, b)? {
                    Some(Ordering::Greater)
                } else {
                    None
                }
            }
        }
    }

    pub fn less(&self, a: &TreeMonomial, b: &TreeMonomial) -> bool {
        self.compare(a, b) == Some(Ordering::Less)
    }
}

/// The order `⋖` read off a labelling on a family of posets. For CL (not EL)
/// labellings every root of every interval is visited.
pub fn derived_order(family: &[&PartitionPoset], l: &dyn Labelling) -> Result<DerivedOrder, PbwError> {
    let mut direct: BTreeMap<(TreeMonomial, TreeMonomial), Vec<usize>> = BTreeMap::new();
    let mut evidence = Vec::new();
    for (pi, p) in family.iter().enumerate() {
        for x in 0..p.len() {
            let roots = if l.is_el() {
                vec![p.chains_between(p.bottom, x).swap_remove(0)]
            } else {
                p.chains_between(p.bottom, x)
            };
            for y in 0..p.len() {
                if p.weights[y] != p.weights[x] + 2 || !p.le(x, y) {
                    continue;
                }
                if p.difference(x, y).map(|d| d.blocks.len()).unwrap_or(0) != 1 {
                    continue;
                }
                for root in &roots {
                    let chains = interval_chains(p, l, root, x, y);
                    let Some(a) = p.quadratic_monomial(x, chains[0].chain[1], y) else { continue };
                    for c in &chains[1..] {
                        let Some(b) = p.quadratic_monomial(x, c.chain[1], y) else { continue };
                        if a != b {
                            let k = evidence.len();
                            evidence.push(OrderEvidence {
                                smaller: a.clone(),
                                larger: b.clone(),
                                poset: pi,
                                bottom: x,
                                top: y,
                            });
                            direct.entry((a.clone(), b)).or_default().push(k);
                        }
                    }
                }
            }
        }
    }
    // Transitive closure over the (few) quadratic monomials involved.
    let mut below: BTreeMap<TreeMonomial, BTreeSet<TreeMonomial>> = BTreeMap::new();
    for (a, b) in direct.keys() {
        below.entry(b.clone()).or_default().insert(a.clone());
    }
    loop {
        let mut changed = false;
        let snapshot = below.clone();
        for (b, set) in below.iter_mut() {
            for a in snapshot[b].iter() {
                if let Some(more) = snapshot.get(a) {
                    for c in more {
                        changed |= set.insert(c.clone());
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let describe = |k: usize, p: &Presentation| {
        let e: &OrderEvidence = &evidence[k];
        let q = family[e.poset];
        format!(
            "{} < {} in [{}, {}]",
            p.show(&e.smaller),
            p.show(&e.larger),
            q.display(e.bottom),
            q.display(e.top)
        )
    };
    for (b, set) in &below {
        if set.contains(b) {
            let p = &family[0].presentation;
            // A pair on the cycle: some a below b with b below a.
            let a = set.iter().find(|a| below.get(*a).is_some_and(|s| s.contains(b))).unwrap_or(b);
            let ev = direct
                .iter()
                .filter(|((x, y), _)| (x == a || x == b) && (y == a || y == b))
                .flat_map(|(_, ks)| ks.iter().map(|&k| describe(k, p)))
                .collect();
            return Err(PbwError::NotAntisymmetric { first: p.show(a), second: p.show(b), evidence: ev });
        }
    }
    Ok(DerivedOrder { below, evidence })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteRule {
    pub lhs: TreeMonomial,
    /// A set rule has the single term `1 * m`.
    pub rhs: Vec<(BigRational, TreeMonomial)>,
    /// Index of the relation the rule comes from, when oriented.
    pub relation: Option<usize>,
}

impl RewriteRule {
    pub fn set(lhs: TreeMonomial, rhs: TreeMonomial) -> Self {
        RewriteRule { lhs, rhs: vec![(BigRational::one(), rhs)], relation: None }
    }

    pub fn monomial_rhs(&self) -> Option<&TreeMonomial> {
        match self.rhs.as_slice() {
            [(c, m)] if c.is_one() => Some(m),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    pub presentation: Presentation,
    pub rules: Vec<RewriteRule>,
    pub order: Option<MonomialOrder>,
}

/// A position where a rule applies: the vertex path and the rule index.
pub type Redex = (Path, usize);

fn show_comb(p: &Presentation, terms: &[(BigRational, TreeMonomial)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|(c, m)| if c.is_one() { p.show(m) } else { format!("{c}*{}", p.show(m)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn show_lincomb(p: &Presentation, c: &LinComb) -> String {
    let terms: Vec<(BigRational, TreeMonomial)> = c.iter().map(|(m, k)| (k.clone(), m.clone())).collect();
    show_comb(p, &terms)
}

/// Orients every relation towards its unique minimal term (set relations)
/// or away from its strictly largest term (linear relations).
pub fn orient(p: &Presentation, order: &MonomialOrder) -> Result<RewriteSystem, PbwError> {
    let mut rules = Vec::new();
    for (index, r) in p.relations.iter().enumerate() {
        match r.set_terms() {
            Some(terms) => {
                let min = terms.iter().find(|m| terms.iter().all(|t| t == *m || order.less(m, t)));
                let Some(min) = min else {
                    return Err(PbwError::Incomparable {
                        relation: index,
                        terms: terms.iter().map(|t| p.show(t)).collect(),
                    });
                };
                for t in terms.iter().filter(|t| *t != min) {
                    rules.push(RewriteRule {
                        lhs: t.clone(),
                        rhs: vec![(BigRational::one(), min.clone())],
                        relation: Some(index),
                    });
                }
            }
            None => {
                let Relation::Linear { lhs, rhs } = r else { unreachable!("set relations handled above") };
                // lhs - Σ c_i m_i = 0
                let mut terms: LinComb = BTreeMap::new();
                add_term(&mut terms, lhs.clone(), BigRational::one());
                for (c, m) in rhs {
                    add_term(&mut terms, m.clone(), -c.clone());
                }
                let lead = terms.keys().find(|m| terms.keys().all(|t| t == *m || order.less(t, m))).cloned();
                let Some(lead) = lead else { return Err(PbwError::NoLeadingTerm { relation: index }) };
                let c = terms.remove(&lead).expect("lead term present");
                let rhs = terms.into_iter().map(|(m, k)| (-k / c.clone(), m)).collect();
                rules.push(RewriteRule { lhs: lead, rhs, relation: Some(index) });
            }
        }
    }
    Ok(RewriteSystem { presentation: p.clone(), rules, order: Some(order.clone()) })
}

fn add_term(c: &mut LinComb, m: TreeMonomial, k: BigRational) {
    let entry = c.entry(m.clone()).or_insert_with(BigRational::zero);
    *entry += k;
    if entry.is_zero() {
        c.remove(&m);
    }
}

impl RewriteSystem {
    pub fn new(presentation: Presentation, rules: Vec<RewriteRule>, order: Option<MonomialOrder>) -> Self {
        RewriteSystem { presentation, rules, order }
    }

    pub fn show_rule(&self, i: usize) -> String {
        let r = &self.rules[i];
        format!("{} -> {}", self.presentation.show(&r.lhs), show_comb(&self.presentation, &r.rhs))
    }

    pub fn is_set(&self) -> bool {
        self.rules.iter().all(|r| r.monomial_rhs().is_some())
    }

    /// Every redex of `m`, vertices in preorder and rules by index.
    pub fn redexes(&self, m: &TreeMonomial) -> Vec<Redex> {
        let mut out = Vec::new();
        for v in m.vertices() {
            let sub = m.at(&v);
            for (i, r) in self.rules.iter().enumerate() {
                if match_at(&r.lhs, sub).is_some() {
                    out.push((v.clone(), i));
                }
            }
        }
        out
    }

    pub fn is_normal(&self, m: &TreeMonomial) -> bool {
        m.vertices().iter().all(|v| self.rules.iter().all(|r| match_at(&r.lhs, m.at(v)).is_none()))
    }

    /// Applies one rule at one vertex.
    pub fn apply(&self, m: &TreeMonomial, redex: &Redex) -> Vec<(BigRational, TreeMonomial)> {
        let (path, i) = redex;
        let rule = &self.rules[*i];
        let parts = match_at(&rule.lhs, m.at(path)).expect("redex matches");
        rule.rhs.iter().map(|(c, t)| (c.clone(), m.replaced(path, substitute(t, &parts)).normalized())).collect()
    }

    /// The first redex in preorder (outermost, then leftmost) with the
    /// lowest rule index.
    pub fn first_redex(&self, m: &TreeMonomial) -> Option<Redex> {
        for v in m.vertices() {
            let sub = m.at(&v);
            if let Some(i) = self.rules.iter().position(|r| match_at(&r.lhs, sub).is_some()) {
                return Some((v, i));
            }
        }
        None
    }

    /// Rewrites a combination until no term is reducible. Terms are treated
    /// in increasing monomial order.
    pub fn normal_form_comb(&self, start: LinComb) -> Result<LinComb, PbwError> {
        let mut c = start.clone();
        for _ in 0..STEP_LIMIT {
            let found = c.keys().find_map(|m| self.first_redex(m).map(|r| (m.clone(), r)));
            let Some((m, redex)) = found else { return Ok(c) };
            let k = c.remove(&m).expect("term present");
            for (ck, t) in self.apply(&m, &redex) {
                add_term(&mut c, t, k.clone() * ck);
            }
        }
        Err(PbwError::StepLimit { start: show_lincomb(&self.presentation, &start), limit: STEP_LIMIT })
    }

    pub fn normal_form(&self, m: &TreeMonomial) -> Result<LinComb, PbwError> {
        self.normal_form_comb(BTreeMap::from([(m.clone(), BigRational::one())]))
    }

    /// The successive monomials of a rewriting sequence in a set system,
    /// starting with `m` and ending with its normal form.
    pub fn trace(&self, m: &TreeMonomial) -> Result<Vec<TreeMonomial>, PbwError> {
        let mut out = vec![m.clone()];
        for _ in 0..STEP_LIMIT {
            let cur = out.last().expect("nonempty");
            let Some(redex) = self.first_redex(cur) else { return Ok(out) };
            if self.rules[redex.1].monomial_rhs().is_none() {
                return Err(PbwError::LinearRule { rule: redex.1 });
            }
            let mut terms = self.apply(cur, &redex);
            out.push(terms.swap_remove(0).1);
        }
        Err(PbwError::StepLimit { start: self.presentation.show(m), limit: STEP_LIMIT })
    }

    /// Normal form of a monomial in a set system.
    pub fn normal_monomial(&self, m: &TreeMonomial) -> Result<TreeMonomial, PbwError> {
        Ok(self.trace(m)?.pop().expect("nonempty"))
    }

    fn lhs_weights(&self) -> Vec<usize> {
        self.rules.iter().map(|r| r.lhs.weight()).collect()
    }
}

/// Vertex paths covered by the pattern `lhs` matched at `at`.
fn redex_vertices(lhs: &TreeMonomial, at: &[usize]) -> BTreeSet<Path> {
    lhs.vertices()
        .into_iter()
        .map(|v| {
            let mut p = at.to_vec();
            p.extend(v);
            p
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPair {
    pub overlap: TreeMonomial,
    pub first: Redex,
    pub second: Redex,
    /// Rewriting sequences after each first step (set systems only).
    pub first_trace: Vec<TreeMonomial>,
    pub second_trace: Vec<TreeMonomial>,
    pub first_normal_form: LinComb,
    pub second_normal_form: LinComb,
    pub confluent: bool,
}

/// Minimal overlaps: two redexes in one monomial sharing a vertex and
/// covering all its vertices, each branch rewritten to normal form.
pub fn critical_pairs(rs: &RewriteSystem) -> Result<Vec<CriticalPair>, PbwError> {
    let weights = rs.lhs_weights();
    let max_w = weights.iter().flat_map(|a| weights.iter().map(move |b| a + b - 1)).max().unwrap_or(0);
    let min_w = weights.iter().copied().min().unwrap_or(0);
    let p = &rs.presentation;
    let mut enumerator = Enumerator::new(p);
    let mut out = Vec::new();
    for w in min_w.max(1)..=max_w {
        for n in 1..=p.max_arity_for_weight(w) {
            for m in enumerator.cell(n, w)?.iter() {
                let redexes = rs.redexes(m);
                if redexes.len() < 2 {
                    continue;
                }
                let all: BTreeSet<Path> = m.vertices().into_iter().collect();
                let covered: Vec<BTreeSet<Path>> =
                    redexes.iter().map(|(v, i)| redex_vertices(&rs.rules[*i].lhs, v)).collect();
                for a in 0..redexes.len() {
                    for b in a + 1..redexes.len() {
                        if covered[a].is_disjoint(&covered[b]) {
                            continue;
                        }
                        if covered[a].union(&covered[b]).count() != all.len() {
                            continue;
                        }
                        out.push(resolve_pair(rs, m, &redexes[a], &redexes[b])?);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn resolve_pair(rs: &RewriteSystem, m: &TreeMonomial, a: &Redex, b: &Redex) -> Result<CriticalPair, PbwError> {
    let branch = |r: &Redex| -> Result<(Vec<TreeMonomial>, LinComb), PbwError> {
        let step = rs.apply(m, r);
        let mut start: LinComb = BTreeMap::new();
        for (c, t) in &step {
            add_term(&mut start, t.clone(), c.clone());
        }
        let nf = rs.normal_form_comb(start)?;
        let trace = match step.as_slice() {
            [(c, t)] if c.is_one() && rs.is_set() => rs.trace(t)?,
            _ => Vec::new(),
        };
        Ok((trace, nf))
    };
    let (first_trace, first_normal_form) = branch(a)?;
    let (second_trace, second_normal_form) = branch(b)?;
    let confluent = first_normal_form == second_normal_form;
    Ok(CriticalPair {
        overlap: m.clone(),
        first: a.clone(),
        second: b.clone(),
        first_trace,
        second_trace,
        first_normal_form,
        second_normal_form,
        confluent,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Termination {
    /// No cycle among the monomials checked.
    Terminating { monomials_checked: usize },
    /// The rule does not strictly decrease the system's order.
    RuleNotDecreasing { rule: usize },
    /// `witness[0] -> witness[1] -> … -> witness[0]`.
    Cycle { witness: Vec<TreeMonomial> },
}

impl Termination {
    pub fn is_ok(&self) -> bool {
        matches!(self, Termination::Terminating { .. })
    }
}

/// Checks that every rule decreases the order (when there is one) and
/// searches the one-step rewriting graph of all monomials of weight at most
/// `d` for a cycle.
pub fn check_termination(rs: &RewriteSystem, d: usize) -> Result<Termination, PbwError> {
    if let Some(order) = &rs.order {
        for (i, r) in rs.rules.iter().enumerate() {
            if r.rhs.iter().any(|(_, t)| !order.less(t, &r.lhs)) {
                return Ok(Termination::RuleNotDecreasing { rule: i });
            }
        }
    }
    let p = &rs.presentation;
    let mut enumerator = Enumerator::new(p);
    let mut checked = 0;
    let min_w = rs.lhs_weights().into_iter().min().unwrap_or(usize::MAX);
    for w in min_w..=d {
        for n in 1..=p.max_arity_for_weight(w) {
            let cell = enumerator.cell(n, w)?;
            checked += cell.len();
            if let Some(witness) = find_cycle(rs, &cell) {
                return Ok(Termination::Cycle { witness });
            }
        }
    }
    Ok(Termination::Terminating { monomials_checked: checked })
}

fn find_cycle(rs: &RewriteSystem, cell: &[TreeMonomial]) -> Option<Vec<TreeMonomial>> {
    let index: HashMap<&TreeMonomial, usize> = cell.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let succ = |i: usize| -> Vec<usize> {
        let mut out: Vec<usize> = rs
            .redexes(&cell[i])
            .iter()
            .flat_map(|r| rs.apply(&cell[i], r))
            .filter_map(|(_, t)| index.get(&t).copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out.reverse();
        out
    };
    let mut state = vec![0u8; cell.len()];
    for start in 0..cell.len() {
        if state[start] != 0 {
            continue;
        }
        state[start] = 1;
        let mut stack = vec![(start, succ(start))];
        while let Some((u, pending)) = stack.last_mut() {
            let u = *u;
            match pending.pop() {
                Some(v) if state[v] == 1 => {
                    let pos = stack.iter().position(|(w, _)| *w == v).expect("on stack");
                    let mut cycle: Vec<TreeMonomial> = stack[pos..].iter().map(|(w, _)| cell[*w].clone()).collect();
                    let min = (0..cycle.len()).min_by(|&a, &b| cycle[a].cmp(&cycle[b])).unwrap_or(0);
                    cycle.rotate_left(min);
                    return Some(cycle);
                }
                Some(v) if state[v] == 0 => {
                    state[v] = 1;
                    let next = succ(v);
                    stack.push((v, next));
                }
                Some(_) => {}
                None => {
                    state[u] = 2;
                    stack.pop();
                }
            }
        }
    }
    None
}

/// All pointed shuffles `∘_{i,w}` for an outer factor of arity `m` and an
/// inner factor of arity `k`.
pub fn pointed_shuffles(m: usize, k: usize) -> Vec<PointedShuffle> {
    let total = (m + k - 1) as u32;
    let mut out = Vec::new();
    for i in 1..=m as u32 {
        let rest: Vec<u32> = (i + 1..=total).collect();
        for subset in subsets(&rest, k - 1) {
            let mut pos = vec![i];
            pos.extend(subset);
            out.push(PointedShuffle::new(pos).expect("increasing positions"));
        }
    }
    out
}

fn subsets(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out: Vec<Vec<u32>> = subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    out.extend(subsets(&items[1..], k));
    out
}

/// Basis monomials per `(arity, weight)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PbwBasis {
    pub cells: BTreeMap<(usize, usize), Vec<TreeMonomial>>,
}

impl PbwBasis {
    pub fn contains(&self, m: &TreeMonomial) -> bool {
        self.cells.get(&(m.arity(), m.weight())).is_some_and(|c| c.binary_search(m).is_ok())
    }

    pub fn cell(&self, arity: usize, weight: usize) -> &[TreeMonomial] {
        self.cells.get(&(arity, weight)).map_or(&[], |v| v.as_slice())
    }

    pub fn max_arity(&self) -> usize {
        self.cells.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn max_weight(&self) -> usize {
        self.cells.keys().map(|k| k.1).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct PbwExtraction {
    pub order: DerivedOrder,
    pub system: RewriteSystem,
    pub basis: PbwBasis,
    /// Congruence classes over the extraction bounds.
    pub table: ElementTable,
}

/// Derives the order from the labelling, orients the relations and collects
/// the monomials whose quadratic subtrees are all minimal. The result is
/// cross-checked against normal forms and congruence classes in arities up
/// to `n` and weights up to `d`.
pub fn extract_pbw(
    p: &Presentation,
    family: &[&PartitionPoset],
    l: &dyn Labelling,
    n: usize,
    d: usize,
) -> Result<PbwExtraction, PbwError> {
    let order = derived_order(family, l)?;
    let system = orient(p, &MonomialOrder::Derived(order.clone()))?;
    let non_minimal: HashSet<TreeMonomial> = system.rules.iter().map(|r| r.lhs.clone()).collect();
    let table = congruence_classes(p, n, d)?;
    let mut enumerator = Enumerator::new(p);
    let mut basis = PbwBasis::default();
    let n = if p.is_algebra() { 1 } else { n };
    for arity in 1..=n {
        for weight in 0..=d {
            let monos = enumerator.cell(arity, weight)?;
            let cell: Vec<TreeMonomial> = monos
                .iter()
                .filter(|m| quadratic_restrictions(m).iter().all(|q| !non_minimal.contains(q)))
                .cloned()
                .collect();
            let mismatch = |detail: String| PbwError::BasisMismatch { arity, weight, detail };
            for m in monos.iter() {
                if system.is_normal(m) != cell.binary_search(m).is_ok() {
                    return Err(mismatch(format!("{} is misclassified as normal", p.show(m))));
                }
            }
            let mut images = BTreeSet::new();
            for m in monos.iter() {
                let nf = system.normal_form(m)?;
                if nf.len() != 1 {
                    return Err(mismatch(format!("{} has a non-monomial normal form", p.show(m))));
                }
                images.extend(nf.into_keys());
            }
            if images.iter().ne(cell.iter()) {
                return Err(mismatch("normal forms differ from the basis".into()));
            }
            let classes = table.cell(arity, weight);
            if classes.len() != cell.len() {
                return Err(mismatch(format!("{} basis monomials for {} classes", cell.len(), classes.len())));
            }
            if !cell.is_empty() {
                basis.cells.insert((arity, weight), cell);
            }
        }
    }
    Ok(PbwExtraction { order, system, basis, table })
}

/// The monomials in normal form for `rs`, arities up to `n` (1 for
/// algebras) and weights up to `d`.
pub fn normal_monomials(rs: &RewriteSystem, n: usize, d: usize) -> Result<PbwBasis, PbwError> {
    let p = &rs.presentation;
    let mut enumerator = Enumerator::new(p);
    let mut basis = PbwBasis::default();
    let n = if p.is_algebra() { 1 } else { n };
    for arity in 1..=n {
        for weight in 0..=d {
            let cell: Vec<TreeMonomial> = enumerator.cell(arity, weight)?.iter().filter(|m| rs.is_normal(m)).cloned().collect();
            if !cell.is_empty() {
                basis.cells.insert((arity, weight), cell);
            }
        }
    }
    Ok(basis)
}

/// The basis condition that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbwCondition {
    Identity,
    Generators,
    /// One basis monomial per congruence class.
    RepresentsBasis,
    /// Compositions of basis monomials are basis monomials or rewrite to
    /// strictly smaller ones.
    Composition,
    /// Membership is decided by the quadratic subtrees.
    QuadraticClosure,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{condition:?} fails at {witness}")]
pub struct PbwViolation {
    pub condition: PbwCondition,
    pub witness: String,
}

/// Checks the PBW conditions in every `(arity, weight)` cell of the basis
/// bounds, using the rewriting system for normal forms and its order for
/// comparisons.
pub fn verify_pbw(p: &Presentation, basis: &PbwBasis, rs: &RewriteSystem) -> Result<(), PbwViolation> {
    let table = congruence_classes(p, basis.max_arity().max(1), basis.max_weight()).map_err(|e| PbwViolation {
        condition: PbwCondition::RepresentsBasis,
        witness: e.to_string(),
    })?;
    verify_pbw_in(&table, p, basis, rs)
}

/// [`verify_pbw`] with precomputed congruence classes covering the basis
/// bounds.
pub fn verify_pbw_in(
    table: &ElementTable,
    p: &Presentation,
    basis: &PbwBasis,
    rs: &RewriteSystem,
) -> Result<(), PbwViolation> {
    let fail = |condition, witness: String| Err(PbwViolation { condition, witness });
    let n = basis.max_arity().max(1);
    let d = basis.max_weight();
    if !basis.contains(&TreeMonomial::identity()) {
        return fail(PbwCondition::Identity, "1".into());
    }
    for (g, gen) in p.generators.iter().enumerate() {
        let c = TreeMonomial::corolla(g, gen.arity);
        if gen.arity <= n && d >= 1 && !basis.contains(&c) {
            return fail(PbwCondition::Generators, p.show(&c));
        }
    }
    for arity in 1..=n {
        for weight in 0..=d {
            let mut hit: BTreeMap<usize, usize> = BTreeMap::new();
            for m in basis.cell(arity, weight) {
                *hit.entry(table.class_of(m).expect("monomial in range")).or_default() += 1;
            }
            for &c in table.cell(arity, weight) {
                if hit.get(&c) != Some(&1) {
                    return fail(PbwCondition::RepresentsBasis, p.show(table.class(c).representative()));
                }
            }
        }
    }
    // Rewriting is context-free, so once every rule decreases the order a
    // rewriting sequence certifies that the normal form lies strictly below.
    let order = rs.order.as_ref();
    for (i, r) in rs.rules.iter().enumerate() {
        if !r.rhs.iter().all(|(_, t)| order.is_some_and(|o| o.less(t, &r.lhs))) {
            return fail(PbwCondition::Composition, format!("rule {}", rs.show_rule(i)));
        }
    }
    for (&(n1, w1), outer) in &basis.cells {
        for (&(n2, w2), inner) in &basis.cells {
            if w1 == 0 || w2 == 0 || n1 + n2 - 1 > n || w1 + w2 > d {
                continue;
            }
            let shuffles = pointed_shuffles(n1, n2);
            for a in outer {
                for b in inner {
                    for ps in &shuffles {
                        let c = compose(a, ps, b).expect("valid shuffle");
                        if basis.contains(&c) {
                            continue;
                        }
                        let nf = rs.normal_form(&c).map_err(|e| PbwViolation {
                            condition: PbwCondition::Composition,
                            witness: e.to_string(),
                        })?;
                        let ok = !nf.contains_key(&c) && nf.keys().all(|t| basis.contains(t));
                        if !ok {
                            return fail(PbwCondition::Composition, p.show(&c));
                        }
                    }
                }
            }
        }
    }
    let mut enumerator = Enumerator::new(p);
    for arity in 1..=n {
        for weight in 0..=d {
            let cell = match enumerator.cell(arity, weight) {
                Ok(c) => c,
                Err(e) => return fail(PbwCondition::QuadraticClosure, e.to_string()),
            };
            for m in cell.iter() {
                let by_restrictions = quadratic_restrictions(m).iter().all(|q| basis.contains(q));
                if by_restrictions != basis.contains(m) {
                    return fail(PbwCondition::QuadraticClosure, p.show(m));
                }
            }
        }
    }
    Ok(())
}

/// A failure of one of the two chain/normal-form lemmas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaViolation {
    /// `smaller < larger` but the least label tuple over the fiber of
    /// `smaller` does not precede that of `larger`.
    FiberMinimum { smaller: String, larger: String },
    /// The interval below a one-block top has no increasing chain.
    NoIncreasingChain { top: String },
    /// Normality disagrees with containing the increasing chain in the fiber.
    NormalForm { monomial: String, normal: bool, has_increasing_chain: bool },
}

fn single_block_tops(p: &PartitionPoset) -> Vec<usize> {
    p.tops.iter().copied().filter(|&t| p.elements[t].blocks.len() == 1).collect()
}

/// Least label tuple over the maximal chains whose levelled tree forgets to `a`.
fn fiber_minimum(p: &PartitionPoset, l: &dyn Labelling, a: &TreeMonomial) -> Option<Vec<Label>> {
    fiber(a)
        .iter()
        .filter_map(|t| p.levelled_to_chain(t))
        .map(|c| label_tuple(l, p, &[p.bottom], &c))
        .min()
}

/// For every pair `a < b` of monomials spelled by the maximal chains below a
/// one-block top, compares the least label tuples of their fibers.
pub fn check_fiber_minimum(p: &PartitionPoset, l: &dyn Labelling, order: &DerivedOrder) -> Vec<LemmaViolation> {
    let pres = &p.presentation;
    let mut out = Vec::new();
    for t in single_block_tops(p) {
        let members = &p.table.class(p.elements[t].blocks[0].class).members;
        let mins: HashMap<&TreeMonomial, Option<Vec<Label>>> =
            members.iter().map(|m| (m, fiber_minimum(p, l, m))).collect();
        for b in members {
            // Everything reachable from b by lowering steps lies below it.
            let mut seen: BTreeSet<TreeMonomial> = BTreeSet::new();
            let mut queue = VecDeque::from([b.clone()]);
            while let Some(m) = queue.pop_front() {
                for next in order.decrease_steps(&m) {
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
            for a in &seen {
                let ok = matches!((&mins[a], &mins[b]), (Some(x), Some(y)) if x < y);
                if !ok {
                    out.push(LemmaViolation::FiberMinimum { smaller: pres.show(a), larger: pres.show(b) });
                }
            }
        }
    }
    out
}

/// A monomial below a one-block top is normal exactly when its fiber
/// contains the least increasing chain of `[0̂, top]`.
pub fn check_normal_forms(p: &PartitionPoset, l: &dyn Labelling, rs: &RewriteSystem) -> Vec<LemmaViolation> {
    let pres = &p.presentation;
    let mut out = Vec::new();
    for t in single_block_tops(p) {
        let chains = interval_chains(p, l, &[p.bottom], p.bottom, t);
        // Sorted by label tuple, so the first increasing chain is the least.
        let Some(target) = chains.iter().find(|c| c.increasing).map(|c| &c.chain) else {
            out.push(LemmaViolation::NoIncreasingChain { top: p.display(t) });
            continue;
        };
        for a in &p.table.class(p.elements[t].blocks[0].class).members {
            let has = fiber(a).iter().filter_map(|x| p.levelled_to_chain(x)).any(|c| &c == target);
            let normal = rs.is_normal(a);
            if has != normal {
                out.push(LemmaViolation::NormalForm { monomial: pres.show(a), normal, has_increasing_chain: has });
            }
        }
    }
    out
}
