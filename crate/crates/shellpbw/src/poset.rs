//! Operadic partition posets `Π^{(d)}`: decorated partitions of `[n]` below
//! the weight-`d` elements, with their covering relations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde_json::json;

use crate::bar::{forget_levels, LevelledTree};
use crate::presentation::{
    congruence_classes, relabel, support_of, Block, ClassId, ElementTable, GenId, Presentation, TableError,
    TreeMonomial,
};

/// A decorated partition; blocks are sorted by their minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PPartition {
    pub blocks: Vec<Block>,
}

impl PPartition {
    pub fn new(mut blocks: Vec<Block>) -> Self {
        blocks.sort_by_key(|b| b.min());
        PPartition { blocks }
    }

    pub fn bottom(n: usize, identity: ClassId) -> Self {
        PPartition { blocks: (1..=n as u32).map(|i| Block::singleton(i, identity)).collect() }
    }

    pub fn weight(&self, table: &ElementTable) -> usize {
        self.blocks.iter().map(|b| table.class(b.class).weight).sum()
    }

    /// 1-based index of the block whose minimum is `m`.
    pub fn position_of_min(&self, m: u32) -> Option<usize> {
        self.blocks.iter().position(|b| b.min() == m).map(|i| i + 1)
    }
}

/// A covering relation `lower ≺ upper`: `generator` merges `parts` (blocks of
/// the lower element) into `merged` (a block of the upper element).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverEdge {
    pub lower: usize,
    pub upper: usize,
    pub generator: GenId,
    pub parts: Vec<Block>,
    pub merged: Block,
    /// The one-block difference partition: the generator on the minima of
    /// the parts.
    pub delta: Block,
}

/// `D_λ^ω` and `δ_λ^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferencePartition {
    pub support: u64,
    pub blocks: Vec<Block>,
}

#[derive(Debug, thiserror::Error)]
pub enum PosetError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(
        "not basic-set: {lower} is covered by {upper} through two generators {first} and {second} on the same parts"
    )]
    NotBasicSet { lower: String, upper: String, first: String, second: String },
    #[error("no element of arity {arity} and weight {weight}")]
    NoTopElements { arity: usize, weight: usize },
    #[error("arity {0} is too large (at most 64)")]
    ArityTooLarge(usize),
    #[error("{0} is not below {1}")]
    NotComparable(String, String),
    #[error("monomial {0} is not a valid top element here")]
    InvalidTop(String),
}

#[derive(Debug)]
pub struct PartitionPoset {
    pub presentation: Presentation,
    pub table: ElementTable,
    pub arity: usize,
    pub weight: usize,
    pub elements: Vec<PPartition>,
    pub weights: Vec<usize>,
    pub edges: Vec<CoverEdge>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    index: HashMap<PPartition, usize>,
    /// below[y] has bit x set iff x ≤ y.
    below: Vec<Vec<u64>>,
    pub bottom: usize,
    pub tops: Vec<usize>,
}

/// The closed interval `[bottom, top]`, as indices into its poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub bottom: usize,
    pub top: usize,
    pub elements: Vec<usize>,
}

/// `[x, y]_r`: an interval together with a maximal chain `r` of `[0̂, x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedInterval {
    pub root: Vec<usize>,
    pub interval: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubposetIsomorphism {
    /// Element map, sorted by source index.
    pub g: Vec<(usize, usize)>,
    pub f: BTreeMap<u32, u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiamondKind {
    /// Two merges nested in one block: the chains spell different quadratic
    /// monomials identified by a relation.
    Relation,
    /// Two merges on disjoint blocks: the chains differ by an exchange.
    Exchange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diamond {
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
    pub top: usize,
    pub kind: DiamondKind,
}

/// Builds `Π^{(d)}` in arity `n`: everything below the weight-`d` elements.
pub fn build_poset(p: &Presentation, n: usize, d: usize) -> Result<PartitionPoset, PosetError> {
    if n > 64 {
        return Err(PosetError::ArityTooLarge(n));
    }
    let table = congruence_classes(p, n, d)?;
    let full = support_of(&(1..=n as u32).collect::<Vec<_>>());
    let tops: Vec<PPartition> =
        table.cell(n, d).iter().map(|&c| PPartition { blocks: vec![Block { support: full, class: c }] }).collect();
    if tops.is_empty() {
        return Err(PosetError::NoTopElements { arity: n, weight: d });
    }
    build_from_tops(p.clone(), table, n, d, tops)
}

/// The subposet below the given partitions of `[n]` (an order ideal of the
/// full partition poset). `d` is the weight the table must reach.
pub fn build_poset_below(
    p: &Presentation,
    n: usize,
    d: usize,
    tops: &[Vec<TreeMonomial>],
) -> Result<PartitionPoset, PosetError> {
    let table = congruence_classes(p, n, d)?;
    let mut parts = Vec::new();
    for top in tops {
        let mut blocks = Vec::new();
        for m in top {
            let (std, labels) = m.standardize();
            let class = table.class_of(&std).ok_or_else(|| PosetError::InvalidTop(p.show(m)))?;
            blocks.push(Block { support: support_of(&labels), class });
        }
        let part = PPartition::new(blocks);
        let covered: u64 = part.blocks.iter().fold(0, |acc, b| acc | b.support);
        if covered.count_ones() as usize != n || part.blocks.iter().map(|b| b.size()).sum::<usize>() != n {
            return Err(PosetError::InvalidTop(top.iter().map(|m| p.show(m)).collect::<Vec<_>>().join("|")));
        }
        parts.push(part);
    }
    build_from_tops(p.clone(), table, n, d, parts)
}

fn build_from_tops(
    p: Presentation,
    table: ElementTable,
    n: usize,
    d: usize,
    tops: Vec<PPartition>,
) -> Result<PartitionPoset, PosetError> {
    let mut seen: BTreeSet<PPartition> = tops.iter().cloned().collect();
    let mut queue: VecDeque<PPartition> = tops.iter().cloned().collect();
    // (lower, upper) -> (generator, parts, merged)
    let mut raw: BTreeMap<(PPartition, PPartition), (GenId, Vec<Block>, Block)> = BTreeMap::new();
    while let Some(omega) = queue.pop_front() {
        for (bi, c) in omega.blocks.iter().enumerate() {
            let info = table.class(c.class);
            if info.weight == 0 {
                continue;
            }
            let elems = c.elements();
            for t in &info.members {
                let g = t.root().expect("positive weight");
                let parts: Vec<Block> = t
                    .children()
                    .iter()
                    .map(|ch| {
                        let (std, labels) = ch.standardize();
                        let mapped: Vec<u32> = labels.iter().map(|&l| elems[l as usize - 1]).collect();
                        let class = table.class_of(&std).expect("subtrees of table monomials are in the table");
                        Block { support: support_of(&mapped), class }
                    })
                    .collect();
                let mut blocks: Vec<Block> = omega.blocks.clone();
                blocks.remove(bi);
                blocks.extend(parts.iter().copied());
                let lambda = PPartition::new(blocks);
                let key = (lambda.clone(), omega.clone());
                match raw.get(&key) {
                    Some((h, _, _)) if *h != g => {
                        return Err(PosetError::NotBasicSet {
                            lower: display_partition(&p, &table, &lambda),
                            upper: display_partition(&p, &table, &omega),
                            first: p.generators[*h].name.clone(),
                            second: p.generators[g].name.clone(),
                        });
                    }
                    Some(_) => {}
                    None => {
                        raw.insert(key, (g, parts, *c));
                        if seen.insert(lambda.clone()) {
                            queue.push_back(lambda);
                        }
                    }
                }
            }
        }
    }
    let mut elements: Vec<(usize, PPartition)> = seen.into_iter().map(|e| (e.weight(&table), e)).collect();
    elements.sort();
    let weights: Vec<usize> = elements.iter().map(|e| e.0).collect();
    let elements: Vec<PPartition> = elements.into_iter().map(|e| e.1).collect();
    let index: HashMap<PPartition, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let mut edges: Vec<CoverEdge> = raw
        .into_iter()
        .map(|((lo, hi), (generator, parts, merged))| {
            let mins: Vec<u32> = parts.iter().map(|b| b.min()).collect();
            let gen_class = table.generator_class(&p, generator).expect("generators are in the table");
            CoverEdge {
                lower: index[&lo],
                upper: index[&hi],
                generator,
                parts,
                merged,
                delta: Block { support: support_of(&mins), class: gen_class },
            }
        })
        .collect();
    edges.sort_by_key(|e| (e.lower, e.upper));
    let mut up = vec![Vec::new(); elements.len()];
    let mut down = vec![Vec::new(); elements.len()];
    for (i, e) in edges.iter().enumerate() {
        up[e.lower].push(i);
        down[e.upper].push(i);
    }
    let words = elements.len().div_ceil(64);
    let mut below = vec![vec![0u64; words]; elements.len()];
    // Elements are sorted by weight, so lower covers come first.
    for y in 0..elements.len() {
        below[y][y / 64] |= 1 << (y % 64);
        for &e in &down[y] {
            let x = edges[e].lower;
            let (lo, hi) = below.split_at_mut(y);
            for (a, b) in hi[0].iter_mut().zip(&lo[x]) {
                *a |= *b;
            }
        }
    }
    let bottom = index[&PPartition::bottom(n, table.identity())];
    let tops: Vec<usize> = {
        let mut t: Vec<usize> = tops.iter().map(|t| index[t]).collect();
        t.sort_unstable();
        t.dedup();
        t
    };
    Ok(PartitionPoset { presentation: p, table, arity: n, weight: d, elements, weights, edges, up, down, index, below, bottom, tops })
}

pub fn display_block(p: &Presentation, table: &ElementTable, b: &Block) -> String {
    let tree = table.block_tree(b);
    if p.is_algebra() {
        return p.show(&tree);
    }
    match tree {
        TreeMonomial::Leaf(i) => i.to_string(),
        t => p.show(&t),
    }
}

pub fn display_partition(p: &Presentation, table: &ElementTable, x: &PPartition) -> String {
    x.blocks.iter().map(|b| display_block(p, table, b)).collect::<Vec<_>>().join("|")
}

impl PartitionPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: &PPartition) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Index of the partition whose blocks are the given monomials (leaf
    /// labels give the supports).
    pub fn find(&self, blocks: &[TreeMonomial]) -> Option<usize> {
        let mut bs = Vec::new();
        for m in blocks {
            let (std, labels) = m.standardize();
            bs.push(Block { support: support_of(&labels), class: self.table.class_of(&std)? });
        }
        self.index_of(&PPartition::new(bs))
    }

    pub fn up_edges(&self, x: usize) -> &[usize] {
        &self.up[x]
    }

    pub fn down_edges(&self, x: usize) -> &[usize] {
        &self.down[x]
    }

    pub fn upper_covers(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.up[x].iter().map(|&e| self.edges[e].upper)
    }

    pub fn lower_covers(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.down[x].iter().map(|&e| self.edges[e].lower)
    }

    pub fn edge_between(&self, x: usize, y: usize) -> Option<&CoverEdge> {
        self.up[x].iter().map(|&e| &self.edges[e]).find(|e| e.upper == y)
    }

    /// Order relation from the Hasse diagram.
    pub fn le(&self, x: usize, y: usize) -> bool {
        self.below[y][x / 64] >> (x % 64) & 1 == 1
    }

    pub fn display(&self, x: usize) -> String {
        display_partition(&self.presentation, &self.table, &self.elements[x])
    }

    pub fn display_block(&self, b: &Block) -> String {
        display_block(&self.presentation, &self.table, b)
    }

    /// The edge set as readable `lower -> upper` strings, sorted.
    pub fn edge_strings(&self) -> Vec<String> {
        let mut v: Vec<String> =
            self.edges.iter().map(|e| format!("{} -> {}", self.display(e.lower), self.display(e.upper))).collect();
        v.sort();
        v
    }

    /// `ν_l` for every block of `ω`, if `λ ≤ ω`: the middle element and the
    /// blocks of `λ` it composes.
    pub fn middles(&self, lambda: &PPartition, omega: &PPartition) -> Option<Vec<(ClassId, Vec<Block>, Block)>> {
        middles(&self.table, lambda, omega)
    }

    pub fn difference(&self, x: usize, y: usize) -> Result<DifferencePartition, PosetError> {
        difference(&self.table, &self.elements[x], &self.elements[y])
            .ok_or_else(|| PosetError::NotComparable(self.display(x), self.display(y)))
    }

    pub fn interval(&self, x: usize, y: usize) -> Result<Interval, PosetError> {
        if !self.le(x, y) {
            return Err(PosetError::NotComparable(self.display(x), self.display(y)));
        }
        let elements = (x..=y).filter(|&z| self.le(x, z) && self.le(z, y)).collect();
        Ok(Interval { bottom: x, top: y, elements })
    }

    pub fn rooted_interval(&self, root: Vec<usize>, x: usize, y: usize) -> Result<RootedInterval, PosetError> {
        let interval = self.interval(x, y)?;
        let valid = root.first() == Some(&self.bottom)
            && root.last() == Some(&x)
            && root.windows(2).all(|w| self.edge_between(w[0], w[1]).is_some());
        if !valid {
            return Err(PosetError::NotComparable(self.display(self.bottom), self.display(x)));
        }
        Ok(RootedInterval { root, interval })
    }

    /// Maximal chains of `[x, y]`, in lexicographic order of element indices.
    pub fn chains_between(&self, x: usize, y: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut chain = vec![x];
        self.extend_chains(y, &mut chain, &mut out);
        out
    }

    fn extend_chains(&self, y: usize, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *chain.last().unwrap();
        if last == y {
            out.push(chain.clone());
            return;
        }
        let mut next: Vec<usize> = self.upper_covers(last).filter(|&z| self.le(z, y)).collect();
        next.sort_unstable();
        for z in next {
            chain.push(z);
            self.extend_chains(y, chain, out);
            chain.pop();
        }
    }

    /// All maximal chains, from `0̂` to each top.
    pub fn maximal_chains(&self) -> Vec<Vec<usize>> {
        self.tops.iter().flat_map(|&t| self.chains_between(self.bottom, t)).collect()
    }

    /// Level `j` of the tree is the `j`-th edge counted from the top.
    pub fn chain_to_levelled(&self, chain: &[usize]) -> LevelledTree {
        let mut levels = Vec::with_capacity(chain.len().saturating_sub(1));
        for w in chain.windows(2).rev() {
            let e = self.edge_between(w[0], w[1]).expect("consecutive chain elements are covers");
            let lower = &self.elements[w[0]];
            let pos = e.parts.iter().map(|b| lower.position_of_min(b.min()).unwrap() as u32).collect();
            levels.push((e.generator, pos));
        }
        LevelledTree::from_levels(levels)
    }

    /// Inverse of [`Self::chain_to_levelled`] for maximal chains.
    pub fn levelled_to_chain(&self, t: &LevelledTree) -> Option<Vec<usize>> {
        if t.arity() != self.arity {
            return None;
        }
        let a = forget_levels(&self.presentation, t);
        let paths = t.vertex_paths();
        let mut chain = Vec::with_capacity(paths.len() + 1);
        for j in (0..=paths.len()).rev() {
            let placed: BTreeSet<&Vec<usize>> = paths[..j].iter().collect();
            // Frontier after j levels: maximal subtrees with no placed vertex.
            let mut frontier: Vec<Vec<usize>> = Vec::new();
            let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
            while let Some(path) = stack.pop() {
                if placed.contains(&path) {
                    for c in 0..a.at(&path).children().len() {
                        let mut q = path.clone();
                        q.push(c);
                        stack.push(q);
                    }
                } else {
                    frontier.push(path);
                }
            }
            let mut blocks = Vec::new();
            for f in frontier {
                let (std, labels) = a.at(&f).standardize();
                blocks.push(Block { support: support_of(&labels), class: self.table.class_of(&std)? });
            }
            chain.push(self.index_of(&PPartition::new(blocks))?);
        }
        Some(chain)
    }

    /// Union of the `D` sets over the covering relations of an interval.
    pub fn support_set(&self, iv: &Interval) -> BTreeSet<u32> {
        let mut acc = 0u64;
        for &x in &iv.elements {
            for &e in &self.up[x] {
                let edge = &self.edges[e];
                if self.le(edge.upper, iv.top) {
                    acc |= edge.delta.support;
                }
            }
        }
        (0..64).filter(|i| acc >> i & 1 == 1).map(|i| i + 1).collect()
    }

    /// Upper covers of `x` inside the interval, as edge indices.
    fn up_within(&self, iv: &Interval, x: usize) -> Vec<usize> {
        self.up[x].iter().copied().filter(|&e| self.le(self.edges[e].upper, iv.top)).collect()
    }

    /// All diamonds `(g, x, y, h)` with `x < y` as indices.
    pub fn diamonds(&self) -> Vec<Diamond> {
        let mut out = Vec::new();
        for g in 0..self.len() {
            let mut covers: Vec<usize> = self.upper_covers(g).collect();
            covers.sort_unstable();
            for (i, &x) in covers.iter().enumerate() {
                for &y in &covers[i + 1..] {
                    let ux: BTreeSet<usize> = self.upper_covers(x).collect();
                    let mut common: Vec<usize> = self.upper_covers(y).filter(|h| ux.contains(h)).collect();
                    common.sort_unstable();
                    for h in common {
                        let kind = match self.difference(g, h).map(|d| d.blocks.len()) {
                            Ok(1) => DiamondKind::Relation,
                            _ => DiamondKind::Exchange,
                        };
                        out.push(Diamond { bottom: g, left: x, right: y, top: h, kind });
                    }
                }
            }
        }
        out
    }

    /// The quadratic monomial spelled by `g ≺ x ≺ h` inside the one block of
    /// `h` where both merges happen (leaves standardized).
    pub fn quadratic_monomial(&self, g: usize, x: usize, h: usize) -> Option<TreeMonomial> {
        let e1 = self.edge_between(g, x)?;
        let e2 = self.edge_between(x, h)?;
        if !e2.parts.contains(&e1.merged) {
            return None;
        }
        let inner = TreeMonomial::Node(e1.generator, e1.parts.iter().map(|b| TreeMonomial::Leaf(b.min())).collect());
        let children = e2
            .parts
            .iter()
            .map(|b| if *b == e1.merged { inner.clone() } else { TreeMonomial::Leaf(b.min()) })
            .collect();
        Some(TreeMonomial::Node(e2.generator, children).standardize().0)
    }

    /// Searches for a subposet isomorphism between `a` (in `self`) and `b`
    /// (in `other`). The integer map is forced to be the increasing bijection
    /// between the supports, and the element map is then forced edge by edge
    /// from the bottom.
    pub fn is_isomorphic(&self, a: &Interval, other: &PartitionPoset, b: &Interval) -> Option<SubposetIsomorphism> {
        if a.elements.len() != b.elements.len() {
            return None;
        }
        let e1 = self.support_set(a);
        let e2 = other.support_set(b);
        if e1.len() != e2.len() {
            return None;
        }
        let f: BTreeMap<u32, u32> = e1.iter().copied().zip(e2.iter().copied()).collect();
        let mut g: BTreeMap<usize, usize> = BTreeMap::new();
        let mut used: BTreeSet<usize> = BTreeSet::new();
        g.insert(a.bottom, b.bottom);
        used.insert(b.bottom);
        let mut queue = VecDeque::from([a.bottom]);
        while let Some(x) = queue.pop_front() {
            let gx = g[&x];
            let ups_a = self.up_within(a, x);
            let ups_b = other.up_within(b, gx);
            if ups_a.len() != ups_b.len() {
                return None;
            }
            for ea in ups_a {
                let edge = &self.edges[ea];
                let moved = relabel(&self.presentation, &self.table, &edge.delta, &f).ok()?;
                let rep = self.table.class(moved.class).representative();
                let target = ups_b.iter().map(|&eb| &other.edges[eb]).find(|eb| {
                    eb.delta.support == moved.support && other.table.class(eb.delta.class).representative() == rep
                })?;
                match g.get(&edge.upper) {
                    Some(&y) if y != target.upper => return None,
                    Some(_) => {}
                    None => {
                        if !used.insert(target.upper) {
                            return None;
                        }
                        g.insert(edge.upper, target.upper);
                        queue.push_back(edge.upper);
                    }
                }
            }
        }
        if g.len() != a.elements.len() {
            return None;
        }
        Some(SubposetIsomorphism { g: g.into_iter().collect(), f })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let elements: Vec<serde_json::Value> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let blocks: Vec<serde_json::Value> = x
                    .blocks
                    .iter()
                    .map(|b| json!({"support": b.elements(), "element": self.display_block(b)}))
                    .collect();
                json!({"id": i, "weight": self.weights[i], "label": self.display(i), "blocks": blocks})
            })
            .collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                json!({
                    "lower": e.lower,
                    "upper": e.upper,
                    "generator": self.presentation.generators[e.generator].name,
                    "delta": {"support": e.delta.elements(), "element": self.display_block(&e.delta)},
                })
            })
            .collect();
        json!({
            "presentation": self.presentation.name,
            "arity": self.arity,
            "weight": self.weight,
            "bottom": self.bottom,
            "tops": self.tops,
            "elements": elements,
            "edges": edges,
        })
    }

    /// Graphviz rendering, bottom at the bottom. `highlight` edges are drawn
    /// bold (e.g. an increasing chain).
    pub fn to_dot(&self, label_edges: bool, highlight: &[(usize, usize)]) -> String {
        let mut s = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=plaintext];\n");
        for i in 0..self.len() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", self.display(i).replace('"', "\\\""));
        }
        for e in &self.edges {
            let mut attrs = Vec::new();
            if label_edges {
                attrs.push(format!("label=\"{}\"", self.display_block(&e.delta)));
            }
            if highlight.contains(&(e.lower, e.upper)) {
                attrs.push("style=bold".to_string());
            }
            let attrs = if attrs.is_empty() { String::new() } else { format!(" [{}]", attrs.join(", ")) };
            let _ = writeln!(s, "  n{} -> n{}{attrs};", e.lower, e.upper);
        }
        s.push_str("}\n");
        s
    }
}

fn middles(table: &ElementTable, lambda: &PPartition, omega: &PPartition) -> Option<Vec<(ClassId, Vec<Block>, Block)>> {
    let mut out = Vec::with_capacity(omega.blocks.len());
    let mut covered = 0u64;
    for c in &omega.blocks {
        let parts: Vec<Block> = lambda.blocks.iter().copied().filter(|b| b.support & !c.support == 0).collect();
        let union = parts.iter().fold(0u64, |acc, b| acc | b.support);
        if union != c.support {
            return None;
        }
        covered |= union;
        let inner: usize = parts.iter().map(|b| table.class(b.class).weight).sum();
        let outer = table.class(c.class).weight.checked_sub(inner)?;
        let nu = table.cell(parts.len(), outer).iter().copied().find(|&nu| table.compose_blocks(nu, &parts) == Some(*c))?;
        out.push((nu, parts, *c));
    }
    let all = lambda.blocks.iter().fold(0u64, |acc, b| acc | b.support);
    (covered == all).then_some(out)
}

/// `λ ≤ ω` by direct decomposition: every block of `ω` must be `γ(ν; …)` of
/// the blocks of `λ` it contains.
pub fn leq(table: &ElementTable, lambda: &PPartition, omega: &PPartition) -> bool {
    middles(table, lambda, omega).is_some()
}

/// `(D_λ^ω, δ_λ^ω)`; `None` when `λ ≰ ω`.
pub fn difference(table: &ElementTable, lambda: &PPartition, omega: &PPartition) -> Option<DifferencePartition> {
    let id = table.identity();
    let mut support = 0u64;
    let mut blocks = Vec::new();
    for (nu, parts, _) in middles(table, lambda, omega)? {
        if nu == id {
            continue;
        }
        let mins: Vec<u32> = parts.iter().map(|b| b.min()).collect();
        let s = support_of(&mins);
        support |= s;
        blocks.push(Block { support: s, class: nu });
    }
    blocks.sort_by_key(|b| b.min());
    Some(DifferencePartition { support, blocks })
}
