//! Congruence classes of monomials, decorated blocks and the basic-set check.

use std::collections::{BTreeMap, HashMap};

use super::monomial::{match_at, substitute, GenId, TreeMonomial};
use super::{ordered_set_partitions, EnumError, Enumerator, Presentation};

pub type ClassId = usize;

/// One element of the set operad `T(E)/(R)`: a congruence class of monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub arity: usize,
    pub weight: usize,
    /// Sorted; the first member is the canonical representative.
    pub members: Vec<TreeMonomial>,
}

impl ClassInfo {
    pub fn representative(&self) -> &TreeMonomial {
        &self.members[0]
    }
}

/// The set operad in arities `1..=max_arity` and weights `0..=max_weight`.
#[derive(Clone, Debug)]
pub struct ElementTable {
    pub max_arity: usize,
    pub max_weight: usize,
    classes: Vec<ClassInfo>,
    index: HashMap<TreeMonomial, ClassId>,
    cells: BTreeMap<(usize, usize), Vec<ClassId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("relation {index} is linear; congruence classes need set relations (use the rewriting module)")]
    LinearRelation { index: usize },
    #[error(transparent)]
    Enumeration(#[from] EnumError),
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Every monomial obtained from `m` by replacing one occurrence of a term of
/// a set relation with another term of the same relation.
pub(crate) fn single_replacements(m: &TreeMonomial, relations: &[Vec<TreeMonomial>]) -> Vec<TreeMonomial> {
    let mut out = Vec::new();
    let vertices = m.vertices();
    for path in &vertices {
        let sub = m.at(path);
        let w = sub.weight();
        for terms in relations {
            for (ti, t) in terms.iter().enumerate() {
                if t.weight() > w {
                    continue;
                }
                if let Some(parts) = match_at(t, sub) {
                    for (tj, other) in terms.iter().enumerate() {
                        if tj != ti {
                            out.push(m.replaced(path, substitute(other, &parts)).normalized());
                        }
                    }
                }
            }
        }
    }
    out
}

/// Congruence classes for arities `1..=n` and weights `0..=d`.
pub fn congruence_classes(p: &Presentation, n: usize, d: usize) -> Result<ElementTable, TableError> {
    congruence_classes_ordered(p, n, d, false)
}

/// Same as [`congruence_classes`]; `reverse` processes each cell in reverse
/// enumeration order (the result must not depend on it).
pub fn congruence_classes_ordered(
    p: &Presentation,
    n: usize,
    d: usize,
    reverse: bool,
) -> Result<ElementTable, TableError> {
    let mut relations = Vec::new();
    for (index, r) in p.relations.iter().enumerate() {
        match r.set_terms() {
            Some(t) => relations.push(t),
            None => return Err(TableError::LinearRelation { index }),
        }
    }
    let mut enumerator = Enumerator::new(p);
    let mut classes = Vec::new();
    for arity in 1..=n.max(1) {
        for weight in 0..=d {
            let mut monos = (*enumerator.cell(arity, weight)?).clone();
            if reverse {
                monos.reverse();
            }
            let pos: HashMap<&TreeMonomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut uf = UnionFind::new(monos.len());
            for (i, m) in monos.iter().enumerate() {
                for r in single_replacements(m, &relations) {
                    let j = *pos.get(&r).expect("replacement stays in its cell");
                    uf.union(i, j);
                }
            }
            let mut groups: BTreeMap<usize, Vec<TreeMonomial>> = BTreeMap::new();
            for (i, m) in monos.iter().enumerate() {
                groups.entry(uf.find(i)).or_default().push(m.clone());
            }
            let mut cell: Vec<ClassInfo> = groups
                .into_values()
                .map(|mut members| {
                    members.sort();
                    ClassInfo { arity, weight, members }
                })
                .collect();
            cell.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
            classes.extend(cell);
        }
    }
    let mut index = HashMap::new();
    let mut cells: BTreeMap<(usize, usize), Vec<ClassId>> = BTreeMap::new();
    for (id, c) in classes.iter().enumerate() {
        for m in &c.members {
            index.insert(m.clone(), id);
        }
        cells.entry((c.arity, c.weight)).or_default().push(id);
    }
    Ok(ElementTable { max_arity: n.max(1), max_weight: d, classes, index, cells })
}

/// A decorated block `ν × (x_1, …, x_k)` of a partition of `[n]`: the
/// support is a bit set (bit `i - 1` for element `i`) and the class acts on
/// the support in increasing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub support: u64,
    pub class: ClassId,
}

impl Block {
    pub fn elements(&self) -> Vec<u32> {
        (0..64).filter(|i| self.support >> i & 1 == 1).map(|i| i + 1).collect()
    }

    pub fn min(&self) -> u32 {
        self.support.trailing_zeros() + 1
    }

    pub fn size(&self) -> usize {
        self.support.count_ones() as usize
    }

    pub fn singleton(i: u32, identity: ClassId) -> Self {
        Block { support: 1 << (i - 1), class: identity }
    }
}

pub fn support_of(elements: &[u32]) -> u64 {
    elements.iter().fold(0, |acc, &i| acc | 1 << (i - 1))
}

impl ElementTable {
    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn class(&self, id: ClassId) -> &ClassInfo {
        &self.classes[id]
    }

    /// Class of a shuffle monomial on `1..=k`.
    pub fn class_of(&self, m: &TreeMonomial) -> Option<ClassId> {
        self.index.get(m).copied()
    }

    pub fn cell(&self, arity: usize, weight: usize) -> &[ClassId] {
        self.cells.get(&(arity, weight)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn identity(&self) -> ClassId {
        self.class_of(&TreeMonomial::identity()).expect("identity is always present")
    }

    pub fn generator_class(&self, p: &Presentation, g: GenId) -> Option<ClassId> {
        self.class_of(&TreeMonomial::corolla(g, p.generators[g].arity))
    }

    /// The representative of the block's class with leaves renamed onto the
    /// block's support.
    pub fn block_tree(&self, b: &Block) -> TreeMonomial {
        let elems = b.elements();
        self.classes[b.class].representative().map_leaves(&|l| elems[l as usize - 1])
    }

    /// `γ(ν; B_1, …, B_k)` where the parts are listed by increasing minimum.
    /// `None` when the composite lies outside the table.
    pub fn compose_blocks(&self, nu: ClassId, parts: &[Block]) -> Option<Block> {
        let trees: Vec<TreeMonomial> = parts.iter().map(|b| self.block_tree(b)).collect();
        let tree = substitute(self.classes[nu].representative(), &trees);
        let (std, labels) = tree.standardize();
        let class = self.class_of(&std)?;
        Some(Block { support: support_of(&labels), class })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Two distinct classes with the same image under `ν ↦ γ(ν; inputs)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicSetWitness {
    pub nu: ClassId,
    pub nu_prime: ClassId,
    pub inputs: Vec<Block>,
    pub image: Block,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicSetReport {
    /// Total weight bound that was checked.
    pub bound: usize,
    pub witness: Option<BasicSetWitness>,
}

impl BasicSetReport {
    pub fn is_basic_set(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks injectivity of `ν ↦ γ(ν; ν_1, …, ν_k)` for all compositions of
/// total weight at most `d`.
pub fn is_basic_set(p: &Presentation, d: usize) -> Result<BasicSetReport, TableError> {
    let table = congruence_classes(p, p.max_arity_for_weight(d), d)?;
    Ok(is_basic_set_in(&table, d))
}

/// Same check against an existing table, which must cover weight `d` and the
/// arities reachable with it.
pub fn is_basic_set_in(table: &ElementTable, d: usize) -> BasicSetReport {
    let max_arity = table.max_arity;
    for (&(k, w), nus) in table.cells.iter() {
        if w > d || nus.len() < 2 {
            continue;
        }
        let budget = d - w;
        // Input tuples: arities a_i, weights w_i with sum w_i <= budget.
        let mut found = None;
        let mut inputs: Vec<(usize, usize)> = Vec::new();
        input_tuples(table, k, budget, max_arity, &mut inputs, &mut |shape| {
            if found.is_some() {
                return;
            }
            let total: usize = shape.iter().map(|s| s.0).sum();
            let sizes: Vec<usize> = shape.iter().map(|s| s.0).collect();
            for blocks in ordered_set_partitions(total, k) {
                if blocks.iter().map(|b| b.len()).collect::<Vec<_>>() != sizes {
                    continue;
                }
                let supports: Vec<u64> = blocks.iter().map(|b| support_of(b)).collect();
                let class_lists: Vec<&[ClassId]> = shape.iter().map(|&(a, wi)| table.cell(a, wi)).collect();
                let mut idx = vec![0usize; k];
                'product: loop {
                    let parts: Vec<Block> = (0..k)
                        .map(|i| Block { support: supports[i], class: class_lists[i][idx[i]] })
                        .collect();
                    let mut seen: HashMap<Block, ClassId> = HashMap::new();
                    for &nu in nus {
                        if let Some(image) = table.compose_blocks(nu, &parts) {
                            if let Some(&prev) = seen.get(&image) {
                                found = Some(BasicSetWitness { nu: prev, nu_prime: nu, inputs: parts.clone(), image });
                                return;
                            }
                            seen.insert(image, nu);
                        }
                    }
                    let mut pos = k;
                    loop {
                        if pos == 0 {
                            break 'product;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < class_lists[pos].len() {
                            continue 'product;
                        }
                        idx[pos] = 0;
                    }
                }
            }
        });
        if found.is_some() {
            return BasicSetReport { bound: d, witness: found };
        }
    }
    BasicSetReport { bound: d, witness: None }
}

/// Calls `f` with every list of `k` (arity, weight) cells that are non-empty
/// in the table, with total weight at most `budget` and total arity at most
/// `max_arity`.
fn input_tuples(
    table: &ElementTable,
    k: usize,
    budget: usize,
    max_arity: usize,
    acc: &mut Vec<(usize, usize)>,
    f: &mut dyn FnMut(&[(usize, usize)]),
) {
    if acc.len() == k {
        f(acc);
        return;
    }
    let used_w: usize = acc.iter().map(|s| s.1).sum();
    let used_a: usize = acc.iter().map(|s| s.0).sum();
    let remaining_slots = k - acc.len() - 1;
    for (&(a, w), ids) in table.cells.iter() {
        if ids.is_empty() || used_w + w > budget || used_a + a + remaining_slots > max_arity {
            continue;
        }
        acc.push((a, w));
        input_tuples(table, k, budget, max_arity, acc, f);
        acc.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelabelError {
    #[error("bijection is not defined on element {0}")]
    Undefined(u32),
    #[error("map is not injective on the block")]
    NotInjective,
    #[error("no `sym` clause gives the action of {permutation:?} on generator {generator}")]
    MissingSymmetry { generator: String, permutation: Vec<u32> },
    #[error("relabelled monomial lies outside the table")]
    OutOfTable,
}

/// Rebuilds a tree whose leaves carry arbitrary distinct labels into a shuffle
/// tree, using the declared symmetric action on generators where a vertex's
/// inputs are out of order.
fn symmetric_normal_form(p: &Presentation, t: &TreeMonomial) -> Result<TreeMonomial, RelabelError> {
    match t {
        TreeMonomial::Leaf(_) => Ok(t.clone()),
        TreeMonomial::Node(g, ch) => {
            let ch: Vec<TreeMonomial> = ch.iter().map(|c| symmetric_normal_form(p, c)).collect::<Result<_, _>>()?;
            let mins: Vec<u32> = ch.iter().map(|c| c.min_leaf()).collect();
            let mut sorted = mins.clone();
            sorted.sort_unstable();
            if sorted == mins {
                return Ok(TreeMonomial::Node(*g, ch));
            }
            let perm: Vec<u32> = mins.iter().map(|m| sorted.binary_search(m).unwrap() as u32 + 1).collect();
            let h = p.symmetries.get(&(*g, perm.clone())).ok_or_else(|| RelabelError::MissingSymmetry {
                generator: p.generators[*g].name.clone(),
                permutation: perm.clone(),
            })?;
            let mut ch = ch;
            ch.sort_by_key(|c| c.min_leaf());
            Ok(TreeMonomial::Node(*h, ch))
        }
    }
}

/// `P̃(f)`: transports a block along a bijection of labels. Increasing maps
/// only rename the support; other maps use the declared symmetric action.
pub fn relabel(
    p: &Presentation,
    table: &ElementTable,
    block: &Block,
    f: &BTreeMap<u32, u32>,
) -> Result<Block, RelabelError> {
    let elems = block.elements();
    let mut image = Vec::with_capacity(elems.len());
    for e in &elems {
        image.push(*f.get(e).ok_or(RelabelError::Undefined(*e))?);
    }
    let mut sorted = image.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != image.len() || sorted.iter().any(|&x| x == 0 || x > 64) {
        return Err(RelabelError::NotInjective);
    }
    if sorted == image {
        return Ok(Block { support: support_of(&image), class: block.class });
    }
    let tree = table.class(block.class).representative().map_leaves(&|l| image[l as usize - 1]);
    let normal = symmetric_normal_form(p, &tree)?;
    let (std, labels) = normal.standardize();
    let class = table.class_of(&std).ok_or(RelabelError::OutOfTable)?;
    Ok(Block { support: support_of(&labels), class })
}
