//! Shuffle tree monomials and pointed-shuffle composition.

use std::cmp::Ordering;
use std::fmt;

/// Index of a generator inside its [`Presentation`](super::Presentation).
pub type GenId = usize;

/// A planar rooted tree whose internal vertices carry generators and whose
/// leaves carry a permutation of `1..=n`.
///
/// Shuffle trees keep the children of every vertex sorted by their minimal
/// leaf. Words of an algebra are chains of unary vertices ending in `Leaf(1)`,
/// the first letter being the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreeMonomial {
    Leaf(u32),
    Node(GenId, Vec<TreeMonomial>),
}

/// One step of the preorder traversal, used by the canonical monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Leaf(u32),
    Gen(GenId),
}

/// Path from the root: the sequence of child indices.
pub type Path = Vec<usize>;

impl TreeMonomial {
    pub fn identity() -> Self {
        TreeMonomial::Leaf(1)
    }

    /// The generator `g` with inputs `1..=arity` in order.
    pub fn corolla(g: GenId, arity: usize) -> Self {
        TreeMonomial::Node(g, (1..=arity as u32).map(TreeMonomial::Leaf).collect())
    }

    /// The word `letters[0] letters[1] ...` of unary generators.
    pub fn word(letters: &[GenId]) -> Self {
        letters
            .iter()
            .rev()
            .fold(TreeMonomial::Leaf(1), |acc, &g| TreeMonomial::Node(g, vec![acc]))
    }

    /// Letters of a unary monomial, root first. `None` if some vertex is not unary.
    pub fn letters(&self) -> Option<Vec<GenId>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                TreeMonomial::Leaf(_) => return Some(out),
                TreeMonomial::Node(g, ch) if ch.len() == 1 => {
                    out.push(*g);
                    cur = &ch[0];
                }
                TreeMonomial::Node(..) => return None,
            }
        }
    }

    pub fn weight(&self) -> usize {
        match self {
            TreeMonomial::Leaf(_) => 0,
            TreeMonomial::Node(_, ch) => 1 + ch.iter().map(|c| c.weight()).sum::<usize>(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            TreeMonomial::Leaf(_) => 1,
            TreeMonomial::Node(_, ch) => ch.iter().map(|c| c.arity()).sum(),
        }
    }

    pub fn min_leaf(&self) -> u32 {
        match self {
            TreeMonomial::Leaf(i) => *i,
            TreeMonomial::Node(_, ch) => ch.iter().map(|c| c.min_leaf()).min().unwrap_or(u32::MAX),
        }
    }

    /// Leaf labels in planar (left to right) order.
    pub fn leaves(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<u32>) {
        match self {
            TreeMonomial::Leaf(i) => out.push(*i),
            TreeMonomial::Node(_, ch) => ch.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn root(&self) -> Option<GenId> {
        match self {
            TreeMonomial::Leaf(_) => None,
            TreeMonomial::Node(g, _) => Some(*g),
        }
    }

    pub fn children(&self) -> &[TreeMonomial] {
        match self {
            TreeMonomial::Leaf(_) => &[],
            TreeMonomial::Node(_, ch) => ch,
        }
    }

    /// Whether the leaves form a permutation of `1..=n` and the children of
    /// every vertex are sorted by strictly increasing minimal leaf.
    pub fn is_shuffle(&self) -> bool {
        let mut leaves = self.leaves();
        leaves.sort_unstable();
        if leaves.iter().enumerate().any(|(i, &l)| l != i as u32 + 1) {
            return false;
        }
        self.mins_increasing()
    }

    fn mins_increasing(&self) -> bool {
        match self {
            TreeMonomial::Leaf(_) => true,
            TreeMonomial::Node(_, ch) => {
                ch.windows(2).all(|w| w[0].min_leaf() < w[1].min_leaf())
                    && ch.iter().all(|c| c.mins_increasing())
            }
        }
    }

    /// Sorts the children of every vertex by minimal leaf. This is only a
    /// planar rearrangement; callers use it where the relative order of
    /// minima is already the intended one.
    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn normalize(&mut self) {
        if let TreeMonomial::Node(_, ch) = self {
            ch.iter_mut().for_each(|c| c.normalize());
            ch.sort_by_key(|c| c.min_leaf());
        }
    }

    pub fn map_leaves(&self, f: &impl Fn(u32) -> u32) -> Self {
        match self {
            TreeMonomial::Leaf(i) => TreeMonomial::Leaf(f(*i)),
            TreeMonomial::Node(g, ch) => TreeMonomial::Node(*g, ch.iter().map(|c| c.map_leaves(f)).collect()),
        }
    }

    /// Renumbers the leaves order-preservingly to `1..=k`. Returns the
    /// renumbered tree together with the sorted original labels.
    pub fn standardize(&self) -> (TreeMonomial, Vec<u32>) {
        let mut labels = self.leaves();
        labels.sort_unstable();
        let tree = self.map_leaves(&|l| labels.binary_search(&l).expect("leaf present") as u32 + 1);
        (tree, labels)
    }

    pub fn tokens(&self) -> Vec<Token> {
        let mut out = Vec::new();
        self.push_tokens(&mut out);
        out
    }

    fn push_tokens(&self, out: &mut Vec<Token>) {
        match self {
            TreeMonomial::Leaf(i) => out.push(Token::Leaf(*i)),
            TreeMonomial::Node(g, ch) => {
                out.push(Token::Gen(*g));
                ch.iter().for_each(|c| c.push_tokens(out));
            }
        }
    }

    /// Paths of the internal vertices in preorder.
    pub fn vertices(&self) -> Vec<Path> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_vertices(&mut path, &mut out);
        out
    }

    fn collect_vertices(&self, path: &mut Path, out: &mut Vec<Path>) {
        if let TreeMonomial::Node(_, ch) = self {
            out.push(path.clone());
            for (i, c) in ch.iter().enumerate() {
                path.push(i);
                c.collect_vertices(path, out);
                path.pop();
            }
        }
    }

    pub fn at(&self, path: &[usize]) -> &TreeMonomial {
        path.iter().fold(self, |t, &i| &t.children()[i])
    }

    /// Replaces the subtree at `path`, without re-sorting.
    pub fn replaced(&self, path: &[usize], new: TreeMonomial) -> TreeMonomial {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match self {
                TreeMonomial::Node(g, ch) => {
                    let mut ch = ch.clone();
                    ch[i] = ch[i].replaced(rest, new);
                    TreeMonomial::Node(*g, ch)
                }
                TreeMonomial::Leaf(_) => panic!("path leads below a leaf"),
            },
        }
    }

    /// Internal edges as (parent path, child index), in preorder of the child.
    pub fn internal_edges(&self) -> Vec<(Path, usize)> {
        let mut out = Vec::new();
        for p in self.vertices() {
            for (i, c) in self.at(&p).children().iter().enumerate() {
                if matches!(c, TreeMonomial::Node(..)) {
                    out.push((p.clone(), i));
                }
            }
        }
        out
    }
}

impl Ord for TreeMonomial {
    /// Weight, then arity, then the preorder token sequence (generators by
    /// declaration index, leaves below generators).
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then(self.arity().cmp(&other.arity()))
            .then_with(|| self.tokens().cmp(&other.tokens()))
    }
}

impl PartialOrd for TreeMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The datum of a pointed shuffle `∘_{i,w}`, stored as the positions of the
/// inner factor's leaves inside the composite (1-based, increasing). The
/// target index is the first position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointedShuffle {
    positions: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompositionError {
    #[error("invalid pointed shuffle: {0}")]
    InvalidShuffle(String),
}

impl PointedShuffle {
    pub fn new(positions: Vec<u32>) -> Result<Self, CompositionError> {
        if positions.is_empty() {
            return Err(CompositionError::InvalidShuffle("no positions".into()));
        }
        if positions[0] == 0 || positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CompositionError::InvalidShuffle(format!(
                "positions {positions:?} must be positive and strictly increasing"
            )));
        }
        Ok(PointedShuffle { positions })
    }

    /// Plain partial composition `∘_i`: the inner leaves sit consecutively.
    pub fn consecutive(i: u32, inner_arity: usize) -> Self {
        PointedShuffle { positions: (i..i + inner_arity as u32).collect() }
    }

    pub fn target(&self) -> u32 {
        self.positions[0]
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }
}

/// `outer ∘_{i,w} inner`: grafts `inner` on input `i` of `outer`, the inner
/// leaves landing on the shuffle's positions and the remaining outer leaves
/// on the complementary positions in increasing order.
pub fn compose(
    outer: &TreeMonomial,
    ps: &PointedShuffle,
    inner: &TreeMonomial,
) -> Result<TreeMonomial, CompositionError> {
    let m = outer.arity() as u32;
    let k = inner.arity() as u32;
    let i = ps.target();
    if ps.positions.len() as u32 != k {
        return Err(CompositionError::InvalidShuffle(format!(
            "{} positions for an inner factor of arity {k}",
            ps.positions.len()
        )));
    }
    let total = m + k - 1;
    if i > m || *ps.positions.last().unwrap() > total {
        return Err(CompositionError::InvalidShuffle(format!(
            "positions {:?} do not fit arities {m} and {k}",
            ps.positions
        )));
    }
    let complement: Vec<u32> = (1..=total).filter(|p| !ps.positions.contains(p)).collect();
    let inner_mapped = inner.map_leaves(&|l| ps.positions[l as usize - 1]);
    fn graft(t: &TreeMonomial, i: u32, complement: &[u32], inner: &TreeMonomial) -> TreeMonomial {
        match t {
            TreeMonomial::Leaf(j) if *j == i => inner.clone(),
            TreeMonomial::Leaf(j) => {
                let idx = if *j < i { *j - 1 } else { *j - 2 };
                TreeMonomial::Leaf(complement[idx as usize])
            }
            TreeMonomial::Node(g, ch) => {
                TreeMonomial::Node(*g, ch.iter().map(|c| graft(c, i, complement, inner)).collect())
            }
        }
    }
    Ok(graft(outer, i, &complement, &inner_mapped).normalized())
}

/// Substitutes the subtrees `parts[j]` for the leaves `j + 1` of `pattern`.
/// The parts keep their own leaf labels; the result is re-sorted.
pub fn substitute(pattern: &TreeMonomial, parts: &[TreeMonomial]) -> TreeMonomial {
    fn go(t: &TreeMonomial, parts: &[TreeMonomial]) -> TreeMonomial {
        match t {
            TreeMonomial::Leaf(j) => parts[*j as usize - 1].clone(),
            TreeMonomial::Node(g, ch) => TreeMonomial::Node(*g, ch.iter().map(|c| go(c, parts)).collect()),
        }
    }
    go(pattern, parts).normalized()
}

/// Tries to match `pattern` (a shuffle tree on `1..=k`) as a divisor rooted
/// at `t`. On success returns the hanging subtrees indexed by pattern leaf.
/// The hanging subtrees must have minima ordered like the pattern's leaves.
pub fn match_at(pattern: &TreeMonomial, t: &TreeMonomial) -> Option<Vec<TreeMonomial>> {
    let k = pattern.arity();
    let mut slots: Vec<Option<TreeMonomial>> = vec![None; k];
    fn go(p: &TreeMonomial, t: &TreeMonomial, slots: &mut [Option<TreeMonomial>]) -> bool {
        match (p, t) {
            (TreeMonomial::Leaf(j), _) => {
                slots[*j as usize - 1] = Some(t.clone());
                true
            }
            (TreeMonomial::Node(g, pc), TreeMonomial::Node(h, tc)) => {
                g == h && pc.len() == tc.len() && pc.iter().zip(tc).all(|(a, b)| go(a, b, slots))
            }
            _ => false,
        }
    }
    if !go(pattern, t, &mut slots) {
        return None;
    }
    let parts: Vec<TreeMonomial> = slots.into_iter().map(|s| s.expect("every leaf bound")).collect();
    if parts.windows(2).all(|w| w[0].min_leaf() < w[1].min_leaf()) {
        Some(parts)
    } else {
        None
    }
}

/// The quadratic monomial carried by the internal edge `(parent, child)`:
/// the two generators at the ends of the edge, with hanging subtrees replaced
/// by leaves renumbered order-preservingly.
pub fn restrict_to_edge(t: &TreeMonomial, parent: &[usize], child: usize) -> Option<TreeMonomial> {
    let top = t.at(parent);
    let (g, ch) = match top {
        TreeMonomial::Node(g, ch) => (*g, ch),
        TreeMonomial::Leaf(_) => return None,
    };
    let (h, grand) = match ch.get(child)? {
        TreeMonomial::Node(h, grand) => (*h, grand),
        TreeMonomial::Leaf(_) => return None,
    };
    let lower: Vec<TreeMonomial> = grand.iter().map(|c| TreeMonomial::Leaf(c.min_leaf())).collect();
    let upper: Vec<TreeMonomial> = ch
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == child {
                TreeMonomial::Node(h, lower.clone())
            } else {
                TreeMonomial::Leaf(c.min_leaf())
            }
        })
        .collect();
    Some(TreeMonomial::Node(g, upper).standardize().0)
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Leaf(i) => write!(f, "{i}"),
            Token::Gen(g) => write!(f, "g{g}"),
        }
    }
}
