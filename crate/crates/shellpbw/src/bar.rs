//! Levelled trees of the normalised bar construction restricted to `N(E)`:
//! one generator per level, stacked top-down.

use std::fmt;

use crate::presentation::{compose, GenId, Path, PointedShuffle, Presentation, TreeMonomial};

/// `ν¹ ∘ ν² ∘ ⋯ ∘ ν^l`. Level `j` grafts generator `ν^j` on the partial tree
/// built by levels `1..j`; its shuffle records the positions of the new
/// inputs among the leaves of the enlarged partial tree. The first level
/// always has positions `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelledTree {
    levels: Vec<(GenId, Vec<u32>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BarError {
    #[error("level {level} does not fit: {reason}")]
    InvalidLevel { level: usize, reason: String },
    #[error("level index {index} out of range for {levels} levels")]
    IndexOutOfRange { index: usize, levels: usize },
}

impl LevelledTree {
    /// Validates each level against the arities of `p`.
    pub fn new(p: &Presentation, levels: Vec<(GenId, Vec<u32>)>) -> Result<Self, BarError> {
        let mut arity = 1usize;
        for (j, (g, pos)) in levels.iter().enumerate() {
            let bad = |reason: String| BarError::InvalidLevel { level: j + 1, reason };
            let k = p.generators.get(*g).ok_or_else(|| bad(format!("unknown generator {g}")))?.arity;
            if pos.len() != k {
                return Err(bad(format!("{} positions for a generator of arity {k}", pos.len())));
            }
            PointedShuffle::new(pos.clone()).map_err(|e| bad(e.to_string()))?;
            let total = arity + k - 1;
            if pos[0] as usize > arity || *pos.last().unwrap() as usize > total {
                return Err(bad(format!("positions {pos:?} exceed arity {total}")));
            }
            arity = total;
        }
        Ok(LevelledTree { levels })
    }

    /// Builds without validation; used internally where the levels come
    /// from a tree or a chain.
    pub(crate) fn from_levels(levels: Vec<(GenId, Vec<u32>)>) -> Self {
        LevelledTree { levels }
    }

    pub fn levels(&self) -> &[(GenId, Vec<u32>)] {
        &self.levels
    }

    pub fn weight(&self) -> usize {
        self.levels.len()
    }

    pub fn arity(&self) -> usize {
        1 + self.levels.iter().map(|(_, pos)| pos.len() - 1).sum::<usize>()
    }

    /// Path in the underlying tree of the vertex added at each level.
    pub fn vertex_paths(&self) -> Vec<Path> {
        let mut frontier: Vec<Path> = vec![Vec::new()];
        let mut out = Vec::with_capacity(self.levels.len());
        for (_, pos) in &self.levels {
            let target = pos[0] as usize - 1;
            let vertex = frontier.remove(target);
            let total = frontier.len() + pos.len();
            let mut next = Vec::with_capacity(total);
            let mut rest = frontier.into_iter();
            let mut child = 0;
            for slot in 1..=total as u32 {
                if child < pos.len() && pos[child] == slot {
                    let mut p = vertex.clone();
                    p.push(child);
                    next.push(p);
                    child += 1;
                } else {
                    next.push(rest.next().expect("frontier sizes agree"));
                }
            }
            out.push(vertex);
            frontier = next;
        }
        out
    }

    pub fn display(&self, p: &Presentation) -> String {
        if self.levels.is_empty() {
            return "id".to_string();
        }
        let mut s = String::new();
        for (j, (g, pos)) in self.levels.iter().enumerate() {
            if j > 0 {
                s.push_str(" ∘_");
                if pos.len() <= 1 || pos.windows(2).all(|w| w[1] == w[0] + 1) {
                    s.push_str(&pos[0].to_string());
                } else {
                    let list: Vec<String> = pos.iter().map(|x| x.to_string()).collect();
                    s.push_str(&format!("{{{}}}", list.join(",")));
                }
                s.push(' ');
            }
            s.push_str(&p.generators[*g].name);
        }
        s
    }
}

impl fmt::Display for LevelledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, (g, pos)) in self.levels.iter().enumerate() {
            if j > 0 {
                write!(f, " ")?;
            }
            write!(f, "g{g}@{pos:?}")?;
        }
        Ok(())
    }
}

/// `π`: forgets the levels.
pub fn forget_levels(p: &Presentation, t: &LevelledTree) -> TreeMonomial {
    let mut acc = TreeMonomial::identity();
    for (g, pos) in &t.levels {
        let ps = PointedShuffle::new(pos.clone()).expect("levels are validated");
        acc = compose(&acc, &ps, &TreeMonomial::corolla(*g, p.generators[*g].arity)).expect("levels are validated");
    }
    acc
}

/// Levelled tree of `a` whose levels add the vertices in the given order.
/// The order must list every internal vertex once, each after its parent.
pub fn from_vertex_order(a: &TreeMonomial, order: &[Path]) -> LevelledTree {
    // Frontier: hanging subtrees of the partial tree, by increasing minimum.
    let mut frontier: Vec<Path> = vec![Vec::new()];
    let mut levels = Vec::with_capacity(order.len());
    for v in order {
        let idx = frontier.iter().position(|f| f == v).expect("parent placed before child");
        frontier.remove(idx);
        let node = a.at(v);
        let g = node.root().expect("internal vertex");
        for c in 0..node.children().len() {
            let mut p = v.clone();
            p.push(c);
            frontier.push(p);
        }
        frontier.sort_by_key(|p| a.at(p).min_leaf());
        let pos = (0..node.children().len())
            .map(|c| {
                let mut p = v.clone();
                p.push(c);
                frontier.iter().position(|f| *f == p).unwrap() as u32 + 1
            })
            .collect();
        levels.push((g, pos));
    }
    LevelledTree { levels }
}

/// Exchanges levels `k` and `k + 1` (1-based). `None` when level `k + 1`
/// sits on an output of level `k`.
pub fn exchange(p: &Presentation, t: &LevelledTree, k: usize) -> Result<Option<LevelledTree>, BarError> {
    if k == 0 || k >= t.levels.len() {
        return Err(BarError::IndexOutOfRange { index: k, levels: t.levels.len() });
    }
    let mut paths = t.vertex_paths();
    let upper = &paths[k - 1];
    let lower = &paths[k];
    if lower.len() == upper.len() + 1 && lower.starts_with(upper) {
        return Ok(None);
    }
    paths.swap(k - 1, k);
    let a = forget_levels(p, t);
    Ok(Some(from_vertex_order(&a, &paths)))
}

/// All levelled trees projecting to `a`: one per linear extension of the
/// parent-before-child order on its internal vertices.
pub fn fiber(a: &TreeMonomial) -> Vec<LevelledTree> {
    let vertices = a.vertices();
    let parent: Vec<Option<usize>> = vertices
        .iter()
        .map(|v| if v.is_empty() { None } else { vertices.iter().position(|u| u[..] == v[..v.len() - 1]) })
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; vertices.len()];
    let mut order: Vec<Path> = Vec::with_capacity(vertices.len());
    fn go(
        a: &TreeMonomial,
        vertices: &[Path],
        parent: &[Option<usize>],
        used: &mut [bool],
        order: &mut Vec<Path>,
        out: &mut Vec<LevelledTree>,
    ) {
        if order.len() == vertices.len() {
            out.push(from_vertex_order(a, order));
            return;
        }
        for i in 0..vertices.len() {
            if !used[i] && parent[i].is_none_or(|q| used[q]) {
                used[i] = true;
                order.push(vertices[i].clone());
                go(a, vertices, parent, used, order, out);
                order.pop();
                used[i] = false;
            }
        }
    }
    go(a, &vertices, &parent, &mut used, &mut order, &mut out);
    out.sort();
    out
}

/// All levelled trees of arity `n` and weight `d` over the generators of `p`.
pub fn enumerate_levelled_trees(p: &Presentation, n: usize, d: usize) -> Vec<LevelledTree> {
    let mut out = Vec::new();
    let mut levels = Vec::new();
    fn go(
        p: &Presentation,
        arity: usize,
        n: usize,
        d: usize,
        levels: &mut Vec<(GenId, Vec<u32>)>,
        out: &mut Vec<LevelledTree>,
    ) {
        if levels.len() == d {
            if arity == n {
                out.push(LevelledTree { levels: levels.clone() });
            }
            return;
        }
        for (g, gen) in p.generators.iter().enumerate() {
            let k = gen.arity;
            let total = arity + k - 1;
            // Generators of arity one keep the arity; others must leave room.
            if total > n {
                continue;
            }
            for pos in pointed_positions(arity, k) {
                levels.push((g, pos));
                go(p, total, n, d, levels, out);
                levels.pop();
            }
        }
    }
    go(p, 1, n, d, &mut levels, &mut out);
    out
}

/// Position lists of a `k`-ary vertex grafted on a partial tree of arity `m`.
pub fn pointed_positions(m: usize, k: usize) -> Vec<Vec<u32>> {
    let total = (m + k - 1) as u32;
    let mut out = Vec::new();
    for first in 1..=m as u32 {
        let mut pick = vec![first];
        fn choose(next: u32, total: u32, left: usize, pick: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if left == 0 {
                out.push(pick.clone());
                return;
            }
            for x in next..=total {
                if (total - x) as usize + 1 < left {
                    break;
                }
                pick.push(x);
                choose(x + 1, total, left - 1, pick, out);
                pick.pop();
            }
        }
        choose(first + 1, total, k - 1, &mut pick, &mut out);
    }
    out
}

/// `|N(E)^{(d)}(n)|`, by dynamic programming over (levels, arity).
pub fn count_levelled_trees(p: &Presentation, n: usize, d: usize) -> u128 {
    // ways[m]: levelled trees with the current number of levels and arity m.
    let mut ways = vec![0u128; n + 1];
    if n == 0 {
        return 0;
    }
    ways[1] = 1;
    for _ in 0..d {
        let mut next = vec![0u128; n + 1];
        for m in 1..=n {
            if ways[m] == 0 {
                continue;
            }
            for gen in &p.generators {
                let k = gen.arity;
                let total = m + k - 1;
                if total > n {
                    continue;
                }
                let choices: u128 = (1..=m).map(|i| binomial((m + k - 1 - i) as u128, (k - 1) as u128)).sum();
                next[total] += ways[m] * choices;
            }
        }
        ways = next;
    }
    ways[n]
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
