//! Finitely presented weight-graded shuffle operads and algebras in sets.

mod monomial;
mod parse;
mod table;

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::One;

pub use monomial::{
    compose, match_at, restrict_to_edge, substitute, CompositionError, GenId, Path, PointedShuffle, Token,
    TreeMonomial,
};
pub use parse::{parse_monomial, parse_presentation, with_order_clauses, ParseError};
pub use table::{
    congruence_classes, congruence_classes_ordered, is_basic_set, is_basic_set_in, relabel, support_of, BasicSetReport, BasicSetWitness, Block, ClassId, ClassInfo,
    ElementTable, RelabelError, TableError,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub arity: usize,
}

impl Generator {
    /// Generators always have weight one.
    pub fn weight(&self) -> usize {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Kind {
    #[default]
    Operad,
    Algebra,
}

/// A homogeneous relation. Set relations identify all their terms; linear
/// relations rewrite a monomial into a rational combination.
#[derive(Clone, Debug, PartialEq)]
pub enum Relation {
    Set(Vec<TreeMonomial>),
    Linear { lhs: TreeMonomial, rhs: Vec<(BigRational, TreeMonomial)> },
}

impl Relation {
    pub fn monomials(&self) -> Vec<&TreeMonomial> {
        match self {
            Relation::Set(terms) => terms.iter().collect(),
            Relation::Linear { lhs, rhs } => std::iter::once(lhs).chain(rhs.iter().map(|(_, m)| m)).collect(),
        }
    }

    /// Number of equations stated: a chain `M1 = M2 = M3` counts as two.
    pub fn equation_count(&self) -> usize {
        self.monomials().len() - 1
    }

    pub fn weight(&self) -> usize {
        self.monomials()[0].weight()
    }

    pub fn arity(&self) -> usize {
        self.monomials()[0].arity()
    }

    pub fn is_set(&self) -> bool {
        match self {
            Relation::Set(_) => true,
            Relation::Linear { rhs, .. } => rhs.len() == 1 && rhs[0].0.is_one(),
        }
    }

    /// Terms of a set relation (a linear relation `m = 1*m'` counts as one).
    pub fn set_terms(&self) -> Option<Vec<TreeMonomial>> {
        match self {
            Relation::Set(terms) => Some(terms.clone()),
            Relation::Linear { lhs, rhs } if self.is_set() => Some(vec![lhs.clone(), rhs[0].1.clone()]),
            Relation::Linear { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Presentation {
    pub name: String,
    pub kind: Kind,
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    /// Declared chains `g0 < g1 < …` of the generator order.
    pub orders: Vec<Vec<GenId>>,
    /// `(g, σ) ↦ h` means `g(x_σ(1), …, x_σ(k)) = h(x_1, …, x_k)`.
    pub symmetries: BTreeMap<(GenId, Vec<u32>), GenId>,
}

/// Strict partial order on generators, the transitive closure of the
/// declared chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorOrder {
    less: Vec<Vec<bool>>,
}

impl GeneratorOrder {
    pub fn less(&self, a: GenId, b: GenId) -> bool {
        self.less[a][b]
    }

    pub fn compare(&self, a: GenId, b: GenId) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        if a == b {
            Some(Equal)
        } else if self.less[a][b] {
            Some(Less)
        } else if self.less[b][a] {
            Some(Greater)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("enumeration exceeded the cap of {cap} monomials")]
    LimitExceeded { cap: usize },
}

/// Default cap on the number of monomials produced by one enumeration.
pub const DEFAULT_ENUM_CAP: usize = 5_000_000;

impl Presentation {
    pub fn trivial() -> Self {
        Presentation::default()
    }

    pub fn generator_id(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn is_algebra(&self) -> bool {
        self.kind == Kind::Algebra
    }

    pub fn generator_order(&self) -> Result<GeneratorOrder, ParseError> {
        let n = self.generators.len();
        let mut less = vec![vec![false; n]; n];
        for chain in &self.orders {
            for w in chain.windows(2) {
                less[w[0]][w[1]] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if less[i][k] {
                    for j in 0..n {
                        if less[k][j] {
                            less[i][j] = true;
                        }
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| less[i][i]) {
            return Err(ParseError::CyclicOrder { name: self.generators[i].name.clone() });
        }
        Ok(GeneratorOrder { less })
    }

    /// Renders a monomial: words for algebras, nested terms otherwise.
    pub fn show(&self, m: &TreeMonomial) -> String {
        let name = |g: GenId| self.generators.get(g).map(|x| x.name.clone()).unwrap_or_else(|| format!("g{g}"));
        if self.kind == Kind::Algebra {
            if let Some(letters) = m.letters() {
                if letters.is_empty() {
                    return "1".to_string();
                }
                let single = self.generators.iter().all(|g| g.name.chars().count() == 1);
                let parts: Vec<String> = letters.into_iter().map(name).collect();
                return parts.join(if single { "" } else { "*" });
            }
        }
        fn go(m: &TreeMonomial, name: &dyn Fn(GenId) -> String, out: &mut String) {
            match m {
                TreeMonomial::Leaf(i) => out.push_str(&i.to_string()),
                TreeMonomial::Node(g, ch) => {
                    out.push_str(&name(*g));
                    out.push('(');
                    for (i, c) in ch.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(c, name, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut out = String::new();
        go(m, &name, &mut out);
        out
    }

    /// Total number of equations over all relation statements.
    pub fn equation_count(&self) -> usize {
        self.relations.iter().map(|r| r.equation_count()).sum()
    }

    pub fn max_generator_arity(&self) -> usize {
        self.generators.iter().map(|g| g.arity).max().unwrap_or(1)
    }

    /// Largest arity reachable with weight at most `d`.
    pub fn max_arity_for_weight(&self, d: usize) -> usize {
        if self.is_algebra() {
            1
        } else {
            1 + d * (self.max_generator_arity().max(1) - 1)
        }
    }
}

/// Memoized enumerator of shuffle trees on the standard leaf set `1..=m`.
pub struct Enumerator<'a> {
    pres: &'a Presentation,
    memo: HashMap<(usize, usize), std::rc::Rc<Vec<TreeMonomial>>>,
    produced: usize,
    cap: usize,
}

impl<'a> Enumerator<'a> {
    pub fn new(pres: &'a Presentation) -> Self {
        Self::with_cap(pres, DEFAULT_ENUM_CAP)
    }

    pub fn with_cap(pres: &'a Presentation, cap: usize) -> Self {
        Enumerator { pres, memo: HashMap::new(), produced: 0, cap }
    }

    /// All shuffle monomials of arity `m` and weight exactly `w`, sorted.
    pub fn cell(&mut self, m: usize, w: usize) -> Result<std::rc::Rc<Vec<TreeMonomial>>, EnumError> {
        if let Some(v) = self.memo.get(&(m, w)) {
            return Ok(v.clone());
        }
        let mut out = Vec::new();
        if w == 0 {
            if m == 1 {
                out.push(TreeMonomial::Leaf(1));
            }
        } else {
            let gens = self.pres.generators.clone();
            for (g, gen) in gens.iter().enumerate() {
                let k = gen.arity;
                if k > m {
                    continue;
                }
                for blocks in ordered_set_partitions(m, k) {
                    for weights in compositions(w - 1, k) {
                        let mut child_lists = Vec::with_capacity(k);
                        let mut empty = false;
                        for (b, &wb) in blocks.iter().zip(&weights) {
                            let cell = self.cell(b.len(), wb)?;
                            if cell.is_empty() {
                                empty = true;
                                break;
                            }
                            child_lists.push((b.clone(), cell));
                        }
                        if empty {
                            continue;
                        }
                        let mut idx = vec![0usize; k];
                        'product: loop {
                            let children = child_lists
                                .iter()
                                .zip(&idx)
                                .map(|((b, cell), &i)| cell[i].map_leaves(&|l| b[l as usize - 1]))
                                .collect();
                            out.push(TreeMonomial::Node(g, children));
                            self.produced += 1;
                            if self.produced > self.cap {
                                return Err(EnumError::LimitExceeded { cap: self.cap });
                            }
                            let mut pos = k;
                            loop {
                                if pos == 0 {
                                    break 'product;
                                }
                                pos -= 1;
                                idx[pos] += 1;
                                if idx[pos] < child_lists[pos].1.len() {
                                    continue 'product;
                                }
                                idx[pos] = 0;
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        let rc = std::rc::Rc::new(out);
        self.memo.insert((m, w), rc.clone());
        Ok(rc)
    }
}

/// Complete, duplicate-free list of shuffle monomials of arity `n` and weight
/// `0..=d`, grouped by weight.
pub fn enumerate_monomials(p: &Presentation, n: usize, d: usize) -> Result<Vec<Vec<TreeMonomial>>, EnumError> {
    enumerate_monomials_capped(p, n, d, DEFAULT_ENUM_CAP)
}

pub fn enumerate_monomials_capped(
    p: &Presentation,
    n: usize,
    d: usize,
    cap: usize,
) -> Result<Vec<Vec<TreeMonomial>>, EnumError> {
    let mut e = Enumerator::with_cap(p, cap);
    (0..=d).map(|w| e.cell(n, w).map(|c| (*c).clone())).collect()
}

/// Set partitions of `1..=m` into exactly `k` blocks, blocks listed by
/// increasing minimum and each block sorted.
pub fn ordered_set_partitions(m: usize, k: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut assign = vec![0usize; m];
    fn go(i: usize, used: usize, m: usize, k: usize, assign: &mut Vec<usize>, out: &mut Vec<Vec<Vec<u32>>>) {
        if m - i < k - used {
            return;
        }
        if i == m {
            if used == k {
                let mut blocks = vec![Vec::new(); k];
                for (x, &b) in assign.iter().enumerate() {
                    blocks[b].push(x as u32 + 1);
                }
                out.push(blocks);
            }
            return;
        }
        for b in 0..used.min(k) {
            assign[i] = b;
            go(i + 1, used, m, k, assign, out);
        }
        if used < k {
            assign[i] = used;
            go(i + 1, used + 1, m, k, assign, out);
        }
    }
    if k == 0 {
        return if m == 0 { vec![vec![]] } else { vec![] };
    }
    go(0, 0, m, k, &mut assign, &mut out);
    out
}

/// Weak compositions of `total` into `k` non-negative parts.
pub fn compositions(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if k == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
