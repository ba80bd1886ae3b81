//! Order complexes, reduced integral homology, Cohen–Macaulay checks and the
//! comparison between chains of `Π^{(d)}` and levelled trees.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poset::PartitionPoset;
use crate::presentation::{compositions, congruence_classes, ordered_set_partitions, Presentation, TableError};

/// Limit on the number of faces of one dimension fed to the homology
/// computation.
pub const MAX_FACES_PER_DIMENSION: usize = 250_000;

#[derive(Debug, thiserror::Error)]
pub enum TopologyError {
    #[error("the relations contain a cycle through element {0}")]
    NotAPartialOrder(usize),
    #[error("{faces} faces in dimension {dimension} exceed the limit of {limit}")]
    TooLarge { dimension: usize, faces: usize, limit: usize },
    #[error(transparent)]
    Table(#[from] TableError),
}

/// A finite poset given by its strict order relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    pub labels: Vec<String>,
    less: Vec<Vec<bool>>,
    /// A linear extension.
    order: Vec<usize>,
}

impl FinitePoset {
    /// The order generated by `relations` (pairs `x < y`).
    pub fn new(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self, TopologyError> {
        let n = labels.len();
        let mut less = vec![vec![false; n]; n];
        for &(x, y) in relations {
            less[x][y] = true;
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
        if let Some(x) = (0..n).find(|&x| less[x][x]) {
            return Err(TopologyError::NotAPartialOrder(x));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| ((0..n).filter(|&y| less[y][x]).count(), x));
        Ok(FinitePoset { labels, less, order })
    }

    pub fn from_partition_poset(p: &PartitionPoset) -> Self {
        let n = p.len();
        let less = (0..n).map(|x| (0..n).map(|y| x != y && p.le(x, y)).collect()).collect();
        // Elements are sorted by weight, so index order is a linear extension.
        FinitePoset { labels: (0..n).map(|x| p.display(x)).collect(), less, order: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.less[x][y]
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| (0..self.len()).all(|y| !self.less[y][x])).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| (0..self.len()).all(|y| !self.less[x][y])).collect()
    }

    /// Elements strictly between `x` and `y`.
    pub fn open_interval(&self, x: usize, y: usize) -> Vec<usize> {
        self.order.iter().copied().filter(|&z| self.less[x][z] && self.less[z][y]).collect()
    }

    /// The poset without its bottom and top, each removed only when unique.
    pub fn proper_part(&self) -> Vec<usize> {
        let mins = self.minimal_elements();
        let maxs = self.maximal_elements();
        self.order
            .iter()
            .copied()
            .filter(|x| !(mins.len() == 1 && mins[0] == *x) && !(maxs.len() == 1 && maxs[0] == *x))
            .collect()
    }

    /// Shortest and longest maximal chain lengths (in edges) of `[x, y]`.
    fn chain_length_range(&self, x: usize, y: usize) -> (usize, usize) {
        let mut range: HashMap<usize, (usize, usize)> = HashMap::from([(x, (0, 0))]);
        let inside: Vec<usize> = self.order.iter().copied().filter(|&z| self.less[x][z] && (z == y || self.less[z][y])).collect();
        for &z in &inside {
            // covers of z within the interval come from elements below z
            let mut lo = usize::MAX;
            let mut hi = 0;
            for (&w, &(a, b)) in range.iter() {
                let covered = self.less[w][z] && !inside.iter().any(|&u| self.less[w][u] && self.less[u][z]);
                if covered {
                    lo = lo.min(a + 1);
                    hi = hi.max(b + 1);
                }
            }
            range.insert(z, (lo, hi));
        }
        range[&y]
    }
}

/// Chains of a subposet, grouped by dimension (`faces[k]` holds chains of
/// `k + 1` elements, each listed bottom to top).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrderComplex {
    pub vertices: Vec<usize>,
    pub faces: Vec<Vec<Vec<usize>>>,
}

impl OrderComplex {
    pub fn dimension(&self) -> i64 {
        self.faces.len() as i64 - 1
    }

    pub fn face_count(&self, k: usize) -> usize {
        self.faces.get(k).map_or(0, |f| f.len())
    }

    /// Reduced Euler characteristic `Σ_{k ≥ -1} (-1)^k f_k`.
    pub fn reduced_euler_characteristic(&self) -> i64 {
        let mut chi = -1;
        for (k, f) in self.faces.iter().enumerate() {
            chi += if k % 2 == 0 { f.len() as i64 } else { -(f.len() as i64) };
        }
        chi
    }
}

/// All chains of the subposet on `elements`.
pub fn order_complex_on(poset: &FinitePoset, elements: &[usize]) -> OrderComplex {
    let mut vertices: Vec<usize> = poset.order.iter().copied().filter(|x| elements.contains(x)).collect();
    vertices.dedup();
    let mut faces: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = vertices.iter().rev().map(|&v| vec![v]).collect();
    while let Some(chain) = stack.pop() {
        let last = *chain.last().expect("nonempty");
        let k = chain.len() - 1;
        if faces.len() <= k {
            faces.resize(k + 1, Vec::new());
        }
        for &v in vertices.iter().rev() {
            if poset.lt(last, v) {
                let mut next = chain.clone();
                next.push(v);
                stack.push(next);
            }
        }
        faces[k].push(chain);
    }
    for f in &mut faces {
        f.sort();
    }
    OrderComplex { vertices, faces }
}

/// The order complex of the poset, or of its proper part.
pub fn order_complex(poset: &FinitePoset, proper: bool) -> OrderComplex {
    let elements: Vec<usize> = if proper { poset.proper_part() } else { (0..poset.len()).collect() };
    order_complex_on(poset, &elements)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub degree: i64,
    pub rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Reduced homology in degrees `-1..=dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyProfile {
    pub groups: Vec<HomologyGroup>,
    /// `f_{-1} = 1, f_0, f_1, …`
    pub face_counts: Vec<usize>,
}

impl HomologyProfile {
    pub fn group(&self, degree: i64) -> Option<&HomologyGroup> {
        self.groups.iter().find(|g| g.degree == degree)
    }

    pub fn euler_from_ranks(&self) -> i64 {
        self.groups.iter().map(|g| if g.degree.rem_euclid(2) == 0 { g.rank as i64 } else { -(g.rank as i64) }).sum()
    }

    pub fn euler_from_faces(&self) -> i64 {
        self.face_counts.iter().enumerate().map(|(i, &f)| if i % 2 == 1 { f as i64 } else { -(f as i64) }).sum()
    }

    pub fn euler_consistent(&self) -> bool {
        self.euler_from_ranks() == self.euler_from_faces()
    }

    /// Degrees carrying a nonzero group.
    pub fn support(&self) -> Vec<i64> {
        self.groups.iter().filter(|g| !g.is_zero()).map(|g| g.degree).collect()
    }
}

type SparseRow = BTreeMap<usize, BigInt>;

/// Boundary `∂_k : C_k → C_{k-1}` of the augmented chain complex, as rows
/// indexed by `(k-1)`-faces.
fn boundary(c: &OrderComplex, k: usize) -> (Vec<SparseRow>, usize) {
    let cols = &c.faces[k];
    if k == 0 {
        let row: SparseRow = (0..cols.len()).map(|j| (j, BigInt::one())).collect();
        return (vec![row], cols.len());
    }
    let index: HashMap<&Vec<usize>, usize> = c.faces[k - 1].iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut rows: Vec<SparseRow> = vec![SparseRow::new(); c.faces[k - 1].len()];
    for (j, face) in cols.iter().enumerate() {
        for i in 0..face.len() {
            let mut sub = face.clone();
            sub.remove(i);
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            rows[index[&sub]].insert(j, sign);
        }
    }
    (rows, cols.len())
}

pub fn homology(c: &OrderComplex) -> Result<HomologyProfile, TopologyError> {
    for (k, f) in c.faces.iter().enumerate() {
        if f.len() > MAX_FACES_PER_DIMENSION {
            return Err(TopologyError::TooLarge { dimension: k, faces: f.len(), limit: MAX_FACES_PER_DIMENSION });
        }
    }
    let top = c.faces.len();
    // factors[k] = invariant factors of ∂_k for k = 0..top-1.
    let mut factors: Vec<Vec<BigInt>> = Vec::with_capacity(top);
    for k in 0..top {
        let (rows, ncols) = boundary(c, k);
        factors.push(sparse_smith(rows, ncols));
    }
    let mut face_counts = vec![1usize];
    face_counts.extend(c.faces.iter().map(|f| f.len()));
    let mut groups = Vec::new();
    // Degree -1 has C_{-1} = Z; ∂_{-1} = 0.
    for deg in -1..top as i64 {
        let fk = face_counts[(deg + 1) as usize];
        let rank_out = if deg >= 0 { factors[deg as usize].len() } else { 0 };
        let incoming = factors.get((deg + 1) as usize);
        let rank_in = incoming.map_or(0, |f| f.len());
        let torsion = incoming.map_or(Vec::new(), |f| f.iter().filter(|x| !x.is_one()).cloned().collect());
        groups.push(HomologyGroup { degree: deg, rank: fk - rank_out - rank_in, torsion });
    }
    Ok(HomologyProfile { groups, face_counts })
}

/// Nonzero invariant factors of a dense integer matrix, each dividing the
/// next.
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let ncols = m.first().map_or(0, |r| r.len());
    let rows = m
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect())
        .collect();
    sparse_smith(rows, ncols)
}

/// Eliminates unit pivots sparsely, then finishes the remaining block
/// densely.
fn sparse_smith(mut rows: Vec<SparseRow>, ncols: usize) -> Vec<BigInt> {
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.keys() {
            cols[j].push(i);
        }
    }
    let mut alive = vec![true; rows.len()];
    let mut units = 0usize;
    loop {
        // Pivot: a unit entry, preferring short columns.
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            for (&j, v) in r {
                if v.abs().is_one() {
                    let live = cols[j].iter().filter(|&&x| alive[x] && rows[x].contains_key(&j)).count();
                    if best.is_none_or(|(_, _, c)| live < c) {
                        best = Some((i, j, live));
                    }
                }
            }
            if best.is_some_and(|b| b.2 <= 1) {
                break;
            }
        }
        let Some((pi, pj, _)) = best else { break };
        let pivot_row = rows[pi].clone();
        let pv = pivot_row[&pj].clone();
        let others: Vec<usize> = cols[pj].iter().copied().filter(|&x| x != pi && alive[x]).collect();
        for i in others {
            let Some(a) = rows[i].get(&pj).cloned() else { continue };
            let q = &a * &pv; // pv = ±1, so a / pv = a * pv
            for (&j, v) in &pivot_row {
                let entry = rows[i].entry(j).or_insert_with(BigInt::zero);
                let was_zero = entry.is_zero();
                *entry -= &q * v;
                if entry.is_zero() {
                    rows[i].remove(&j);
                } else if was_zero {
                    cols[j].push(i);
                }
            }
        }
        alive[pi] = false;
        units += 1;
        // Column pj is now zero outside the pivot row; the rest of the pivot
        // row is cleared by column operations that touch nothing else.
        for &j in pivot_row.keys() {
            cols[j].retain(|&x| x != pi);
        }
        for r in rows.iter_mut() {
            r.remove(&pj);
        }
    }
    let rest_rows: Vec<&SparseRow> = rows.iter().enumerate().filter(|(i, r)| alive[*i] && !r.is_empty()).map(|(_, r)| r).collect();
    let mut rest_cols: Vec<usize> = rest_rows.iter().flat_map(|r| r.keys().copied()).collect();
    rest_cols.sort_unstable();
    rest_cols.dedup();
    let col_pos: HashMap<usize, usize> = rest_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let dense: Vec<Vec<BigInt>> = rest_rows
        .iter()
        .map(|r| {
            let mut row = vec![BigInt::zero(); rest_cols.len()];
            for (j, v) in r.iter() {
                row[col_pos[j]] = v.clone();
            }
            row
        })
        .collect();
    let mut out = vec![BigInt::one(); units];
    out.extend(dense_smith(dense));
    out
}

fn dense_smith(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry of the remaining block becomes the pivot.
        let Some((pi, pj)) = smallest_entry(&a, t, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = &a[i][t] / &a[t][t];
                    for j in t..cols {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = &a[t][j] / &a[t][t];
                    for i in t..rows {
                        let d = &q * &a[i][t];
                        a[i][j] -= d;
                    }
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                // A smaller remainder sits in row or column t; move it to the pivot.
                let mut best = (t, t);
                for i in t..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            // The pivot must divide the remaining block.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

fn smallest_entry(a: &[Vec<BigInt>], r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(r0) {
        for (j, v) in row.iter().enumerate().skip(c0) {
            if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmReason {
    /// Maximal chains of the interval have different lengths.
    NotPure { shortest: usize, longest: usize },
    /// Homology of the open interval below its top degree.
    Homology(HomologyGroup),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmFailure {
    pub bottom: usize,
    pub top: usize,
    pub reason: CmReason,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CmReport {
    pub intervals_checked: usize,
    pub failures: Vec<CmFailure>,
}

impl CmReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every closed interval `[x, y]` with `x < y`: the interval must be
/// pure and the reduced homology of `(x, y)` must vanish below degree
/// `length - 2`.
pub fn is_cohen_macaulay(poset: &FinitePoset) -> Result<CmReport, TopologyError> {
    let mut report = CmReport::default();
    for &x in &poset.order {
        for &y in &poset.order {
            if !poset.lt(x, y) {
                continue;
            }
            report.intervals_checked += 1;
            let (shortest, longest) = poset.chain_length_range(x, y);
            if shortest != longest {
                report.failures.push(CmFailure { bottom: x, top: y, reason: CmReason::NotPure { shortest, longest } });
                continue;
            }
            if longest < 3 {
                // Open intervals of length one or two are empty or discrete
                // sets; only degree -1 lies below the top and it vanishes.
                continue;
            }
            let c = order_complex_on(poset, &poset.open_interval(x, y));
            let h = homology(&c)?;
            let top = longest as i64 - 2;
            if let Some(g) = h.groups.iter().find(|g| g.degree < top && !g.is_zero()) {
                report.failures.push(CmFailure { bottom: x, top: y, reason: CmReason::Homology(g.clone()) });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarDegree {
    pub degree: usize,
    pub chains: u128,
    pub trees: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarDimensionReport {
    pub degrees: Vec<BarDegree>,
}

impl BarDimensionReport {
    pub fn is_ok(&self) -> bool {
        self.degrees.iter().all(|d| d.chains == d.trees)
    }
}

/// Strict chains `0̂ = x_0 < x_1 < … < x_l = t` ending at a top, per `l`.
pub fn strict_chain_counts(p: &PartitionPoset) -> Vec<u128> {
    let n = p.len();
    let max_len = p.weight;
    let mut counts = vec![0u128; max_len + 1];
    let mut cur = vec![0u128; n];
    cur[p.bottom] = 1;
    counts[0] = p.tops.iter().map(|&t| cur[t]).sum();
    for l in 1..=max_len {
        let mut next = vec![0u128; n];
        for y in 0..n {
            next[y] = (0..n).filter(|&x| x != y && p.le(x, y)).map(|x| cur[x]).sum();
        }
        counts[l] = p.tops.iter().map(|&t| next[t]).sum();
        cur = next;
    }
    counts
}

/// Non-degenerate levelled trees of arity `n`, weight `d` with `l` levels,
/// each level a forest with at least one non-identity element, counted from
/// the congruence classes by inclusion–exclusion over possibly trivial levels.
pub fn levelled_tree_counts(p: &Presentation, n: usize, d: usize) -> Result<Vec<u128>, TopologyError> {
    let table = congruence_classes(p, n, d)?;
    let size = |k: usize, w: usize| -> u128 { if k <= n && w <= d { table.cell(k, w).len() as u128 } else { 0 } };
    // weak[l][(m, w)]: l possibly trivial levels, arity m, weight w, one block.
    let mut weak: Vec<HashMap<(usize, usize), u128>> = Vec::new();
    let mut base = HashMap::new();
    base.insert((1, 0), 1u128);
    weak.push(base);
    let partitions: HashMap<(usize, usize), Vec<Vec<Vec<u32>>>> =
        (1..=n).flat_map(|m| (1..=m).map(move |k| ((m, k), ordered_set_partitions(m, k)))).collect();
    for l in 1..=d {
        let prev = &weak[l - 1];
        let mut cur = HashMap::new();
        for m in 1..=n {
            for w in 0..=d {
                let mut total = 0u128;
                for k in 1..=m {
                    for w0 in 0..=w {
                        let nu = size(k, w0);
                        if nu == 0 {
                            continue;
                        }
                        for blocks in &partitions[&(m, k)] {
                            for ws in compositions(w - w0, k) {
                                let prod: u128 = blocks
                                    .iter()
                                    .zip(&ws)
                                    .map(|(b, &wb)| prev.get(&(b.len(), wb)).copied().unwrap_or(0))
                                    .product();
                                total += nu * prod;
                            }
                        }
                    }
                }
                if total > 0 {
                    cur.insert((m, w), total);
                }
            }
        }
        weak.push(cur);
    }
    // Binomial inversion: W_l = Σ_j C(l, j) S_j.
    let weak_top: Vec<i128> = weak.iter().map(|w| w.get(&(n, d)).copied().unwrap_or(0) as i128).collect();
    let mut strict = Vec::with_capacity(d + 1);
    for l in 0..=d {
        let mut s: i128 = 0;
        for (j, &wj) in weak_top.iter().enumerate().take(l + 1) {
            let c = crate::bar::binomial(l as u128, j as u128) as i128;
            s += if (l - j) % 2 == 0 { c * wj } else { -c * wj };
        }
        strict.push(s.max(0) as u128);
    }
    Ok(strict)
}

/// Compares, degree by degree, chains from `0̂` to a top of `Π^{(d)}` with
/// non-degenerate levelled trees.
pub fn bar_dimension_check(poset: &PartitionPoset) -> Result<BarDimensionReport, TopologyError> {
    let chains = strict_chain_counts(poset);
    let trees = levelled_tree_counts(&poset.presentation, poset.arity, poset.weight)?;
    let degrees = (1..=poset.weight).map(|l| BarDegree { degree: l, chains: chains[l], trees: trees[l] }).collect();
    Ok(BarDimensionReport { degrees })
}
