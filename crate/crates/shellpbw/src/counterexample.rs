//! The two algebra counterexamples: rewriting systems whose normal forms
//! cannot be the minimal chains of any CL-labelling.
//!
//! Chains of an algebra poset spell words read from the top edge down: the
//! edge `x ≺ y` multiplies on the left by its generator.

use std::collections::{BTreeMap, BTreeSet};

use crate::pbw::{check_termination, critical_pairs, orient, MonomialOrder, PbwError, RewriteRule, RewriteSystem, Termination};
use crate::poset::{build_poset_below, PartitionPoset, PosetError};
use crate::presentation::{is_basic_set, with_order_clauses, ParseError, Presentation, TableError, TreeMonomial};
use crate::shelling::{
    certify_el, isomorphism_identifications, obstruction_check, CertifyError, Designation, EdgeVar, Obstruction,
    ObstructionError,
};
use crate::fixtures;

#[derive(Debug, thiserror::Error)]
pub enum CounterexampleError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("{0} is not a word over the generators")]
    BadWord(String),
    #[error("interval {bottom} .. {top} has {count} chains spelling normal words")]
    Ambiguous { bottom: String, top: String, count: usize },
}

/// Parses a word of one-letter generator names.
pub fn word(p: &Presentation, s: &str) -> Result<TreeMonomial, CounterexampleError> {
    let letters = s
        .chars()
        .map(|c| p.generator_id(&c.to_string()).ok_or_else(|| CounterexampleError::BadWord(s.into())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TreeMonomial::word(&letters))
}

/// The word spelled by a chain of an algebra poset.
pub fn chain_word(poset: &PartitionPoset, chain: &[usize]) -> TreeMonomial {
    let letters: Vec<usize> = chain
        .windows(2)
        .rev()
        .map(|w| poset.edge_between(w[0], w[1]).expect("chain of covers").generator)
        .collect();
    TreeMonomial::word(&letters)
}

/// The chain from `0̂` spelling a word: its suffix classes.
pub fn word_chain(poset: &PartitionPoset, w: &TreeMonomial) -> Option<Vec<usize>> {
    let letters = w.letters()?;
    (0..=letters.len())
        .map(|k| {
            let suffix = &letters[letters.len() - k..];
            let m = if suffix.is_empty() { TreeMonomial::identity() } else { TreeMonomial::word(suffix) };
            poset.find(&[m])
        })
        .collect()
}

/// An interval whose chains do not contain exactly one normal word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambiguity {
    pub bottom: usize,
    pub top: usize,
    pub normal_words: Vec<TreeMonomial>,
}

/// Designates, in every rooted interval with several maximal chains, the
/// chain spelling a normal word.
pub fn normal_form_designations(poset: &PartitionPoset, rs: &RewriteSystem) -> Result<Vec<Designation>, Ambiguity> {
    let mut out = Vec::new();
    for x in 0..poset.len() {
        let roots = poset.chains_between(poset.bottom, x);
        for y in 0..poset.len() {
            if x == y || !poset.le(x, y) {
                continue;
            }
            let chains = poset.chains_between(x, y);
            if chains.len() < 2 {
                continue;
            }
            let normal: Vec<&Vec<usize>> = chains.iter().filter(|c| rs.is_normal(&chain_word(poset, c))).collect();
            if normal.len() != 1 {
                return Err(Ambiguity { bottom: x, top: y, normal_words: normal.iter().map(|c| chain_word(poset, c)).collect() });
            }
            for r in &roots {
                out.push(Designation { root: r.clone(), chain: normal[0].clone() });
            }
        }
    }
    Ok(out)
}

/// Identifies first edges of every pair of distinct isomorphic intervals of
/// length at least two.
pub fn self_identifications(poset: &PartitionPoset) -> Vec<(EdgeVar, EdgeVar)> {
    let mut intervals = Vec::new();
    for x in 0..poset.len() {
        for y in 0..poset.len() {
            if poset.le(x, y) && poset.weights[y] >= poset.weights[x] + 2 {
                intervals.push(poset.interval(x, y).expect("comparable"));
            }
        }
    }
    let mut out = Vec::new();
    for (i, a) in intervals.iter().enumerate() {
        for b in &intervals[i + 1..] {
            out.extend(isomorphism_identifications((0, poset, a), (0, poset, b)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelOutcome {
    Consistent,
    Contradiction(Vec<EdgeVar>),
    Ambiguous(Ambiguity),
}

/// Whether the normal words of `rs` can be the minimal chains of a
/// CL-labelling of `poset`, as far as bottom-edge inequalities tell.
pub fn label_outcome(
    poset: &PartitionPoset,
    rs: &RewriteSystem,
    identifications: &[(EdgeVar, EdgeVar)],
) -> Result<LabelOutcome, CounterexampleError> {
    let designations = match normal_form_designations(poset, rs) {
        Ok(d) => d,
        Err(a) => return Ok(LabelOutcome::Ambiguous(a)),
    };
    Ok(match obstruction_check(&[poset], &tagged(designations), identifications)? {
        Obstruction::Contradiction { cycle } => LabelOutcome::Contradiction(cycle),
        Obstruction::Consistent { .. } => LabelOutcome::Consistent,
    })
}

/// `l(0̂ ≺ b) < l(0̂ ≺ c) < l(0̂ ≺ b)` with elements shown by their classes.
pub fn show_cycle(poset: &PartitionPoset, cycle: &[EdgeVar]) -> String {
    let show = |v: &EdgeVar| {
        let chain = &v.1;
        let n = chain.len();
        format!("l({} < {})", poset.display(chain[n - 2]), poset.display(chain[n - 1]))
    };
    let mut parts: Vec<String> = cycle.iter().map(show).collect();
    if let Some(first) = cycle.first() {
        parts.push(show(first));
    }
    parts.join(" < ")
}

#[derive(Debug)]
pub struct FirstReport {
    pub basic_set: bool,
    pub rules: Vec<String>,
    /// Overlap word and whether it is confluent.
    pub critical_pairs: Vec<(String, bool)>,
    pub terminating: bool,
    pub poset: PartitionPoset,
    pub declared: Obstruction,
    pub swapped_rules: Vec<String>,
    pub swapped: Obstruction,
    /// Edge labels realizing the swapped normal forms as an EL-labelling.
    pub swapped_certificate: Option<Vec<i64>>,
}

fn rule_strings(rs: &RewriteSystem) -> Vec<String> {
    let mut v: Vec<String> = (0..rs.rules.len()).map(|i| rs.show_rule(i)).collect();
    v.sort();
    v
}

fn ambiguous(poset: &PartitionPoset, a: &Ambiguity) -> CounterexampleError {
    CounterexampleError::Ambiguous { bottom: poset.display(a.bottom), top: poset.display(a.top), count: a.normal_words.len() }
}

fn tagged(designations: Vec<Designation>) -> Vec<(usize, Designation)> {
    designations.into_iter().map(|d| (0, d)).collect()
}

/// The first counterexample: the poset below `jda`, designated by the normal
/// forms of the declared order and of the order with `i` and `g` exchanged.
pub fn first_counterexample(bound: usize) -> Result<FirstReport, CounterexampleError> {
    let p = fixtures::bundled("cex1");
    let basic_set = is_basic_set(&p, bound)?.is_basic_set();
    let rs = orient(&p, &MonomialOrder::from_presentation(&p)?)?;
    let pairs = critical_pairs(&rs)?;
    let terminating = check_termination(&rs, bound)?.is_ok();
    let poset = build_poset_below(&p, 1, 3, &[vec![word(&p, "jda")?]])?;
    let ids = self_identifications(&poset);
    let declared = match normal_form_designations(&poset, &rs) {
        Ok(d) => obstruction_check(&[&poset], &tagged(d), &ids)?,
        Err(a) => return Err(ambiguous(&poset, &a)),
    };
    let swapped_p = with_order_clauses(&p, fixtures::CEX1_SWAPPED_ORDER)?;
    let swapped_rs = orient(&swapped_p, &MonomialOrder::from_presentation(&swapped_p)?)?;
    let (swapped, swapped_certificate) = match normal_form_designations(&poset, &swapped_rs) {
        Ok(d) => {
            let o = obstruction_check(&[&poset], &tagged(d.clone()), &ids)?;
            // Only intervals from the bottom need an explicit designation for
            // the EL search; it checks every interval itself.
            let from_bottom: Vec<Designation> = d.into_iter().filter(|d| d.root == [poset.bottom]).collect();
            (o, certify_el(&poset, &from_bottom, 4)?)
        }
        Err(a) => return Err(ambiguous(&poset, &a)),
    };
    Ok(FirstReport {
        basic_set,
        rules: rule_strings(&rs),
        critical_pairs: pairs.iter().map(|c| (p.show(&c.overlap), c.confluent)).collect(),
        terminating,
        poset,
        declared,
        swapped_rules: rule_strings(&swapped_rs),
        swapped,
        swapped_certificate,
    })
}

/// Termination and confluence of a completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergence {
    pub terminating: bool,
    /// Overlaps whose branches end in different normal forms.
    pub non_confluent: Vec<String>,
}

impl Convergence {
    pub fn is_convergent(&self) -> bool {
        self.terminating && self.non_confluent.is_empty()
    }
}

/// One way of orienting every relation: each relation rewrites to the term
/// at the given index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub minima: Vec<usize>,
    pub rules: Vec<String>,
    pub label: LabelOutcome,
    /// Only examined for label-consistent completions.
    pub convergence: Option<Convergence>,
}

impl Completion {
    pub fn label_consistent(&self) -> bool {
        self.label == LabelOutcome::Consistent
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseVerdict {
    /// The two fixed orientations already force a cycle of label
    /// inequalities.
    LabelContradiction { cycle: String },
    /// Every completion compatible with the labels fails to converge.
    NonConfluent { witnesses: BTreeSet<String> },
    /// Some completion is both label-consistent and convergent.
    Survives { completions: usize },
}

#[derive(Clone, Debug)]
pub struct OrientationCase {
    /// `hb -> id` (else `id -> hb`).
    pub hb_to_id: bool,
    /// `jb -> kd` (else `kd -> jb`).
    pub jb_to_kd: bool,
    pub fixed: Obstruction,
    pub completions: Vec<Completion>,
    pub verdict: CaseVerdict,
}

impl OrientationCase {
    pub fn title(&self) -> String {
        let a = if self.hb_to_id { "hb -> id" } else { "id -> hb" };
        let b = if self.jb_to_kd { "jb -> kd" } else { "kd -> jb" };
        format!("{a}, {b}")
    }
}

#[derive(Debug)]
pub struct SecondReport {
    pub basic_set: bool,
    pub rules: Vec<String>,
    pub critical_pairs: Vec<(String, bool)>,
    pub terminating: bool,
    pub poset: PartitionPoset,
    pub cases: Vec<OrientationCase>,
}

fn completion_system(p: &Presentation, minima: &[usize]) -> RewriteSystem {
    let mut rules = Vec::new();
    for (i, (r, &m)) in p.relations.iter().zip(minima).enumerate() {
        let terms = r.set_terms().expect("set relations");
        for (k, t) in terms.iter().enumerate() {
            if k != m {
                let mut rule = RewriteRule::set(t.clone(), terms[m].clone());
                rule.relation = Some(i);
                rules.push(rule);
            }
        }
    }
    RewriteSystem::new(p.clone(), rules, None)
}

fn evaluate(
    p: &Presentation,
    poset: &PartitionPoset,
    ids: &[(EdgeVar, EdgeVar)],
    minima: &[usize],
    bound: usize,
) -> Result<Completion, CounterexampleError> {
    let rs = completion_system(p, minima);
    let label = label_outcome(poset, &rs, ids)?;
    let convergence = if label == LabelOutcome::Consistent {
        let terminating = matches!(check_termination(&rs, bound)?, Termination::Terminating { .. });
        let non_confluent = if terminating {
            critical_pairs(&rs)?.iter().filter(|c| !c.confluent).map(|c| p.show(&c.overlap)).collect()
        } else {
            Vec::new()
        };
        Some(Convergence { terminating, non_confluent })
    } else {
        None
    };
    Ok(Completion { minima: minima.to_vec(), rules: rule_strings(&rs), label, convergence })
}

/// The second counterexample: the declared orientation and, for each of the
/// four orientations of `hb = id` and `jb = kd`, every completion to the
/// other relations, judged on the poset below `nea` and `lba`.
pub fn second_counterexample(bound: usize) -> Result<SecondReport, CounterexampleError> {
    let p = fixtures::bundled("cex2");
    let basic_set = is_basic_set(&p, bound)?.is_basic_set();
    let rs = orient(&p, &MonomialOrder::from_presentation(&p)?)?;
    let pairs = critical_pairs(&rs)?;
    let terminating = check_termination(&rs, bound)?.is_ok();
    let poset = build_poset_below(&p, 1, 3, &[vec![word(&p, "nea")?], vec![word(&p, "lba")?]])?;
    let ids = self_identifications(&poset);

    let sizes: Vec<usize> = p.relations.iter().map(|r| r.set_terms().expect("set relations").len()).collect();
    let position = |lhs: &str, rhs: &str| -> Result<(usize, usize), CounterexampleError> {
        let (a, b) = (word(&p, lhs)?, word(&p, rhs)?);
        let (i, r) = p
            .relations
            .iter()
            .enumerate()
            .find(|(_, r)| r.set_terms().is_some_and(|t| t.contains(&a) && t.contains(&b)))
            .ok_or_else(|| CounterexampleError::BadWord(format!("{lhs} = {rhs}")))?;
        let idx = r.set_terms().unwrap().iter().position(|t| *t == b).unwrap();
        Ok((i, idx))
    };

    let mut all: Vec<Vec<usize>> = vec![Vec::new()];
    for &s in &sizes {
        all = all.into_iter().flat_map(|m| (0..s).map(move |k| [m.clone(), vec![k]].concat())).collect();
    }

    let mut cases = Vec::new();
    for (hb_to_id, jb_to_kd) in [(true, true), (true, false), (false, true), (false, false)] {
        let first = if hb_to_id { position("hb", "id")? } else { position("id", "hb")? };
        let second = if jb_to_kd { position("jb", "kd")? } else { position("kd", "jb")? };
        let fixed = fixed_obstruction(&p, &poset, &ids, &[first, second])?;
        let mut completions = Vec::new();
        for m in all.iter().filter(|m| m[first.0] == first.1 && m[second.0] == second.1) {
            completions.push(evaluate(&p, &poset, &ids, m, bound)?);
        }
        let verdict = match &fixed {
            Obstruction::Contradiction { cycle } => CaseVerdict::LabelContradiction { cycle: show_cycle(&poset, cycle) },
            Obstruction::Consistent { .. } => {
                let survivors =
                    completions.iter().filter(|c| c.convergence.as_ref().is_some_and(Convergence::is_convergent)).count();
                if survivors > 0 {
                    CaseVerdict::Survives { completions: survivors }
                } else {
                    let witnesses = completions
                        .iter()
                        .filter_map(|c| c.convergence.as_ref())
                        .flat_map(|c| c.non_confluent.iter().cloned())
                        .collect();
                    CaseVerdict::NonConfluent { witnesses }
                }
            }
        };
        cases.push(OrientationCase { hb_to_id, jb_to_kd, fixed, completions, verdict });
    }
    Ok(SecondReport {
        basic_set,
        rules: rule_strings(&rs),
        critical_pairs: pairs.iter().map(|c| (p.show(&c.overlap), c.confluent)).collect(),
        terminating,
        poset,
        cases,
    })
}

/// Obstruction from the designations forced by the given `(relation, minimum)`
/// choices alone.
fn fixed_obstruction(
    p: &Presentation,
    poset: &PartitionPoset,
    ids: &[(EdgeVar, EdgeVar)],
    fixed: &[(usize, usize)],
) -> Result<Obstruction, CounterexampleError> {
    let mut designations = Vec::new();
    for &(rel, min) in fixed {
        let terms = p.relations[rel].set_terms().expect("set relations");
        let top = poset.find(&[terms[min].clone()]).ok_or_else(|| CounterexampleError::BadWord(p.show(&terms[min])))?;
        // The chain spelling the chosen term, restricted to every lower end
        // from which the class is reached in several ways.
        let chain = word_chain(poset, &terms[min]).ok_or_else(|| CounterexampleError::BadWord(p.show(&terms[min])))?;
        for (k, &x) in chain.iter().enumerate() {
            if poset.chains_between(x, top).len() < 2 {
                continue;
            }
            for r in poset.chains_between(poset.bottom, x) {
                designations.push((0, Designation { root: r, chain: chain[k..].to_vec() }));
            }
        }
    }
    Ok(obstruction_check(&[poset], &designations, ids)?)
}

/// Counts of completions per outcome, for reports.
pub fn tally(case: &OrientationCase) -> BTreeMap<&'static str, usize> {
    let mut t = BTreeMap::new();
    for c in &case.completions {
        let key = match (&c.label, &c.convergence) {
            (LabelOutcome::Contradiction(_), _) => "label contradiction",
            (LabelOutcome::Ambiguous(_), _) => "no unique normal chain",
            (_, Some(v)) if v.is_convergent() => "label-consistent, convergent",
            _ => "label-consistent, not convergent",
        };
        *t.entry(key).or_insert(0) += 1;
    }
    t
}
