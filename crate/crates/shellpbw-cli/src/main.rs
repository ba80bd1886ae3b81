//! `shellpbw`: build partition posets, check labellings, derive PBW bases
//! and compute homology from a presentation file.
//!
//! Exit codes: 0 success, 1 a checked property fails, 2 bad input (usage,
//! unreadable or unparsable files, unsupported labelling), 3 the
//! presentation is not basic-set, 4 a computation limit or internal error.

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use shellpbw::counterexample::{self, CaseVerdict, LabelOutcome};
use shellpbw::fixtures;
use shellpbw::pbw::{
    check_termination, critical_pairs, derived_order, extract_pbw, normal_monomials, orient, PbwError, show_lincomb, verify_pbw,
    verify_pbw_in, MonomialOrder, PbwBasis, RewriteSystem, Termination,
};
use shellpbw::poset::{build_poset, display_block, PartitionPoset, PosetError};
use shellpbw::presentation::{
    congruence_classes, is_basic_set_in, parse_monomial, parse_presentation, with_order_clauses, Presentation,
};
use shellpbw::shelling::{
    certified_labelling, check_iso_compatibility, interval_chains, is_cl_labelling, ComLabelling, Labelling,
    PermLabelling,
};
use shellpbw::topology::{bar_dimension_check, homology, is_cohen_macaulay, order_complex, order_complex_on, FinitePoset};

#[derive(Parser)]
#[command(name = "shellpbw", version, about = "Partition posets, shellings and PBW bases of set operads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the poset of partitions below the one-block elements of a weight.
    BuildPoset(PosetArgs),
    /// Check a labelling for CL-shellability and isomorphism compatibility.
    CheckShelling(ShellingArgs),
    /// Orient the relations, list critical pairs and extract a PBW basis.
    DerivePbw(PbwArgs),
    /// Rewrite a monomial to normal form, printing each step.
    Rewrite(RewriteArgs),
    /// Critical pairs and termination of the oriented relations.
    CriticalPairs(SystemArgs),
    /// Check injectivity of compositions up to a weight bound.
    CheckBasicSet(BasicSetArgs),
    /// Homology of order complexes, Cohen–Macaulay and bar-dimension checks.
    Homology(PosetArgs),
    /// Impossibility reports for the two algebra counterexamples.
    Counterexample(CounterexampleArgs),
}

#[derive(Args)]
struct PosetArgs {
    /// Presentation file, or the name of a bundled one (com, perm, algA, algB, cex1, cex2).
    presentation: String,
    #[arg(long)]
    arity: usize,
    #[arg(long)]
    weight: usize,
    /// Weight bound of the basic-set check (defaults to the weight).
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, conflicts_with = "dot")]
    json: bool,
    #[arg(long)]
    dot: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabellingName {
    Com,
    Perm,
    /// An EL-labelling found by exhaustive search (small posets only).
    Certified,
}

#[derive(Args)]
struct ShellingArgs {
    presentation: String,
    #[arg(long)]
    arity: usize,
    #[arg(long)]
    weight: usize,
    #[arg(long, value_enum)]
    labelling: LabellingName,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SystemArgs {
    presentation: String,
    /// Replace the declared generator order by the `order` clauses of a file.
    #[arg(long, conflicts_with = "labelling")]
    order_file: Option<String>,
    /// Orient by the order derived from a labelling instead.
    #[arg(long, value_enum)]
    labelling: Option<LabellingName>,
    /// Weight bound of the termination search.
    #[arg(long, default_value_t = 4)]
    bound: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PbwArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long)]
    arity: usize,
    #[arg(long)]
    weight: usize,
}

#[derive(Args)]
struct RewriteArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// The monomial, e.g. `mu(1,mu(2,3))` or `lgb`.
    monomial: String,
}

#[derive(Args)]
struct BasicSetArgs {
    presentation: String,
    #[arg(long, default_value_t = 4)]
    bound: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
    which: u8,
    #[arg(long, default_value_t = 4)]
    bound: usize,
    #[arg(long)]
    json: bool,
}

/// A failed run: exit code and message.
struct Failure(u8, String);

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure(2, e.to_string())
    }

    fn compute(e: impl std::fmt::Display) -> Self {
        Failure(4, e.to_string())
    }
}

/// Output text and whether every checked property held.
struct Outcome {
    text: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildPoset(a) => cmd_build_poset(&a),
        Command::CheckShelling(a) => cmd_check_shelling(&a),
        Command::DerivePbw(a) => cmd_derive_pbw(&a),
        Command::Rewrite(a) => cmd_rewrite(&a),
        Command::CriticalPairs(a) => cmd_critical_pairs(&a),
        Command::CheckBasicSet(a) => cmd_check_basic_set(&a),
        Command::Homology(a) => cmd_homology(&a),
        Command::Counterexample(a) => cmd_counterexample(&a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn load(arg: &str) -> Result<Presentation, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{arg}: {e}")))?;
        return parse_presentation(&text).map_err(|e| Failure::input(format!("{arg}: {e}")));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    match fixtures::source(stem) {
        Some(text) => parse_presentation(text).map_err(Failure::compute),
        None => Err(Failure::input(format!("{arg}: no such file or bundled presentation"))),
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Fails with exit code 3 when compositions are not injective up to `bound`.
fn require_basic_set(p: &Presentation, bound: usize) -> Result<(), Failure> {
    let (ok, text) = basic_set_report(p, bound)?;
    if ok {
        Ok(())
    } else {
        Err(Failure(3, text.trim_end().to_string()))
    }
}

fn basic_set_report(p: &Presentation, bound: usize) -> Result<(bool, String), Failure> {
    let table = congruence_classes(p, p.max_arity_for_weight(bound), bound).map_err(Failure::compute)?;
    let report = is_basic_set_in(&table, bound);
    Ok(match &report.witness {
        None => (true, format!("basic-set up to weight {bound}\n")),
        Some(w) => {
            let inputs: Vec<String> = w.inputs.iter().map(|b| display_block(p, &table, b)).collect();
            let text = format!(
                "not basic-set (checked up to weight {bound}): {} and {} both compose with ({}) to {}\n",
                p.show(table.class(w.nu).representative()),
                p.show(table.class(w.nu_prime).representative()),
                inputs.join(", "),
                display_block(p, &table, &w.image),
            );
            (false, text)
        }
    })
}

fn poset_for(p: &Presentation, n: usize, d: usize) -> Result<PartitionPoset, Failure> {
    build_poset(p, n, d).map_err(|e| match e {
        PosetError::NotBasicSet { .. } => Failure(3, e.to_string()),
        PosetError::NoTopElements { .. } | PosetError::ArityTooLarge(_) | PosetError::InvalidTop(_) => Failure::input(e),
        _ => Failure::compute(e),
    })
}

fn cmd_build_poset(a: &PosetArgs) -> Result<Outcome, Failure> {
    let p = load(&a.presentation)?;
    require_basic_set(&p, a.bound.unwrap_or(a.weight))?;
    let poset = poset_for(&p, a.arity, a.weight)?;
    let text = if a.dot {
        poset.to_dot(true, &[])
    } else if a.json {
        render(&poset.to_json())
    } else {
        let mut s = format!(
            "poset of {} in arity {} and weight {}: {} element(s), {} edge(s), {} top(s)\n",
            p.name,
            a.arity,
            a.weight,
            poset.len(),
            poset.edges.len(),
            poset.tops.len()
        );
        for x in 0..poset.len() {
            let _ = writeln!(s, "  [{x}] weight {} {}", poset.weights[x], poset.display(x));
        }
        for e in poset.edge_strings() {
            let _ = writeln!(s, "  {e}");
        }
        s
    };
    Ok(Outcome { text, ok: true })
}

fn labelling_for(name: LabellingName, poset: &PartitionPoset) -> Result<Box<dyn Labelling>, Failure> {
    Ok(match name {
        LabellingName::Com => Box::new(ComLabelling),
        LabellingName::Perm => Box::new(PermLabelling::for_poset(poset).map_err(Failure::input)?),
        LabellingName::Certified => match certified_labelling(poset, 4).map_err(Failure::compute)? {
            Some(l) => Box::new(l),
            None => return Err(Failure(1, "no EL-labelling with labels 1..4 exists on this poset".into())),
        },
    })
}

fn chain_json(poset: &PartitionPoset, chain: &[usize]) -> Value {
    json!(chain.iter().map(|&x| poset.display(x)).collect::<Vec<_>>())
}

fn cmd_check_shelling(a: &ShellingArgs) -> Result<Outcome, Failure> {
    let p = load(&a.presentation)?;
    let poset = poset_for(&p, a.arity, a.weight)?;
    let l = labelling_for(a.labelling, &poset)?;
    let cl = is_cl_labelling(&poset, l.as_ref());
    let compat = check_iso_compatibility(&[&poset], l.as_ref());
    let ok = cl.is_ok() && compat.is_ok();
    if a.json {
        let mut intervals = Vec::new();
        for x in 0..poset.len() {
            let roots = poset.chains_between(poset.bottom, x);
            let roots = if l.is_el() { roots.into_iter().take(1).collect() } else { roots };
            for y in 0..poset.len() {
                if x == y || !poset.le(x, y) {
                    continue;
                }
                for r in &roots {
                    let chains = interval_chains(&poset, l.as_ref(), r, x, y);
                    let increasing: Vec<Value> =
                        chains.iter().filter(|c| c.increasing).map(|c| chain_json(&poset, &c.chain)).collect();
                    let all: Vec<Value> = chains
                        .iter()
                        .map(|c| json!({"chain": chain_json(&poset, &c.chain), "labels": c.labels, "increasing": c.increasing}))
                        .collect();
                    intervals.push(json!({
                        "root": chain_json(&poset, r),
                        "bottom": poset.display(x),
                        "top": poset.display(y),
                        "increasing": increasing,
                        "chains": all,
                    }));
                }
            }
        }
        let failures: Vec<Value> = cl
            .failures
            .iter()
            .map(|f| json!({"root": chain_json(&poset, &f.root), "bottom": poset.display(f.bottom), "top": poset.display(f.top), "violation": format!("{:?}", f.violation)}))
            .collect();
        let v = json!({
            "labelling": l.name(),
            "cl": {"ok": cl.is_ok(), "intervals_checked": cl.intervals_checked, "failures": failures},
            "compatibility": {
                "ok": compat.is_ok(),
                "intervals": compat.intervals,
                "isomorphic_pairs": compat.isomorphic_pairs,
                "witness": compat.witness.as_ref().map(|w| w.reason.clone()),
            },
            "intervals": intervals,
        });
        return Ok(Outcome { text: render(&v), ok });
    }
    let mut s = format!("labelling {} on {} (arity {}, weight {})\n", l.name(), p.name, a.arity, a.weight);
    if cl.is_ok() {
        let _ = writeln!(s, "CL: ok ({} rooted intervals)", cl.intervals_checked);
    } else {
        let _ = writeln!(s, "CL: {} failure(s) among {} rooted intervals", cl.failures.len(), cl.intervals_checked);
        for f in &cl.failures {
            let root: Vec<String> = f.root.iter().map(|&x| poset.display(x)).collect();
            let _ = writeln!(s, "  [{}, {}] root {}: {:?}", poset.display(f.bottom), poset.display(f.top), root.join(" < "), f.violation);
        }
    }
    match &compat.witness {
        None => {
            let _ = writeln!(s, "compatibility: ok ({} intervals, {} isomorphic pairs)", compat.intervals, compat.isomorphic_pairs);
        }
        Some(w) => {
            let _ = writeln!(
                s,
                "compatibility: fails on [{}, {}] vs [{}, {}]: {}",
                poset.display(w.first.1.bottom),
                poset.display(w.first.1.top),
                poset.display(w.second.1.bottom),
                poset.display(w.second.1.top),
                w.reason
            );
        }
    }
    Ok(Outcome { text: s, ok })
}

/// Posets whose length-two intervals carry the quadratic relations, used to
/// derive an order from a labelling.
fn labelling_family(p: &Presentation, name: LabellingName) -> Result<Vec<PartitionPoset>, Failure> {
    if let LabellingName::Certified = name {
        let n = if p.is_algebra() { 1 } else { p.max_arity_for_weight(2) };
        let d = if p.is_algebra() { 3 } else { 2 };
        return Ok(vec![poset_for(p, n, d)?]);
    }
    let mut family = Vec::new();
    for w in 2..=3 {
        for k in 1..=p.max_arity_for_weight(w).min(4) {
            match build_poset(p, k, w) {
                Ok(x) => family.push(x),
                Err(PosetError::NoTopElements { .. }) => {}
                Err(e) => return Err(Failure::compute(e)),
            }
        }
    }
    if family.is_empty() {
        return Err(Failure::input("no poset of weight 2 or 3 to derive an order from"));
    }
    Ok(family)
}

fn system_for(a: &SystemArgs, p: &Presentation) -> Result<(Presentation, RewriteSystem, String), Failure> {
    if let Some(name) = a.labelling {
        let family = labelling_family(p, name)?;
        let l = labelling_for(name, &family[0])?;
        let refs: Vec<&PartitionPoset> = family.iter().collect();
        let order = derived_order(&refs, l.as_ref()).map_err(Failure::compute)?;
        let rs = orient(p, &MonomialOrder::Derived(order)).map_err(orient_failure)?;
        return Ok((p.clone(), rs, format!("order derived from the {} labelling", l.name())));
    }
    let (p, source) = match &a.order_file {
        Some(f) => {
            let text = std::fs::read_to_string(f).map_err(|e| Failure::input(format!("{f}: {e}")))?;
            (with_order_clauses(p, &text).map_err(|e| Failure::input(format!("{f}: {e}")))?, format!("order from {f}"))
        }
        None => (p.clone(), "declared generator order".to_string()),
    };
    let order = MonomialOrder::from_presentation(&p).map_err(Failure::input)?;
    let rs = orient(&p, &order).map_err(orient_failure)?;
    Ok((p, rs, source))
}

/// An order that cannot orient the relations is a failed check, not a crash.
fn orient_failure(e: PbwError) -> Failure {
    match e {
        PbwError::Incomparable { .. } | PbwError::NoLeadingTerm { .. } | PbwError::NotAntisymmetric { .. } => {
            Failure(1, format!("{e} (try --labelling or --order-file)"))
        }
        e => Failure::compute(e),
    }
}

fn termination_line(p: &Presentation, rs: &RewriteSystem, t: &Termination) -> String {
    match t {
        Termination::Terminating { monomials_checked } => format!("terminating ({monomials_checked} monomials checked)"),
        Termination::RuleNotDecreasing { rule } => format!("rule {} does not decrease the order", rs.show_rule(*rule)),
        Termination::Cycle { witness } => {
            let w: Vec<String> = witness.iter().map(|m| p.show(m)).collect();
            format!("rewriting cycle {} -> {}", w.join(" -> "), w[0])
        }
    }
}

fn pairs_section(p: &Presentation, rs: &RewriteSystem, bound: usize) -> Result<(String, Value, bool), Failure> {
    let pairs = critical_pairs(rs).map_err(Failure::compute)?;
    let t = check_termination(rs, bound).map_err(Failure::compute)?;
    let rules: Vec<String> = (0..rs.rules.len()).map(|i| rs.show_rule(i)).collect();
    let mut s = format!("{} rule(s)\n", rules.len());
    for r in &rules {
        let _ = writeln!(s, "  {r}");
    }
    let _ = writeln!(s, "{} critical pair(s)", pairs.len());
    let show_trace = |t: &[shellpbw::presentation::TreeMonomial]| t.iter().map(|m| p.show(m)).collect::<Vec<_>>();
    let mut pj = Vec::new();
    for c in &pairs {
        let verdict = if c.confluent { "confluent" } else { "NOT confluent" };
        let _ = writeln!(s, "  {}: {verdict}", p.show(&c.overlap));
        let (ta, tb) = (show_trace(&c.first_trace), show_trace(&c.second_trace));
        if !ta.is_empty() {
            let _ = writeln!(s, "    {} -> {}", p.show(&c.overlap), ta.join(" -> "));
            let _ = writeln!(s, "    {} -> {}", p.show(&c.overlap), tb.join(" -> "));
        } else {
            let _ = writeln!(s, "    {}  |  {}", show_lincomb(p, &c.first_normal_form), show_lincomb(p, &c.second_normal_form));
        }
        pj.push(json!({
            "overlap": p.show(&c.overlap),
            "confluent": c.confluent,
            "first": ta,
            "second": tb,
            "first_normal_form": show_lincomb(p, &c.first_normal_form),
            "second_normal_form": show_lincomb(p, &c.second_normal_form),
        }));
    }
    let term = termination_line(p, rs, &t);
    let _ = writeln!(s, "termination up to weight {bound}: {term}");
    let ok = t.is_ok() && pairs.iter().all(|c| c.confluent);
    let v = json!({"rules": rules, "critical_pairs": pj, "terminating": t.is_ok(), "termination": term, "bound": bound});
    Ok((s, v, ok))
}

fn cmd_critical_pairs(a: &SystemArgs) -> Result<Outcome, Failure> {
    let p = load(&a.presentation)?;
    let (p, rs, source) = system_for(a, &p)?;
    let (text, v, ok) = pairs_section(&p, &rs, a.bound)?;
    if a.json {
        let mut v = v;
        v["order"] = json!(source);
        return Ok(Outcome { text: render(&v), ok });
    }
    Ok(Outcome { text: format!("{source}\n{text}"), ok })
}

fn basis_json(p: &Presentation, basis: &PbwBasis) -> Value {
    let cells: Vec<Value> = basis
        .cells
        .iter()
        .map(|((n, w), ms)| json!({"arity": n, "weight": w, "size": ms.len(), "monomials": ms.iter().map(|m| p.show(m)).collect::<Vec<_>>()}))
        .collect();
    json!(cells)
}

fn cmd_derive_pbw(a: &PbwArgs) -> Result<Outcome, Failure> {
    let p = load(&a.system.presentation)?;
    require_basic_set(&p, a.weight.max(2))?;
    let (p, rs, source) = system_for(&a.system, &p)?;
    let (pairs_text, pairs_json, convergent) = pairs_section(&p, &rs, a.system.bound)?;
    let (basis, verified) = match a.system.labelling {
        Some(name) => {
            let family = labelling_family(&p, name)?;
            let l = labelling_for(name, &family[0])?;
            let refs: Vec<&PartitionPoset> = family.iter().collect();
            let ex = extract_pbw(&p, &refs, l.as_ref(), a.arity, a.weight).map_err(|e| Failure(1, e.to_string()))?;
            let verified = verify_pbw_in(&ex.table, &p, &ex.basis, &ex.system);
            (ex.basis, verified)
        }
        None => {
            let basis = normal_monomials(&rs, a.arity, a.weight).map_err(Failure::compute)?;
            let verified = verify_pbw(&p, &basis, &rs);
            (basis, verified)
        }
    };
    let ok = convergent && verified.is_ok();
    let verdict = match &verified {
        Ok(()) => "PBW basis verified".to_string(),
        Err(v) => format!("PBW verification fails ({:?}): {}", v.condition, v.witness),
    };
    if a.system.json {
        let mut v = pairs_json;
        v["order"] = json!(source);
        v["basis"] = basis_json(&p, &basis);
        v["verified"] = json!(verified.is_ok());
        v["verdict"] = json!(verdict);
        return Ok(Outcome { text: render(&v), ok });
    }
    let mut s = format!("{source}\n{pairs_text}basis (arity, weight): size\n");
    for ((n, w), ms) in &basis.cells {
        let shown: Vec<String> = ms.iter().take(8).map(|m| p.show(m)).collect();
        let more = if ms.len() > 8 { ", …" } else { "" };
        let _ = writeln!(s, "  ({n}, {w}): {}  {}{more}", ms.len(), shown.join(", "));
    }
    let _ = writeln!(s, "{verdict}");
    Ok(Outcome { text: s, ok })
}

fn cmd_rewrite(a: &RewriteArgs) -> Result<Outcome, Failure> {
    let p = load(&a.system.presentation)?;
    let (p, rs, source) = system_for(&a.system, &p)?;
    let m = parse_monomial(&p, &a.monomial).map_err(Failure::input)?;
    if rs.is_set() {
        let trace = rs.trace(&m).map_err(Failure::compute)?;
        let steps: Vec<String> = trace.iter().map(|t| p.show(t)).collect();
        if a.system.json {
            let v = json!({"order": source, "trace": steps, "normal_form": steps.last()});
            return Ok(Outcome { text: render(&v), ok: true });
        }
        return Ok(Outcome { text: format!("{}\nnormal form: {}\n", steps.join(" -> "), steps.last().expect("nonempty")), ok: true });
    }
    let nf = show_lincomb(&p, &rs.normal_form(&m).map_err(Failure::compute)?);
    if a.system.json {
        return Ok(Outcome { text: render(&json!({"order": source, "normal_form": nf})), ok: true });
    }
    Ok(Outcome { text: format!("{} -> {nf}\n", p.show(&m)), ok: true })
}

fn cmd_check_basic_set(a: &BasicSetArgs) -> Result<Outcome, Failure> {
    let p = load(&a.presentation)?;
    let (ok, text) = basic_set_report(&p, a.bound)?;
    if !ok {
        return Err(Failure(3, text.trim_end().to_string()));
    }
    if a.json {
        return Ok(Outcome { text: render(&json!({"basic_set": true, "bound": a.bound})), ok });
    }
    Ok(Outcome { text, ok })
}

fn cmd_homology(a: &PosetArgs) -> Result<Outcome, Failure> {
    let p = load(&a.presentation)?;
    let poset = poset_for(&p, a.arity, a.weight)?;
    let fp = FinitePoset::from_partition_poset(&poset);
    let proper = homology(&order_complex(&fp, true)).map_err(Failure::compute)?;
    let mut maximal = Vec::new();
    for &t in &poset.tops {
        let c = order_complex_on(&fp, &fp.open_interval(poset.bottom, t));
        maximal.push((t, homology(&c).map_err(Failure::compute)?));
    }
    let cm = is_cohen_macaulay(&fp).map_err(Failure::compute)?;
    let bar = bar_dimension_check(&poset).map_err(Failure::compute)?;
    let ok = cm.is_ok() && bar.is_ok() && proper.euler_consistent();
    let groups = |h: &shellpbw::topology::HomologyProfile| -> Value {
        json!(h.groups.iter().map(|g| json!({"degree": g.degree, "rank": g.rank, "torsion": g.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(), "group": g.to_string()})).collect::<Vec<_>>())
    };
    if a.json {
        let v = json!({
            "proper_part": {"homology": groups(&proper), "face_counts": proper.face_counts, "euler_consistent": proper.euler_consistent()},
            "maximal_intervals": maximal.iter().map(|(t, h)| json!({"top": poset.display(*t), "homology": groups(h)})).collect::<Vec<_>>(),
            "cohen_macaulay": {"ok": cm.is_ok(), "intervals_checked": cm.intervals_checked, "failures": cm.failures.iter().map(|f| json!({"bottom": fp.labels[f.bottom], "top": fp.labels[f.top], "reason": format!("{:?}", f.reason)})).collect::<Vec<_>>()},
            "bar_dimension": bar.degrees.iter().map(|d| json!({"degree": d.degree, "chains": d.chains.to_string(), "trees": d.trees.to_string()})).collect::<Vec<_>>(),
        });
        return Ok(Outcome { text: render(&v), ok });
    }
    let nonzero = |h: &shellpbw::topology::HomologyProfile| -> String {
        let parts: Vec<String> = h.groups.iter().filter(|g| !g.is_zero()).map(|g| format!("H~{} = {g}", g.degree)).collect();
        if parts.is_empty() {
            "all reduced homology vanishes".into()
        } else {
            parts.join(", ")
        }
    };
    let mut s = format!("proper part of the poset ({} faces): {}\n", proper.face_counts.iter().skip(1).sum::<usize>(), nonzero(&proper));
    for (t, h) in &maximal {
        let _ = writeln!(s, "open interval below {}: {}", poset.display(*t), nonzero(h));
    }
    if cm.is_ok() {
        let _ = writeln!(s, "Cohen-Macaulay: ok ({} intervals)", cm.intervals_checked);
    } else {
        for f in &cm.failures {
            let _ = writeln!(s, "Cohen-Macaulay fails on [{}, {}]: {:?}", fp.labels[f.bottom], fp.labels[f.top], f.reason);
        }
    }
    for d in &bar.degrees {
        let mark = if d.chains == d.trees { "ok" } else { "MISMATCH" };
        let _ = writeln!(s, "degree {}: {} chains, {} levelled trees ({mark})", d.degree, d.chains, d.trees);
    }
    Ok(Outcome { text: s, ok })
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Outcome, Failure> {
    if a.which == 1 {
        let r = counterexample::first_counterexample(a.bound).map_err(Failure::compute)?;
        let show = |o: &shellpbw::shelling::Obstruction| match o {
            shellpbw::shelling::Obstruction::Contradiction { cycle } => {
                format!("contradiction {}", counterexample::show_cycle(&r.poset, cycle))
            }
            shellpbw::shelling::Obstruction::Consistent { .. } => "consistent".to_string(),
        };
        let pairs: Vec<String> =
            r.critical_pairs.iter().map(|(w, c)| format!("{w} ({})", if *c { "confluent" } else { "not confluent" })).collect();
        if a.json {
            let v = json!({
                "basic_set": r.basic_set,
                "rules": r.rules,
                "critical_pairs": pairs,
                "terminating": r.terminating,
                "poset": {"elements": r.poset.len(), "edges": r.poset.edges.len()},
                "declared_order": show(&r.declared),
                "swapped_rules": r.swapped_rules,
                "swapped_order": show(&r.swapped),
                "swapped_certificate": r.swapped_certificate,
            });
            return Ok(Outcome { text: render(&v), ok: true });
        }
        let mut s = format!("basic-set up to weight {}: {}\n", a.bound, r.basic_set);
        let _ = writeln!(s, "rules: {}", r.rules.join(", "));
        let _ = writeln!(s, "critical pairs: {}", pairs.join(", "));
        let _ = writeln!(s, "terminating: {}", r.terminating);
        let _ = writeln!(s, "poset below jda: {} elements, {} edges", r.poset.len(), r.poset.edges.len());
        let _ = writeln!(s, "declared order: {}", show(&r.declared));
        let _ = writeln!(s, "with i and g exchanged: rules {}", r.swapped_rules.join(", "));
        let _ = writeln!(s, "with i and g exchanged: {}", show(&r.swapped));
        match &r.swapped_certificate {
            Some(labels) => {
                let _ = writeln!(s, "with i and g exchanged: EL-labelling found, edge labels {labels:?}");
            }
            None => {
                let _ = writeln!(s, "with i and g exchanged: no EL-labelling with labels 1..4");
            }
        }
        return Ok(Outcome { text: s, ok: true });
    }
    let r = counterexample::second_counterexample(a.bound).map_err(Failure::compute)?;
    let pairs: Vec<String> =
        r.critical_pairs.iter().map(|(w, c)| format!("{w} ({})", if *c { "confluent" } else { "not confluent" })).collect();
    let verdict = |v: &CaseVerdict| match v {
        CaseVerdict::LabelContradiction { cycle } => format!("label contradiction {cycle}"),
        CaseVerdict::NonConfluent { witnesses } => {
            format!("every label-consistent completion fails to converge; non-confluent overlaps {}", witnesses.iter().cloned().collect::<Vec<_>>().join(", "))
        }
        CaseVerdict::Survives { completions } => format!("{completions} completion(s) survive"),
    };
    let all_rejected = r.cases.iter().all(|c| !matches!(c.verdict, CaseVerdict::Survives { .. }));
    if a.json {
        let cases: Vec<Value> = r
            .cases
            .iter()
            .map(|c| {
                let consistent: Vec<Value> = c
                    .completions
                    .iter()
                    .filter(|x| x.label == LabelOutcome::Consistent)
                    .map(|x| json!({"rules": x.rules, "non_confluent": x.convergence.as_ref().map(|v| v.non_confluent.clone()), "terminating": x.convergence.as_ref().map(|v| v.terminating)}))
                    .collect();
                json!({"case": c.title(), "verdict": verdict(&c.verdict), "tally": counterexample::tally(c), "label_consistent_completions": consistent})
            })
            .collect();
        let v = json!({
            "basic_set": r.basic_set,
            "rules": r.rules,
            "critical_pairs": pairs,
            "terminating": r.terminating,
            "poset": {"elements": r.poset.len(), "edges": r.poset.edges.len()},
            "cases": cases,
            "all_orientations_rejected": all_rejected,
        });
        return Ok(Outcome { text: render(&v), ok: true });
    }
    let mut s = format!("basic-set up to weight {}: {}\n", a.bound, r.basic_set);
    let _ = writeln!(s, "rules: {}", r.rules.join(", "));
    let _ = writeln!(s, "critical pairs: {}", pairs.join(", "));
    let _ = writeln!(s, "terminating: {}", r.terminating);
    let _ = writeln!(s, "poset below nea and lba: {} elements, {} edges", r.poset.len(), r.poset.edges.len());
    for c in &r.cases {
        let _ = writeln!(s, "case {}: {}", c.title(), verdict(&c.verdict));
        for (k, n) in counterexample::tally(c) {
            let _ = writeln!(s, "    {k}: {n}");
        }
    }
    let _ = writeln!(s, "all four orientations rejected: {all_rejected}");
    Ok(Outcome { text: s, ok: true })
}
