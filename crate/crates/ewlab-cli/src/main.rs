//! Batch front end: parse a workspace, dispatch one verification, search,
//! construction, translation, law-suite or category command, and print a
//! deterministic report.
//!
//! Exit codes: 0 = holds/success, 1 = fails, 2 = unknown (fuel or pool
//! exhausted), 3 = input error. Timing is printed to stderr only, so stdout
//! is byte-identical across runs with the same workspace, command and seed.

mod report;
mod workspace;

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ewlab::asm::{AsmMorphism, PartitionedAssembly};
use ewlab::ew::{self, EwPredicate};
use ewlab::ir::{self, IrPredicate, IrWitness};
use ewlab::laws;
use ewlab::pool::TermPool;
use ewlab::syntax::print_term;
use ewlab::term::{is_value, reduce, Reduction, TermSet};
use ewlab::topos::{self, ToposArrow};
use ewlab::Verdict;

use report::{Output, Report};
use workspace::{parse_workspace, ArrowDecl, WitnessDecl, Workspace};

#[derive(Parser)]
#[command(
    name = "ewlab",
    version,
    about = "Workbench for instance reducibility and extended Weihrauch degrees"
)]
struct Cli {
    /// Workspace file with the declarations id-based commands refer to.
    #[arg(long, global = true, value_name = "PATH")]
    workspace: Option<PathBuf>,
    /// Override the reduction fuel.
    #[arg(long, global = true, value_name = "N")]
    fuel: Option<u64>,
    /// Override the realizer-pool size bound.
    #[arg(long, global = true, value_name = "N")]
    pool_size: Option<usize>,
    /// Override the law-suite seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    #[value(name = "eiR")]
    Eir,
    #[value(name = "iR")]
    Ir,
    #[value(name = "extW")]
    Ew,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Eir => "eiR",
            Order::Ir => "iR",
            Order::Ew => "extW",
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    #[value(name = "F")]
    F,
    #[value(name = "G")]
    G,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check an order relation with a declared witness, or search for one.
    Check {
        order: Order,
        left: String,
        right: String,
        /// Witness id; omitted, the pool is searched instead.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Search for an order witness within the pool bound.
    Search { order: Order, left: String, right: String },
    /// Apply a fibre operation and report the construction.
    Op {
        #[command(subcommand)]
        op: OpCmd,
    },
    /// Translate a predicate between the displayed and family presentations.
    Translate { direction: Direction, id: String },
    /// Run law suites ('all' or one suite name).
    Laws { suite: String },
    /// Validate, compose or embed category data.
    Topos {
        #[command(subcommand)]
        cmd: ToposCmd,
    },
    /// Reduce a term expression to a value.
    Reduce { expr: String },
}

#[derive(Subcommand)]
enum OpCmd {
    /// Binary meet of two displayed predicates over one base.
    Meet { p: String, q: String },
    /// Binary join of two displayed predicates over one base.
    Join { p: String, q: String },
    /// Implication relative to a declared universe.
    Implies { p: String, q: String, universe: String },
    /// Direct image along a morphism.
    Exists { f: String, p: String },
    /// Universal quantification along a morphism.
    Forall { f: String, p: String },
    /// Substitution along a morphism.
    Reindex { f: String, p: String },
    /// Collapse a predicate to its canonical classified form.
    Classify { p: String },
}

#[derive(Subcommand)]
enum ToposCmd {
    /// Validate an object or arrow by checking (or searching) certificates.
    Validate { id: String },
    /// Compose two arrows and validate the composite.
    Compose { first: String, second: String },
    /// Embed a display morphism as an object over the given base.
    Embed { display: String, base: String },
}

/// An input error: unreadable files, parse errors, unknown ids, malformed
/// constructions. Always exits 3.
struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<workspace::WsError> for CliError {
    fn from(e: workspace::WsError) -> Self {
        CliError(e.to_string())
    }
}

impl From<ewlab::eir::DoctrineError> for CliError {
    fn from(e: ewlab::eir::DoctrineError) -> Self {
        CliError(e.to_string())
    }
}

fn main() {
    let started = std::time::Instant::now();
    let code = match Cli::try_parse() {
        Ok(cli) => match execute(&cli) {
            Ok(output) => {
                match cli.format {
                    Format::Text => print!("{}", output.text),
                    Format::Machine => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&output.machine)
                                .expect("reports serialize")
                        )
                    }
                }
                output.code
            }
            Err(e) => {
                eprintln!("error: {e}");
                3
            }
        },
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            code
        }
    };
    eprintln!("elapsed-ms: {}", started.elapsed().as_millis());
    std::process::exit(code);
}

fn load_workspace(cli: &Cli) -> Result<Workspace, CliError> {
    let mut ws = match &cli.workspace {
        Some(path) => {
            let src = std::fs::read_to_string(path)
                .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
            parse_workspace(&src, cli.fuel)?
        }
        None => {
            let mut ws = Workspace::default();
            if let Some(f) = cli.fuel {
                ws.pca.fuel = f;
            }
            ws
        }
    };
    if let Some(n) = cli.pool_size {
        ws.pool_size = n;
    }
    if let Some(s) = cli.seed {
        ws.seed = s;
    }
    Ok(ws)
}

/// The search pool: the curated certificate head, then the size-bounded
/// closed terms, then every workspace term that is a value — deterministic
/// by construction order.
fn build_pool(ws: &Workspace) -> TermPool {
    let mut pool = topos::certificate_pool();
    pool.extend(TermPool::standard(ws.pool_size, &[]).iter().cloned());
    pool.extend(ws.terms.values().filter(|t| is_value(t, &ws.pca)).cloned());
    pool
}

fn get<'a, T>(
    map: &'a std::collections::BTreeMap<String, T>,
    id: &str,
    what: &str,
) -> Result<&'a T, CliError> {
    map.get(id).ok_or_else(|| CliError(format!("unknown {what} id '{id}'")))
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails { .. } => "fails",
        Verdict::Unknown { .. } => "unknown",
    }
}

fn verdict_detail(v: &Verdict) -> Option<&str> {
    match v {
        Verdict::Holds => None,
        Verdict::Fails { witness } => Some(witness),
        Verdict::Unknown { reason } => Some(reason),
    }
}

fn push_verdict(rep: &mut Report, v: &Verdict) {
    rep.text("verdict", verdict_word(v));
    if let Some(detail) = verdict_detail(v) {
        rep.text("detail", detail);
    }
}

// ---------------------------------------------------------------------------
// Listings: stable text summaries of library objects
// ---------------------------------------------------------------------------

fn set_text(s: &TermSet) -> String {
    if s.is_empty() {
        "{ }".to_string()
    } else {
        let items: Vec<String> = s.iter().map(|t| format!("[{}]", print_term(t))).collect();
        format!("{{ {} }}", items.join(", "))
    }
}

fn family_text(f: &BTreeSet<TermSet>) -> String {
    if f.is_empty() {
        "{ }".to_string()
    } else {
        let items: Vec<String> = f.iter().map(set_text).collect();
        format!("{{ {} }}", items.join(", "))
    }
}

/// Quote an element id unless it is a plain identifier.
fn elem_ref(id: &str) -> String {
    let plain = !id.is_empty()
        && id.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '-');
    if plain {
        id.to_string()
    } else {
        format!("\"{id}\"")
    }
}

fn ir_pred_lines(p: &IrPredicate) -> Vec<String> {
    p.source()
        .carrier()
        .iter()
        .map(|y| {
            format!(
                "{y} over {}: name [{}], values {}",
                p.display().map()[y],
                print_term(p.source().name(y).expect("carrier element")),
                set_text(&p.value_at(y)),
            )
        })
        .collect()
}

fn ew_pred_lines(g: &EwPredicate) -> Vec<String> {
    g.support()
        .iter()
        .map(|((x, a), fam)| format!("at {x} tag [{}]: {}", print_term(a), family_text(fam)))
        .collect()
}

fn morphism_lines(m: &AsmMorphism) -> Vec<String> {
    let mut out = vec![format!("realizer [{}]", print_term(m.realizer()))];
    for (from, to) in m.map() {
        out.push(format!("{from} -> {to}"));
    }
    out
}

fn push_ir_witness(rep: &mut Report, key: &str, w: &IrWitness) {
    rep.list(&format!("{key} mediator"), morphism_lines(&w.mediator));
    rep.text(&format!("{key} ell"), format!("[{}]", print_term(&w.ell)));
}

// ---------------------------------------------------------------------------
// Declaration templates: paste-ready workspace text for derived objects
// ---------------------------------------------------------------------------

fn assembly_decl(id: &str, a: &PartitionedAssembly) -> Vec<String> {
    let mut lines = vec![format!("assembly {id} {{")];
    for e in a.carrier() {
        lines.push(format!(
            "  {} : [{}]",
            elem_ref(e),
            print_term(a.name(e).expect("carrier element"))
        ));
    }
    lines.push("}".to_string());
    lines
}

fn ew_pred_decl(id: &str, base_ref: &str, g: &EwPredicate) -> Vec<String> {
    let mut lines = vec![format!("ew-predicate {id} on {base_ref} {{")];
    for ((x, a), fam) in g.support() {
        lines.push(format!(
            "  at {} tag [{}] {}",
            elem_ref(x),
            print_term(a),
            family_text(fam)
        ));
    }
    lines.push("}".to_string());
    lines
}

fn ir_pred_decl(id: &str, base_ref: &str, p: &IrPredicate) -> Vec<String> {
    let src_id = format!("{id}-src");
    let display_id = format!("{id}-display");
    let mut lines = assembly_decl(&src_id, p.source());
    lines.push(format!("morphism {display_id} : {src_id} -> {base_ref} {{"));
    lines.push(format!("  realizer [{}]", print_term(p.display().realizer())));
    for (from, to) in p.display().map() {
        lines.push(format!("  {} -> {}", elem_ref(from), elem_ref(to)));
    }
    lines.push("}".to_string());
    lines.push(format!("ir-predicate {id} {{"));
    lines.push(format!("  display {display_id}"));
    lines.push("  values {".to_string());
    for y in p.source().carrier() {
        lines.push(format!("    {} : {}", elem_ref(y), set_text(&p.value_at(y))));
    }
    lines.push("  }".to_string());
    lines.push("}".to_string());
    lines
}

// ---------------------------------------------------------------------------
// Command handlers
// ---------------------------------------------------------------------------

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let ws = load_workspace(cli)?;
    match &cli.command {
        Cmd::Check { order, left, right, witness } => {
            cmd_check(&ws, *order, left, right, witness.as_deref())
        }
        Cmd::Search { order, left, right } => cmd_search(&ws, *order, left, right),
        Cmd::Op { op } => cmd_op(&ws, op),
        Cmd::Translate { direction, id } => cmd_translate(&ws, *direction, id),
        Cmd::Laws { suite } => cmd_laws(&ws, suite),
        Cmd::Topos { cmd } => cmd_topos(&ws, cmd),
        Cmd::Reduce { expr } => cmd_reduce(&ws, expr),
    }
}

/// Run the order check with a declared witness; with no witness, fall back
/// to a pool search and report the found witness or an unknown verdict.
fn cmd_check(
    ws: &Workspace,
    order: Order,
    left: &str,
    right: &str,
    witness: Option<&str>,
) -> Result<Output, CliError> {
    let suffix = witness.map(|w| format!(" --witness {w}")).unwrap_or_default();
    let mut rep = Report::new(&format!("check {order} {left} {right}{suffix}"));
    let verdict = check_verdict(ws, order, left, right, witness, &mut rep)?;
    push_verdict(&mut rep, &verdict);
    let code = verdict.exit_code();
    Ok(Output::from_report(rep, code))
}

fn cmd_search(ws: &Workspace, order: Order, left: &str, right: &str) -> Result<Output, CliError> {
    let mut rep = Report::new(&format!("search {order} {left} {right}"));
    let verdict = check_verdict(ws, order, left, right, None, &mut rep)?;
    rep.text("found", if verdict.is_holds() { "yes" } else { "no" });
    let code = verdict.exit_code();
    Ok(Output::from_report(rep, code))
}

fn check_verdict(
    ws: &Workspace,
    order: Order,
    left: &str,
    right: &str,
    witness: Option<&str>,
    rep: &mut Report,
) -> Result<Verdict, CliError> {
    let pool = build_pool(ws);
    Ok(match order {
        Order::Eir => {
            let a = get(&ws.base_preds, left, "base-predicate")?;
            let b = get(&ws.base_preds, right, "base-predicate")?;
            match witness {
                Some(wid) => match get(&ws.witnesses, wid, "witness")? {
                    WitnessDecl::Eir(hbar) => {
                        rep.text("hbar", format!("[{}]", print_term(hbar)));
                        ewlab::eir::leq_eir(a, b, hbar, &ws.pca)
                    }
                    _ => return Err(CliError(format!("witness '{wid}' is not an eiR witness"))),
                },
                None => match ewlab::eir::search_hbar(a, b, &pool, &ws.pca) {
                    Some(hbar) => {
                        rep.text("hbar", format!("[{}]", print_term(&hbar)));
                        Verdict::Holds
                    }
                    None => Verdict::unknown("no witness found within the pool bound"),
                },
            }
        }
        Order::Ir => {
            let p = get(&ws.ir_preds, left, "ir-predicate")?;
            let q = get(&ws.ir_preds, right, "ir-predicate")?;
            match witness {
                Some(wid) => match get(&ws.witnesses, wid, "witness")? {
                    WitnessDecl::Ir(w) => {
                        push_ir_witness(rep, "witness", w);
                        ir::ir_leq(p, q, w, &ws.pca)
                    }
                    _ => return Err(CliError(format!("witness '{wid}' is not an iR witness"))),
                },
                None => match ir::search_ir_leq(p, q, &pool, &ws.pca) {
                    Some(w) => {
                        push_ir_witness(rep, "witness", &w);
                        Verdict::Holds
                    }
                    None => Verdict::unknown("no witness found within the pool bound"),
                },
            }
        }
        Order::Ew => {
            let f = get(&ws.ew_preds, left, "ew-predicate")?;
            let g = get(&ws.ew_preds, right, "ew-predicate")?;
            match witness {
                Some(wid) => match get(&ws.witnesses, wid, "witness")? {
                    WitnessDecl::Ew(w) => {
                        rep.text("ell1", format!("[{}]", print_term(&w.ell1)));
                        rep.text("ell2", format!("[{}]", print_term(&w.ell2)));
                        ew::leq_ew(f, g, w, &ws.pca)
                    }
                    _ => return Err(CliError(format!("witness '{wid}' is not an extW witness"))),
                },
                None => match ew::search_ew_leq_aligned(f, g, &pool, &ws.pca) {
                    Some(w) => {
                        rep.text("ell1", format!("[{}]", print_term(&w.ell1)));
                        rep.text("ell2", format!("[{}]", print_term(&w.ell2)));
                        Verdict::Holds
                    }
                    None => Verdict::unknown("no witness found within the pool bound"),
                },
            }
        }
    })
}

fn cmd_op(ws: &Workspace, op: &OpCmd) -> Result<Output, CliError> {
    match op {
        OpCmd::Meet { p, q } => {
            let pp = get(&ws.ir_preds, p, "ir-predicate")?;
            let qq = get(&ws.ir_preds, q, "ir-predicate")?;
            let meet = ir::ir_meet(pp, qq)?;
            let mut rep = Report::new(&format!("op meet {p} {q}"));
            rep.list("result", ir_pred_lines(&meet.predicate));
            push_ir_witness(&mut rep, "to-left", &meet.to_left);
            push_ir_witness(&mut rep, "to-right", &meet.to_right);
            Ok(Output::from_report(rep, 0))
        }
        OpCmd::Join { p, q } => {
            let pp = get(&ws.ir_preds, p, "ir-predicate")?;
            let qq = get(&ws.ir_preds, q, "ir-predicate")?;
            let join = ir::ir_join(pp, qq)?;
            let mut rep = Report::new(&format!("op join {p} {q}"));
            rep.list("result", ir_pred_lines(&join.predicate));
            push_ir_witness(&mut rep, "from-left", &join.from_left);
            push_ir_witness(&mut rep, "from-right", &join.from_right);
            Ok(Output::from_report(rep, 0))
        }
        OpCmd::Implies { p, q, universe } => {
            let pp = get(&ws.ir_preds, p, "ir-predicate")?;
            let qq = get(&ws.ir_preds, q, "ir-predicate")?;
            let u = get(&ws.universes, universe, "universe")?;
            let imp = ir::ir_implication(pp, qq, u, &ws.pca)?;
            let mut rep = Report::new(&format!("op implies {p} {q} {universe}"));
            rep.list("result", ir_pred_lines(&imp.predicate));
            rep.num("tuples", imp.tuples.len() as u64);
            Ok(Output::from_report(rep, 0))
        }
        OpCmd::Exists { f, p } => {
            let ff = get(&ws.morphisms, f, "morphism")?;
            let pp = get(&ws.ir_preds, p, "ir-predicate")?;
            let image = ir::ir_exists(ff, pp)?;
            let mut rep = Report::new(&format!("op exists {f} {p}"));
            rep.list("result", ir_pred_lines(&image));
            Ok(Output::from_report(rep, 0))
        }
        OpCmd::Forall { f, p } => {
            let ff = get(&ws.morphisms, f, "morphism")?;
            let pp = get(&ws.ir_preds, p, "ir-predicate")?;
            let pool = build_pool(ws);
            let fa = ir::ir_forall(ff, pp, &pool, &ws.pca)?;
            let mut rep = Report::new(&format!("op forall {f} {p}"));
            rep.list("result", ir_pred_lines(&fa.predicate));
            rep.num("tuples", fa.tuples.len() as u64);
            Ok(Output::from_report(rep, 0))
        }
        OpCmd::Reindex { f, p } => {
            let ff = get(&ws.morphisms, f, "morphism")?;
            let pp = get(&ws.ir_preds, p, "ir-predicate")?;
            let rx = ir::ir_reindex(ff, pp)?;
            let mut rep = Report::new(&format!("op reindex {f} {p}"));
            rep.list("result", ir_pred_lines(&rx));
            Ok(Output::from_report(rep, 0))
        }
        OpCmd::Classify { p } => {
            let pp = get(&ws.ir_preds, p, "ir-predicate")?;
            let c = ir::classify(pp)?;
            let mut rep = Report::new(&format!("op classify {p}"));
            rep.list("result", ir_pred_lines(&c.canonical));
            push_ir_witness(&mut rep, "collapse", &c.to_canonical);
            push_ir_witness(&mut rep, "expand", &c.from_canonical);
            Ok(Output::from_report(rep, 0))
        }
    }
}

/// Translate and report the result both as a listing and as paste-ready
/// declaration text; the round-trip witnesses are verified as part of the
/// construction and echoed.
fn cmd_translate(ws: &Workspace, direction: Direction, id: &str) -> Result<Output, CliError> {
    match direction {
        Direction::F => {
            let p = get(&ws.ir_preds, id, "ir-predicate")?;
            let g = ew::to_ew(p);
            let mut rep = Report::new(&format!("translate F {id}"));
            rep.list("result", ew_pred_lines(&g));
            rep.list(
                "declaration",
                ew_pred_decl(&format!("{id}-F"), &elem_ref(g.base().label()), &g),
            );
            Ok(Output::from_report(rep, 0))
        }
        Direction::G => {
            let g = get(&ws.ew_preds, id, "ew-predicate")?;
            let gd = ew::to_ir(g)?;
            let mut rep = Report::new(&format!("translate G {id}"));
            rep.list("result", ir_pred_lines(&gd.predicate));
            rep.num("triples", gd.triples.len() as u64);
            rep.list(
                "declaration",
                ir_pred_decl(
                    &format!("{id}-G"),
                    &elem_ref(gd.predicate.base().label()),
                    &gd.predicate,
                ),
            );
            Ok(Output::from_report(rep, 0))
        }
    }
}

fn cmd_laws(ws: &Workspace, suite: &str) -> Result<Output, CliError> {
    let reports = if suite == "all" {
        laws::run_all(ws.seed, &ws.pca)
    } else {
        match laws::run_suite(suite, ws.seed, &ws.pca) {
            Some(r) => vec![r],
            None => {
                return Err(CliError(format!(
                    "unknown suite '{suite}' (expected all or one of: {})",
                    laws::SUITE_NAMES.join(", ")
                )))
            }
        }
    };
    let overall = laws::overall_verdict(&reports);
    let text = format!(
        "command: laws {suite}\nseed: {}\n{}",
        ws.seed,
        laws::render_reports(&reports)
    );
    let machine = json!({
        "command": format!("laws {suite}"),
        "seed": ws.seed,
        "suites": reports.iter().map(|r| json!({
            "suite": r.suite,
            "total": r.total,
            "failures": r.failures,
            "unknowns": r.unknowns,
            "verdict": verdict_word(&r.verdict()),
        })).collect::<Vec<_>>(),
        "overall": verdict_word(&overall),
    });
    Ok(Output { text, machine, code: overall.exit_code() })
}

/// Resolve an arrow declaration to a checked arrow, searching certificates
/// when the declaration left them out. `Err(missing)` lists the unsatisfied
/// condition numbers.
fn resolve_arrow(
    ws: &Workspace,
    id: &str,
    pool: &TermPool,
) -> Result<Result<ToposArrow, Vec<usize>>, CliError> {
    match get(&ws.topos_arrows, id, "topos-arrow")? {
        ArrowDecl::Complete(a) => Ok(Ok((**a).clone())),
        ArrowDecl::Pending { source, target, phi } => {
            let source = get(&ws.topos_objects, source, "topos-object")?;
            let target = get(&ws.topos_objects, target, "topos-object")?;
            let phi = get(&ws.ew_preds, phi, "ew-predicate")?;
            let search = topos::search_arrow_certificates(source, target, phi, pool, &ws.pca)?;
            if search.missing.is_empty() {
                let arrow =
                    ToposArrow::new(source.clone(), target.clone(), phi.clone(), search.certificates)?;
                Ok(Ok(arrow))
            } else {
                Ok(Err(search.missing))
            }
        }
    }
}

fn cmd_topos(ws: &Workspace, cmd: &ToposCmd) -> Result<Output, CliError> {
    let pool = build_pool(ws);
    match cmd {
        ToposCmd::Validate { id } => {
            let mut rep = Report::new(&format!("topos validate {id}"));
            let verdict = if let Some(o) = ws.topos_objects.get(id) {
                match topos::search_object_certificates(o, &pool, &ws.pca)? {
                    None => Verdict::unknown("certificates not found within the pool bound"),
                    Some(certs) => {
                        rep.text(
                            "symmetry",
                            format!(
                                "ell1 [{}], ell2 [{}]",
                                print_term(&certs.symmetry.ell1),
                                print_term(&certs.symmetry.ell2)
                            ),
                        );
                        rep.text(
                            "transitivity",
                            format!(
                                "ell1 [{}], ell2 [{}]",
                                print_term(&certs.transitivity.ell1),
                                print_term(&certs.transitivity.ell2)
                            ),
                        );
                        topos::validate_object(o, &certs, &ws.pca)?
                    }
                }
            } else if ws.topos_arrows.contains_key(id) {
                match resolve_arrow(ws, id, &pool)? {
                    Ok(arrow) => topos::validate_arrow(&arrow, &ws.pca)?,
                    Err(missing) => {
                        rep.list(
                            "missing-conditions",
                            missing.iter().map(|k| k.to_string()).collect(),
                        );
                        Verdict::unknown("certificates not found within the pool bound")
                    }
                }
            } else {
                return Err(CliError(format!("unknown topos-object or topos-arrow id '{id}'")));
            };
            push_verdict(&mut rep, &verdict);
            let code = verdict.exit_code();
            Ok(Output::from_report(rep, code))
        }
        ToposCmd::Compose { first, second } => {
            let mut rep = Report::new(&format!("topos compose {first} {second}"));
            let a = match resolve_arrow(ws, first, &pool)? {
                Ok(a) => a,
                Err(missing) => {
                    return pending_output(rep, first, missing);
                }
            };
            let b = match resolve_arrow(ws, second, &pool)? {
                Ok(b) => b,
                Err(missing) => {
                    return pending_output(rep, second, missing);
                }
            };
            let composed = topos::compose(&a, &b, &pool, &ws.pca)?;
            rep.list("phi", ew_pred_lines(composed.arrow.phi()));
            if composed.missing.is_empty() {
                let verdict = topos::validate_arrow(&composed.arrow, &ws.pca)?;
                push_verdict(&mut rep, &verdict);
                let code = verdict.exit_code();
                Ok(Output::from_report(rep, code))
            } else {
                rep.list(
                    "missing-conditions",
                    composed.missing.iter().map(|k| k.to_string()).collect(),
                );
                let verdict =
                    Verdict::unknown("composite certificates not found within the pool bound");
                push_verdict(&mut rep, &verdict);
                Ok(Output::from_report(rep, 2))
            }
        }
        ToposCmd::Embed { display, base } => {
            let d = get(&ws.morphisms, display, "morphism")?;
            let b = get(&ws.assemblies, base, "assembly")?;
            let w = topos::WeakSubobjectObject::new(b.clone(), d.clone())?;
            let o = topos::embed_r(&w)?;
            let mut rep = Report::new(&format!("topos embed {display} {base}"));
            rep.text("base", o.base().label());
            rep.list("rho", ew_pred_lines(o.rho()));
            rep.list(
                "declaration",
                ew_pred_decl(&format!("{display}-rho"), &format!("square {}", elem_ref(b.label())), o.rho()),
            );
            Ok(Output::from_report(rep, 0))
        }
    }
}

fn pending_output(mut rep: Report, id: &str, missing: Vec<usize>) -> Result<Output, CliError> {
    rep.list(
        "missing-conditions",
        missing.iter().map(|k| k.to_string()).collect(),
    );
    let verdict = Verdict::unknown(format!(
        "certificates for '{id}' not found within the pool bound"
    ));
    push_verdict(&mut rep, &verdict);
    Ok(Output::from_report(rep, 2))
}

fn cmd_reduce(ws: &Workspace, expr: &str) -> Result<Output, CliError> {
    let t = ewlab::syntax::parse_term(expr, &ws.terms)
        .map_err(|e| CliError(format!("term: {e}")))?;
    let mut rep = Report::new(&format!("reduce {expr}"));
    let (code, outcome) = match reduce(&t, &ws.pca, ws.pca.fuel) {
        Reduction::Converged { value, steps } => {
            rep.text("outcome", "converged");
            rep.num("steps", steps);
            rep.text("value", print_term(&value));
            (0, Verdict::Holds)
        }
        Reduction::Stuck { term, steps } => {
            rep.text("outcome", "stuck");
            rep.num("steps", steps);
            rep.text("at", print_term(&term));
            (1, Verdict::fails("reduction stuck"))
        }
        Reduction::FuelExhausted { partial } => {
            rep.text("outcome", "out-of-fuel");
            rep.num("fuel", ws.pca.fuel);
            rep.text("partial", print_term(&partial));
            (2, Verdict::unknown("fuel exhausted"))
        }
    };
    let _ = outcome;
    Ok(Output::from_report(rep, code))
}
