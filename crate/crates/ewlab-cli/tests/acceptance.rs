//! Acceptance battery: one test per criterion, each printing a single
//! pass/fail line (visible with `--nocapture`, and always on failure).
//!
//! Pinned parameters: seed 0, fuel 10_000 (the library default), full
//! sample counts as wired into the law suites, 60 s wall-clock budget per
//! suite. Run with `cargo test --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use ewlab::laws;
use ewlab::term::PcaSpec;

const ACCEPTANCE_SEED: u64 = 0;
const SUITE_BUDGET: Duration = Duration::from_secs(60);

fn pca() -> PcaSpec {
    PcaSpec::default()
}

/// Run one law suite at the acceptance seed and full sample counts; print
/// the criterion line; fail the test on any failure, unknown, or overrun.
fn criterion(number: u32, title: &str, suite: &str) {
    let started = Instant::now();
    let report = laws::run_suite(suite, ACCEPTANCE_SEED, &pca()).expect("suite name is known");
    let elapsed = started.elapsed();
    let pass = report.failures.is_empty() && report.unknowns.is_empty();
    println!(
        "criterion {number} ({title}): {} [{} checks, {:.2}s]",
        if pass { "pass" } else { "fail" },
        report.total,
        elapsed.as_secs_f64(),
    );
    assert!(
        pass,
        "criterion {number} ({title}): failures {:?}, unknowns {:?}",
        report.failures, report.unknowns
    );
    assert!(
        elapsed < SUITE_BUDGET,
        "criterion {number} ({title}): suite took {elapsed:?}, budget is {SUITE_BUDGET:?}"
    );
}

#[test]
fn criterion_1_pca_axioms() {
    criterion(1, "PCA axiom suite, 500 random triples", "pca");
}

#[test]
fn criterion_2_compiler_oracle_equivalence() {
    criterion(2, "compiler vs independent evaluator, 200 expressions", "compiler");
}

#[test]
fn criterion_3_fixed_witness_suite() {
    criterion(3, "fixed witness suite", "witnesses");

    // The same round-trip witnesses drive the checked-in regression
    // workspace; both directions must hold through the binary as well.
    let ws = regression_workspace();
    let up = cli(&ws, &["check", "iR", "p", "p-F-G", "--witness", "to"]);
    let down = cli(&ws, &["check", "iR", "p-F-G", "p", "--witness", "from"]);
    let pass = up.status.code() == Some(0) && down.status.code() == Some(0);
    println!(
        "criterion 3 (regression workspace round-trip checks): {}",
        if pass { "pass" } else { "fail" }
    );
    assert!(
        pass,
        "round-trip checks: up {:?}, down {:?}",
        up.status.code(),
        down.status.code()
    );
}

#[test]
fn criterion_4_heyting_laws() {
    criterion(4, "Heyting laws with universe extension, 50 instances", "heyting");
}

#[test]
fn criterion_5_frobenius_and_beck_chevalley() {
    criterion(5, "Frobenius and exchange, 25 instances each", "frobenius");
}

#[test]
fn criterion_6_translation_isomorphism() {
    criterion(6, "F/G round-trips and naturality, 50 instances", "fg");
}

#[test]
fn criterion_7_terminal_fibre_conformance() {
    criterion(7, "terminal-fibre degree checker agreement, 100 pairs", "terminal");
}

#[test]
fn criterion_8_topos_laws() {
    criterion(8, "category laws, retraction and unit", "topos");
}

#[test]
fn criterion_9_determinism() {
    let started = Instant::now();
    let first = laws::render_reports(&laws::run_all(ACCEPTANCE_SEED, &pca()));
    let second = laws::render_reports(&laws::run_all(ACCEPTANCE_SEED, &pca()));
    let library_identical = first == second;

    // The binary must also be byte-stable on stdout, workspace commands
    // included.
    let ws = regression_workspace();
    let mut binary_identical = true;
    let commands: &[&[&str]] = &[
        &["laws", "witnesses"],
        &["--format", "machine", "laws", "terminal"],
        &["check", "iR", "p", "p-F-G", "--witness", "to"],
        &["op", "classify", "p"],
    ];
    for args in commands {
        let a = cli(&ws, args);
        let b = cli(&ws, args);
        if a.stdout != b.stdout || a.status.code() != b.status.code() {
            binary_identical = false;
        }
    }

    let pass = library_identical && binary_identical;
    println!(
        "criterion 9 (byte-identical reports at a fixed seed): {} [{:.2}s]",
        if pass { "pass" } else { "fail" },
        started.elapsed().as_secs_f64(),
    );
    assert!(library_identical, "library reports differ between runs");
    assert!(binary_identical, "binary stdout differs between runs");
}

fn regression_workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../workspaces/regression.ews")
}

fn cli(workspace: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ewlab"))
        .arg("--workspace")
        .arg(workspace)
        .args(args)
        .output()
        .expect("binary runs")
}
