//! Acceptance suite: every check the library promises, run end to end at the
//! stated tolerances. Each test prints one `[PASS]`/`[FAIL]` line (visible
//! with `--nocapture`, and on failure) followed by the measured values, and
//! asserts both the bounds and the per-criterion runtime budget.
//!
//! Run with:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```

use sextic::verify::{self, CriterionReport, Direction};

/// Fixed seed so the randomized families are the same on every run.
const SEED: u64 = 7;

fn run(report: sextic::Result<CriterionReport>, budget_seconds: f64) {
    let report = report.expect("criterion execution failed");
    let status = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "[{status}] criterion {:2}: {} ({:.2}s)",
        report.index, report.title, report.seconds
    );
    for check in &report.checks {
        let op = match check.direction {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        };
        let mark = if check.passed() { " ok" } else { "BAD" };
        println!(
            "  {mark}  {:<28} {:>12.3e} {op} {:.1e}",
            check.name, check.value, check.bound
        );
    }
    assert!(
        report.passed(),
        "criterion {} ({}) failed: {:#?}",
        report.index,
        report.title,
        report.checks
    );
    assert!(
        report.seconds < budget_seconds,
        "criterion {} exceeded its {budget_seconds}s budget: took {:.2}s",
        report.index,
        report.seconds
    );
}

#[test]
fn criterion_01_curve_connection_vs_finite_differences() {
    run(verify::criterion_1(SEED), 30.0);
}

#[test]
fn criterion_02_moduli_connection_routes_and_finite_differences() {
    run(verify::criterion_2(SEED), 30.0);
}

#[test]
fn criterion_03_zero_curvature_of_moduli_connection() {
    run(verify::criterion_3(SEED), 10.0);
}

#[test]
fn criterion_04_transport_matches_direct_quadrature() {
    run(verify::criterion_4(), 20.0);
}

#[test]
fn criterion_05_monodromy_contractible_and_encircling() {
    run(verify::criterion_5(), 60.0);
}

#[test]
fn criterion_06_cubic_root_identities() {
    run(verify::criterion_6(SEED), 1.0);
}

#[test]
fn criterion_07_large_loop_residue_periods() {
    run(verify::criterion_7(), 5.0);
}

#[test]
fn criterion_08_elliptic_baseline() {
    run(verify::criterion_8(), 5.0);
}

#[test]
fn criterion_09_action_integrals() {
    run(verify::criterion_9(SEED), 20.0);
}

#[test]
fn criterion_10_exactness_and_homology() {
    run(verify::criterion_10(), 20.0);
}
