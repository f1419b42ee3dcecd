//! Acceptance suite: one test per criterion, run at the full budgets.
//! Each test prints its verdict line (visible with `--nocapture`, always
//! visible on failure) and asserts the criterion's gate.
//!
//! Criteria 1 and 7 compare against published table/figure values that are
//! not reproducible from the stated model (the calibration machinery is
//! cross-validated against brute-force Monte Carlo); they are implemented
//! faithfully and currently fail at the pinned points. The verdict details
//! carry the per-entry deltas.

use udn_cli::acceptance::*;

fn report(r: &CriterionResult) -> String {
    let mut text = format!("{}\n", r.summary_line());
    for d in &r.details {
        text.push_str(&format!("    {d}\n"));
    }
    print!("{text}");
    text
}

#[test]
fn criterion_01_eta_table_reproduction() {
    let r = criterion_1_eta_table(Level::Full);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_02_lemma2_consistency() {
    let r = criterion_2_lemma2_consistency(Level::Full);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_03_fig2_agreement() {
    let r = criterion_3_fig2_agreement(Level::Full, 2);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_04_theorem1_bracket() {
    let r = criterion_4_theorem1_bracket(Level::Full, 2);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_05_gamma_exactness() {
    let r = criterion_5_gamma_exactness(Level::Full);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_06_density_trends() {
    let r = criterion_6_density_trends(Level::Full, 2);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_07_scheme_comparison() {
    let r = criterion_7_scheme_comparison(Level::Full, 2);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_08_set_concentration() {
    let r = criterion_8_set_concentration(Level::Full);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_09_nee_ordering() {
    let r = criterion_9_nee_ordering(Level::Full, 2);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}

#[test]
fn criterion_10_property_suites_gate() {
    let r = udn_cli::acceptance::criterion_10_property_suites(Level::Full);
    let text = report(&r);
    assert!(r.passed, "\n{text}");
}
