//! Top-level acceptance gate: one test per verification pipeline, so the
//! harness prints one pass/fail line per criterion. Each test runs the same
//! entry point the CLI `verify` subcommand uses and fails with the full
//! report text when any claim inside it fails.

use rrlab::verify::{run_pipeline, Scale};

fn run(name: &str) {
    let scale = Scale::default();
    let report = run_pipeline(name, 0xacce97, scale).expect("known pipeline");
    let text = report.render_text();
    println!("{text}");
    assert!(report.pass, "pipeline {name} failed:\n{text}");
}

#[test]
fn criterion_01_tournament_diagonalization() {
    run("em_dnr");
}

#[test]
fn criterion_02_stable_tournament_diagonalization() {
    run("sem_dnr");
}

#[test]
fn criterion_03_thin_set_diagonalization() {
    run("ts2_dnr");
}

#[test]
fn criterion_04_jump_lowering() {
    run("jump_lowering");
}

#[test]
fn criterion_05_rainbow_to_thin_and_free() {
    run("rainbow_to_thin_free");
}

#[test]
fn criterion_06_stable_pairs_to_bounded_palette() {
    run("srt_sfs");
}

#[test]
fn criterion_07_finite_injury_constructions() {
    run("finite_injury");
}

#[test]
fn criterion_08_tail_partner_families() {
    run("bad_family");
}

#[test]
fn criterion_09_measure_trees() {
    run("measure_trees");
}

#[test]
fn criterion_10_bushy_forcing() {
    run("bushy_forcing");
}

#[test]
fn criterion_11_stability_class_lattice() {
    run("classifier_lattice");
}

#[test]
fn criterion_12_transitive_set_classification() {
    run("em_sts_coh");
}
