//! Golden-file tests for the command line. Set `SEPVAL_UPDATE_GOLDEN=1` to
//! rewrite the expected files.

mod common;

use common::run;

fn check(name: &str, args: &[&str], code: i32) {
    if let Err(e) = common::golden(name, args, code) {
        panic!("{e}");
    }
}

#[test]
fn validate_models() {
    check("validate_potentials", &["validate", "models/potentials.toml"], 0);
    check("validate_gaussian", &["validate", "models/gaussian.toml"], 0);
    check("validate_belief", &["validate", "models/belief.toml"], 0);
}

#[test]
fn validate_rejects_bad_models() {
    check("validate_negative_mass", &["validate", "crates/cli/tests/fixtures/negative_mass.toml"], 1);
    check("validate_asymmetric", &["validate", "crates/cli/tests/fixtures/asymmetric.toml"], 1);
    check("validate_syntax_error", &["validate", "crates/cli/tests/fixtures/syntax_error.toml"], 2);
}

#[test]
fn eval_pipelines() {
    let p = "models/potentials.toml";
    check("eval_potential_compose", &["eval", p, "p > q @ {A,B}"], 0);
    check("eval_potential_condition", &["eval", p, "q | {A}", "--format", "compact"], 0);
    check("eval_potential_unit", &["eval", p, "p * unit({A})"], 0);
    check("eval_potential_quotient", &["eval", p, "q_given_a * p"], 0);
    check("eval_potential_bad_projection", &["eval", p, "(p > q) @ {C}"], 1);
    check("eval_potential_bad_syntax", &["eval", p, "p > > q"], 2);
    let g = "models/gaussian.toml";
    check("eval_gaussian_chain", &["eval", g, "prior > link > sensor"], 0);
    check("eval_gaussian_marginal", &["eval", g, "(prior > link > sensor) @ {Z}"], 0);
    check("eval_gaussian_unit", &["eval", g, "unit({X})"], 1);
    let b = "models/belief.toml";
    check("eval_belief_compose", &["eval", b, "m_a > m_ab"], 0);
    check("eval_belief_marginal", &["eval", b, "m_ab @ {A}", "--format", "compact"], 0);
    check("eval_belief_condition", &["eval", b, "m_ab | {A}"], 0);
    check("eval_belief_combine", &["eval", b, "m_b * m_a"], 0);
}

#[test]
fn compose_and_condition_commands() {
    check("compose_potentials", &["compose", "models/potentials.toml", "--order", "p,q,r", "--project", "{A,C}"], 0);
    check("condition_gaussian", &["condition", "models/gaussian.toml", "--of", "{X,Y}", "--given", "{Y}"], 0);
}

#[test]
fn law_reports() {
    check("laws_potentials", &["laws", "models/potentials.toml", "axioms", "--seed", "7", "--n", "200"], 0);
    check("laws_gaussian", &["laws", "models/gaussian.toml", "strong-combination", "--seed", "7", "--n", "200"], 0);
    check("laws_belief", &["laws", "models/belief.toml", "conditionals", "--seed", "7", "--n", "200"], 0);
    check("laws_belief_witness", &["laws", "belief", "regularity-witness"], 0);
    check("laws_unknown_suite", &["laws", "gaussian", "regularity"], 2);
}

#[test]
fn law_reports_are_deterministic() {
    let args = ["laws", "models/belief.toml", "all", "--seed", "3", "--n", "40", "--format", "compact"];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0, "{a}");
    assert_eq!(a, run(&args).1);
    let other = run(&["laws", "potential", "separative", "--seed", "4", "--n", "40"]).1;
    assert_eq!(other, run(&["laws", "potential", "separative", "--seed", "4", "--n", "40"]).1);
}

#[test]
fn eval_output_round_trips() {
    let dir = std::env::temp_dir().join(format!("sepval-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (model, expr) in [
        ("models/potentials.toml", "p > q > r"),
        ("models/gaussian.toml", "prior > link"),
        ("models/belief.toml", "m_ab | {A}"),
    ] {
        let (_, out, _) = run(&["eval", model, expr]);
        let file = dir.join("expect.toml");
        std::fs::write(&file, out).unwrap();
        let (code, _, err) = run(&["eval", model, expr, "--expect", file.to_str().unwrap(), "--tol", "1e-12"]);
        assert_eq!(code, 0, "{model} {expr}: {err}");
    }
    // a different result is reported as a violation
    let (_, out, _) = run(&["eval", "models/potentials.toml", "p > q"]);
    let file = dir.join("other.toml");
    std::fs::write(&file, out).unwrap();
    let (code, _, _) = run(&["eval", "models/potentials.toml", "q", "--expect", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn counterexample_files() {
    let dir = std::env::temp_dir().join(format!("sepval-cex-{}", std::process::id()));
    let (code, out, _) =
        run(&["laws", "belief-partitions", "axioms", "--n", "300", "--counterexamples", dir.to_str().unwrap()]);
    assert_eq!(code, 1);
    let line = out.lines().find(|l| l.starts_with("LAW combination FAIL")).unwrap();
    let file = line.split("counterexample=").nth(1).unwrap();
    assert!(std::fs::read_to_string(file).unwrap().contains("lhs="));
    std::fs::remove_dir_all(&dir).unwrap();
}
