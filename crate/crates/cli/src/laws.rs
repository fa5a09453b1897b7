//! The `laws` subcommand.

use std::path::{Path, PathBuf};

use sepval::generators::{BeliefGen, GaussianGen, PotentialGen, WithTolerance};
use sepval::harness::{self, Generator};
use sepval::model::Model;
use sepval::report::LawReport;
use sepval::Instance;

use crate::{Failure, Format};

pub struct Options {
    pub seed: u64,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub format: Format,
    pub dir: Option<PathBuf>,
}

const GENERIC: [&str; 6] =
    ["axioms", "separative", "conditionals", "composition-modular", "composition-distributive", "strong-combination"];

/// Default number of cases per law.
fn default_n(suite: &str) -> usize {
    match suite {
        "separative" | "conditionals" | "composition-modular" | "transforms" => 500,
        "composition-distributive" => 300,
        "cancellativity" => 200,
        _ => 1000,
    }
}

fn suites(instance: Instance) -> Vec<&'static str> {
    let mut s = GENERIC.to_vec();
    match instance {
        Instance::Potential => {
            s.retain(|x| *x != "strong-combination");
            s.push("regularity");
        }
        Instance::Gaussian => s.push("cancellativity"),
        Instance::Belief => {
            s.retain(|x| *x != "strong-combination");
            s.extend(["transforms", "regularity-witness"]);
        }
    }
    s
}

fn generic<G: Generator>(g: &G, suite: &str, n: usize, seed: u64) -> Option<LawReport> {
    Some(match suite {
        "axioms" => harness::check_axioms(g, n, seed),
        "strong-combination" => {
            let mut r = LawReport::new(g.name(), "strong-combination");
            r.push(harness::check_strong_combination(g, n, seed));
            r
        }
        "separative" => harness::check_separative(g, n, seed),
        "conditionals" => harness::check_conditional_laws(g, n, seed),
        "composition-modular" => harness::check_composition_laws_modular(g, n, seed),
        "composition-distributive" => harness::check_composition_laws_distributive(g, n, seed),
        _ => return None,
    })
}

/// Generators for a target; belief uses smaller frames for the axiom-level
/// suites than for conditionals and composition.
enum Target {
    Potential(PotentialGen),
    Gaussian(GaussianGen),
    Belief { small: BeliefGen, large: BeliefGen },
}

fn target(name: &str) -> Result<Target, Failure> {
    let builtin = |cards: &[usize]| BeliefGen::multivariate(cards).expect("small multivariate lattice");
    match name {
        "potential" | "potentials" => return Ok(Target::Potential(PotentialGen::default())),
        "gaussian" => return Ok(Target::Gaussian(GaussianGen::default())),
        "belief" => return Ok(Target::Belief { small: builtin(&[2, 2]), large: builtin(&[2, 2, 2]) }),
        "belief-partitions" => {
            return Ok(Target::Belief { small: BeliefGen::partitions(4), large: BeliefGen::partitions(4) })
        }
        _ => {}
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(Failure::usage(format!(
            "unknown target `{name}`: expected potential, gaussian, belief, belief-partitions or a model file"
        )));
    }
    let model = crate::load(path)?;
    let schema = model.schema();
    let cards = schema.cards();
    Ok(match model {
        Model::Potential(_) if cards.is_empty() => return Err(Failure::usage("the model declares no variables")),
        Model::Potential(_) => Target::Potential(PotentialGen::new(cards)),
        Model::Gaussian(_) => Target::Gaussian(GaussianGen::new(cards.len() as u32)),
        Model::Belief(_) if cards.is_empty() => {
            let n = schema.universe.expect("belief universe");
            if n > 6 {
                return Err(Failure::usage("law suites enumerate all partitions; use a universe of at most 6 atoms"));
            }
            let g = BeliefGen::partitions(n);
            Target::Belief { small: g.clone(), large: g }
        }
        Model::Belief(_) => {
            let g = BeliefGen::multivariate(&cards).map_err(|e| Failure::usage(e.to_string()))?;
            Target::Belief { small: g.clone(), large: g }
        }
    })
}

fn run_one(t: &Target, suite: &str, n: usize, seed: u64) -> Option<LawReport> {
    match t {
        Target::Potential(g) => match suite {
            "regularity" => Some(harness::check_regularity(g, n, seed)),
            "strong-combination" => None,
            _ => generic(g, suite, n, seed),
        },
        Target::Gaussian(g) => match suite {
            "cancellativity" => Some(harness::check_cancellativity(g, n, seed)),
            _ => generic(g, suite, n, seed),
        },
        Target::Belief { small, large } => match suite {
            "transforms" => Some(harness::check_belief_transforms(small, n, seed)),
            "regularity-witness" => Some(harness::belief_regularity_witness()),
            "axioms" | "separative" => generic(small, suite, n, seed),
            "strong-combination" => None,
            _ => generic(large, suite, n, seed),
        },
    }
}

pub fn run(name: &str, suite: &str, opts: Options) -> Result<u8, Failure> {
    let mut t = target(name)?;
    if let Some(tol) = opts.tol {
        t = match t {
            Target::Potential(g) => Target::Potential(g.with_tolerance(tol)),
            Target::Gaussian(g) => Target::Gaussian(g.with_tolerance(tol)),
            Target::Belief { small, large } => {
                Target::Belief { small: small.with_tolerance(tol), large: large.with_tolerance(tol) }
            }
        };
    }
    let instance = match &t {
        Target::Potential(_) => Instance::Potential,
        Target::Gaussian(_) => Instance::Gaussian,
        Target::Belief { .. } => Instance::Belief,
    };
    let names = if suite == "all" { suites(instance) } else { vec![suite] };
    let mut reports = Vec::new();
    for s in names {
        let n = opts.n.unwrap_or_else(|| default_n(s));
        let report = run_one(&t, s, n, opts.seed).ok_or_else(|| {
            Failure::usage(format!(
                "unknown suite `{s}` for {}: expected one of {} or all",
                instance.name(),
                suites(instance).join(", ")
            ))
        })?;
        reports.push(report);
    }
    let mut ok = true;
    for mut r in reports {
        if let Some(dir) = &opts.dir {
            r.write_counterexamples(dir)
                .map_err(|e| Failure::usage(format!("cannot write counterexamples to {}: {e}", dir.display())))?;
        }
        ok &= r.all_passed();
        match opts.format {
            Format::Text => print!("{r}"),
            Format::Compact => {
                let failed = r.failures().count();
                let status = if failed == 0 { "PASS" } else { "FAIL" };
                println!("SUITE {} {} {status} laws={} failed={failed}", r.instance, r.suite, r.results.len());
            }
        }
        if opts.dir.is_none() {
            for f in r.failures() {
                eprintln!("{}: {}", f.name, f.counterexample.as_deref().unwrap_or(""));
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}
