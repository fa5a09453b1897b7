//! `sepval`: validate models, evaluate pipelines and run law suites.
//!
//! Exit codes: 0 success / all laws pass, 1 invariant or law violation,
//! 2 usage or parse error.

mod laws;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sepval::composition::{compose_sequence, DensityElement};
use sepval::conditional::conditional;
use sepval::model::{Model, Payload, TypedModel};
use sepval::pipeline;
use sepval::{with_model, Error, Valuation, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "sepval", version, about = "Separative valuation algebras: models, pipelines and law checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Compact,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and list its contents.
    Validate { model: PathBuf },
    /// Evaluate a pipeline such as `p > q @ {A,B}`.
    Eval {
        model: PathBuf,
        expr: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Compare the result with a previously printed result.
        #[arg(long)]
        expect: Option<PathBuf>,
        /// Tolerance for `--expect`.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run a law suite on a built-in instance or on a model's variables.
    Laws {
        /// `potential`, `gaussian`, `belief`, `belief-partitions`, or a model file.
        target: String,
        /// Suite name, or `all`.
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Cases per law (defaults depend on the suite).
        #[arg(long)]
        n: Option<usize>,
        /// Override the instance's equality tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Directory for counterexample files of failing laws.
        #[arg(long)]
        counterexamples: Option<PathBuf>,
    },
    /// Compose named valuations left to right.
    Compose {
        model: PathBuf,
        /// Comma-separated names, e.g. `p,q,r`.
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<String>,
        /// Project the composed result to this domain.
        #[arg(long)]
        project: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Conditional `φ_{x|y}` of a valuation (default: the product of all).
    Condition {
        model: PathBuf,
        #[arg(long)]
        of: String,
        #[arg(long)]
        given: String,
        #[arg(long)]
        valuation: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// An error together with the exit code it maps to.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn at(path: &Path, e: Error) -> Self {
        let code = if matches!(e.root(), Error::Parse { .. }) { 2 } else { 1 };
        let message = match e {
            Error::Parse { .. } | Error::Invalid { .. } => format!("{}:{e}", path.display()),
            e => e.to_string(),
        };
        Failure { code, message }
    }
}

fn load(path: &Path) -> Result<Model, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Model::parse(&text).map_err(|e| Failure::at(path, e))
}

fn emit<V: Payload>(m: &TypedModel<V>, e: &DensityElement<V>, format: Format) {
    print!("{}", m.render(e, format == Format::Compact));
}

fn validate(path: &Path) -> Result<u8, Failure> {
    let model = load(path)?;
    println!("{}: ok ({} model)", path.display(), model.instance().name());
    for line in model.summary() {
        println!("  {line}");
    }
    Ok(0)
}

fn eval(path: &Path, src: &str, format: Format, expect: Option<&Path>, tol: f64) -> Result<u8, Failure> {
    let model = load(path)?;
    let expr = pipeline::parse(src).map_err(|e| Failure::usage(format!("expression {e}")))?;
    with_model!(&model, m => {
        let r = pipeline::eval(m, &expr).map_err(|e| Failure::at(path, e))?;
        emit(m, &r, format);
        if let Some(file) = expect {
            let text = std::fs::read_to_string(file)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", file.display())))?;
            let want = m.parse_result(&text).map_err(|e| Failure::at(file, e))?;
            if !r.equals0(&want, tol) {
                eprintln!("result differs from {} at tolerance {tol}", file.display());
                return Ok(1);
            }
        }
        Ok(0)
    })
}

fn compose_cmd(path: &Path, order: &[String], project: Option<&str>, format: Format) -> Result<u8, Failure> {
    let model = load(path)?;
    let target =
        project.map(pipeline::parse_domain).transpose().map_err(|e| Failure::usage(format!("--project {e}")))?;
    with_model!(&model, m => {
        let items = order
            .iter()
            .map(|n| m.lookup(n))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::at(path, e))?;
        let mut r = compose_sequence(&items).map_err(|e| Failure::at(path, e))?;
        if let Some(d) = &target {
            let d = m.domain(d).map_err(|e| Failure::at(path, e))?;
            r = r.project(&d).map_err(|e| Failure::at(path, e))?;
        }
        emit(m, &r, format);
        Ok(0)
    })
}

fn condition_cmd(path: &Path, of: &str, given: &str, name: Option<&str>, format: Format) -> Result<u8, Failure> {
    let model = load(path)?;
    let of = pipeline::parse_domain(of).map_err(|e| Failure::usage(format!("--of {e}")))?;
    let given = pipeline::parse_domain(given).map_err(|e| Failure::usage(format!("--given {e}")))?;
    with_model!(&model, m => {
        let run = || -> sepval::Result<_> {
            let phi = match name {
                Some(n) => m
                    .valuations
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Error::Model(format!("unknown valuation `{n}`")))?,
                None => {
                    let mut all = m.valuations.values();
                    let first = all.next().ok_or_else(|| Error::Model("the model has no valuations".into()))?;
                    all.try_fold(first.clone(), |acc, v| acc.combine(v))?
                }
            };
            let c = conditional(&phi, &m.domain(&of)?, &m.domain(&given)?)?;
            Ok(DensityElement::from_quotient(c.body))
        };
        let r = run().map_err(|e| Failure::at(path, e))?;
        emit(m, &r, format);
        Ok(0)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { model } => validate(model),
        Command::Eval { model, expr, format, expect, tol } => eval(model, expr, *format, expect.as_deref(), *tol),
        Command::Laws { target, suite, seed, n, tol, format, counterexamples } => laws::run(
            target,
            suite,
            laws::Options { seed: *seed, n: *n, tol: *tol, format: *format, dir: counterexamples.clone() },
        ),
        Command::Compose { model, order, project, format } => compose_cmd(model, order, project.as_deref(), *format),
        Command::Condition { model, of, given, valuation, format } => {
            condition_cmd(model, of, given, valuation.as_deref(), *format)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
