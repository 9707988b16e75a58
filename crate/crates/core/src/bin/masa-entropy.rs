use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use masa_entropy::io::{fmt_num, matrix_to_string, read_matrix};
use masa_entropy::masa::{
    commuting_square_defect, flatness_defect, is_commuting_square, is_orthogonal_pair, popa_defect,
};
use masa_entropy::matrix::{fourier_matrix, permutation_unitary, random_unitary};
use masa_entropy::relent::{h_closed, h_phi_aligned, h_phi_variational_with, is_entropy_maximal};
use masa_entropy::stochastic::{entropy, unistochastic};
use masa_entropy::verify::{run_suite, SUITES};
use masa_entropy::{tol, Error, Execution, Masa, StateFunctional, UnitaryMatrix};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "masa-entropy", version, about = "Conditional relative entropy of maximal abelian subalgebras")]
struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit a JSON object instead of key = value lines.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// H(b(u)) of a unitary, with the orthogonality verdict for (D, uDu*).
    Entropy {
        unitary: PathBuf,
        #[arg(long, default_value_t = tol::ORTHOGONAL)]
        tol: f64,
    },
    /// Closed-form h_phi(D | uDu*) and optional variational check.
    Hphi {
        state: PathBuf,
        unitary: PathBuf,
        #[arg(long, default_value_t = 0)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// h(A | B) for two MASAs given by their diagonalizers.
    Hclosed {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Orthogonality tests for two MASAs given by their diagonalizers.
    Orthogonal {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = tol::ORTHOGONAL)]
        tol: f64,
    },
    /// Generate a unitary in the matrix file format.
    Gen {
        kind: GenKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated 0-based permutation, e.g. `1,2,0`.
        #[arg(long, value_delimiter = ',')]
        perm: Vec<usize>,
    },
    /// Run a named invariant suite.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Disable parallel execution of trials.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Fourier,
    Random,
    Permutation,
}

enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

#[derive(Default)]
struct Report(Vec<(String, Field)>);

impl Report {
    fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.0.push((k.into(), Field::Num(v)));
        self
    }
    fn int(&mut self, k: &str, v: u64) -> &mut Self {
        self.0.push((k.into(), Field::Int(v)));
        self
    }
    fn flag(&mut self, k: &str, v: bool) -> &mut Self {
        self.0.push((k.into(), Field::Bool(v)));
        self
    }
    fn text(&mut self, k: &str, v: impl Into<String>) -> &mut Self {
        self.0.push((k.into(), Field::Text(v.into())));
        self
    }

    fn render(&self, json: bool) -> String {
        if json {
            let mut m = Map::new();
            for (k, f) in &self.0 {
                let v = match f {
                    // Round-trip through the printed form so both outputs agree.
                    Field::Num(x) => fmt_num(*x)
                        .parse::<f64>()
                        .ok()
                        .and_then(serde_json::Number::from_f64)
                        .map_or(Value::String(fmt_num(*x)), Value::Number),
                    Field::Int(i) => Value::from(*i),
                    Field::Bool(b) => Value::Bool(*b),
                    Field::Text(s) => Value::String(s.clone()),
                };
                m.insert(k.clone(), v);
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
            s.push('\n');
            s
        } else {
            let mut s = String::new();
            for (k, f) in &self.0 {
                let v = match f {
                    Field::Num(x) => fmt_num(*x),
                    Field::Int(i) => i.to_string(),
                    Field::Bool(b) => b.to_string(),
                    Field::Text(t) => t.clone(),
                };
                s.push_str(&format!("{k} = {v}\n"));
            }
            s
        }
    }
}

/// Failure with its exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::UnknownSuite(_) | Error::NotSquare { .. } | Error::ZeroDimension => EXIT_INPUT,
            _ => EXIT_INVALID,
        };
        Failure(code, e.to_string())
    }
}

fn load_unitary(path: &Path) -> Result<UnitaryMatrix, Failure> {
    let m = read_matrix(path)?;
    Ok(UnitaryMatrix::new(m)?)
}

fn load_masa(path: &Path) -> Result<Masa, Failure> {
    Ok(Masa::from_diagonalizer(load_unitary(path)?)?)
}

fn load_state(path: &Path) -> Result<StateFunctional, Failure> {
    Ok(StateFunctional::state(read_matrix(path)?)?)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut report = Report::default();
    match cli.command {
        Command::Entropy { unitary, tol } => {
            let u = load_unitary(&unitary)?;
            let n = u.dim();
            let d = masa_entropy::masa::diagonal_masa(n)?;
            let b = masa_entropy::masa::conjugate_masa(&d, &u)?;
            report
                .int("n", n as u64)
                .num("entropy", entropy(&unistochastic(&u)))
                .num("ln_n", (n as f64).ln())
                .num("flatness_defect", flatness_defect(&d, &b)?)
                .flag("orthogonal", is_orthogonal_pair(&d, &b, tol)?);
        }
        Command::Hphi {
            state,
            unitary,
            restarts,
            seed,
        } => {
            let phi = load_state(&state)?;
            let u = load_unitary(&unitary)?;
            if phi.dim() != u.dim() {
                return Err(Error::DimensionMismatch(phi.dim(), u.dim()).into());
            }
            let (terms, aligned, realigned) = h_phi_aligned(&phi, &u)?;
            report
                .int("n", u.dim() as u64)
                .flag("aligned", realigned)
                .num("weighted_entropy", terms.weighted_entropy)
                .num("entropy_on_d", terms.entropy_on_d)
                .num("entropy_on_b", terms.entropy_on_b)
                .num("closed_form", terms.value);
            if restarts > 0 {
                let rep = h_phi_variational_with(&aligned, &u, restarts, seed, Execution::default())?;
                report
                    .num("value", rep.best_value)
                    .num("gap", rep.gap)
                    .int("iterations", rep.iterations)
                    .int("seed", rep.seed);
            }
        }
        Command::Hclosed { a, b, tol } => {
            let (a, b) = (load_masa(&a)?, load_masa(&b)?);
            report
                .int("n", a.dim() as u64)
                .num("h", h_closed(&a, &b)?)
                .num("ln_n", (a.dim() as f64).ln())
                .flag("maximal", is_entropy_maximal(&a, &b, tol)?);
        }
        Command::Orthogonal { a, b, tol } => {
            let (a, b) = (load_masa(&a)?, load_masa(&b)?);
            report
                .int("n", a.dim() as u64)
                .num("flatness_defect", flatness_defect(&a, &b)?)
                .num("commuting_square_defect", commuting_square_defect(&a, &b)?)
                .num("popa_defect", popa_defect(&a, &b)?)
                .flag("orthogonal", is_orthogonal_pair(&a, &b, tol)?)
                .flag("commuting_square", is_commuting_square(&a, &b, tol)?);
        }
        Command::Gen { kind, n, seed, perm } => {
            let u = match kind {
                GenKind::Fourier => fourier_matrix(n.ok_or(Failure(EXIT_INPUT, "--n is required".into()))?)?,
                GenKind::Random => random_unitary(n.ok_or(Failure(EXIT_INPUT, "--n is required".into()))?, seed)?,
                GenKind::Permutation => {
                    let p = if perm.is_empty() {
                        (0..n.ok_or(Failure(EXIT_INPUT, "--perm or --n is required".into()))?).collect()
                    } else {
                        perm
                    };
                    permutation_unitary(&p).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?
                }
            };
            write_output(&cli.out, &matrix_to_string(&u))?;
            return Ok(0);
        }
        Command::Verify {
            suite,
            n,
            seed,
            trials,
            sequential,
        } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(Error::UnknownSuite(suite).into());
            }
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let rep = run_suite(&suite, n, seed, trials, exec)?;
            report
                .text("suite", rep.suite.clone())
                .int("n", n as u64)
                .int("seed", seed)
                .int("trials", trials as u64);
            for c in &rep.checks {
                report
                    .num(&format!("{}.max_deviation", c.name), c.max_deviation)
                    .num(&format!("{}.tolerance", c.name), c.tolerance)
                    .flag(&format!("{}.pass", c.name), c.passed());
            }
            report.text("result", if rep.passed() { "pass" } else { "fail" });
            write_output(&cli.out, &report.render(cli.json))?;
            return Ok(if rep.passed() { 0 } else { EXIT_VERIFY_FAILED });
        }
    }
    write_output(&cli.out, &report.render(cli.json))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
