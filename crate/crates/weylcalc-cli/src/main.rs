//! Command-line front end: parse operator/symbol/polynomial expressions,
//! run the engine's computations and verification suites, and emit text or
//! JSON. Exit codes: 0 success, 1 property failure, 2 usage error.

mod expr;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use weylcalc::autos::{
    self, conjugation_c, exp_omega_bar, pushforward, AutoError, AutoFamily, AutoSpec,
    OneForm, PolyDiffeo,
};
use weylcalc::classical::{poisson_bracket, principal_symbol, PolySymbol};
use weylcalc::classify::{solve_admissible, TruncatedSpace};
use weylcalc::ratpoly::{rat, RationalPoly};
use weylcalc::verify;
use weylcalc::weyl::DiffOp;

#[derive(Parser)]
#[command(name = "weylcalc", version, about = "Exact calculus for differential operators, symbols, and their automorphisms")]
struct Cli {
    /// Ambient dimension; defaults to the highest index mentioned.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compose two operators: A after B.
    Compose {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Commutator bracket [A, B] of two operators.
    Bracket {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Apply an operator to a polynomial.
    Apply {
        #[arg(allow_hyphen_values = true)]
        d: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Principal symbol of an operator.
    Symbol {
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Poisson bracket of two symbols.
    Poisson {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
    /// Formal adjoint of an operator.
    Adjoint {
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Conjugation C of an operator.
    Conj {
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Apply exp of the lowering derivation of a closed 1-form.
    Expomega {
        /// Comma-separated 1-form components, e.g. "x2,x1".
        #[arg(long)]
        omega: String,
        d: String,
    },
    /// Pushforward along a polynomial diffeomorphism from a JSON file.
    Push {
        /// JSON file with "forward" and "inverse" component lists.
        #[arg(long)]
        phi: PathBuf,
        d: String,
    },
    /// Apply an automorphism described by a JSON spec file.
    Aut {
        #[arg(long)]
        spec: PathBuf,
        /// Operator (families D1, D) or symbol (family S) expression.
        input: String,
    },
    /// Recover the parameters of an automorphism given by a spec file.
    Recover {
        /// One of D1, D, S.
        #[arg(long)]
        family: String,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Rederive the order-2 classification constraints.
    Classify {
        #[arg(long = "coeff-deg", default_value_t = 3)]
        coeff_deg: usize,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Property(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{}", m),
            CliError::Property(m) => write!(f, "{}", m),
        }
    }
}

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

impl From<expr::ParseError> for CliError {
    fn from(e: expr::ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AutoError> for CliError {
    fn from(e: AutoError) -> Self {
        match e {
            AutoError::NotInFamily(_) => CliError::Property(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Property(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

/// Ambient dimension from --dim and the indices used in the expressions.
fn resolve_dim(cli_dim: Option<usize>, exprs: &[&expr::Expr], floor: usize) -> Result<usize, CliError> {
    let inferred = expr::inferred_dim(exprs).max(floor);
    match cli_dim {
        None => Ok(inferred),
        Some(d) if d >= inferred => Ok(d),
        Some(d) => Err(usage(format!(
            "--dim {} is smaller than the highest index used ({})",
            d, inferred
        ))),
    }
}

fn parse_operator(text: &str, dim: usize) -> Result<DiffOp, CliError> {
    Ok(expr::eval_operator(&expr::parse(text)?, dim)?)
}

fn parse_two_operators(
    cli: &Cli,
    a: &str,
    b: &str,
) -> Result<(DiffOp, DiffOp), CliError> {
    let ea = expr::parse(a)?;
    let eb = expr::parse(b)?;
    let dim = resolve_dim(cli.dim, &[&ea, &eb], 0)?;
    Ok((expr::eval_operator(&ea, dim)?, expr::eval_operator(&eb, dim)?))
}

fn emit<T: fmt::Display + serde::Serialize>(cli: &Cli, value: &T) -> Result<(), CliError> {
    if cli.json {
        println!(
            "{}",
            serde_json::to_string(value).map_err(|e| usage(e))?
        );
    } else {
        println!("{}", value);
    }
    Ok(())
}

fn poly_from_value(v: &Value, dim: usize, what: &str) -> Result<RationalPoly, CliError> {
    let p: RationalPoly = match v {
        Value::String(s) => expr::eval_poly(&expr::parse(s)?, dim)?,
        _ => serde_json::from_value(v.clone())
            .map_err(|e| usage(format!("bad {}: {}", what, e)))?,
    };
    if p.dim() != dim {
        return Err(usage(format!(
            "{} has dimension {}, expected {}",
            what,
            p.dim(),
            dim
        )));
    }
    Ok(p)
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {}", path.display(), e)))
}

fn diffeo_from_file(path: &Path) -> Result<PolyDiffeo, CliError> {
    let v = read_json(path)?;
    let read_components = |key: &str| -> Result<Vec<Value>, CliError> {
        v.get(key)
            .and_then(Value::as_array)
            .cloned()
            .ok_or_else(|| usage(format!("{}: missing \"{}\" array", path.display(), key)))
    };
    let fwd_raw = read_components("forward")?;
    let inv_raw = read_components("inverse")?;
    let dim = fwd_raw.len();
    let forward = fwd_raw
        .iter()
        .map(|c| poly_from_value(c, dim, "forward component"))
        .collect::<Result<Vec<_>, _>>()?;
    let inverse = inv_raw
        .iter()
        .map(|c| poly_from_value(c, dim, "inverse component"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolyDiffeo::new(forward, inverse)?)
}

/// Loads an AutoSpec, accepting polynomial components either as JSON
/// objects or as expression strings.
fn autospec_from_file(path: &Path) -> Result<AutoSpec, CliError> {
    let mut v = read_json(path)?;
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| usage(format!("{}: missing \"dim\"", path.display())))?
        as usize;
    if let Some(omega) = v.get_mut("omega").and_then(Value::as_array_mut) {
        for c in omega.iter_mut() {
            let p = poly_from_value(c, dim, "omega component")?;
            *c = serde_json::to_value(&p).map_err(|e| usage(e))?;
        }
    }
    if let Some(phi) = v.get_mut("phi") {
        for key in ["forward", "inverse"] {
            if let Some(arr) = phi.get_mut(key).and_then(Value::as_array_mut) {
                for c in arr.iter_mut() {
                    let p = poly_from_value(c, dim, "phi component")?;
                    *c = serde_json::to_value(&p).map_err(|e| usage(e))?;
                }
            }
        }
    }
    let spec: AutoSpec =
        serde_json::from_value(v).map_err(|e| usage(format!("{}: {}", path.display(), e)))?;
    spec.validate()
        .map_err(|e| usage(format!("{}: {}", path.display(), e)))?;
    Ok(spec)
}

fn polys_json(polys: &[RationalPoly]) -> Value {
    Value::Array(
        polys
            .iter()
            .map(|p| serde_json::to_value(p).expect("poly serializes"))
            .collect(),
    )
}

fn polys_text(polys: &[RationalPoly]) -> String {
    let parts: Vec<String> = polys.iter().map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Compose { a, b } => {
            let (da, db) = parse_two_operators(cli, a, b)?;
            emit(cli, &da.compose(&db).expect("same dimension"))
        }
        Cmd::Bracket { a, b } => {
            let (da, db) = parse_two_operators(cli, a, b)?;
            emit(cli, &da.bracket(&db).expect("same dimension"))
        }
        Cmd::Apply { d, f } => {
            let ed = expr::parse(d)?;
            let ef = expr::parse(f)?;
            let dim = resolve_dim(cli.dim, &[&ed, &ef], 0)?;
            let op = expr::eval_operator(&ed, dim)?;
            let poly = expr::eval_poly(&ef, dim)?;
            emit(cli, &op.apply(&poly).expect("same dimension"))
        }
        Cmd::Symbol { d } => {
            let ed = expr::parse(d)?;
            let dim = resolve_dim(cli.dim, &[&ed], 0)?;
            let op = expr::eval_operator(&ed, dim)?;
            let sym = principal_symbol(&op)
                .map_err(|_| usage("the zero operator has no principal symbol"))?;
            emit(cli, &sym)
        }
        Cmd::Poisson { p, q } => {
            let ep = expr::parse(p)?;
            let eq = expr::parse(q)?;
            let dim = resolve_dim(cli.dim, &[&ep, &eq], 0)?;
            let sp = expr::eval_symbol(&ep, dim)?;
            let sq = expr::eval_symbol(&eq, dim)?;
            emit(cli, &poisson_bracket(&sp, &sq).expect("same dimension"))
        }
        Cmd::Adjoint { d } => {
            let ed = expr::parse(d)?;
            let dim = resolve_dim(cli.dim, &[&ed], 0)?;
            emit(cli, &expr::eval_operator(&ed, dim)?.formal_adjoint())
        }
        Cmd::Conj { d } => {
            let ed = expr::parse(d)?;
            let dim = resolve_dim(cli.dim, &[&ed], 0)?;
            emit(cli, &conjugation_c(&expr::eval_operator(&ed, dim)?))
        }
        Cmd::Expomega { omega, d } => {
            let comps = expr::parse_list(omega)?;
            let ed = expr::parse(d)?;
            let mut refs: Vec<&expr::Expr> = comps.iter().collect();
            refs.push(&ed);
            let dim = resolve_dim(cli.dim, &refs, comps.len())?;
            let mut components = comps
                .iter()
                .map(|c| Ok(expr::eval_poly(c, dim)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            components.resize(dim, RationalPoly::zero(dim));
            let w = OneForm::new(components)
                .map_err(|_| usage("the 1-form is not closed"))?;
            let op = expr::eval_operator(&ed, dim)?;
            emit(cli, &exp_omega_bar(&w, &op)?)
        }
        Cmd::Push { phi, d } => {
            let diffeo = diffeo_from_file(phi)?;
            let op = parse_operator(d, diffeo.dim())?;
            emit(cli, &pushforward(&diffeo, &op)?)
        }
        Cmd::Aut { spec, input } => {
            let spec = autospec_from_file(spec)?;
            match spec.family {
                AutoFamily::S => {
                    let e = expr::parse(input)?;
                    let sym = expr::eval_symbol(&e, spec.dim)?;
                    emit(cli, &spec.apply_symbol(&sym)?)
                }
                AutoFamily::D1 | AutoFamily::D => {
                    let op = parse_operator(input, spec.dim)?;
                    emit(cli, &spec.apply_op(&op)?)
                }
            }
        }
        Cmd::Recover { family, spec } => run_recover(cli, family, spec),
        Cmd::Verify { suite, trials } => {
            let report = verify::run_suite(suite, *trials, cli.seed).ok_or_else(|| {
                usage(format!(
                    "unknown suite '{}'; expected one of {}",
                    suite,
                    verify::SUITES.join(", ")
                ))
            })?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string(&report).map_err(|e| usage(e))?
                );
            } else {
                println!(
                    "suite {}: {} trials, {} checks, {}",
                    report.suite,
                    report.trials,
                    report.checks,
                    if report.passed { "PASS" } else { "FAIL" }
                );
                for f in &report.failures {
                    println!("  {}", f);
                }
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Property(format!(
                    "suite {} failed {} checks",
                    suite,
                    report.failures.len()
                )))
            }
        }
        Cmd::Classify { coeff_deg } => {
            let dim = cli.dim.ok_or_else(|| usage("classify requires --dim"))?;
            if dim == 0 {
                return Err(usage("--dim must be at least 1"));
            }
            let space = TruncatedSpace::new(dim, *coeff_deg);
            let grid = [rat(1, 1), rat(-1, 1), rat(2, 1), rat(1, 2), rat(-2, 1)];
            let admissible = solve_admissible(&space, &grid);
            let out = json!({
                "admissible": admissible,
                "n": dim,
                "coeff_degree": coeff_deg,
            });
            println!("{}", out);
            Ok(())
        }
    }
}

fn run_recover(cli: &Cli, family: &str, spec_path: &Path) -> Result<(), CliError> {
    let spec = autospec_from_file(spec_path)?;
    match family {
        "D1" => {
            if spec.family != AutoFamily::D1 {
                return Err(usage("spec family does not match --family D1"));
            }
            let dim = spec.dim;
            let oracle = |op: &DiffOp| spec.apply_op(op).expect("probes are order <= 1");
            let rec = autos::d1_recover_parameters(oracle, dim)?;
            if cli.json {
                let out = json!({
                    "family": "D1",
                    "kappa": rec.kappa.to_string(),
                    "lambda": rec.lambda.to_string(),
                    "phi_inverse": polys_json(&rec.phi_inverse),
                    "omega_images": polys_json(&rec.omega_images),
                });
                println!("{}", out);
            } else {
                println!("family: D1");
                println!("kappa: {}", rec.kappa);
                println!("lambda: {}", rec.lambda);
                println!("phi_inverse: {}", polys_text(&rec.phi_inverse));
                println!("omega_images: {}", polys_text(&rec.omega_images));
            }
            Ok(())
        }
        "D" => {
            if spec.family != AutoFamily::D {
                return Err(usage("spec family does not match --family D"));
            }
            let dim = spec.dim;
            let oracle = |op: &DiffOp| spec.apply_op(op).expect("well-formed spec");
            let rec = autos::d_recover_parameters(oracle, dim)?;
            if cli.json {
                let out = json!({
                    "family": "D",
                    "a": rec.a,
                    "phi_inverse": polys_json(&rec.phi_inverse),
                    "omega_images": polys_json(&rec.omega_images),
                });
                println!("{}", out);
            } else {
                println!("family: D");
                println!("a: {}", rec.a);
                println!("phi_inverse: {}", polys_text(&rec.phi_inverse));
                println!("omega_images: {}", polys_text(&rec.omega_images));
            }
            Ok(())
        }
        "S" => {
            if spec.family != AutoFamily::S {
                return Err(usage("spec family does not match --family S"));
            }
            let dim = spec.dim;
            let oracle =
                |p: &PolySymbol| spec.apply_symbol(p).expect("well-formed spec");
            let rec = autos::s_recover_parameters(oracle, dim)?;
            if cli.json {
                let out = json!({
                    "family": "S",
                    "kappa": rec.kappa.to_string(),
                    "phi_inverse": polys_json(&rec.phi_inverse),
                    "omega": polys_json(&rec.omega),
                });
                println!("{}", out);
            } else {
                println!("family: S");
                println!("kappa: {}", rec.kappa);
                println!("phi_inverse: {}", polys_text(&rec.phi_inverse));
                println!("omega: {}", polys_text(&rec.omega));
            }
            Ok(())
        }
        other => Err(usage(format!(
            "unknown family '{}'; expected D1, D, or S",
            other
        ))),
    }
}
