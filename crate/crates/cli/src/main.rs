mod args;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};
use signject::crn::{parse_kinetic_orders, parse_network, preclude_multistationarity_with, special_analysis};
use signject::descartes::{check_bnd, check_ex, cone_query};
use signject::injectivity::{
    check_injectivity_with, check_minors, det_condition, gamma_det_poly, CheckOptions, Route, SubsetSpec,
};
use signject::io::{matrix_from_json, matrix_to_json_value, sign_set_from_text, vector_from_json};
use signject::linalg::{gale_dual, verify_gale_relation};
use signject::matroid::{chirotope, cocircuits, covectors};
use signject::oracle::{brute_force_sign_set, naive_symbolic_gamma_det, sampled_injectivity_search, SignSetMode};
use signject::{Error, RationalMatrix};

use args::{Cli, Command, CrnCommand, DescartesCommand, OracleCommand, RouteArg, SignSetArg, SubsetArgs};

const SCHEMA_VERSION: &str = "1";

const EXIT_HOLDS: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_FAILS: u8 = 3;
const EXIT_TOO_LARGE: u8 = 4;

/// Result of one command: the JSON payload, whether the tested property
/// holds (`None` for plain computations) and a one-line summary.
struct Outcome {
    result: Value,
    holds: Option<bool>,
    summary: String,
}

impl Outcome {
    fn decided(result: Value, holds: bool, yes: &str, no: &str) -> Self {
        let summary = if holds { yes } else { no }.to_string();
        Outcome { result, holds: Some(holds), summary }
    }

    fn computed(result: Value, summary: String) -> Self {
        Outcome { result, holds: None, summary }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn matrix(path: &Path) -> Result<RationalMatrix, Error> {
    matrix_from_json(&read(path)?).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn subset(args: &SubsetArgs) -> Result<SubsetSpec, Error> {
    if let Some(p) = &args.image {
        Ok(SubsetSpec::Image(matrix(p)?))
    } else if let Some(p) = &args.kernel {
        Ok(SubsetSpec::Kernel(matrix(p)?))
    } else if let Some(p) = &args.signs {
        SubsetSpec::orthant_union(sign_set_from_text(&read(p)?)?)
    } else {
        Ok(SubsetSpec::FullSpace)
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Injectivity { a, b, subset: s, route, no_counterexample } => {
            let (a, b, s) = (matrix(a)?, matrix(b)?, subset(s)?);
            let opts = CheckOptions {
                route: match route {
                    RouteArg::Auto => Route::Auto,
                    RouteArg::Minors => Route::Minors,
                    RouteArg::DetPoly => Route::DetPoly,
                    RouteArg::SignSearch => Route::SignSearch,
                },
                precision: cli.precision,
                construct_counterexample: !no_counterexample,
            };
            let v = check_injectivity_with(&a, &b, &s, &opts)?;
            Ok(Outcome::decided(to_value(&v), v.injective, "injective", "not injective"))
        }
        Command::Minors { a, b, s } => {
            let rep = check_minors(&matrix(a)?, &matrix(b)?, *s)?;
            Ok(Outcome::decided(to_value(&rep), rep.holds, "minor condition holds", "minor condition fails"))
        }
        Command::GammaDet { aprime, b, z } => {
            let z = z.as_deref().map(matrix).transpose()?;
            let p = gamma_det_poly(&matrix(aprime)?, &matrix(b)?, z.as_ref())?;
            let holds = det_condition(&p);
            let result = json!({ "terms": p, "uniform_sign": holds });
            Ok(Outcome::decided(result, holds, "coefficients share one sign", "coefficients do not share one sign"))
        }
        Command::Chirotope { a } => {
            let c = chirotope(&matrix(a)?)?;
            let result = json!({ "rank": c.rank(), "ground": c.ground(), "signs": c });
            Ok(Outcome::computed(result, format!("{} maximal minors", c.entries().len())))
        }
        Command::Cocircuits { a } => {
            let c = cocircuits(&matrix(a)?)?;
            Ok(Outcome::computed(json!({ "cocircuits": c }), format!("{} cocircuits", c.len())))
        }
        Command::Covectors { a } => {
            let c = covectors(&matrix(a)?)?;
            Ok(Outcome::computed(json!({ "covectors": c }), format!("{} covectors", c.len())))
        }
        Command::Descartes { command } => descartes(command),
        Command::Crn { command } => crn(cli, command),
        Command::Oracle { command } => oracle(cli, command),
    }
}

fn descartes(command: &DescartesCommand) -> Result<Outcome, Error> {
    match command {
        DescartesCommand::Bnd { a, b } => {
            let rep = check_bnd(&matrix(a)?, &matrix(b)?)?;
            Ok(Outcome::decided(to_value(&rep), rep.holds, "(bnd) holds", "(bnd) fails"))
        }
        DescartesCommand::Ex { a, b } => {
            let rep = check_ex(&matrix(a)?, &matrix(b)?)?;
            Ok(Outcome::decided(to_value(&rep), rep.ex_holds, "(ex) holds", "(ex) fails"))
        }
        DescartesCommand::Cone { a, y } => {
            let y = vector_from_json(&read(y)?)?;
            let res = cone_query(&matrix(a)?, &y)?;
            let holds = res.is_feasible();
            Ok(Outcome::decided(to_value(&res), holds, "y is in the open cone", "y is not in the open cone"))
        }
    }
}

fn crn(cli: &Cli, command: &CrnCommand) -> Result<Outcome, Error> {
    match command {
        CrnCommand::Preclude { network, kinetic_orders, no_counterexample } => {
            let mut net = parse_network(&read(network)?)?;
            if let Some(k) = kinetic_orders {
                net = parse_kinetic_orders(&net, &read(k)?)?;
            }
            let opts = CheckOptions {
                precision: cli.precision,
                construct_counterexample: !no_counterexample,
                ..Default::default()
            };
            let v = preclude_multistationarity_with(&net, &opts)?;
            let no = if v.steady_state_pair.is_some() {
                "not precluded: two steady states found"
            } else {
                "not precluded"
            };
            Ok(Outcome::decided(to_value(&v), v.precluded, "multistationarity precluded", no))
        }
        CrnCommand::Special { network, m, assume_coset } => {
            let net = parse_network(&read(network)?)?;
            let rep = special_analysis(&net, &matrix(m)?, *assume_coset)?;
            Ok(Outcome::decided(
                to_value(&rep),
                rep.unique,
                "at most one special steady state per compatibility class",
                "special steady states are not unique",
            ))
        }
    }
}

fn oracle(cli: &Cli, command: &OracleCommand) -> Result<Outcome, Error> {
    match command {
        OracleCommand::Sample { a, b, subset: s, samples } => {
            let rep = sampled_injectivity_search(&matrix(a)?, &matrix(b)?, &subset(s)?, *samples, cli.seed)?;
            let summary = match &rep.violation {
                Some(_) => "violation found".to_string(),
                None => format!("no violation in {} samples", rep.samples),
            };
            Ok(Outcome::computed(to_value(&rep), summary))
        }
        OracleCommand::GammaDet { aprime, b, z } => {
            let z = z.as_deref().map(matrix).transpose()?;
            let p = naive_symbolic_gamma_det(&matrix(aprime)?, &matrix(b)?, z.as_ref())?;
            Ok(Outcome::computed(json!({ "terms": p }), format!("{} terms", p.terms().len())))
        }
        OracleCommand::Gale { c } => {
            let c = matrix(c)?;
            let z = gale_dual(&c)?;
            let delta = verify_gale_relation(&c, &z)?;
            let result = json!({ "Z": matrix_to_json_value(&z), "delta": delta.to_string() });
            Ok(Outcome::computed(result, format!("delta = {delta}")))
        }
        OracleCommand::SignSet { m, mode } => {
            let mode = match mode {
                SignSetArg::Kernel => SignSetMode::Kernel,
                SignSetArg::Image => SignSetMode::Image,
            };
            let set = brute_force_sign_set(&matrix(m)?, mode)?;
            Ok(Outcome::computed(json!({ "signs": set }), format!("{} sign vectors", set.len())))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Injectivity { .. } => "injectivity",
        Command::Minors { .. } => "minors",
        Command::GammaDet { .. } => "gamma-det",
        Command::Chirotope { .. } => "chirotope",
        Command::Cocircuits { .. } => "cocircuits",
        Command::Covectors { .. } => "covectors",
        Command::Descartes { command } => match command {
            DescartesCommand::Bnd { .. } => "descartes bnd",
            DescartesCommand::Ex { .. } => "descartes ex",
            DescartesCommand::Cone { .. } => "descartes cone",
        },
        Command::Crn { command } => match command {
            CrnCommand::Preclude { .. } => "crn preclude",
            CrnCommand::Special { .. } => "crn special",
        },
        Command::Oracle { command } => match command {
            OracleCommand::Sample { .. } => "oracle sample",
            OracleCommand::GammaDet { .. } => "oracle gamma-det",
            OracleCommand::Gale { .. } => "oracle gale",
            OracleCommand::SignSet { .. } => "oracle sign-set",
        },
    }
}

fn error_kind(e: &Error) -> (&'static str, u8) {
    match e {
        Error::TooLarge(_) => ("too_large", EXIT_TOO_LARGE),
        Error::Internal(_) | Error::VerificationFailed(_) => ("internal", EXIT_INTERNAL),
        _ => ("input", EXIT_INPUT),
    }
}

fn emit(cli: &Cli, doc: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
    match &cli.output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs as usize).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INTERNAL);
    }
    let name = command_name(&cli.command);
    let (doc, code) = match run(&cli) {
        Ok(out) => {
            eprintln!("{name}: {}", out.summary);
            let mut doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": name,
                "result": out.result,
            });
            if let Some(h) = out.holds {
                doc["holds"] = json!(h);
            }
            let code = match out.holds {
                Some(false) => EXIT_FAILS,
                _ => EXIT_HOLDS,
            };
            (doc, code)
        }
        Err(e) => {
            let (kind, code) = error_kind(&e);
            eprintln!("{name}: error: {e}");
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": name,
                "error": { "kind": kind, "message": e.to_string() },
            });
            (doc, code)
        }
    };
    if let Err(msg) = emit(&cli, &doc) {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(code)
}
