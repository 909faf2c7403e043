//! Command-line surface.
//!
//! Every command writes exactly one JSON document to stdout (the `csv` format
//! of `diag` being the one requested exception) and keeps diagnostics on
//! stderr. Exit codes: 0 success, 1 domain failure, 2 input or format error.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::forge::{self, ForgeCertificate, ForgeError, ForgeRequest, Interval};
use crate::graph::{parse_graph, GraphFile};
use crate::poly::Polynomial;
use crate::rational::{is_unit_interval_negative, parse_rational, to_decimal, Rational, RationalPair};
use crate::rel::{self, GadgetPolys, OracleGuard, RelError};
use crate::rootiso::{isolate_roots, refine_all, RootError};

/// Largest gadget index accepted by `gadget` and `diag`.
pub const MAX_GADGET_INDEX: usize = 60;
const DISPLAY_PLACES: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "relforge", version, about = "Exact reliability polynomials and certified reliability roots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Delcon,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reliability polynomial of a graph file.
    Rel {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "delcon")]
        method: Method,
    },
    /// Split reliability polynomial of a gadget file.
    Split { file: PathBuf },
    /// R_n, S_n and yhat_n of the gadget H_n.
    Gadget { n: usize },
    /// Isolate and refine the real roots of a polynomial (JSON) or of Rel(graph file).
    Roots {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        interval: Option<Vec<String>>,
        #[arg(long, default_value = "1/1000000")]
        eps: String,
    },
    /// Build a certified reliability root inside an interval.
    Forge {
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, required = true)]
        interval: Vec<String>,
        #[arg(long, default_value = "1/1000000")]
        eps: String,
        #[arg(long, default_value_t = forge::DEFAULT_MAX_N)]
        max_n: usize,
        #[arg(long, default_value_t = forge::DEFAULT_MAX_B)]
        max_b: usize,
        /// Use this K instead of the middle half of the interval.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        pin_k: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a forge certificate.
    Verify { file: PathBuf },
    /// Convergence table of C_n, R_n, q^(2-n) S_n and 2 q^(n-2) yhat_n at q.
    Diag {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 21)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(v: Value) -> Self {
        CommandResult { exit_code: 0, stdout: render(&v), stderr: String::new() }
    }

    fn text(s: String) -> Self {
        CommandResult { exit_code: 0, stdout: s, stderr: String::new() }
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON value serializes");
    s.push('\n');
    s
}

/// A failed command: exit code, JSON body, stderr message.
struct Failure {
    code: i32,
    body: Value,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        let message = message.into();
        Failure { code: 2, body: json!({"error": "input", "message": message}), message }
    }

    fn domain(message: impl Into<String>) -> Self {
        let message = message.into();
        Failure { code: 1, body: json!({"error": "domain", "message": message}), message }
    }
}

impl From<Failure> for CommandResult {
    fn from(f: Failure) -> Self {
        CommandResult { exit_code: f.code, stdout: render(&f.body), stderr: format!("error: {}\n", f.message) }
    }
}

impl From<RelError> for Failure {
    fn from(e: RelError) -> Self {
        match e {
            RelError::Graph(_) | RelError::GadgetIndex { .. } | RelError::IntervalOutOfRange { .. } => {
                Failure::input(e.to_string())
            }
            _ => Failure::domain(e.to_string()),
        }
    }
}

type Outcome = Result<CommandResult, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return CommandResult { exit_code: 0, stdout: e.to_string(), stderr: String::new() };
            }
            let mut f = Failure::input(e.kind().to_string());
            f.message = e.to_string().trim_start_matches("error: ").trim_end().to_string();
            return f.into();
        }
    };
    let out = match cli.command {
        Command::Rel { file, method } => cmd_rel(&file, method),
        Command::Split { file } => cmd_split(&file),
        Command::Gadget { n } => cmd_gadget(n),
        Command::Roots { file, interval, eps } => cmd_roots(&file, interval.as_deref(), &eps),
        Command::Forge { interval, eps, max_n, max_b, pin_k, out } => {
            cmd_forge(&interval, &eps, max_n, max_b, pin_k.as_deref(), out.as_ref())
        }
        Command::Verify { file } => cmd_verify(&file),
        Command::Diag { q, n_max, format } => cmd_diag(&q, n_max, format),
    };
    out.unwrap_or_else(CommandResult::from)
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn read_graph(path: &PathBuf) -> Result<GraphFile, Failure> {
    parse_graph(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn rational_arg(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::input(e.to_string()))
}

fn interval_arg(v: &[String]) -> Result<(Rational, Rational), Failure> {
    Ok((rational_arg(&v[0])?, rational_arg(&v[1])?))
}

fn poly_json(p: &Polynomial) -> Value {
    serde_json::to_value(p).expect("polynomial serializes")
}

fn cmd_rel(file: &PathBuf, method: Method) -> Outcome {
    let g = read_graph(file)?;
    let p = match method {
        Method::Brute => rel::rel_bruteforce_with(g.graph(), OracleGuard::from_env())?,
        Method::Delcon => rel::rel_delcon(g.graph())?,
    };
    Ok(CommandResult::ok(poly_json(&p)))
}

fn cmd_split(file: &PathBuf) -> Outcome {
    let GraphFile::Gadget(h) = read_graph(file)? else {
        return Err(Failure::input(format!("{}: split needs a gadget file with a `terminals u v` line", file.display())));
    };
    let p = rel::split_bruteforce_with(&h, OracleGuard::from_env())?;
    Ok(CommandResult::ok(poly_json(&p)))
}

fn cmd_gadget(n: usize) -> Outcome {
    if !(2..=MAX_GADGET_INDEX).contains(&n) {
        return Err(Failure::input(format!("gadget index must be in 2..={MAX_GADGET_INDEX}, got {n}")));
    }
    let g = GadgetPolys::new(n)?;
    Ok(CommandResult::ok(json!({
        "n": n,
        "R": poly_json(&g.r),
        "S": poly_json(&g.s),
        "yhat": {"num": poly_json(&g.yhat_numerator()), "den": poly_json(&g.s)},
    })))
}

fn cmd_roots(file: &PathBuf, interval: Option<&[String]>, eps: &str) -> Outcome {
    let text = read(file)?;
    let p: Polynomial = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?
    } else {
        let g = parse_graph(&text).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
        rel::rel_delcon(g.graph())?
    };
    let (lo, hi) = match interval {
        Some(v) => interval_arg(v)?,
        None => (-Rational::from_integer(1.into()), Rational::from_integer(0.into())),
    };
    let eps = rational_arg(eps)?;
    if eps <= Rational::from_integer(0.into()) {
        return Err(Failure::input("eps must be positive"));
    }
    let ivs = isolate_roots(&p, &lo, &hi).map_err(|e| match e {
        RootError::EndpointRoot(x) => {
            Failure::input(format!("polynomial vanishes at endpoint {x}; perturb the interval and retry"))
        }
        other => Failure::input(other.to_string()),
    })?;
    let refined = refine_all(&p, &ivs, &eps);
    Ok(CommandResult::ok(serde_json::to_value(&refined).expect("intervals serialize")))
}

fn cmd_forge(
    interval: &[String],
    eps: &str,
    max_n: usize,
    max_b: usize,
    pin_k: Option<&[String]>,
    out: Option<&PathBuf>,
) -> Outcome {
    let (lo, hi) = interval_arg(interval)?;
    let mut req = ForgeRequest::new(lo, hi);
    req.eps = rational_arg(eps)?;
    req.max_n = max_n;
    req.max_b = max_b;
    if let Some(v) = pin_k {
        let (klo, khi) = interval_arg(v)?;
        req.pinned_k = Some(Interval::new(klo, khi));
    }
    let cert = forge::forge(&req).map_err(forge_failure)?;
    if let Some(path) = out {
        fs::write(path, cert.to_json())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(CommandResult::ok(json!({
        "N": cert.n,
        "k": cert.k,
        "b": cert.b,
        "enclosure": cert.enclosure,
        "graph": cert.graph,
    })))
}

fn forge_failure(e: ForgeError) -> Failure {
    let message = e.to_string();
    let stage = e.stage();
    match e {
        ForgeError::InvalidRequest(_) => Failure::input(message),
        ForgeError::NNotFound { max_n, attempts } => Failure {
            code: 1,
            body: json!({"error": "not_found", "stage": stage, "message": message, "max_n": max_n, "attempts": attempts}),
            message,
        },
        _ => Failure { code: 1, body: json!({"error": "not_found", "stage": stage, "message": message}), message },
    }
}

fn cmd_verify(file: &PathBuf) -> Outcome {
    let cert = ForgeCertificate::from_json(&read(file)?)
        .map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
    let v = forge::verify(&cert);
    let body = serde_json::to_value(&v).expect("verification serializes");
    if v.valid {
        Ok(CommandResult::ok(json!({"valid": true})))
    } else {
        Err(Failure { code: 1, message: format!("certificate rejected: {}", v.reasons.join("; ")), body })
    }
}

fn exact_and_display(x: &Option<Rational>) -> Value {
    match x {
        Some(x) => json!({"exact": RationalPair(x.clone()), "display": to_decimal(x, DISPLAY_PLACES)}),
        None => Value::Null,
    }
}

fn cmd_diag(q: &str, n_max: usize, format: Format) -> Outcome {
    let q = rational_arg(q)?;
    if !is_unit_interval_negative(&q) {
        return Err(Failure::input(format!("q must lie in (-1, 0), got {q}")));
    }
    if n_max == 0 || n_max.is_multiple_of(2) || n_max > MAX_GADGET_INDEX {
        return Err(Failure::input(format!("n_max must be odd and at most {MAX_GADGET_INDEX}, got {n_max}")));
    }
    let rows = rel::diagnostic_rows(&q, n_max);
    match format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "C": exact_and_display(&Some(r.c.clone())),
                        "R": exact_and_display(&r.r),
                        "scaled_split": exact_and_display(&r.scaled_split),
                        "scaled_yhat": exact_and_display(&r.scaled_yhat),
                    })
                })
                .collect();
            Ok(CommandResult::ok(json!({"q": RationalPair(q), "display_places": DISPLAY_PLACES, "rows": rows})))
        }
        Format::Csv => {
            let cell = |x: &Option<Rational>| x.as_ref().map(|x| to_decimal(x, DISPLAY_PLACES)).unwrap_or_default();
            let mut s = String::from("n,C,R,scaled_split,scaled_yhat\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    cell(&Some(r.c.clone())),
                    cell(&r.r),
                    cell(&r.scaled_split),
                    cell(&r.scaled_yhat)
                ));
            }
            Ok(CommandResult::text(s))
        }
    }
}
