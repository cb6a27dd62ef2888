//! Command-line front end for the `opbracket` engine.
//!
//! [`run`] takes the argument vector and standard input and returns the text
//! for both output streams plus the exit code, so the binary is a thin shell
//! around it and tests can call it in-process.

use std::fmt::Write as _;
use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};

use opbracket::expr::{parse_comb, parse_operator};
use opbracket::poisson::{
    self, check_axioms, covector, extension_obstruction_demo, order_at, parse_field, queer_witness,
    sharp, tensor_at, AxiomReport,
};
use opbracket::trunc::{self, ConvergenceRow, FdReport, IllPosedReport};
use opbracket::{
    jet, parse_expr, parse_point, BracketSpec, Error, Expression, OperatorSymbol, Rational,
};

#[derive(Parser, Debug)]
#[command(
    name = "opbracket",
    version,
    about = "Exact queer Poisson brackets on l2 x R"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Digits after the decimal point for floats.
    #[arg(long, global = true, default_value_t = 12)]
    pub precision: usize,
    /// Read positional DSL arguments from a file, one per nonempty line.
    #[arg(long, global = true)]
    pub file: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Pair {
    #[arg(long)]
    pub d1: String,
    #[arg(long)]
    pub d2: String,
    /// Accept fields that fail the commutation check.
    #[arg(long)]
    pub unchecked: bool,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Value of an expression at a point.
    Eval {
        expr: Option<String>,
        #[arg(long)]
        at: String,
    },
    /// Differential at a point.
    Grad {
        expr: Option<String>,
        #[arg(long)]
        at: String,
    },
    /// Second differential at a point.
    Hess {
        expr: Option<String>,
        #[arg(long)]
        at: String,
    },
    /// delta_ell of an expression.
    Delta { expr: Option<String> },
    /// `{f, g}`, symbolically or at `--at`.
    Bracket {
        f: Option<String>,
        g: Option<String>,
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        at: Option<String>,
    },
    /// Hamiltonian field of `h`.
    Hamfield {
        h: Option<String>,
        #[command(flatten)]
        pair: Pair,
    },
    /// Exact check of skew-symmetry, Jacobi and Leibniz.
    Axioms {
        #[command(flatten)]
        pair: Pair,
    },
    /// Order of a field at a point.
    Order {
        field: Option<String>,
        #[arg(long)]
        at: String,
    },
    /// Poisson tensor at a point.
    Tensor {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        at: String,
    },
    /// Pair `(h, f)` certifying queerness at a point.
    Witness {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        at: String,
    },
    /// `Pi_m(mu, .)` for the covector `(vpart, xpart)`.
    Sharp {
        vpart: Option<String>,
        #[arg(allow_hyphen_values = true)]
        xpart: Option<String>,
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        at: String,
    },
    /// Polynomial on `v_1..v_n, x`.
    Truncate {
        expr: Option<String>,
        #[arg(long)]
        n: usize,
    },
    /// Symbolic jets against finite differences of the truncation.
    Fdcheck {
        expr: Option<String>,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = trunc::DEFAULT_STEP)]
        h: f64,
    },
    /// Diagonal entries of an operator against its ell value.
    Ellconv {
        oper: Option<String>,
        #[arg(long, value_delimiter = ',', default_values_t = [10, 100, 1000])]
        ns: Vec<usize>,
    },
    /// Canned computations.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand, Debug)]
pub enum Demo {
    /// Hamilton's equations for a queer Hamiltonian field.
    IllPosed {
        /// Hamiltonian, `0-x` by default.
        h: Option<String>,
        #[arg(long, default_value = "field(queer=1)")]
        d1: String,
        #[arg(long, default_value = "field(dx=1)")]
        d2: String,
        #[arg(long, default_value = "point([1:1],0)")]
        at: String,
        #[arg(long, value_delimiter = ',', default_values_t = trunc::DEMO_SIZES)]
        ns: Vec<usize>,
    },
    /// `delta_ell` has no derivation extension to vector-valued functions.
    NoExtension,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Exit code for an engine error: 2 for syntax, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_syntax() {
        2
    } else {
        1
    }
}

pub fn run<I, S>(args: I, stdin: &str) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    stdout: e.to_string(),
                    ..Outcome::default()
                },
                _ => {
                    let first = e.to_string();
                    let first = first
                        .lines()
                        .next()
                        .unwrap_or("")
                        .trim_start_matches("error: ");
                    Outcome {
                        stderr: format!("UsageError {first}\n"),
                        code: 2,
                        ..Outcome::default()
                    }
                }
            };
        }
    };
    let mut out = String::new();
    match execute(&cli, stdin, &mut out) {
        Ok(()) => Outcome {
            stdout: out,
            ..Outcome::default()
        },
        Err(e) => Outcome {
            stdout: out,
            stderr: format!("{e}\n"),
            code: exit_code(&e),
        },
    }
}

/// Positional DSL arguments: given ones first, then lines of `--file`, with
/// `-` standing for standard input.
struct Inputs {
    queue: Vec<String>,
}

impl Inputs {
    fn new(g: &Global) -> Result<Self, Error> {
        let mut queue = Vec::new();
        if let Some(path) = &g.file {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::domain(format!("cannot read {path}: {e}")))?;
            queue.extend(
                text.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(String::from),
            );
        }
        Ok(Inputs { queue })
    }

    fn take(&mut self, given: &Option<String>, stdin: &str, what: &str) -> Result<String, Error> {
        match given {
            Some(s) if s == "-" => Ok(stdin.trim().to_string()),
            Some(s) => Ok(s.clone()),
            None if !self.queue.is_empty() => Ok(self.queue.remove(0)),
            None => Err(Error::syntax(0, format!("missing {what}"))),
        }
    }
}

fn bracket_spec(p: &Pair) -> Result<BracketSpec, Error> {
    let d1 = parse_field(&p.d1)?;
    let d2 = parse_field(&p.d2)?;
    if p.unchecked {
        Ok(BracketSpec::unchecked(d1, d2))
    } else {
        BracketSpec::new(d1, d2)
    }
}

fn constant(text: &str) -> Result<Rational, Error> {
    parse_expr(text)?
        .canonical()
        .as_constant()
        .ok_or_else(|| Error::domain(format!("expected a rational constant, got {text}")))
}

fn operator(text: &str) -> Result<OperatorSymbol, Error> {
    if text.trim_start().starts_with("op") {
        return parse_operator(text);
    }
    match parse_expr(text)? {
        Expression::Quad(a) => Ok(a),
        other => Err(Error::domain(format!(
            "expected an operator literal or q(...), got {other}"
        ))),
    }
}

fn execute(cli: &Cli, stdin: &str, out: &mut String) -> Result<(), Error> {
    let g = &cli.global;
    let mut inputs = Inputs::new(g)?;
    let mut expr = |given: &Option<String>, what: &str| -> Result<Expression, Error> {
        parse_expr(&inputs.take(given, stdin, what)?)
    };
    match &cli.verb {
        Verb::Eval { expr: e, at } => {
            let f = expr(e, "expression")?;
            let m = parse_point(at)?;
            writeln!(out, "{}", f.eval(&m)).unwrap();
        }
        Verb::Grad { expr: e, at } => {
            let f = expr(e, "expression")?;
            let d = jet::gradient(&f, &parse_point(at)?);
            writeln!(out, "v={}\nx={}", d.vpart, d.xpart).unwrap();
        }
        Verb::Hess { expr: e, at } => {
            let f = expr(e, "expression")?;
            writeln!(out, "{}", jet::hessian(&f, &parse_point(at)?)).unwrap();
        }
        Verb::Delta { expr: e } => {
            let f = expr(e, "expression")?;
            writeln!(out, "{}", jet::delta_ell(&f)).unwrap();
        }
        Verb::Bracket { f, g: gg, pair, at } => {
            let fe = expr(f, "first expression")?;
            let ge = expr(gg, "second expression")?;
            let b = bracket_spec(pair)?;
            let value = poisson::bracket(&b, &fe, &ge);
            match at {
                Some(at) => writeln!(out, "{}", value.eval(&parse_point(at)?)).unwrap(),
                None => writeln!(out, "{value}").unwrap(),
            }
        }
        Verb::Hamfield { h, pair } => {
            let he = expr(h, "hamiltonian")?;
            let b = bracket_spec(pair)?;
            writeln!(out, "{}", poisson::hamiltonian_field(&b, &he)).unwrap();
        }
        Verb::Axioms { pair } => {
            let b = bracket_spec(pair)?;
            let report = check_axioms(&b, g.trials, g.seed);
            out.push_str(&emit_axioms(&report, g.format));
            report.into_result()?;
        }
        Verb::Order { field, at } => {
            let text = inputs.take(field, stdin, "field")?;
            let d = parse_field(&text)?;
            writeln!(out, "{}", order_at(&d, &parse_point(at)?)).unwrap();
        }
        Verb::Tensor { pair, at } => {
            let b = bracket_spec(pair)?;
            writeln!(out, "{}", tensor_at(&b, &parse_point(at)?)?).unwrap();
        }
        Verb::Witness { pair, at } => {
            let b = bracket_spec(pair)?;
            let w = queer_witness(&b, &parse_point(at)?)?;
            writeln!(out, "h={}\nf={}\nvalue={}", w.h, w.f, w.value).unwrap();
        }
        Verb::Sharp {
            vpart,
            xpart,
            pair,
            at,
        } => {
            let v = parse_comb(&inputs.take(vpart, stdin, "covector v-part")?)?;
            let x = match xpart {
                Some(s) => constant(s)?,
                None => opbracket::rational::zero(),
            };
            let v = v.as_finite().ok_or_else(|| {
                Error::domain("covector v-part must have finite support".to_string())
            })?;
            let b = bracket_spec(pair)?;
            let t = tensor_at(&b, &parse_point(at)?)?;
            writeln!(out, "{}", sharp(&t, &covector(&v, x))).unwrap();
        }
        Verb::Truncate { expr: e, n } => {
            let f = expr(e, "expression")?;
            writeln!(out, "{}", trunc::truncate(&f, *n)).unwrap();
        }
        Verb::Fdcheck { expr: e, at, n, h } => {
            let f = expr(e, "expression")?;
            let report = trunc::fd_report(&f, &parse_point(at)?, *n, *h)?;
            out.push_str(&emit_fdcheck(&report, g.format, g.precision));
            report.check(trunc::FD_TOLERANCE)?;
        }
        Verb::Ellconv { oper, ns } => {
            let a = operator(&inputs.take(oper, stdin, "operator")?)?;
            let rows = trunc::ell_convergence(&a, ns);
            out.push_str(&emit_ellconv(&rows, g.format, g.precision));
        }
        Verb::Demo { which } => match which {
            Demo::IllPosed { h, d1, d2, at, ns } => {
                let he = match h {
                    Some(_) => expr(h, "hamiltonian")?,
                    None => -Expression::X,
                };
                let b = BracketSpec::new(parse_field(d1)?, parse_field(d2)?)?;
                let report = trunc::ill_posedness_demo(&b, &he, &parse_point(at)?, ns);
                out.push_str(&emit_ill_posed(&report, g.format, g.precision));
            }
            Demo::NoExtension => {
                let r = extension_obstruction_demo();
                match g.format {
                    Format::Text => writeln!(out, "lhs={}\nrhs={}", r.lhs, r.rhs),
                    Format::Csv => writeln!(out, "lhs,rhs\n{},{}", r.lhs, r.rhs),
                }
                .unwrap();
            }
        },
    }
    Ok(())
}

/// Fixed-point with trailing zeros removed; scientific below `1e-4`.
pub fn format_float(x: f64, precision: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < 1e-4 {
        let s = format!("{x:.precision$e}");
        let (mant, exp) = s.split_once('e').expect("scientific form");
        return format!("{}e{exp}", trim_zeros(mant));
    }
    let s = trim_zeros(&format!("{x:.precision$}"));
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn emit_axioms(r: &AxiomReport, format: Format) -> String {
    let mut s = String::new();
    if format == Format::Csv {
        s.push_str("axiom,trials,failures\n");
    }
    for row in &r.rows {
        match format {
            Format::Csv => writeln!(s, "{},{},{}", row.axiom.name(), row.trials, row.failures),
            Format::Text => writeln!(
                s,
                "{:<8} trials={} failures={}",
                row.axiom.name(),
                row.trials,
                row.failures
            ),
        }
        .unwrap();
    }
    s
}

pub fn emit_fdcheck(r: &FdReport, format: Format, precision: usize) -> String {
    let mut s = String::new();
    if format == Format::Csv {
        s.push_str("block,max_rel_err\n");
    }
    for row in &r.rows {
        let err = format_float(row.max_rel_err, precision);
        match format {
            Format::Csv => writeln!(s, "{},{err}", row.block),
            Format::Text => writeln!(s, "{:<8} max_rel_err={err} exact={}", row.block, row.exact),
        }
        .unwrap();
    }
    s
}

pub fn emit_ellconv(rows: &[ConvergenceRow], format: Format, precision: usize) -> String {
    let mut s = String::new();
    if format == Format::Csv {
        s.push_str("n,ell_n,target,abs_err\n");
    }
    for r in rows {
        match format {
            Format::Csv => writeln!(
                s,
                "{},{},{},{}",
                r.n,
                format_float(r.ell_n_f64(), precision),
                r.target,
                format_float(r.abs_err_f64(), precision)
            ),
            Format::Text => writeln!(
                s,
                "n={} ell_n={} target={} abs_err={}",
                r.n, r.ell_n, r.target, r.abs_err
            ),
        }
        .unwrap();
    }
    s
}

pub fn emit_ill_posed(r: &IllPosedReport, format: Format, precision: usize) -> String {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("n,initial_drho_dt,mean_drho_dt\n");
            for run in &r.runs {
                writeln!(
                    s,
                    "{},{},{}",
                    run.n,
                    format_float(run.initial_drho_dt, precision),
                    format_float(run.mean_drho_dt, precision)
                )
                .unwrap();
            }
        }
        Format::Text => {
            writeln!(s, "hamiltonian field: {}", r.hamiltonian).unwrap();
            writeln!(
                s,
                "drho/dt = {} (at {}: {})",
                r.drho_dt, r.start, r.drho_dt_at_start
            )
            .unwrap();
            for (name, e) in &r.velocities {
                writeln!(s, "d<v,{name}>/dt = {e}").unwrap();
            }
            writeln!(s, "dv/dt = 0: {}", r.dv_dt_zero()).unwrap();
            writeln!(
                s,
                "chain rule 2<v,dv/dt> at start: {}",
                r.chain_rule_at_start
            )
            .unwrap();
            writeln!(s, "consistent: {}", r.consistent()).unwrap();
            for run in &r.runs {
                writeln!(
                    s,
                    "truncated n={}: initial drho/dt={} mean drho/dt={}",
                    run.n,
                    format_float(run.initial_drho_dt, precision),
                    format_float(run.mean_drho_dt, precision)
                )
                .unwrap();
            }
        }
    }
    s
}
