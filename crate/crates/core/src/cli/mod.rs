//! Command-line front end. Exit codes: 0 ok / equivalent, 1 rejected /
//! not-equivalent, 2 input error, 3 unknown, 4 outside the supported
//! fragment.

mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::exc_theory::{decide_exc_core, DualityMap, ExcError};
use crate::kernel::{check_derivation, parse_derivation, print_derivation, Derivation};
use crate::semantics::{eval, parse_model, print_model, sampling_seed};
use crate::state_theory::{self, DecideOptions, Decision, Oracle, StateError};
use crate::syntax::{parse_equation, parse_signature, parse_term, Signature, TermKind, TheoryId};

pub use report::{parse_structured, Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_FRAGMENT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "decor", version, about = "Decorated equational logics of state and exceptions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report layout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TheoryArg {
    Com,
    Mon,
    St,
    Exc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Syntactic,
    Semantic,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Replay a derivation through the kernel.
    Check { sig: PathBuf, drv: PathBuf },
    /// Decide an equation; equivalent verdicts come with a certificate.
    Decide {
        sig: PathBuf,
        equation: String,
        #[arg(long, value_enum, default_value_t = TheoryArg::St)]
        theory: TheoryArg,
        #[arg(long, value_enum, default_value_t = OracleArg::Syntactic)]
        oracle: OracleArg,
        /// Largest carrier size for model enumeration.
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Write the certificate here instead of inline.
        #[arg(long)]
        emit_cert: Option<PathBuf>,
        /// Renaming used by the exceptions duality, as `a=b,c=d`.
        #[arg(long)]
        map: Option<String>,
    },
    /// Reduce an equation to equations between pure terms.
    Reduce {
        sig: PathBuf,
        equation: String,
        /// Write the derivation of the equation from the pure equations here.
        #[arg(long)]
        emit_cert: Option<PathBuf>,
        /// Write the derivation of the pure equations from the equation here.
        #[arg(long)]
        emit_forward: Option<PathBuf>,
    },
    /// Print the canonical form of a term.
    Normalize {
        sig: PathBuf,
        term: String,
        #[arg(long)]
        emit_cert: Option<PathBuf>,
    },
    /// Print the function table of a term in a finite model.
    Eval {
        sig: PathBuf,
        term: String,
        #[arg(long)]
        model: PathBuf,
    },
    /// Transport a signature, derivation or equation to the mirror logic.
    Dualize {
        /// A `.sig` file, or a `.drv` file together with `--sig`.
        file: Option<PathBuf>,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// An equation over `--sig`, instead of a file.
        #[arg(long)]
        equation: Option<String>,
        #[arg(long)]
        map: Option<String>,
        /// Write the result here instead of into the report.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// What a run printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn input(msg: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, msg: msg.to_string() }
    }
    fn fragment(msg: impl ToString) -> Self {
        Failure { code: EXIT_FRAGMENT, msg: msg.to_string() }
    }
}

impl From<StateError> for Failure {
    fn from(e: StateError) -> Self {
        let code = if e.is_fragment_violation() { EXIT_FRAGMENT } else { EXIT_INPUT };
        Failure { code, msg: e.to_string() }
    }
}

impl From<ExcError> for Failure {
    fn from(e: ExcError) -> Self {
        let code = if e.is_fragment_violation() { EXIT_FRAGMENT } else { EXIT_INPUT };
        Failure { code, msg: e.to_string() }
    }
}

fn read(p: &Path) -> Result<String, Failure> {
    fs::read_to_string(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
}

fn write(p: &Path, text: &str) -> Result<(), Failure> {
    fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
}

fn load_sig(p: &Path) -> Result<Signature, Failure> {
    parse_signature(&read(p)?).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
}

fn load_map(m: &Option<String>) -> Result<DualityMap, Failure> {
    match m {
        Some(t) => DualityMap::parse(t).map_err(Failure::input),
        None => Ok(DualityMap::identity()),
    }
}

/// Writes `d` to `path`, or inlines it into the report.
fn ship(r: &mut Report, key: &'static str, d: &Derivation, path: &Option<PathBuf>) -> Result<(), Failure> {
    let text = print_derivation(d);
    match path {
        Some(p) => {
            write(p, &text)?;
            r.field(key, p.display().to_string());
        }
        None => {
            r.field(key, "inline");
            r.field("derivation", text);
        }
    }
    Ok(())
}

/// Parses the arguments and runs one command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let start = Instant::now();
    let mut r = Report::new(echo(&cli.command));
    let code = match execute(&cli.command, &mut r) {
        Ok(c) => c,
        Err(f) => {
            return Outcome { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.msg) };
        }
    };
    r.elapsed = start.elapsed();
    Outcome { code, stdout: r.render(cli.format), stderr: String::new() }
}

fn echo(c: &Command) -> String {
    let p = |p: &Path| p.display().to_string();
    match c {
        Command::Check { sig, drv } => format!("check {} {}", p(sig), p(drv)),
        Command::Decide { sig, equation, .. } => format!("decide {} {equation}", p(sig)),
        Command::Reduce { sig, equation, .. } => format!("reduce {} {equation}", p(sig)),
        Command::Normalize { sig, term, .. } => format!("normalize {} {term}", p(sig)),
        Command::Eval { sig, term, model } => format!("eval {} {term} --model {}", p(sig), p(model)),
        Command::Dualize { file, equation, .. } => match (file, equation) {
            (Some(f), _) => format!("dualize {}", p(f)),
            (None, Some(e)) => format!("dualize --equation {e}"),
            (None, None) => "dualize".into(),
        },
    }
}

fn execute(c: &Command, r: &mut Report) -> Result<i32, Failure> {
    match c {
        Command::Check { sig, drv } => cmd_check(sig, drv, r),
        Command::Decide { sig, equation, theory, oracle, max_size, emit_cert, map } => {
            let opts = DecideOptions {
                oracle: match oracle {
                    OracleArg::Syntactic => Oracle::Syntactic,
                    OracleArg::Semantic => Oracle::Semantic,
                },
                max_size: *max_size,
                seed: sampling_seed(),
            };
            cmd_decide(sig, equation, *theory, &opts, emit_cert, map, r)
        }
        Command::Reduce { sig, equation, emit_cert, emit_forward } => cmd_reduce(sig, equation, emit_cert, emit_forward, r),
        Command::Normalize { sig, term, emit_cert } => cmd_normalize(sig, term, emit_cert, r),
        Command::Eval { sig, term, model } => cmd_eval(sig, term, model, r),
        Command::Dualize { file, sig, equation, map, output } => cmd_dualize(file, sig, equation, map, output, r),
    }
}

fn cmd_check(sig: &Path, drv: &Path, r: &mut Report) -> Result<i32, Failure> {
    let s = load_sig(sig)?;
    let d = parse_derivation(&read(drv)?, &s).map_err(|e| Failure::input(format!("{}: {e}", drv.display())))?;
    r.field("theory", d.theory.to_string());
    r.field("steps", d.steps.len().to_string());
    match check_derivation(&d, &s) {
        Ok(_) => {
            r.verdict = "ok";
            if let Some(e) = d.last_equation() {
                r.field("conclusion", e.to_string());
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            r.verdict = "rejected";
            r.field("failed-step", e.step.to_string());
            r.field("rule", e.rule.clone());
            r.field("error", e.error.to_string());
            Ok(EXIT_NO)
        }
    }
}

fn cmd_decide(
    sig: &Path,
    eq: &str,
    theory: TheoryArg,
    opts: &DecideOptions,
    emit: &Option<PathBuf>,
    map: &Option<String>,
    r: &mut Report,
) -> Result<i32, Failure> {
    let s = load_sig(sig)?;
    let e = parse_equation(eq, &s).map_err(Failure::input)?;
    let th = match theory {
        TheoryArg::St => TheoryId::St,
        TheoryArg::Exc => TheoryId::Exc,
        TheoryArg::Com | TheoryArg::Mon => {
            return Err(Failure::fragment("the decision procedure covers the st and exc logics"));
        }
    };
    r.field("theory", th.to_string());
    r.field("oracle", format!("{:?}", opts.oracle).to_lowercase());
    let d = match th {
        TheoryId::St => state_theory::decide(&e, &s, opts)?,
        _ => decide_exc_core(&e, &s, &load_map(map)?, opts)?,
    };
    r.verdict = d.word();
    match d {
        Decision::Equivalent { certificate } => {
            ship(r, "certificate", &certificate, emit)?;
            Ok(EXIT_OK)
        }
        Decision::NotEquivalent { failed, countermodel } => {
            if let Some(f) = failed {
                r.field("failed", f.to_string());
            }
            if let Some(cm) = countermodel {
                r.field("countermodel", print_model(&cm.model));
                r.field("input", cm.input);
                r.field("lhs", cm.lhs);
                r.field("rhs", cm.rhs);
            }
            Ok(EXIT_NO)
        }
        Decision::Unknown { undecided } => {
            for u in undecided {
                r.field("undecided", u.to_string());
            }
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn cmd_reduce(
    sig: &Path,
    eq: &str,
    emit: &Option<PathBuf>,
    forward: &Option<PathBuf>,
    r: &mut Report,
) -> Result<i32, Failure> {
    let s = load_sig(sig)?;
    let e = parse_equation(eq, &s).map_err(Failure::input)?;
    let red = state_theory::reduce_equation(&e, &s)?;
    r.verdict = "ok";
    r.field("count", red.pure.len().to_string());
    for p in &red.pure {
        r.field("pure", p.to_string());
    }
    ship(r, "certificate", &red.backward, emit)?;
    if let Some(p) = forward {
        write(p, &print_derivation(&red.forward))?;
        r.field("forward", p.display().to_string());
    }
    Ok(EXIT_OK)
}

fn cmd_normalize(sig: &Path, term: &str, emit: &Option<PathBuf>, r: &mut Report) -> Result<i32, Failure> {
    let s = load_sig(sig)?;
    let t = parse_term(term, &s).map_err(Failure::input)?;
    let (form, d) = state_theory::normalize_modifier(&t, &s)?;
    let ft = form.term(&s.locations[0].0);
    r.verdict = "ok";
    r.field("canonical", ft.to_string());
    r.field("lookups", ft.count(&|k| matches!(k, TermKind::Lookup(_))).to_string());
    r.field("updates", ft.count(&|k| matches!(k, TermKind::Update(_))).to_string());
    ship(r, "certificate", &d, emit)?;
    Ok(EXIT_OK)
}

fn cmd_eval(sig: &Path, term: &str, model: &Path, r: &mut Report) -> Result<i32, Failure> {
    let s = load_sig(sig)?;
    let t = parse_term(term, &s).map_err(Failure::input)?;
    let m = parse_model(&read(model)?, &s).map_err(|e| Failure::input(format!("{}: {e}", model.display())))?;
    let table = eval(&t, &m, &s).map_err(Failure::input)?;
    r.verdict = "ok";
    r.field("rows", table.len().to_string());
    r.field("table", table.render(&m).join("\n"));
    Ok(EXIT_OK)
}

fn cmd_dualize(
    file: &Option<PathBuf>,
    sig: &Option<PathBuf>,
    equation: &Option<String>,
    map: &Option<String>,
    output: &Option<PathBuf>,
    r: &mut Report,
) -> Result<i32, Failure> {
    let m = load_map(map)?;
    let text = match (file, equation) {
        (Some(f), None) if f.extension().is_some_and(|x| x == "drv") => {
            let sp = sig.as_ref().ok_or_else(|| Failure::input("dualizing a derivation needs --sig"))?;
            let s = load_sig(sp)?;
            let d = parse_derivation(&read(f)?, &s).map_err(|e| Failure::input(format!("{}: {e}", f.display())))?;
            print_derivation(&m.derivation(&d).map_err(Failure::fragment)?)
        }
        (Some(f), None) => m.signature(&load_sig(f)?).map_err(Failure::fragment)?.to_string(),
        (None, Some(e)) => {
            let sp = sig.as_ref().ok_or_else(|| Failure::input("dualizing an equation needs --sig"))?;
            let s = load_sig(sp)?;
            let e = parse_equation(e, &s).map_err(Failure::input)?;
            format!("{}\n", m.equation(&e).map_err(Failure::fragment)?)
        }
        _ => return Err(Failure::input("give either a file or --equation")),
    };
    r.verdict = "ok";
    match output {
        Some(p) => {
            write(p, &text)?;
            r.field("output", p.display().to_string());
        }
        None => r.field("dual", text.trim_end().to_string()),
    }
    Ok(EXIT_OK)
}
