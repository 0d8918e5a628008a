//! `antloop`: analyze, simulate, generate and check linear loops.
//!
//! Exit codes for `analyze`: 0 Terminating, 1 NonTerminating, 2 Unknown for
//! the requested domain, 64 input error, 65 irrational real eigenvalue,
//! 70 internal analysis error. `simulate` exits 0 when the guard fails
//! within the horizon and 2 otherwise. `check` exits 1 on any failure.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Signed;

use antloop::ant::{analyze_with, AnalyzeOptions, Domain, Verdict, DEFAULT_INT_BUDGET};
use antloop::arith::rational::{fmt_rational, parse_rational};
use antloop::arith::Rational;
use antloop::check::{check_corpus, summarize, CheckConfig};
use antloop::corpus::{curated, generate, read_corpus, write_corpus, Corpus, GenConfig};
use antloop::loopfront::json::program_from_json;
use antloop::loopfront::{parse, ClassTag, LoopProgram};
use antloop::semilinear::format::to_smt2;
use antloop::simulate::{run, DEFAULT_HORIZON};
use antloop::Error;

const EXIT_INPUT: u8 = 64;
const EXIT_IRRATIONAL: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "antloop", version, about = "Exact termination analysis of linear and affine while loops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the non-terminating input set, its complement and verdicts.
    Analyze(AnalyzeArgs),
    /// Run a loop exactly from one initial point.
    Simulate(SimulateArgs),
    /// Write a seeded random corpus, or the curated one, to a directory.
    Generate(GenerateArgs),
    /// Run the property suite over a corpus directory.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Loop source file, or `-` for standard input.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Read the input as JSON matrices `{"vars","A","c","F","b"}` instead of loop syntax.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DomainArg {
    Real,
    Rational,
    Integer,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Real => Domain::Real,
            DomainArg::Rational => Domain::Rational,
            DomainArg::Integer => Domain::Integer,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Smt2,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Domain whose verdict sets the exit code.
    #[arg(long, value_enum, default_value = "rational")]
    domain: DomainArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Node budget for the integer emptiness search.
    #[arg(long, default_value_t = DEFAULT_INT_BUDGET)]
    int_budget: usize,
    /// Include the per-row derivation (reductions, cells, eigenvalues).
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Initial point, comma separated rationals such as `1,-2,3/4`.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Maximum number of updates.
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: usize,
    /// `text` or `json`.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Print exact fractions instead of decimal approximations.
    #[arg(long)]
    exact: bool,
    /// Print every step, not only the first and last few.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    /// One guard, no constants (`H`).
    H,
    /// Several guards, no constants (`G`).
    G,
    /// Guards and update with constants (`A`).
    A,
}

impl From<ClassArg> for ClassTag {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::H => ClassTag::Homogeneous,
            ClassArg::G => ClassTag::GeneralizedHomogeneous,
            ClassArg::A => ClassTag::Affine,
        }
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Write the curated worked examples instead of random programs.
    #[arg(long)]
    curated: bool,
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, default_value_t = 1)]
    m_min: usize,
    #[arg(long, default_value_t = 3)]
    m_max: usize,
    /// Program classes, cycled in order.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "h")]
    class: Vec<ClassArg>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Corpus directory with `manifest.json` and one file per program.
    #[arg(required_unless_present = "curated")]
    corpus: Option<PathBuf>,
    /// Check the built-in curated corpus.
    #[arg(long, conflicts_with = "corpus")]
    curated: bool,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: usize,
    /// Seed for sample points.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Minimum number of sample points per program and per regular pair.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_INT_BUDGET)]
    int_budget: usize,
    /// `text` or `json`.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load_program(args: &InputArgs) -> Result<LoopProgram> {
    let text = read_input(&args.input)?;
    let p = if args.json { program_from_json(&text)? } else { parse(&text)? };
    Ok(p)
}

fn parse_point(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|t| parse_rational(t.trim()).ok_or_else(|| anyhow!("`{}` is not a rational number", t.trim())))
        .collect()
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Terminating => 0,
        Verdict::NonTerminating => 1,
        Verdict::Unknown => 2,
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8> {
    let p = load_program(&args.input)?;
    let rep = analyze_with(&p, AnalyzeOptions { int_budget: args.int_budget })?;
    let domain = Domain::from(args.domain);
    let verdict = rep.verdict(domain);
    let mut out = io::stdout().lock();
    match args.format {
        Format::Text => {
            write!(out, "{}", rep.to_text())?;
            if args.trace {
                writeln!(out, "Trace:\n{}", serde_json::to_string_pretty(&rep.trace)?)?;
            }
        }
        Format::Json => {
            let mut v = rep.to_json();
            let obj = v.as_object_mut().expect("report is an object");
            if !args.trace {
                obj.remove("trace");
            }
            obj.insert("domain".into(), serde_json::to_value(domain)?);
            obj.insert("verdict".into(), serde_json::to_value(verdict)?);
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Smt2 => write!(out, "{}", to_smt2(&rep.ant_set, "ant"))?,
    }
    Ok(verdict_code(verdict))
}

/// The exact value when it is short, otherwise six significant digits with
/// a leading `~`.
fn approx(r: &Rational) -> String {
    let exact = fmt_rational(r);
    if exact.len() <= 16 {
        return exact;
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let (num, den) = (r.numer().abs(), r.denom().clone());
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let digits = |e: i64| -> BigInt {
        let shift = 5 - e;
        let (n, d) = if shift >= 0 {
            (&num * BigInt::from(10).pow(shift as u32), den.clone())
        } else {
            (num.clone(), &den * BigInt::from(10).pow((-shift) as u32))
        };
        (n * 2 + &d) / (d * 2)
    };
    let mut q = digits(e);
    if q >= BigInt::from(1_000_000) {
        e += 1;
        q = digits(e);
    } else if q < BigInt::from(100_000) {
        e -= 1;
        q = digits(e);
    }
    let s = q.to_string();
    format!("~{sign}{}.{}e{e}", &s[..1], &s[1..])
}

fn show(v: &[Rational], exact: bool) -> String {
    v.iter().map(|x| if exact { fmt_rational(x) } else { approx(x) }).collect::<Vec<_>>().join(", ")
}

fn cmd_simulate(args: &SimulateArgs) -> Result<u8> {
    let p = load_program(&args.input)?;
    let x0 = parse_point(&args.point)?;
    let t = run(&p, &x0, args.horizon)?;
    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&t)?)?,
        Format::Smt2 => bail!("simulate supports --format text or json"),
        Format::Text => {
            writeln!(out, "variables: {}", p.var_names.join(", "))?;
            let last = t.points.len() - 1;
            for (k, (x, g)) in t.points.iter().zip(&t.guard_values).enumerate() {
                if args.trace || k < 5 || k + 3 > last {
                    writeln!(out, "step {k}: x = ({}), guard = ({})", show(x, args.exact), show(g, args.exact))?;
                } else if k == 5 {
                    writeln!(out, "...")?;
                }
            }
            match &t.first_violation {
                Some(v) => writeln!(out, "guard row {} fails at step {}", v.row + 1, v.step)?,
                None => writeln!(out, "guard holds for all {} steps", args.horizon)?,
            }
            if !args.exact {
                writeln!(out, "(values marked ~ are rounded; signs are exact)")?;
            }
        }
    }
    Ok(if t.terminated() { 0 } else { 2 })
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8> {
    let corpus = if args.curated {
        Corpus::from_entries("curated worked examples", curated())
    } else {
        generate(&GenConfig {
            n_min: args.n_min,
            n_max: args.n_max,
            m_min: args.m_min,
            m_max: args.m_max,
            classes: args.class.iter().map(|&c| c.into()).collect(),
            count: args.count,
            seed: args.seed,
        })
    };
    write_corpus(&args.out, &corpus)?;
    println!("wrote {} programs to {}", corpus.entries.len(), args.out.display());
    Ok(0)
}

fn cmd_check(args: &CheckArgs) -> Result<u8> {
    let corpus = match &args.corpus {
        Some(dir) => read_corpus(dir)?,
        None => Corpus::from_entries("curated worked examples", curated()),
    };
    let cfg = CheckConfig {
        horizon: args.horizon,
        samples: args.samples,
        seed: args.seed,
        int_budget: args.int_budget,
        ..CheckConfig::default()
    };
    let results = check_corpus(&corpus.entries, &cfg);
    let summary = summarize(&results);
    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => {
            let v = serde_json::json!({ "programs": results, "summary": summary });
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Smt2 => bail!("check supports --format text or json"),
        Format::Text => {
            for r in &results {
                write!(out, "{}", r.to_text())?;
            }
            writeln!(
                out,
                "{} of {} programs passed ({} terminating, {} non-terminating; {} normal and {} regular pairs)",
                summary.passed,
                summary.programs,
                summary.terminating,
                summary.nonterminating,
                summary.normal_pairs,
                summary.regular_pairs
            )?;
            for (name, n) in &summary.checked {
                writeln!(out, "  {name}: {n} checked")?;
            }
        }
    }
    Ok(if summary.failed == 0 { 0 } else { 1 })
}

fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::IrrationalSpectrum { .. }) => EXIT_IRRATIONAL,
        Some(Error::Parse { .. } | Error::InvalidProgram(_) | Error::Json(_) | Error::Io { .. })
        | Some(Error::DimensionMismatch(_)) => EXIT_INPUT,
        Some(_) => EXIT_INTERNAL,
        None => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("antloop: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
