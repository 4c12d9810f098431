//! Command-line front end. [`run`] takes the arguments and output streams so
//! it can be driven from tests; the binary is a thin wrapper around it.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::binary::{
    cdf_to_pmf_circuit, pmf_query, pmf_to_cdf_circuit, query, round_trip_check_with, QueryMark, QueryMarks,
};
use crate::categorical::lt_encode;
use crate::circuit::{Circuit, LeafMode, Node, SemanticsTag};
use crate::continuous::{cdf_to_pdf, pdf_to_cdf};
use crate::format::{fmt_f64, parse, serialize};
use crate::oracle::{
    check_cdf_to_pdf, check_pdf_to_cdf, random_continuous_circuit, random_structured_circuit, ContinuousConfig,
};
use crate::structure::{check_network_form, check_structure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "pcirc", version, about = "Probabilistic circuit transforms and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pmf2cdf,
    Cdf2pmf,
    Pdf2cdf,
    Cdf2pdf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Binary,
    Continuous,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report smoothness and decomposability as one JSON line.
    Check {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Rewrite a circuit between representations.
    Transform {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(short, long)]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate at a point given as `x0=1,x1=0`.
    Eval {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        at: String,
    },
    /// Probability of evidence with marginalized variables marked `*`.
    Query {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        marks: String,
    },
    /// Transform and check the result against an independent oracle.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a random smooth, decomposable circuit.
    Gen {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GenKind::Binary)]
        kind: GenKind,
    },
    /// Less-Than code of `value` in a domain of size `k`.
    EncodeLt {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        value: usize,
    },
    /// Size and shape summary as one JSON line.
    Stats {
        #[arg(short, long)]
        input: PathBuf,
    },
}

enum Failure {
    Domain(String),
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn load(path: &Path) -> Result<Circuit, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Domain(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.kind)))
}

/// Parses `x0=1,x1=*` style lists into `(variable, value)` pairs.
fn parse_pairs(spec: &str) -> Result<Vec<(usize, &str)>, Failure> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (k, v) =
                item.split_once('=').ok_or_else(|| Failure::Usage(format!("expected `x<i>=<value>`, got `{item}`")))?;
            let k = k.trim();
            let idx = k.strip_prefix('x').unwrap_or(k);
            let idx = idx.parse::<usize>().map_err(|_| Failure::Usage(format!("bad variable name `{k}`")))?;
            Ok((idx, v.trim()))
        })
        .collect()
}

fn dense<T: Clone>(n: usize, pairs: Vec<(usize, T)>) -> Result<Vec<T>, Failure> {
    let mut out: Vec<Option<T>> = vec![None; n];
    for (i, v) in pairs {
        let slot = out
            .get_mut(i)
            .ok_or_else(|| Failure::Domain(format!("variable x{i} is not declared (circuit has {n})")))?;
        if slot.replace(v).is_some() {
            return Err(Failure::Usage(format!("variable x{i} given twice")));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Failure::Domain(format!("no value for variable x{i}"))))
        .collect()
}

fn transform(c: &Circuit, mode: Mode) -> Result<Circuit, Failure> {
    match mode {
        Mode::Pmf2cdf => pmf_to_cdf_circuit(c).map_err(domain),
        Mode::Cdf2pmf => cdf_to_pmf_circuit(c).map_err(domain),
        Mode::Pdf2cdf => pdf_to_cdf(c).map_err(domain),
        Mode::Cdf2pdf => cdf_to_pdf(c).map_err(domain),
    }
}

fn stats(c: &Circuit) -> serde_json::Value {
    let (mut sums, mut products, mut leaves, mut consts) = (0, 0, 0, 0);
    let mut depth = vec![0usize; c.num_nodes()];
    for (i, node) in c.nodes().iter().enumerate() {
        match node {
            Node::Sum { .. } => sums += 1,
            Node::Product { .. } => products += 1,
            Node::Leaf { .. } => leaves += 1,
            Node::Const(_) => consts += 1,
        }
        depth[i] = node.children().iter().map(|ch| depth[ch.index()] + 1).max().unwrap_or(0);
    }
    json!({
        "vars": c.num_vars(),
        "nodes": c.num_nodes(),
        "edges": c.size(),
        "sums": sums,
        "products": products,
        "leaves": leaves,
        "consts": consts,
        "depth": depth[c.root().index()],
        "tag": c.tag().map(|t| t.as_str()),
    })
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    let io = |e: std::io::Error| Failure::Domain(e.to_string());
    match cmd {
        Command::Check { input } => {
            let c = load(&input)?;
            let report = check_structure(&c);
            let network = c.is_binary().then(|| check_network_form(&c, true).is_ok());
            let line = json!({
                "smooth": report.smooth,
                "decomposable": report.decomposable,
                "pair_indicator_form": network,
                "witnesses": report.witnesses,
            });
            writeln!(out, "{line}").map_err(io)
        }
        Command::Transform { mode, input, output } => {
            let c = load(&input)?;
            let text = serialize(&transform(&c, mode)?);
            match output {
                Some(p) => std::fs::write(&p, text).map_err(|e| Failure::Domain(format!("{}: {e}", p.display()))),
                None => out.write_all(text.as_bytes()).map_err(io),
            }
        }
        Command::Eval { input, at } => {
            let c = load(&input)?;
            let pairs = parse_pairs(&at)?
                .into_iter()
                .map(|(i, v)| {
                    v.parse::<f64>().map(|x| (i, x)).map_err(|_| Failure::Usage(format!("bad value `{v}` for x{i}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let x = dense(c.num_vars(), pairs)?;
            let v = c.evaluate(&x).map_err(domain)?;
            writeln!(out, "{}", fmt_f64(v)).map_err(io)
        }
        Command::Query { input, marks } => {
            let c = load(&input)?;
            let pairs = parse_pairs(&marks)?
                .into_iter()
                .map(|(i, v)| match v {
                    "0" => Ok((i, QueryMark::Evidence0)),
                    "1" => Ok((i, QueryMark::Evidence1)),
                    "*" => Ok((i, QueryMark::Marginalized)),
                    _ => Err(Failure::Usage(format!("mark for x{i} must be 0, 1 or *, got `{v}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let m = QueryMarks(dense(c.num_vars(), pairs)?);
            let v = match c.tag() {
                Some(SemanticsTag::Pmf) => pmf_query(&c, &m),
                _ => query(&c, &m),
            }
            .map_err(domain)?;
            writeln!(out, "{}", fmt_f64(v)).map_err(io)
        }
        Command::Verify { input, mode, trials, seed } => {
            let c = load(&input)?;
            let (line, passed) = match mode {
                Mode::Pmf2cdf | Mode::Cdf2pmf => {
                    let tag = if mode == Mode::Pmf2cdf { SemanticsTag::Pmf } else { SemanticsTag::Cdf };
                    let r = round_trip_check_with(&c, tag, seed, trials).map_err(domain)?;
                    (serde_json::to_value(&r), r.passed)
                }
                Mode::Pdf2cdf => {
                    let r = check_pdf_to_cdf(&c, trials, seed).map_err(domain)?;
                    (serde_json::to_value(&r), r.passed)
                }
                Mode::Cdf2pdf => {
                    let r = check_cdf_to_pdf(&c, trials, seed).map_err(domain)?;
                    (serde_json::to_value(&r), r.passed)
                }
            };
            writeln!(out, "{}", line.map_err(domain)?).map_err(io)?;
            if passed {
                Ok(())
            } else {
                Err(Failure::Domain("verification failed".into()))
            }
        }
        Command::Gen { vars, depth, seed, kind } => {
            if vars == 0 {
                return Err(Failure::Usage("--vars must be at least 1".into()));
            }
            let c = match kind {
                GenKind::Binary => random_structured_circuit(vars, depth, seed)
                    .map_err(domain)?
                    .circuit
                    .with_tag(Some(SemanticsTag::Pmf)),
                GenKind::Continuous => {
                    random_continuous_circuit(&ContinuousConfig::new(vars, depth, seed, LeafMode::Pdf))
                }
            };
            out.write_all(serialize(&c).as_bytes()).map_err(io)
        }
        Command::EncodeLt { k, value } => {
            let code = lt_encode(value, k).map_err(domain)?;
            writeln!(out, "{code}").map_err(io)
        }
        Command::Stats { input } => {
            let c = load(&input)?;
            writeln!(out, "{}", stats(&c)).map_err(io)
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code: 0 on success, 1 on domain errors, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DOMAIN
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            EXIT_USAGE
        }
    }
}
