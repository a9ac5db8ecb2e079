use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use dyadlab::dense_divergence::{fg_sum_partial_31, Thm31};
use dyadlab::exactnum::set_span_guard_bits;
use dyadlab::interior_gap::build_thm33;
use dyadlab::lattice::{sum_pl_over_seq, GapBlockSeq};
use dyadlab::report::{sort_reports, Tally};
use dyadlab::suites::{run_thm31, run_thm33, run_universal, SuiteOptions, Thm31Suite, Thm33Suite, UniversalSuite};
use dyadlab::universal::{build_ug, build_universal, fg_partial_sum, IndexJK, ESCAPE_BUDGET};
use dyadlab::{Dyadic, Error, Exec, IntervalUnion, PiecewiseLinear, WitnessReport};

const DEFAULT_G_UNIVERSAL: &str = "(1/4,5/4)";
const DEFAULT_G_THM31: &str = "(-4,4)";

/// Exact verification of translate-series constructions.
#[derive(Parser)]
#[command(name = "dyadlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a construction and write it as JSON.
    Construct(ConstructArgs),
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Tabulate exact partial sums as CSV.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Construction {
    Universal,
    Thm31,
    Thm33,
}

#[derive(Args, Clone, Serialize)]
struct Common {
    /// Universal prefix end `j,k`: the sequence stops where step (j,k) would begin.
    #[arg(long, default_value = "2,0")]
    limit: IndexJK,
    /// Number of decades or enumerated intervals.
    #[arg(long, default_value_t = 3)]
    jmax: u32,
    /// JSON array of interval strings describing the open set G.
    #[arg(long = "G", value_name = "FILE")]
    #[serde(skip)]
    g_file: Option<PathBuf>,
    /// Override the exponent-span guard (bits).
    #[arg(long)]
    span_guard: Option<u64>,
}

#[derive(Args)]
struct ConstructArgs {
    construction: Construction,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    construction: Construction,
    #[arg(long)]
    suite: String,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on brute-force enumeration sizes.
    #[arg(long, default_value_t = ESCAPE_BUDGET)]
    budget: u64,
    /// Load the sequence from a `construct` artifact instead of rebuilding it.
    #[arg(long)]
    seq: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    construction: Construction,
    #[command(flatten)]
    common: Common,
    /// Evaluation point (repeatable).
    #[arg(long = "x", allow_hyphen_values = true)]
    xs: Vec<Dyadic>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyConfig<'a> {
    construction: Construction,
    suite: &'a str,
    limit: Option<IndexJK>,
    jmax: Option<u32>,
    g: Option<&'a IntervalUnion>,
    samples: usize,
    seed: u64,
    budget: u64,
    span_guard: Option<u64>,
    seq: Option<String>,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    config: VerifyConfig<'a>,
    tally: Tally,
    reports: Vec<WitnessReport>,
}

#[derive(Serialize)]
struct Thm31Artifact<'a> {
    construction: &'a Thm31,
    g: &'a IntervalUnion,
    selected: Vec<u32>,
    f_g: PiecewiseLinear,
    seq: GapBlockSeq,
}

#[derive(Serialize)]
struct Thm33Artifact<'a> {
    jmax: u32,
    seq: &'a GapBlockSeq,
    f: &'a PiecewiseLinear,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SeqFile {
    Bare(GapBlockSeq),
    Wrapped { seq: GapBlockSeq },
}

fn load_g(common: &Common, default: &str) -> anyhow::Result<IntervalUnion> {
    let text = match &common.g_file {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => format!("[\"{default}\"]"),
    };
    serde_json::from_str(&text).context("G must be a JSON array of interval strings")
}

fn load_seq(path: &Path) -> anyhow::Result<GapBlockSeq> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(match serde_json::from_str(&text).context("not a sequence artifact")? {
        SeqFile::Bare(s) | SeqFile::Wrapped { seq: s } => s,
    })
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn summary(seq: &GapBlockSeq) -> String {
    format!(
        "blocks {}, points {}, last {}",
        seq.blocks().len(),
        seq.point_count(),
        seq.last_value()
    )
}

fn construct(args: &ConstructArgs) -> anyhow::Result<ExitCode> {
    let c = &args.common;
    let (json, seq) = match args.construction {
        Construction::Universal => {
            let seq = build_universal(c.limit)?;
            (serde_json::to_string_pretty(&seq)?, seq)
        }
        Construction::Thm31 => {
            let g = load_g(c, DEFAULT_G_THM31)?;
            let t = Thm31::new(c.jmax);
            let seq = t.merged(true)?;
            let artifact = Thm31Artifact {
                construction: &t,
                g: &g,
                selected: t.selected(&g),
                f_g: t.f_g(&g)?,
                seq: seq.clone(),
            };
            (serde_json::to_string_pretty(&artifact)?, seq)
        }
        Construction::Thm33 => {
            let (seq, f) = build_thm33(c.jmax)?;
            let artifact = Thm33Artifact {
                jmax: c.jmax,
                seq: &seq,
                f: &f,
            };
            (serde_json::to_string_pretty(&artifact)?, seq)
        }
    };
    write_out(args.out.as_deref(), &(json + "\n"))?;
    eprintln!("{}", summary(&seq));
    Ok(ExitCode::SUCCESS)
}

fn last_step(limit: IndexJK) -> anyhow::Result<IndexJK> {
    limit
        .pred()
        .map_err(|_| UsageError("--limit must lie after 1,0 so that the prefix holds a step".into()).into())
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<E: std::fmt::Display>(e: E) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let c = &args.common;
    let opts = SuiteOptions {
        samples: args.samples,
        seed: args.seed,
        exec: if args.sequential { Exec::Sequential } else { Exec::Parallel },
        budget: args.budget,
    };
    let loaded = args.seq.as_deref().map(load_seq).transpose()?;
    let mut g_used = None;
    let (mut reports, limit, jmax) = match args.construction {
        Construction::Universal => {
            let suite: UniversalSuite = args.suite.parse().map_err(usage)?;
            let last = last_step(c.limit)?;
            let g = load_g(c, DEFAULT_G_UNIVERSAL)?;
            let seq = match loaded {
                Some(s) => s,
                None => build_universal(c.limit)?,
            };
            let r = run_universal(suite, &seq, last, &g, &opts)?;
            g_used = Some(g);
            (r, Some(c.limit), None)
        }
        Construction::Thm31 => {
            let suite: Thm31Suite = args.suite.parse().map_err(usage)?;
            if args.seq.is_some() {
                return Err(usage("--seq is not used by thm31 suites"));
            }
            let g = load_g(c, DEFAULT_G_THM31)?;
            let r = run_thm31(suite, &Thm31::new(c.jmax), &g, &opts)?;
            g_used = Some(g);
            (r, None, Some(c.jmax))
        }
        Construction::Thm33 => {
            let suite: Thm33Suite = args.suite.parse().map_err(usage)?;
            let seq = match loaded {
                Some(s) => s,
                None => build_thm33(c.jmax)?.0,
            };
            (run_thm33(suite, &seq, c.jmax, &opts)?, None, Some(c.jmax))
        }
    };
    sort_reports(&mut reports);
    let tally = Tally::of(&reports);
    let file = ReportFile {
        config: VerifyConfig {
            construction: args.construction,
            suite: &args.suite,
            limit,
            jmax,
            g: g_used.as_ref(),
            samples: args.samples,
            seed: args.seed,
            budget: args.budget,
            span_guard: c.span_guard,
            seq: args.seq.as_ref().map(|p| p.display().to_string()),
        },
        tally,
        reports,
    };
    write_out(args.out.as_deref(), &(serde_json::to_string_pretty(&file)? + "\n"))?;
    for r in file.reports.iter().filter(|r| r.failed_claim()) {
        match &r.note {
            Some(note) if r.lhs.is_empty() => eprintln!("FAIL {} {:?}: {note}", r.claim, r.params),
            _ => eprintln!("FAIL {} {:?}: {} {} {}", r.claim, r.params, r.lhs, r.relation, r.rhs),
        }
    }
    eprintln!(
        "{} {}: pass {} fail {} info {} skip {}",
        serde_json::to_value(args.construction)?.as_str().unwrap_or_default(),
        args.suite,
        tally.pass,
        tally.fail,
        tally.info,
        tally.skip
    );
    Ok(ExitCode::from(tally.exit_code() as u8))
}

#[derive(Serialize)]
struct Row {
    x: String,
    limit: String,
    sum_dyadic: String,
    sum_decimal: String,
    error: String,
}

impl Row {
    fn new(x: &Dyadic, limit: String, sum: Result<Dyadic, Error>) -> Self {
        match sum {
            Ok(s) => Row {
                x: x.to_string(),
                limit,
                sum_decimal: s.to_decimal().unwrap_or_default(),
                sum_dyadic: s.to_string(),
                error: String::new(),
            },
            Err(e) => Row {
                x: x.to_string(),
                limit,
                sum_dyadic: String::new(),
                sum_decimal: String::new(),
                error: e.to_string(),
            },
        }
    }
}

fn eval(args: &EvalArgs) -> anyhow::Result<ExitCode> {
    let c = &args.common;
    let mut rows = Vec::new();
    match args.construction {
        Construction::Universal => {
            let g = load_g(c, DEFAULT_G_UNIVERSAL)?;
            for limit in IndexJK::upto(c.limit) {
                let ug = match limit.pred() {
                    Ok(last) => build_ug(&g, last),
                    Err(_) => Vec::new(),
                };
                let seq = build_universal(limit);
                for x in &args.xs {
                    let sum = seq.as_ref().map(|s| Dyadic::from(fg_partial_sum(x, &ug, s))).map_err(Clone::clone);
                    rows.push(Row::new(x, limit.to_string(), sum));
                }
            }
        }
        Construction::Thm31 => {
            let g = load_g(c, DEFAULT_G_THM31)?;
            for j in 1..=c.jmax {
                let t = Thm31::new(j);
                for x in &args.xs {
                    rows.push(Row::new(x, j.to_string(), fg_sum_partial_31(x, &g, &t, true)));
                }
            }
        }
        Construction::Thm33 => {
            for j in 1..=c.jmax {
                let built = build_thm33(j);
                for x in &args.xs {
                    let sum = match &built {
                        Ok((seq, f)) => sum_pl_over_seq(f, x, seq),
                        Err(e) => Err(e.clone()),
                    };
                    rows.push(Row::new(x, j.to_string(), sum));
                }
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["x", "limit", "sum_dyadic", "sum_decimal", "error"])?;
    }
    for r in &rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner()?;
    write_out(args.out.as_deref(), std::str::from_utf8(&bytes)?)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let guard = match &cli.command {
        Command::Construct(a) => a.common.span_guard,
        Command::Verify(a) => a.common.span_guard,
        Command::Eval(a) => a.common.span_guard,
    };
    if let Some(bits) = guard {
        set_span_guard_bits(bits);
    }
    let result = match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Eval(a) => eval(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else if matches!(e.downcast_ref::<Error>(), Some(Error::BudgetExceeded { .. })) {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
