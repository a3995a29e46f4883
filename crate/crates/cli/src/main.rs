use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_core::harness::{self, Format, HarnessError, RunConfig, Selection};
use hecke_core::scalars::{Specialization, Variant};
use num_rational::BigRational;

#[derive(Parser)]
#[command(name = "hecke", about = "Exact verification of trace and cellular identities for cyclotomic Hecke algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites and emit a report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated checks, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Random pairs per size for the trace symmetry check.
        #[arg(long, default_value_t = 100)]
        random_pairs: usize,
        /// Omit elapsed times so reports are byte-identical across runs.
        #[arg(long)]
        no_timing: bool,
    },
    /// Emit the trace of every Murphy basis element next to its closed form, as CSV.
    Table {
        #[command(flatten)]
        common: Common,
        /// Pass an empty list for a header-only table.
        #[arg(long, default_value = "all")]
        checks: String,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = VariantArg::Nondeg)]
    variant: VariantArg,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// A size `3`, a range `2..4` or a list `2,4`.
    #[arg(long, default_value = "2")]
    n: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Symbolic)]
    mode: ModeArg,
    /// Value of q in specialized mode.
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated Q_i (non-degenerate) or u_i (degenerate) in specialized mode.
    #[arg(long)]
    params: Option<String>,
    /// Largest algebra dimension allowed.
    #[arg(long, default_value_t = 50_000)]
    cap: usize,
    /// Worker threads.
    #[arg(long, short = 'j')]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    #[value(alias = "nondegenerate")]
    Nondeg,
    #[value(alias = "degenerate")]
    Deg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Symbolic,
    Specialized,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

fn usage(msg: impl Into<String>) -> HarnessError {
    HarnessError::Usage(msg.into())
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, HarnessError> {
    let bad = || usage(format!("bad size `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.parse().map_err(|_| bad())?;
            let hi: usize = hi.trim_start_matches('=').parse().map_err(|_| bad())?;
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_rational(s: &str) -> Result<BigRational, HarnessError> {
    BigRational::from_str(s.trim()).map_err(|_| usage(format!("bad rational `{s}`")))
}

fn config(common: &Common, checks: &str) -> Result<RunConfig, HarnessError> {
    let variant = match common.variant {
        VariantArg::Nondeg => Variant::NonDegenerate,
        VariantArg::Deg => Variant::Degenerate,
    };
    let mut cfg = RunConfig::new(variant, common.ell, parse_sizes(&common.n)?);
    cfg.selection = Selection::from_str(checks)?;
    cfg.cap = common.cap;
    cfg.threads = common.jobs;
    cfg.seed = common.seed;
    cfg.cache_dir = std::env::var_os("HECKE_CACHE_DIR").map(PathBuf::from);
    match common.mode {
        ModeArg::Symbolic => {
            if common.q.is_some() || common.params.is_some() {
                return Err(usage("--q/--params need --mode specialized"));
            }
        }
        ModeArg::Specialized => {
            let params = common
                .params
                .as_deref()
                .ok_or_else(|| usage("specialized mode needs --params"))?
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>, _>>()?;
            let sp = match variant {
                Variant::NonDegenerate => {
                    let q = common.q.as_deref().ok_or_else(|| usage("specialized mode needs --q"))?;
                    Specialization::nondegenerate(parse_rational(q)?, params)
                }
                Variant::Degenerate => {
                    if common.q.is_some() {
                        return Err(usage("the degenerate algebra has no q"));
                    }
                    Specialization::degenerate(params)
                }
            }
            .map_err(|e| usage(e.to_string()))?;
            cfg = cfg.specialized(sp);
        }
    }
    Ok(cfg)
}

fn emit(output: &Option<PathBuf>, text: &str) -> io::Result<()> {
    match output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn execute(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Verify { common, checks, format, random_pairs, no_timing } => {
            let mut cfg = config(&common, &checks)?;
            cfg.random_pairs = random_pairs;
            cfg.timing = !no_timing;
            let reports = harness::run(&cfg)?;
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
                FormatArg::Text => Format::Text,
            };
            emit(&common.output, &harness::render_reports(&reports, format))?;
            Ok(reports.iter().all(|r| r.passed()))
        }
        Command::Table { common, checks } => {
            let cfg = config(&common, &checks)?;
            let rows = harness::table(&cfg)?;
            emit(&common.output, &harness::render_table(&rows))?;
            Ok(rows.iter().all(|r| r.equal))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ HarnessError::Usage(_)) => {
            eprintln!("hecke: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("hecke: {e}");
            ExitCode::from(1)
        }
    }
}
