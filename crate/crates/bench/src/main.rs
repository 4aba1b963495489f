use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use parabl::harness::{capture_case, csv_write, paper_defaults, sweep_workers, BenchCase, BenchResult, Kernel, Variant};
use parabl::ExecutionConfig;

/// Benchmarks for dense and sparse linear algebra, FFT and CG kernels.
#[derive(Parser)]
#[command(name = "parabl-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one kernel variant over one or more sizes and worker counts.
    Run(RunArgs),
    /// Run the published configuration tables.
    Suite(SuiteArgs),
    /// Print the captured trace of a kernel variant.
    DumpIr(DumpArgs),
}

#[derive(Args)]
struct Common {
    /// Comma-separated worker counts. Defaults to PARABL_NUM_WORKERS, else 1.
    #[arg(long, value_delimiter = ',')]
    workers: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file; `-` or absent writes to stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    kernel: Kernel,
    #[arg(long)]
    variant: Variant,
    /// Problem size; repeat for several.
    #[arg(long)]
    n: Vec<usize>,
    /// Nonzeros per row in percent (mod2as).
    #[arg(long)]
    fill: Option<f64>,
    /// Total band width (cg).
    #[arg(long)]
    bw: Option<usize>,
    /// Block size (mxm2b).
    #[arg(long)]
    u: Option<usize>,
    /// Compare against the reference implementation where affordable.
    #[arg(long)]
    verify: bool,
    /// Read the sparse matrix from a Matrix Market file (mod2as, cg).
    #[arg(long)]
    matrix_market: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SuiteArgs {
    /// Use the published size lists and parameter tables.
    #[arg(long, required = true)]
    paper_defaults: bool,
    /// Restrict to one kernel.
    #[arg(long)]
    kernel: Option<Kernel>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    kernel: Kernel,
    #[arg(long)]
    variant: Variant,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn worker_counts(given: &[usize]) -> Result<Vec<usize>> {
    if !given.is_empty() {
        if given.contains(&0) {
            bail!("worker counts must be at least 1");
        }
        return Ok(given.to_vec());
    }
    Ok(vec![ExecutionConfig::from_env()?.effective_workers()])
}

fn check_variant(kernel: Kernel, variant: Variant) -> Result<()> {
    if variant.kernel() != kernel {
        bail!("variant {variant} belongs to {}, not {kernel}", variant.kernel());
    }
    Ok(())
}

fn open_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p.as_os_str() != "-" => {
            Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        _ => Box::new(io::stdout().lock()),
    })
}

fn report(r: &BenchResult) {
    let extra = r.case.extra();
    let extra = if extra.is_empty() { String::new() } else { format!(" [{extra}]") };
    eprintln!(
        "{:<7} {:<12} n={:<8}{} workers={:<3} best {:.6}s {:>10.1} MFlop/s {}",
        r.case.kernel,
        r.case.variant,
        r.case.n,
        extra,
        r.case.workers,
        r.best_time(),
        r.mflops(),
        r.verified
    );
}

fn execute(cases: Vec<BenchCase>, common: &Common) -> Result<()> {
    let workers = worker_counts(&common.workers)?;
    let mut results = Vec::new();
    for mut case in cases {
        case.reps = common.reps;
        case.warmup = common.warmup;
        case.seed = common.seed;
        let label = format!("{} n={}", case.variant, case.n);
        for r in sweep_workers(&case, &workers).with_context(|| label)? {
            report(&r);
            results.push(r);
        }
    }
    let mut sink = open_sink(&common.csv)?;
    csv_write(&results, &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    check_variant(args.kernel, args.variant)?;
    let sizes = match (args.n.is_empty(), &args.matrix_market) {
        (false, _) => args.n.clone(),
        (true, Some(_)) => vec![0],
        (true, None) => bail!("give at least one --n (or --matrix-market)"),
    };
    let cases = sizes
        .into_iter()
        .map(|n| {
            let mut c = BenchCase::new(args.variant, n);
            c.fill = args.fill;
            c.bw = args.bw;
            c.u = args.u;
            c.verify = args.verify;
            c.matrix_market = args.matrix_market.clone();
            c
        })
        .collect();
    execute(cases, &args.common)
}

fn suite(args: SuiteArgs) -> Result<()> {
    let kernels = match args.kernel {
        Some(k) => vec![k],
        None => Kernel::ALL.to_vec(),
    };
    execute(kernels.into_iter().flat_map(paper_defaults).collect(), &args.common)
}

fn dump_ir(args: DumpArgs) -> Result<()> {
    check_variant(args.kernel, args.variant)?;
    let case = capture_case(args.variant, args.n, args.seed)?;
    print!("{}", case.trace.dump());
    Ok(())
}

fn main() -> ExitCode {
    let outcome = match Cli::parse().command {
        Command::Run(a) => run(a),
        Command::Suite(a) => suite(a),
        Command::DumpIr(a) => dump_ir(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
