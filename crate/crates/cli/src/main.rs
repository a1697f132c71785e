//! `qreuse`: resize circuits, check equivalence, run the width oracle,
//! generate benchmark circuits and benchmark a corpus.
//!
//! Exit codes: 0 success, 1 error (or inequivalent circuits for `check`),
//! 2 circuit not resizable (output is the unchanged input), 3 resized width
//! above `--max-width`.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qreuse_core::bench::{bench_corpus, BenchOptions, BenchRow};
use qreuse_core::benchgen::{gen_bv, gen_cat, gen_entangled_block, gen_ghz, gen_random, gen_scaling, SecretString};
use qreuse_core::dag::DependencyTable;
use qreuse_core::verify::{check_equivalence, min_width_oracle, DEFAULT_NODE_BUDGET, DEFAULT_TOLERANCE};
use qreuse_core::{emit_qasm, parse_qasm, plan_report, resize, resize_circuit, Circuit};
use serde::Serialize;

use manifest::Run;

const EXIT_NOT_RESIZABLE: u8 = 2;
const EXIT_TOO_WIDE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qreuse",
    version,
    about = "Reduce circuit width by reusing qubits after mid-circuit measurement and reset"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resize a circuit onto as few qubits as the greedy schedule allows.
    Resize(ResizeArgs),
    /// Compare the exact outcome distributions of two circuits.
    Check(CheckArgs),
    /// Exhaustively compute the minimum achievable width.
    Oracle(OracleArgs),
    /// Generate a circuit family as OpenQASM.
    Gen(GenArgs),
    /// Resize, audit and verify every .qasm file in a directory.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ResizeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Write the plan report (JSON) here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Dependency-list override (JSON object from qubit index to list).
    #[arg(long)]
    deps: Option<PathBuf>,
    /// Exit with status 3 when the resized width exceeds this.
    #[arg(long)]
    max_width: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    /// Search node budget; circuits above 24 instructions need more than the default.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bv,
    Ghz,
    Cat,
    Entblock,
    Random,
    Scaling,
}

#[derive(Args)]
struct GenArgs {
    family: Family,
    /// Qubit count (ghz, cat, entblock, random, scaling).
    #[arg(short = 'n', long)]
    size: Option<usize>,
    /// Gate count (random, scaling).
    #[arg(short = 'm', long)]
    gates: Option<usize>,
    /// Hidden string for bv, rightmost character is data qubit 0.
    #[arg(long)]
    secret: Option<SecretString>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability of a cx per random gate.
    #[arg(long, default_value_t = 0.5)]
    fraction: f64,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    corpus: PathBuf,
    /// JSON table; a CSV with the same stem is written beside it.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // keep 2 reserved for "not resizable"
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Resize(args) => cmd_resize(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_circuit(path: &Path) -> Result<(String, Circuit)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    match parse_qasm(&text) {
        Ok(c) => Ok((text, c)),
        Err(e) => {
            for d in &e.diagnostics {
                eprintln!("{}:{d}", path.display());
            }
            bail!("cannot parse {}", path.display())
        }
    }
}

fn cmd_resize(args: &ResizeArgs) -> Result<ExitCode> {
    let mut run = Run::start("resize");
    run.input(&args.input);
    let (text, circuit) = read_circuit(&args.input)?;
    let plan = match &args.deps {
        Some(path) => {
            run.input(path);
            let json = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let table = DependencyTable::from_override_json(&json, &circuit)?;
            resize(&circuit, &table)?
        }
        None => resize_circuit(&circuit)?,
    };
    for w in &plan.warnings {
        eprintln!("warning: {w}");
    }
    if plan.resizable {
        run.write(&args.output, &emit_qasm(&plan.resized)?)?;
    } else {
        run.write(&args.output, &text)?;
    }
    if let Some(path) = &args.report {
        run.write_json(path, &plan_report(&plan))?;
    }
    run.finish()?;
    println!(
        "width {} -> {} ({} resets added)",
        plan.original_width, plan.width, plan.resets_added
    );
    if let Some(limit) = args.max_width {
        if plan.width > limit {
            eprintln!("error: resized width {} exceeds --max-width {limit}", plan.width);
            return Ok(ExitCode::from(EXIT_TOO_WIDE));
        }
    }
    if !plan.resizable {
        eprintln!("circuit is not resizable; output is the unchanged input");
        return Ok(ExitCode::from(EXIT_NOT_RESIZABLE));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &CheckArgs) -> Result<ExitCode> {
    let (_, a) = read_circuit(&args.a)?;
    let (_, b) = read_circuit(&args.b)?;
    let report = check_equivalence(&a, &b, args.tolerance)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.equivalent {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_oracle(args: &OracleArgs) -> Result<ExitCode> {
    let (_, circuit) = read_circuit(&args.input)?;
    let result = min_width_oracle(&circuit, args.budget)?;
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(ExitCode::SUCCESS)
}

fn need(value: Option<usize>, flag: &str, family: &str) -> Result<usize> {
    value.with_context(|| format!("{family} needs {flag}"))
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode> {
    let mut run = Run::start("gen");
    let circuit = match args.family {
        Family::Bv => gen_bv(args.secret.as_ref().context("bv needs --secret")?),
        Family::Ghz => gen_ghz(need(args.size, "-n", "ghz")?)?,
        Family::Cat => gen_cat(need(args.size, "-n", "cat")?)?,
        Family::Entblock => gen_entangled_block(need(args.size, "-n", "entblock")?)?,
        Family::Random => {
            run.seed(args.seed);
            gen_random(
                need(args.size, "-n", "random")?,
                need(args.gates, "-m", "random")?,
                args.seed,
                args.fraction,
            )?
        }
        Family::Scaling => gen_scaling(need(args.size, "-n", "scaling")?, need(args.gates, "-m", "scaling")?)?,
    };
    let text = emit_qasm(&circuit)?;
    match &args.output {
        Some(path) => {
            run.write(path, &text)?;
            run.finish()?;
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// Flat form of a bench row for CSV.
#[derive(Serialize)]
struct CsvRow<'a> {
    file: &'a str,
    normal_width: Option<usize>,
    sequential_width: Option<usize>,
    resizable: Option<bool>,
    gates_before: Option<usize>,
    gates_after: Option<usize>,
    cnots: Option<usize>,
    resets_added: Option<usize>,
    oracle_width: Option<usize>,
    oracle_gap: Option<usize>,
    oracle_witness: String,
    oracle_note: Option<&'a str>,
    tvd: Option<f64>,
    equivalent: Option<bool>,
    check_note: Option<&'a str>,
    error: Option<&'a str>,
}

impl<'a> From<&'a BenchRow> for CsvRow<'a> {
    fn from(r: &'a BenchRow) -> Self {
        Self {
            file: &r.file,
            normal_width: r.normal_width,
            sequential_width: r.sequential_width,
            resizable: r.resizable,
            gates_before: r.gates_before,
            gates_after: r.gates_after,
            cnots: r.cnots,
            resets_added: r.resets_added,
            oracle_width: r.oracle_width,
            oracle_gap: r.oracle_gap,
            oracle_witness: r
                .oracle_witness
                .as_ref()
                .map(|w| w.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
                .unwrap_or_default(),
            oracle_note: r.oracle_note.as_deref(),
            tvd: r.tvd,
            equivalent: r.equivalent,
            check_note: r.check_note.as_deref(),
            error: r.error.as_deref(),
        }
    }
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode> {
    let mut run = Run::start("bench");
    run.input(&args.corpus);
    let options = BenchOptions {
        oracle_budget: args.budget,
        tolerance: args.tolerance,
    };
    let rows =
        bench_corpus(&args.corpus, &options).with_context(|| format!("cannot read {}", args.corpus.display()))?;
    run.write_json(&args.report, &rows)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        csv.serialize(CsvRow::from(row))?;
    }
    let csv_text = String::from_utf8(csv.into_inner()?)?;
    run.write(&args.report.with_extension("csv"), &csv_text)?;
    run.finish()?;

    println!(
        "{:<28} {:>7} {:>10} {:>7} {:>10}",
        "file", "normal", "sequential", "oracle", "tvd"
    );
    for r in &rows {
        let seq = match (r.sequential_width, r.resizable) {
            (Some(w), Some(false)) => format!("{w}*"),
            (w, _) => cell(w),
        };
        println!(
            "{:<28} {:>7} {:>10} {:>7} {:>10}",
            r.file,
            cell(r.normal_width),
            seq,
            cell(r.oracle_width),
            r.tvd.map_or_else(|| "-".to_string(), |t| format!("{t:.1e}"))
        );
        if let Some(e) = &r.error {
            println!("  error: {e}");
        }
    }
    println!("(* not resizable)");
    Ok(ExitCode::SUCCESS)
}
