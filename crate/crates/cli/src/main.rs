//! `sshr` — synthesis of reversible oracle circuits for small Boolean
//! functions by parity covering with parallelotope blocks.
//!
//! Exit codes: 0 success (or verified), 1 verification mismatch, 2 bad
//! input, 3 self-verification failure after synthesis, 4 internal error.

mod report;
mod source;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sshr_core::{
    boolfn, build_instance, cover, enumerate_all, export_lp, greedy, netlist, BoolFn, FamilyKind,
    GateStats, GreedyConfig, Objective, Ratio, SynthesisResult,
};

use report::{csv_row, status_name, summary_json, CSV_HEADER};
use source::FunctionSource;

const TIME_LIMIT_ENV: &str = "SSHR_TIME_LIMIT";
const DEFAULT_TIME_LIMIT_SECS: f64 = 120.0;

#[derive(Debug)]
pub enum CliError {
    BadInput(String),
    VerifyFailed(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::BadInput(msg) | CliError::VerifyFailed(msg) | CliError::Internal(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::VerifyFailed(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sshr", version, about = "Reversible oracle synthesis via parity covering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize one function and emit its verified circuit
    Synth(SynthArgs),
    /// Count (and optionally dump) the candidate families
    Enum(EnumArgs),
    /// Synthesize a corpus and emit a CSV report
    Bench(BenchArgs),
    /// Export the parity-cover model in LP format
    ExportIlp(ExportArgs),
    /// Check a netlist file against a function
    Verify(VerifyArgs),
    /// Check a selection file against the parity-cover model
    CheckSolution(CheckSolutionArgs),
    /// Run every method on one function and tabulate costs
    Compare(CompareArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    /// Greedy over the full parallelotope family
    SshrH,
    /// Exact cover over the full parallelotope family
    SshrI,
    /// Greedy over subcubes only (ESOP baseline)
    EsopH,
    /// Exact cover over subcubes only (ESOP baseline)
    EsopI,
    /// One block per minterm
    Minterm,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::SshrH => "sshr-h",
            Method::SshrI => "sshr-i",
            Method::EsopH => "esop-h",
            Method::EsopI => "esop-i",
            Method::Minterm => "minterm",
        }
    }

    fn family(self) -> FamilyKind {
        match self {
            Method::SshrH | Method::SshrI => FamilyKind::Full,
            Method::EsopH | Method::EsopI => FamilyKind::Subcube,
            Method::Minterm => FamilyKind::Singleton,
        }
    }

    fn is_exact(self) -> bool {
        matches!(self, Method::SshrI | Method::EsopI)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ObjectiveArg {
    /// Minimize CNOT count, T count as tie-break
    Cnot,
    /// Minimize T count, CNOT count as tie-break
    Tcount,
    /// Minimize alpha*CNOT + beta*T
    Weighted,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Full,
    Subcube,
    Singleton,
}

impl From<KindArg> for FamilyKind {
    fn from(kind: KindArg) -> FamilyKind {
        match kind {
            KindArg::Full => FamilyKind::Full,
            KindArg::Subcube => FamilyKind::Subcube,
            KindArg::Singleton => FamilyKind::Singleton,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct ObjectiveOpts {
    /// Cost objective
    #[arg(long, value_enum, default_value = "cnot")]
    objective: ObjectiveArg,

    /// CNOT weight for --objective weighted
    #[arg(long, value_name = "A")]
    alpha: Option<u64>,

    /// T weight for --objective weighted
    #[arg(long, value_name = "B")]
    beta: Option<u64>,
}

impl ObjectiveOpts {
    fn resolve(&self) -> Result<Objective, CliError> {
        match self.objective {
            ObjectiveArg::Cnot => Ok(Objective::Cnot),
            ObjectiveArg::Tcount => Ok(Objective::TCount),
            ObjectiveArg::Weighted => {
                let (Some(alpha), Some(beta)) = (self.alpha, self.beta) else {
                    return Err(CliError::BadInput(
                        "--objective weighted requires --alpha and --beta".into(),
                    ));
                };
                if alpha == 0 && beta == 0 {
                    return Err(CliError::BadInput("weighted objective needs a nonzero weight".into()));
                }
                Ok(Objective::Weighted { alpha, beta })
            }
        }
    }
}

fn parse_ratio(s: &str) -> Result<Ratio, String> {
    s.parse::<Ratio>().map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
struct TimeLimitOpt {
    /// Solver time limit in seconds (default from SSHR_TIME_LIMIT or 120)
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,
}

impl TimeLimitOpt {
    fn resolve(&self) -> Result<Duration, CliError> {
        let secs = match self.time_limit {
            Some(secs) => secs,
            None => match std::env::var(TIME_LIMIT_ENV) {
                Ok(raw) => raw.parse().map_err(|_| {
                    CliError::BadInput(format!("{TIME_LIMIT_ENV} must be a number of seconds"))
                })?,
                Err(_) => DEFAULT_TIME_LIMIT_SECS,
            },
        };
        if !(secs > 0.0) {
            return Err(CliError::BadInput("time limit must be positive".into()));
        }
        Ok(Duration::from_secs_f64(secs))
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Variable count (1..=8)
    #[arg(long)]
    n: u8,

    #[command(flatten)]
    source: FunctionSource,

    /// Synthesis method
    #[arg(long, value_enum, default_value = "sshr-h")]
    method: Method,

    #[command(flatten)]
    objective: ObjectiveOpts,

    /// Greedy selection threshold in (0, 1], e.g. 3/4
    #[arg(long, value_parser = parse_ratio, default_value = "3/4")]
    ratio: Ratio,

    #[command(flatten)]
    time_limit: TimeLimitOpt,

    /// Corpus seed (accepted for config uniformity; unused by synth)
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Netlist output file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Circuit output format
    #[arg(long, value_enum, default_value = "qasm")]
    format: FormatArg,

    /// Write a JSON run summary to this file
    #[arg(long, value_name = "FILE")]
    stats_json: Option<PathBuf>,

    /// Zero out wall-clock fields so outputs are byte-reproducible
    #[arg(long)]
    deterministic: bool,

    /// Print solver improvement lines (t_ms, tc, nodes) to stderr
    #[arg(long)]
    solver_log: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormatArg {
    Qasm,
    Json,
}

#[derive(Args, Debug)]
struct EnumArgs {
    /// Variable count (1..=8)
    #[arg(long)]
    n: u8,

    /// Dump one family instead of printing counts
    #[arg(long, value_enum)]
    kind: Option<KindArg>,

    /// Print the family members, one per line
    #[arg(long, requires = "kind")]
    dump: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Variable count (1..=8)
    #[arg(long)]
    n: u8,

    /// Number of random functions
    #[arg(long, conflicts_with = "exhaustive")]
    count: Option<usize>,

    /// Corpus seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Run all 2^(2^n) functions (n <= 4)
    #[arg(long)]
    exhaustive: bool,

    /// Synthesis method
    #[arg(long, value_enum, default_value = "sshr-h")]
    method: Method,

    #[command(flatten)]
    objective: ObjectiveOpts,

    /// Greedy selection threshold in (0, 1]
    #[arg(long, value_parser = parse_ratio, default_value = "3/4")]
    ratio: Ratio,

    #[command(flatten)]
    time_limit: TimeLimitOpt,

    /// CSV output file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Zero out wall-clock fields so outputs are byte-reproducible
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Debug)]
struct ExportArgs {
    /// Variable count (1..=8)
    #[arg(long)]
    n: u8,

    #[command(flatten)]
    source: FunctionSource,

    /// Candidate family
    #[arg(long, value_enum, default_value = "full")]
    family: KindArg,

    #[command(flatten)]
    objective: ObjectiveOpts,

    /// Model cover counts with explicit integer helper variables
    #[arg(long)]
    integer_helpers: bool,

    /// LP output file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Netlist file to check
    #[arg(long, value_name = "FILE")]
    netlist: PathBuf,

    /// Variable count (1..=8)
    #[arg(long)]
    n: u8,

    #[command(flatten)]
    source: FunctionSource,
}

#[derive(Args, Debug)]
struct CheckSolutionArgs {
    /// Selection file: whitespace-separated candidate indices
    #[arg(long, value_name = "FILE")]
    solution: PathBuf,

    /// Variable count (1..=8)
    #[arg(long)]
    n: u8,

    #[command(flatten)]
    source: FunctionSource,

    /// Candidate family the indices refer to
    #[arg(long, value_enum, default_value = "full")]
    family: KindArg,

    #[command(flatten)]
    objective: ObjectiveOpts,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Variable count (1..=8)
    #[arg(long)]
    n: u8,

    #[command(flatten)]
    source: FunctionSource,

    #[command(flatten)]
    objective: ObjectiveOpts,

    /// Greedy selection threshold in (0, 1]
    #[arg(long, value_parser = parse_ratio, default_value = "3/4")]
    ratio: Ratio,

    #[command(flatten)]
    time_limit: TimeLimitOpt,

    /// Zero out wall-clock fields so outputs are byte-reproducible
    #[arg(long)]
    deterministic: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Enum(args) => cmd_enum(args),
        Command::Bench(args) => cmd_bench(args),
        Command::ExportIlp(args) => cmd_export_ilp(args),
        Command::Verify(args) => cmd_verify(args),
        Command::CheckSolution(args) => cmd_check_solution(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

fn write_out(path: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn synthesize(
    f: &BoolFn,
    method: Method,
    objective: Objective,
    ratio: Ratio,
    time_limit: Duration,
) -> Result<SynthesisResult, CliError> {
    let result = if method.is_exact() {
        cover::synth_exact(f, method.family(), objective, time_limit).map_err(|e| match e {
            cover::CoverError::ZeroTimeLimit => CliError::BadInput(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        })?
    } else {
        let cfg = GreedyConfig { ratio, kind: method.family(), objective };
        greedy::synth_greedy(f, &cfg)
    };
    if !result.circuit.verify_oracle(f) {
        return Err(CliError::VerifyFailed(format!(
            "synthesized circuit failed oracle verification for {}",
            f.to_hex_id()
        )));
    }
    Ok(result)
}

fn cmd_synth(args: SynthArgs) -> Result<u8, CliError> {
    let f = args.source.resolve(args.n)?;
    let objective = args.objective.resolve()?;
    let time_limit = args.time_limit.resolve()?;
    let result = synthesize(&f, args.method, objective, args.ratio, time_limit)?;

    if args.solver_log {
        for imp in &result.improvements {
            eprintln!("{}, {}, {}", imp.t_ms, imp.tc, imp.nodes);
        }
    }

    let wall_ms = if args.deterministic { 0 } else { result.wall.as_millis() as u64 };
    let content = match args.format {
        FormatArg::Qasm => netlist::emit_qasm(&result.circuit),
        FormatArg::Json => {
            let mut text = netlist::emit_json(&result.circuit);
            text.push('\n');
            text
        }
    };
    write_out(args.out.as_ref(), &content)?;
    if let Some(path) = &args.stats_json {
        let summary = summary_json(args.n, &f.to_hex_id(), args.method.name(), &result, wall_ms);
        fs::write(path, summary)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    eprintln!(
        "{} {}: status={} tc={} blocks={} cnot_total={} t={}",
        args.method.name(),
        f.to_hex_id(),
        status_name(result.status),
        result.cost.primary,
        result.selected.len(),
        result.total.cnot_total,
        result.total.t,
    );
    Ok(0)
}

fn cmd_enum(args: EnumArgs) -> Result<u8, CliError> {
    let check = |kind: FamilyKind| {
        enumerate_all(args.n, kind).map_err(|e| CliError::BadInput(e.to_string()))
    };
    match (args.kind, args.dump) {
        (Some(kind), true) => {
            let family = check(kind.into())?;
            print!("{}", family.export_lines());
        }
        (Some(kind), false) => {
            let family = check(kind.into())?;
            println!("{}", family.len());
        }
        (None, _) => {
            let full = check(FamilyKind::Full)?;
            let subcube = check(FamilyKind::Subcube)?;
            let ratio = full.len() as f64 / subcube.len() as f64;
            println!("FULL={} SUBCUBE={} ratio={ratio:.1}", full.len(), subcube.len());
        }
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, CliError> {
    let objective = args.objective.resolve()?;
    let time_limit = args.time_limit.resolve()?;
    let corpus: Vec<BoolFn> = if args.exhaustive {
        if args.n > 4 {
            return Err(CliError::BadInput("--exhaustive is limited to n <= 4".into()));
        }
        if !(1..=8).contains(&args.n) {
            return Err(CliError::BadInput(format!("variable count {} out of range 1..=8", args.n)));
        }
        let total: u64 = 1 << (1u64 << args.n);
        (0..total)
            .map(|id| BoolFn::from_hex_id(&format!("{id:#x}"), args.n))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Internal(e.to_string()))?
    } else {
        let count = args
            .count
            .ok_or_else(|| CliError::BadInput("pass --count (with --seed) or --exhaustive".into()))?;
        if !(1..=8).contains(&args.n) {
            return Err(CliError::BadInput(format!("variable count {} out of range 1..=8", args.n)));
        }
        boolfn::random_corpus(args.n, count, args.seed)
    };

    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut aggregate = GateStats::default();
    let mut wall_total: u64 = 0;
    for f in &corpus {
        let result = synthesize(f, args.method, objective, args.ratio, time_limit)?;
        let wall_ms = if args.deterministic { 0 } else { result.wall.as_millis() as u64 };
        wall_total += wall_ms;
        aggregate.merge(&result.total);
        out.push_str(&csv_row(args.n, &f.to_hex_id(), args.method.name(), &result.total, wall_ms));
        out.push('\n');
    }
    out.push_str(&csv_row(args.n, "TOTAL", args.method.name(), &aggregate, wall_total));
    out.push('\n');
    write_out(args.out.as_ref(), &out)?;
    Ok(0)
}

fn cmd_export_ilp(args: ExportArgs) -> Result<u8, CliError> {
    let f = args.source.resolve(args.n)?;
    let objective = args.objective.resolve()?;
    let family = enumerate_all(args.n, args.family.into())
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    let inst = build_instance(&f, &family, objective)
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    let text = export_lp(&inst, args.integer_helpers);
    write_out(args.out.as_ref(), &text)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let f = args.source.resolve(args.n)?;
    let text = fs::read_to_string(&args.netlist)
        .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", args.netlist.display())))?;
    let circuit = netlist::parse_qasm(&text, args.n + 1)
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    if circuit.verify_oracle(&f) {
        eprintln!("ok: circuit implements {}", f.to_hex_id());
        Ok(0)
    } else {
        eprintln!("mismatch: circuit does not implement {}", f.to_hex_id());
        Ok(1)
    }
}

fn cmd_check_solution(args: CheckSolutionArgs) -> Result<u8, CliError> {
    let f = args.source.resolve(args.n)?;
    let objective = args.objective.resolve()?;
    let family = enumerate_all(args.n, args.family.into())
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    let inst = build_instance(&f, &family, objective)
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    let text = fs::read_to_string(&args.solution)
        .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", args.solution.display())))?;
    let selected = cover::parse_selection(&text).map_err(|e| CliError::BadInput(e.to_string()))?;
    let solution = cover::CoverSolution::from_selection(&inst, selected, cover::SolveStatus::FeasibleTimeout)
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    if cover::verify_solution(&inst, &solution) {
        println!("ok: selection covers {} with tc={}", f.to_hex_id(), solution.cost.primary);
        Ok(0)
    } else {
        println!("mismatch: selection does not cover {}", f.to_hex_id());
        Ok(1)
    }
}

fn cmd_compare(args: CompareArgs) -> Result<u8, CliError> {
    let f = args.source.resolve(args.n)?;
    let objective = args.objective.resolve()?;
    let time_limit = args.time_limit.resolve()?;
    let methods = [Method::Minterm, Method::EsopH, Method::EsopI, Method::SshrH, Method::SshrI];

    println!("method,status,tc,x,cnot,t,h,cnot_total,ancilla_max,ancilla_sum,wall_ms");
    let mut tc = std::collections::BTreeMap::new();
    for method in methods {
        let result = synthesize(&f, method, objective, args.ratio, time_limit)?;
        let wall_ms = if args.deterministic { 0 } else { result.wall.as_millis() as u64 };
        println!(
            "{},{},{},{},{},{},{},{},{},{},{wall_ms}",
            method.name(),
            status_name(result.status),
            result.cost.primary,
            result.total.x,
            result.total.cnot,
            result.total.t,
            result.total.h,
            result.total.cnot_total,
            result.total.ancilla_max,
            result.total.ancilla_sum,
        );
        tc.insert(method.name(), result.cost.primary);
    }

    let gain = |ours: u64, baseline: u64| -> String {
        if baseline == 0 {
            "n/a".into()
        } else {
            format!("{:.2}%", 100.0 * (1.0 - ours as f64 / baseline as f64))
        }
    };
    println!("gain sshr-i vs esop-i: {}", gain(tc["sshr-i"], tc["esop-i"]));
    println!("gain sshr-i vs minterm: {}", gain(tc["sshr-i"], tc["minterm"]));
    println!("gain sshr-h vs esop-h: {}", gain(tc["sshr-h"], tc["esop-h"]));

    if tc["sshr-i"] > tc["esop-i"] {
        return Err(CliError::Internal(
            "family nesting violated: sshr-i cost exceeds esop-i cost".into(),
        ));
    }
    Ok(0)
}
