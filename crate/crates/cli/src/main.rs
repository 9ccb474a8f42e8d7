use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scion_core::io::{
    aggregate_slowdown, assign_slowdown, format_result, generate_instance, read_instance,
    write_scaling_csv, GeneratorKind, InstanceFormat, ParseError, ScalingRecord, SetShape,
};
use scion_core::oracle::verify_instance;
use scion_core::{
    run_instance, run_instance_with_ladder, EngineConfig, EngineError, Permutation,
    ProblemInstance, RunReport,
};

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_BACKEND: u8 = 5;

/// Parallel lexicographic epsilon-constraint enumeration of nondominated
/// images for multi-objective integer problems.
#[derive(Parser)]
#[command(name = "scion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the nondominated set of one instance.
    Solve(SolveArgs),
    /// Check engine runs against brute-force references.
    Verify(VerifyArgs),
    /// Time one or more instances over a ladder of thread budgets.
    Scale(ScaleArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
}

#[derive(Args)]
struct EngineArgs {
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, env = "SCION_THREADS")]
    threads: Option<usize>,
    /// Compute the nested level sets bottom up and use each as a prescreen
    /// for the next.
    #[arg(long)]
    warmstart_cascade: bool,
    /// Objective order as a comma separated 1-based permutation, e.g. 3,1,2.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    /// Input format; detected from the file shape when omitted.
    #[arg(long, value_parser = parse_format)]
    format: Option<InstanceFormat>,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    /// Result file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one witness per nondominated image to this file.
    #[arg(long)]
    witnesses: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct ScaleArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Largest thread budget; budgets run 1, 2, 4, ... up to this value.
    #[arg(long, default_value_t = 8)]
    max_threads: usize,
    /// Budget the slowdown column is relative to.
    #[arg(long, default_value_t = 1)]
    baseline: usize,
    /// Repetitions per budget; the fastest is recorded.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    #[arg(long)]
    warmstart_cascade: bool,
    #[arg(long, value_parser = parse_format)]
    format: Option<InstanceFormat>,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Kp,
    Set,
    Ilp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Uniform,
    Simplex,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of objectives.
    #[arg(long)]
    k: usize,
    /// Items for knapsack, points for explicit sets, variables for ILP.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    shape: Shape,
    /// Keep every coordinate value distinct within its objective.
    #[arg(long)]
    general_position: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<InstanceFormat, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Parse(ParseError),
    Backend(String),
    Mismatch(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Mismatch(_) => EXIT_MISMATCH,
            Failure::Backend(_) | Failure::Io(_) => EXIT_BACKEND,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Backend(m) | Failure::Mismatch(m) | Failure::Io(m) => {
                f.write_str(m)
            }
            Failure::Parse(e) => write!(f, "{e}"),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Config(m) => Failure::Usage(m),
            other => Failure::Backend(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("cannot write {}: {e}", path.display()))
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl EngineArgs {
    fn config(&self, k: usize) -> Result<EngineConfig, Failure> {
        let threads = self.threads.unwrap_or_else(default_threads);
        let order = match &self.order {
            None => None,
            Some(sigma) => {
                if sigma.len() != k {
                    return Err(Failure::Usage(format!(
                        "--order has {} entries but the instance has {k} objectives",
                        sigma.len()
                    )));
                }
                Some(
                    Permutation::from_one_based(sigma)
                        .map_err(|e| Failure::Usage(e.to_string()))?,
                )
            }
        };
        Ok(EngineConfig {
            order,
            cascade: self.warmstart_cascade,
            ..EngineConfig::with_threads(threads)
        })
    }
}

fn load(path: &Path, format: Option<InstanceFormat>) -> Result<ProblemInstance, Failure> {
    read_instance(path, format).map_err(Failure::Parse)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write output: {e}"))),
    }
}

fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let instance = load(&args.file, args.engine.format)?;
    let config = args.engine.config(instance.k())?;
    let mut extra = vec![("instance".to_string(), args.file.display().to_string())];
    let (ladder, report) = run_instance_with_ladder(&instance, &config)?;
    for s in ladder.iter().flat_map(|l| &l.stats) {
        extra.push((
            format!("level_{}", s.level),
            format!(
                "images={} solved={} skipped={}",
                s.images, s.scalarizations_solved, s.skipped
            ),
        ));
    }
    emit(
        args.out.as_deref(),
        &format_result(&instance, &report, &extra),
    )?;
    if let Some(path) = &args.witnesses {
        fs::write(path, witness_lines(&report)).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}

fn witness_lines(report: &RunReport) -> String {
    report
        .nondominated
        .iter()
        .map(|s| {
            let cells: Vec<String> = s.witness.iter().map(i64::to_string).collect();
            cells.join(" ") + "\n"
        })
        .collect()
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let mut failed = Vec::new();
    for file in &args.files {
        let instance = load(file, args.engine.format)?;
        let config = args.engine.config(instance.k())?;
        let outcome = verify_instance(&instance, &config)?;
        let combos = outcome
            .true_combinations
            .map_or("skipped".to_string(), |n| n.to_string());
        println!(
            "{}: {} nondominated={} solved={} true_combinations={} general_position={}",
            file.display(),
            if outcome.passed() { "ok" } else { "MISMATCH" },
            outcome.nondominated,
            outcome.scalarizations_solved,
            combos,
            outcome.general_position,
        );
        for m in &outcome.mismatches {
            println!("  {m}");
        }
        if !outcome.passed() {
            failed.push(file.display().to_string());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "verification failed for {}",
            failed.join(", ")
        )))
    }
}

fn thread_ladder(max: usize) -> Vec<usize> {
    let mut ladder: Vec<usize> = std::iter::successors(Some(1usize), |t| t.checked_mul(2))
        .take_while(|&t| t <= max)
        .collect();
    if ladder.last() != Some(&max) {
        ladder.push(max);
    }
    ladder
}

fn scale(args: &ScaleArgs) -> Result<(), Failure> {
    if args.max_threads == 0 || args.repeat == 0 {
        return Err(Failure::Usage(
            "--max-threads and --repeat must be positive".into(),
        ));
    }
    let ladder = thread_ladder(args.max_threads);
    if !ladder.contains(&args.baseline) {
        return Err(Failure::Usage(format!(
            "baseline {} is not one of the budgets {ladder:?}",
            args.baseline
        )));
    }
    let mut records = Vec::new();
    for file in &args.files {
        let instance = load(file, args.format)?;
        for &threads in &ladder {
            let config = EngineConfig {
                cascade: args.warmstart_cascade,
                ..EngineConfig::with_threads(threads)
            };
            let mut best = f64::INFINITY;
            let mut last = None;
            for _ in 0..args.repeat {
                let start = Instant::now();
                let report = run_instance(&instance, &config)?;
                best = best.min(start.elapsed().as_secs_f64());
                last = Some(report);
            }
            let report = last.expect("repeat is positive");
            records.push(ScalingRecord {
                instance: file.display().to_string(),
                k: instance.k(),
                n: instance.size(),
                nondominated: report.nondominated.len(),
                scalarizations: report.scalarizations_solved,
                threads,
                wall_time_seconds: best,
                slowdown: f64::NAN,
            });
        }
    }
    assign_slowdown(&mut records, args.baseline);
    for &t in &ladder {
        if let Some(s) = aggregate_slowdown(&records, t) {
            eprintln!("threads {t}: mean slowdown {s:.3}");
        }
    }
    let mut buffer = Vec::new();
    write_scaling_csv(&records, &mut buffer)
        .map_err(|e| Failure::Io(format!("cannot encode CSV: {e}")))?;
    emit(
        args.out.as_deref(),
        &String::from_utf8(buffer).expect("CSV output is UTF-8"),
    )
}

fn gen(args: &GenArgs) -> Result<(), Failure> {
    if args.k < 2 || args.n == 0 {
        return Err(Failure::Usage("gen needs --k >= 2 and --n >= 1".into()));
    }
    let kind = match args.kind {
        Kind::Kp => GeneratorKind::Knapsack,
        Kind::Ilp => GeneratorKind::TinyIlp,
        Kind::Set => GeneratorKind::ExplicitSet {
            shape: match args.shape {
                Shape::Uniform => SetShape::Uniform,
                Shape::Simplex => SetShape::Simplex,
            },
            general_position: args.general_position,
        },
    };
    emit(
        args.out.as_deref(),
        &generate_instance(kind, args.k, args.n, args.seed),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Scale(a) => scale(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scion: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_doubles_and_ends_at_the_maximum() {
        assert_eq!(thread_ladder(8), vec![1, 2, 4, 8]);
        assert_eq!(thread_ladder(6), vec![1, 2, 4, 6]);
        assert_eq!(thread_ladder(1), vec![1]);
    }

    #[test]
    fn command_line_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
