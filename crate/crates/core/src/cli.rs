//! Command-line interface. [`run`] parses arguments, does the work and returns
//! the process exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::algorithms::{solve, Algorithm, SolverConfig};
use crate::harness::{
    derive_seed, emit_report, run_experiment, ExperimentReport, ReportFormat, RunOptions, Scale, SweepSpec,
    SweepVariable,
};
use crate::instance::{
    generate_instance, parse_instance, serialize_instance, CapacityMode, GeneratorParams, JobDistribution,
    JobSplit, ModelKind, ProfessionMode,
};
use crate::objective::Evaluator;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn invalid(e: impl ToString) -> CliError {
    CliError::Validation(e.to_string())
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "resettle", version, about = "Migrant resettlement solvers and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random instance file.
    Generate(GenerateArgs),
    /// Run one solver on one instance and print the re-scored result.
    Run(RunArgs),
    /// Run a parameter sweep and write report files.
    Experiment(ExperimentArgs),
    /// Render a stored JSON report in another format.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    model: ModelKind,
    #[arg(long)]
    migrants: usize,
    #[arg(long)]
    localities: usize,
    #[arg(long)]
    jobs: usize,
    #[arg(long)]
    professions: usize,
    /// even-split or random-at-least-one
    #[arg(long, default_value = "even-split", value_parser = parse_profession_mode)]
    profession_mode: ProfessionMode,
    /// even, match-migrants, or comma-separated counts per profession
    #[arg(long, default_value = "even", value_parser = parse_job_split)]
    job_split: JobSplit,
    /// equal-per-locality, random-at-least-one-per-locality, or fixed-per-locality:K
    #[arg(long, default_value = "equal-per-locality", value_parser = parse_job_distribution)]
    job_distribution: JobDistribution,
    /// equal-to-jobs, or a fixed capacity for every locality
    #[arg(long, default_value = "equal-to-jobs", value_parser = parse_capacity)]
    capacity: CapacityMode,
    /// Random seed; a fresh one is drawn and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolverFlags {
    #[arg(long, default_value_t = 0.5)]
    p_m: f64,
    #[arg(long, default_value_t = 0.9)]
    crossover_prob: f64,
    #[arg(long, default_value_t = 1.0)]
    mutation_prob: f64,
    /// Defaults to 100, or 2 (r + 1) for nsga2-2r.
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long, default_value_t = 20)]
    neighborhood_size: usize,
}

impl SolverFlags {
    fn config(&self, algorithm: Algorithm, budget: u64, seed: u64) -> SolverConfig {
        SolverConfig {
            algorithm,
            budget,
            seed,
            p_m: self.p_m,
            crossover_prob: self.crossover_prob,
            mutation_prob: self.mutation_prob,
            population_size: self.population_size,
            neighborhood_size: self.neighborhood_size,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    algorithm: Algorithm,
    /// Monte-Carlo samples per in-run evaluation.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Monte-Carlo samples for the final re-score.
    #[arg(long, default_value_t = 10_000)]
    rescore_samples: usize,
    /// Evaluation budget; defaults to 100 · |V|² · |L|.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// migrants, localities, jobs or professions
    #[arg(long)]
    sweep: SweepVariable,
    #[arg(long)]
    model: ModelKind,
    /// paper or desk
    #[arg(long, default_value = "desk")]
    scale: Scale,
    /// Comma-separated algorithms; defaults to the seven standard solvers.
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<Algorithm>,
    /// Algorithm the others are tested against.
    #[arg(long)]
    reference: Option<Algorithm>,
    /// Comma-separated sweep values overriding the preset.
    #[arg(long, value_delimiter = ',')]
    values: Vec<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    rescore_samples: Option<usize>,
    /// Budget is this factor times |V|² · |L|.
    #[arg(long)]
    budget_factor: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Record wall-clock time per cell (reports are then not byte-reproducible).
    #[arg(long)]
    timing: bool,
    /// Directory for report.json, report.csv, report.md and report.plot.csv.
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// A report.json written by `experiment`.
    #[arg(long)]
    input: PathBuf,
    /// json, csv, markdown or plot
    #[arg(long)]
    format: ReportFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_profession_mode(s: &str) -> Result<ProfessionMode, String> {
    match s {
        "even-split" => Ok(ProfessionMode::EvenSplit),
        "random-at-least-one" => Ok(ProfessionMode::RandomAtLeastOne),
        _ => Err("expected even-split or random-at-least-one".into()),
    }
}

fn parse_job_split(s: &str) -> Result<JobSplit, String> {
    match s {
        "even" => Ok(JobSplit::Even),
        "match-migrants" => Ok(JobSplit::MatchMigrants),
        _ => s
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(JobSplit::Explicit)
            .map_err(|_| "expected even, match-migrants or comma-separated counts".into()),
    }
}

fn parse_job_distribution(s: &str) -> Result<JobDistribution, String> {
    match s {
        "equal-per-locality" => Ok(JobDistribution::EqualPerLocality),
        "random-at-least-one-per-locality" => Ok(JobDistribution::RandomAtLeastOnePerLocality),
        _ => s
            .strip_prefix("fixed-per-locality:")
            .and_then(|k| k.parse().ok())
            .map(JobDistribution::FixedPerLocality)
            .ok_or_else(|| {
                "expected equal-per-locality, random-at-least-one-per-locality or fixed-per-locality:K".into()
            }),
    }
}

fn parse_capacity(s: &str) -> Result<CapacityMode, String> {
    match s {
        "equal-to-jobs" => Ok(CapacityMode::EqualToJobs),
        _ => s
            .parse()
            .map(CapacityMode::Fixed)
            .map_err(|_| "expected equal-to-jobs or a non-negative integer".into()),
    }
}

/// The given seed, or a fresh one announced on `err`.
fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        let _ = writeln!(err, "using random seed {s}");
        s
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(invalid("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(runtime)?;
            Ok(pool.install(f))
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn generate(args: GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, err);
    let params = GeneratorParams {
        model: args.model,
        migrants: args.migrants,
        localities: args.localities,
        jobs: args.jobs,
        professions: args.professions,
        profession_mode: args.profession_mode,
        job_split: args.job_split,
        job_distribution: args.job_distribution,
        capacity: args.capacity,
        seed,
    };
    let instance = generate_instance(&params).map_err(invalid)?;
    let bytes = serialize_instance(&instance);
    match args.out {
        Some(path) => write_file(&path, &bytes),
        None => out.write_all(&bytes).map_err(runtime),
    }
}

fn run_one(args: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let instance = parse_instance(&read(&args.instance)?).map_err(invalid)?;
    if args.samples == 0 || args.rescore_samples == 0 {
        return Err(invalid("sample counts must be positive"));
    }
    let seed = resolve_seed(args.seed, err);
    let v = instance.num_migrants() as u64;
    let budget = args.budget.unwrap_or(100 * v * v * instance.num_localities() as u64);
    let config = args.solver.config(args.algorithm, budget, derive_seed(seed, &[1]));
    config.validate(&instance).map_err(invalid)?;

    let (result, final_f) = with_threads(args.threads, || {
        let mut evaluator = Evaluator::monte_carlo(args.samples, derive_seed(seed, &[2]));
        let result = solve(&instance, &mut evaluator, &config).map_err(runtime)?;
        let mut rescore = Evaluator::monte_carlo(args.rescore_samples, derive_seed(seed, &[3]));
        let final_f = rescore.estimate(&instance, &result.best).map_err(runtime)?;
        Ok::<_, CliError>((result, final_f))
    })??;

    let text = format!(
        "seed: {seed}\nalgorithm: {}\nbudget: {budget}\nevaluations: {}\nf_hat_in_run: {}\nfinal_f: {final_f}\n\
         selected: {}\nassignment: {}\n",
        args.algorithm,
        result.evaluations_used,
        result.best_f1_in_run,
        result.best.count_ones(),
        result.best
    );
    out.write_all(text.as_bytes()).map_err(runtime)
}

/// Default algorithms, in result-table order.
const DEFAULT_ALGORITHMS: [Algorithm; 7] = [
    Algorithm::Additive,
    Algorithm::Greedy,
    Algorithm::Nsga2Pop2r,
    Algorithm::Nsga2Pop100,
    Algorithm::Moead,
    Algorithm::Gsemo,
    Algorithm::GsemoSr,
];

fn experiment(args: ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, err);
    let mut spec = SweepSpec::preset(args.sweep, args.scale, args.model, seed);
    if !args.values.is_empty() {
        spec.values = args.values;
    }
    if let Some(r) = args.replicates {
        spec.replicates = r;
    }
    if let Some(s) = args.samples {
        spec.samples = s;
    }
    if let Some(s) = args.rescore_samples {
        spec.rescore_samples = s;
    }
    if let Some(b) = args.budget_factor {
        spec.budget_factor = b;
    }
    spec.validate().map_err(invalid)?;

    let algorithms = if args.algorithms.is_empty() {
        DEFAULT_ALGORITHMS.to_vec()
    } else {
        args.algorithms
    };
    let mut options = RunOptions::new(algorithms);
    options.reference = args.reference;
    options.timing = args.timing;
    options.solver = args.solver.config(Algorithm::GsemoSr, 1, 0);

    let report = with_threads(args.threads, || run_experiment(&spec, &options))?.map_err(invalid)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| runtime(format!("cannot create {}: {e}", args.out_dir.display())))?;
    for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown, ReportFormat::PlotData] {
        let path = args.out_dir.join(format!("report.{}", format.extension()));
        write_file(&path, &emit_report(&report, format))?;
        let _ = writeln!(err, "wrote {}", path.display());
    }
    for f in &report.failures {
        let _ = writeln!(
            err,
            "cell failed: {} = {}, replicate {}, {}: {}",
            report.sweep_var, f.sweep_value, f.replicate, f.algorithm, f.message
        );
    }
    out.write_all(&emit_report(&report, ReportFormat::Markdown)).map_err(runtime)
}

fn report(args: ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = ExperimentReport::from_json(&read(&args.input)?)
        .map_err(|e| invalid(format!("{} is not a valid report: {e}", args.input.display())))?;
    let bytes = emit_report(&report, args.format);
    match args.out {
        Some(path) => write_file(&path, &bytes),
        None => out.write_all(&bytes).map_err(runtime),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a, out, err),
        Command::Run(a) => run_one(a, out, err),
        Command::Experiment(a) => experiment(a, out, err),
        Command::Report(a) => report(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}
