use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lmtr_bench::config::FileConfig;
use lmtr_bench::emit::{self, RunBundle};
use lmtr_bench::profile::ProfileTable;
use lmtr_bench::spec::parse_list;
use lmtr_bench::{run_suite, tau_grid, BenchError, Metric, Result, SuiteConfig, OUT_DIR_ENV};
use lmtr_core::par::Execution;
use lmtr_core::problems::registry;
use lmtr_core::{Problem, ProblemKind, SolverConfig};

#[derive(Debug, Parser)]
#[command(
    name = "bench",
    about = "Run solver suites and compute performance profiles"
)]
struct Cli {
    /// Key-value config file; its values override the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every (problem, solver) cell and write records.csv and records.json.
    Run {
        /// Comma-separated problem names, or `all`.
        #[arg(long, default_value = "all")]
        problems: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// e.g. `dense:c=1,lambda=0.5,everywhere=true,conventional`.
        #[arg(
            long,
            default_value = "dense:c=1,lambda=0.5,everywhere=true;conventional"
        )]
        solvers: String,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 2)]
        discard: usize,
        /// Output directory; falls back to $LMTR_BENCH_OUT, then `bench-out`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run cells concurrently (iteration counts only; timings contend).
        #[arg(long)]
        parallel: bool,
    },
    /// Compute performance profiles from a run directory.
    Profile {
        #[arg(long, default_value = "iter")]
        metric: String,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ProfileFormat::TsvProfile)]
        format: ProfileFormat,
        /// Output file; defaults to `profile_<metric>.tsv` in the input directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileFormat {
    TsvProfile,
    Json,
}

impl std::str::FromStr for ProfileFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

fn select_problems(names: &str, n: usize) -> Result<Vec<Problem>> {
    if names.trim() == "all" {
        return Ok(registry(n));
    }
    names
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            let kind: ProblemKind = name.parse()?;
            Ok(Problem::new(kind, kind.fit_dim(n))?)
        })
        .collect()
}

fn out_dir(file: Option<PathBuf>, flag: Option<PathBuf>) -> PathBuf {
    file.or(flag)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("bench-out"))
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Run {
            problems,
            n,
            solvers,
            reps,
            discard,
            out,
            parallel,
        } => {
            let problems = file.problems.clone().unwrap_or(problems);
            let n = file.n.unwrap_or(n);
            let mut base = SolverConfig::default();
            file.apply(&mut base);
            let mut suite = SuiteConfig::new(
                select_problems(&problems, n)?,
                parse_list(file.solvers.as_deref().unwrap_or(&solvers))?,
            );
            suite.reps = file.reps.unwrap_or(reps);
            suite.discard = file.discard.unwrap_or(discard);
            suite.base = base;
            suite.exec = if file.parallel.unwrap_or(parallel) {
                Execution::Parallel
            } else {
                Execution::Sequential
            };
            let dir = out_dir(file.out.clone(), out);

            let records = run_suite(&suite)?;
            emit::ensure_dir(&dir)?;
            emit::write_records_csv(&records, &dir.join(emit::RECORDS_CSV))?;
            let bundle = RunBundle::new(&suite, records);
            emit::write_bundle_json(&bundle, &dir.join(emit::RECORDS_JSON))?;
            for r in &bundle.records {
                println!(
                    "{:<22} {:>6} {:<40} {:<18} {:>6} {:>6} {:.6}",
                    r.problem,
                    r.n,
                    r.solver_id,
                    format!("{:?}", r.status),
                    r.iterations,
                    r.total_steps,
                    r.time_seconds
                );
            }
            eprintln!(
                "wrote {} records to {}",
                bundle.records.len(),
                dir.display()
            );
            Ok(())
        }
        Command::Profile {
            metric,
            input,
            format,
            out,
        } => {
            let metric: Metric = file
                .metric
                .as_deref()
                .unwrap_or(&metric)
                .parse()
                .map_err(BenchError::Suite)?;
            let format = match file.format.as_deref() {
                Some(f) => f.parse().map_err(BenchError::Suite)?,
                None => format,
            };
            let input = file
                .input
                .clone()
                .or(input)
                .ok_or_else(|| BenchError::Suite("profile needs --in <dir>".into()))?;
            let records = emit::read_run_dir(&input)?;
            let table = ProfileTable::from_records(&records, metric)?;
            let curves = table.curves(&tau_grid(
                lmtr_bench::profile::GRID_POINTS,
                lmtr_bench::profile::TAU_MAX,
            ));
            let (text, default_name) = match format {
                ProfileFormat::TsvProfile => {
                    (emit::profile_tsv(&curves), emit::profile_file_name(metric))
                }
                ProfileFormat::Json => (
                    emit::profile_json(&curves),
                    format!("profile_{metric}.json"),
                ),
            };
            let path = file
                .out
                .clone()
                .or(out)
                .unwrap_or_else(|| input.join(default_name));
            emit::write_text(&path, &text)?;
            report(&table, &path);
            Ok(())
        }
    }
}

fn report(table: &ProfileTable, path: &Path) {
    for (s, id) in table.solvers.iter().enumerate() {
        println!(
            "{id:<40} rho(1)={:.3} rho(2)={:.3} rho(64)={:.3}",
            table.rho(s, 1.0),
            table.rho(s, 2.0),
            table.rho(s, 64.0)
        );
    }
    eprintln!("wrote {}", path.display());
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
