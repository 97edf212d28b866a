//! Command-line front end. Exit codes: 0 success, 1 invalid input or a
//! failed check, 2 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analyzer::{self, AnalyzerConfig, PredictionFormat};
use crate::collatz::long_step;
use crate::datagen::{
    self, CorpusOptions, GenSpec, InputDistribution, Task, DEFAULT_K_CAP, DEFAULT_N_MAX,
};
use crate::emulator::{self, EmulationSpec, Frontier, ParityMode};
use crate::error::{Error, Result};
use crate::suffix;
use crate::verify::{self, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "collatz",
    version,
    about = "Long Collatz step: exact computation, datasets, emulation and analysis"
)]
struct Cli {
    /// Seed for randomized subcommands (required by gen and emulate).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Suppress informational output.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Long step of an odd n.
    Step {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Loop lengths from the binary suffix and by direct computation.
    Oracle {
        #[arg(long)]
        n: u64,
    },
    /// H_l, most recent parity first.
    Hseq {
        #[arg(long)]
        l: u32,
    },
    /// Binary suffix of the class (k, k').
    Suffix {
        #[arg(long)]
        k: u32,
        #[arg(long = "k-prime")]
        k_prime: u32,
    },
    /// Probability of the class (k, k') under uniform odd inputs.
    Prob {
        #[arg(long)]
        k: u32,
        #[arg(long = "k-prime")]
        k_prime: u32,
    },
    /// Write a training or test corpus.
    Gen(GenArgs),
    /// Write predictions of an emulated model.
    Emulate(EmulateArgs),
    /// Analyze a prediction file.
    Analyze(AnalyzeArgs),
    /// Run the exhaustive checks.
    Verify {
        /// Exclusive bound of the oracle range check.
        #[arg(long, default_value_t = 1 << 22)]
        max_n: u64,
        /// Class counts are taken over odd n < 2^count_bits.
        #[arg(long, default_value_t = 24)]
        count_bits: u32,
        #[arg(long, default_value_t = 6)]
        max_level: u32,
        #[arg(long, default_value_t = 12)]
        max_sum: u32,
    },
    /// Share of natural inputs a frontier predicts exactly.
    ExpectedAccuracy {
        #[command(flatten)]
        frontier: FrontierArgs,
        /// Print the exact fraction instead of the decimal.
        #[arg(long)]
        exact: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct FrontierArgs {
    #[arg(long)]
    frontier_step: Option<u32>,
    /// Explicit limits l'_1,l'_2,... (non-increasing, each >= 1).
    #[arg(long, value_delimiter = ',')]
    frontier_limits: Option<Vec<u32>>,
}

impl FrontierArgs {
    fn frontier(&self) -> Result<Frontier> {
        match (&self.frontier_step, &self.frontier_limits) {
            (Some(step), _) => Frontier::canonical(*step),
            (None, Some(limits)) => Frontier::from_limits(limits.clone()),
            (None, None) => unreachable!("clap requires one frontier flag"),
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    task: Task,
    /// Input base (and output base unless --output-base is given).
    #[arg(long)]
    base: u32,
    #[arg(long)]
    output_base: Option<u32>,
    #[arg(long = "dist", default_value = "natural")]
    distribution: InputDistribution,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: u64,
    #[arg(long, default_value_t = DEFAULT_K_CAP)]
    k_cap: u32,
    /// Never repeat an input within the corpus.
    #[arg(long)]
    unique: bool,
    /// Corpus whose inputs must not appear (read in the input base).
    #[arg(long)]
    exclude: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EmulateArgs {
    #[command(flatten)]
    frontier: FrontierArgs,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value = "free", value_parser = parse_parity)]
    parity: ParityMode,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: u64,
    /// Redraw inputs at or below this value.
    #[arg(long, default_value_t = 0)]
    min_n: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    base: u32,
    #[arg(long, default_value = "decimal_tsv")]
    format: PredictionFormat,
    /// Write the full report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the ratio histogram as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the ratio modes as CSV.
    #[arg(long)]
    modes_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    p_max: u32,
    #[arg(long, default_value_t = 50)]
    bins_per_decade: u32,
    /// Fail when any line is rejected.
    #[arg(long)]
    strict: bool,
}

fn parse_parity(s: &str) -> std::result::Result<ParityMode, String> {
    match s {
        "free" => Ok(ParityMode::Free),
        "force_odd" | "force-odd" => Ok(ParityMode::ForceOdd),
        other => Err(format!("unknown parity mode {other:?} (free, force_odd)")),
    }
}

enum Failure {
    Error(Error),
    /// A check failed; details were already printed.
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn write_file(path: &std::path::Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn require_seed(seed: Option<u64>, command: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::InvalidArgument(format!("{command} requires --seed")))
}

fn execute(cli: Cli, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let stdout_err = |e| Failure::Error(Error::io("<stdout>", e));
    match cli.command {
        Command::Step { n, json } => {
            let r = long_step(n)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&r).expect("serializable"))
                    .map_err(stdout_err)?;
            } else {
                writeln!(
                    out,
                    "kappa={} k={} k'={} apex={}",
                    r.kappa, r.k, r.k_prime, r.apex
                )
                .map_err(stdout_err)?;
            }
        }
        Command::Oracle { n } => {
            let (k, kp) = suffix::loop_lengths_from_suffix(n)?;
            let r = long_step(n)?;
            writeln!(out, "suffix k={k} k'={kp}").map_err(stdout_err)?;
            writeln!(out, "direct k={} k'={}", r.k, r.k_prime).map_err(stdout_err)?;
            if (k, kp) != (r.k, r.k_prime) {
                eprintln!("error: the two computations disagree");
                return Err(Failure::Check);
            }
        }
        Command::Hseq { l } => {
            writeln!(out, "{}", suffix::h_sequence(l)?.to_reversed_string()).map_err(stdout_err)?;
        }
        Command::Suffix { k, k_prime } => {
            writeln!(out, "{}", suffix::class_suffix(k, k_prime)?.suffix).map_err(stdout_err)?;
        }
        Command::Prob { k, k_prime } => {
            let p = suffix::class_probability(k, k_prime)?;
            let decimal = p.to_terminating_decimal().expect("dyadic");
            writeln!(out, "{p} = {decimal}").map_err(stdout_err)?;
        }
        Command::ExpectedAccuracy { frontier, exact } => {
            let value = suffix::expected_accuracy(&frontier.frontier()?);
            let text = if exact {
                value.to_string()
            } else {
                value.to_terminating_decimal().expect("dyadic")
            };
            writeln!(out, "{text}").map_err(stdout_err)?;
        }
        Command::Gen(args) => {
            let seed = require_seed(cli.seed, "gen")?;
            let mut spec = GenSpec::new(args.task, args.base, args.count, seed);
            spec.output_base = args.output_base.unwrap_or(args.base);
            spec.distribution = args.distribution;
            spec.n_max = args.n_max;
            spec.k_cap = args.k_cap;
            spec.validate()?;
            let exclude = match &args.exclude {
                Some(path) => Some(datagen::read_corpus_inputs(path, spec.input_base)?),
                None => None,
            };
            let options = CorpusOptions {
                unique: args.unique,
                exclude,
            };
            let summary = datagen::write_corpus(&spec, &options, &args.out)?;
            if !cli.quiet {
                writeln!(
                    out,
                    "wrote {} lines ({} distinct inputs) to {}",
                    summary.lines_written,
                    summary.distinct_inputs,
                    args.out.display()
                )
                .map_err(stdout_err)?;
            }
        }
        Command::Emulate(args) => {
            let seed = require_seed(cli.seed, "emulate")?;
            let mut spec = EmulationSpec::new(args.frontier.frontier()?, args.count, seed);
            spec.parity_mode = args.parity;
            spec.n_max = args.n_max;
            spec.min_n = args.min_n;
            let predictions = emulator::emulate(&spec)?;
            emulator::write_predictions_file(&predictions, &args.out)?;
            if !cli.quiet {
                let correct = predictions
                    .iter()
                    .filter(|p| p.prediction == p.target)
                    .count();
                writeln!(
                    out,
                    "wrote {} predictions to {} (accuracy {:.4})",
                    predictions.len(),
                    args.out.display(),
                    correct as f64 / predictions.len() as f64
                )
                .map_err(stdout_err)?;
            }
        }
        Command::Analyze(args) => {
            let (records, load) = analyzer::load_predictions(&args.input, args.format, args.base)?;
            for r in load.rejected.iter().take(20) {
                eprintln!("{}:{}: {}", args.input.display(), r.line, r.reason);
            }
            if load.rejected.len() > 20 {
                eprintln!("... {} more rejected lines", load.rejected.len() - 20);
            }
            if args.strict && !load.rejected.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "{} lines rejected",
                    load.rejected.len()
                ))
                .into());
            }
            if records.is_empty() {
                return Err(Error::InvalidArgument("no valid prediction records".into()).into());
            }
            let config = AnalyzerConfig::default();
            let classified = analyzer::classify_records(&records, &config);
            let report =
                analyzer::summary_report(&classified, &config, args.p_max, args.bins_per_decade)?;
            if let Some(path) = &args.report {
                write_file(path, &(report.to_json() + "\n"))?;
            }
            if let Some(path) = &args.csv {
                write_file(path, &report.histogram.to_csv())?;
            }
            if let Some(path) = &args.modes_csv {
                write_file(path, &report.histogram.modes_csv())?;
            }
            if !cli.quiet {
                if !load.rejected.is_empty() {
                    writeln!(out, "rejected  {}", load.rejected.len()).map_err(stdout_err)?;
                }
                write!(out, "{}", report.to_text()).map_err(stdout_err)?;
            }
        }
        Command::Verify {
            max_n,
            count_bits,
            max_level,
            max_sum,
        } => {
            let checks = verify::run_all(&VerifyOptions {
                max_n,
                count_bits,
                max_level,
                max_sum,
            })?;
            for check in &checks {
                writeln!(out, "{check}").map_err(stdout_err)?;
            }
            if checks.iter().any(|c| !c.passed) {
                return Err(Failure::Check);
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the subcommand, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };
    let stdout = std::io::stdout();
    let result = pool.install(|| execute(cli, &mut stdout.lock()));
    match result {
        Ok(()) => 0,
        Err(Failure::Check) => 1,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}
