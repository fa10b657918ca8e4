use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use prodsynth::bench::{load_corpus, run_suite};
use prodsynth::census::{census_rows, CensusMode};
use prodsynth::parallel::Parallelism;
use prodsynth::syntax::{
    parse_expr, parse_problem, parse_type, pretty_print, Sugar, SynthesisProblem,
};
use prodsynth::synthesis::{synthesize_with, verify, FocusMode, SearchLimits, SynthError};
use prodsynth::typecheck::ConstructorContext;

const EXIT_NO_SOLUTION: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_INPUT: u8 = 3;

/// Synthesizes functional programs from types and input-output examples.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// TOML file supplying defaults for the search flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the smallest program for a problem file.
    Synth {
        file: PathBuf,
        #[command(flatten)]
        search: SearchFlags,
        /// Search without focusing; tuple projections are guessed instead.
        #[arg(long)]
        no_focus: bool,
        /// Print the rules of the derivation, one per line.
        #[arg(long)]
        trace: bool,
        /// Print search statistics as key=value lines.
        #[arg(long)]
        stats: bool,
    },
    /// Re-verify a program against a problem.
    Check { file: PathBuf, program: PathBuf },
    /// Count syntax trees by node count.
    Census {
        #[arg(long, default_value = "nat -> nat")]
        r#type: String,
        #[arg(long, default_value_t = 8)]
        max_nodes: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Compare)]
        mode: ModeArg,
    },
    /// Benchmark suites.
    Bench {
        #[command(subcommand)]
        command: BenchCommand,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Run every problem in a corpus directory.
    Run {
        dir: PathBuf,
        #[command(flatten)]
        search: SearchFlags,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        /// Run problems concurrently (timings are then less stable).
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Args, Default)]
struct SearchFlags {
    #[arg(long, value_name = "N")]
    max_size: Option<usize>,
    /// Seconds.
    #[arg(long, value_name = "S")]
    timeout: Option<f64>,
    #[arg(long, value_name = "N")]
    max_scrutinee_size: Option<usize>,
    #[arg(long, value_name = "N")]
    max_match_depth: Option<usize>,
    /// Cap on candidate terms kept in memory.
    #[arg(long, value_name = "N")]
    max_terms: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    All,
    Typed,
    Normal,
    Compare,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Config {
    max_size: Option<usize>,
    timeout: Option<f64>,
    max_scrutinee_size: Option<usize>,
    max_match_depth: Option<usize>,
    max_terms: Option<u64>,
    fuel: Option<u64>,
}

struct Failure(u8, String);

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure(EXIT_INPUT, msg.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = read(path)?;
    toml::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn limits(config: &Config, flags: &SearchFlags) -> Result<SearchLimits, Failure> {
    let mut l = SearchLimits::default();
    if let Some(n) = flags.max_size.or(config.max_size) {
        l.max_total_size = n;
    }
    if let Some(s) = flags.timeout.or(config.timeout) {
        l.timeout = Duration::try_from_secs_f64(s)
            .map_err(|e| Failure::input(format!("bad timeout: {e}")))?;
    }
    if let Some(n) = flags.max_scrutinee_size.or(config.max_scrutinee_size) {
        l.max_scrutinee_size = n;
    }
    if let Some(n) = flags.max_match_depth.or(config.max_match_depth) {
        l.max_match_depth = n;
    }
    if let Some(n) = flags.max_terms.or(config.max_terms) {
        l.max_terms = n;
    }
    // The environment variable wins over the file.
    if std::env::var_os("PRODSYNTH_FUEL").is_none() {
        if let Some(f) = config.fuel {
            l.eval_fuel = f;
        }
    }
    if l.max_total_size == 0 || l.eval_fuel == 0 || l.max_terms == 0 || l.timeout.is_zero() {
        return Err(Failure::input("search limits must be positive"));
    }
    Ok(l)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<SynthesisProblem, Failure> {
    parse_problem(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Synth {
            file,
            search,
            no_focus,
            trace,
            stats,
        } => {
            let problem = load_problem(&file)?;
            let limits = limits(&config, &search)?;
            let mode = if no_focus {
                FocusMode::Off
            } else {
                FocusMode::Eager
            };
            match synthesize_with(&problem, &limits, mode) {
                Ok(out) => {
                    if trace {
                        for line in &out.trace {
                            println!("{line}");
                        }
                    }
                    println!(
                        "{}",
                        pretty_print(&out.expr, &Sugar::from_decls(&problem.decls))
                    );
                    if stats {
                        println!("size={}", out.size);
                        println!("{}", out.stats);
                    }
                    Ok(())
                }
                Err(e @ SynthError::NoSolution(_)) => Err(Failure(EXIT_NO_SOLUTION, e.to_string())),
                Err(e @ (SynthError::Timeout(_) | SynthError::TermLimit(_))) => {
                    Err(Failure(EXIT_TIMEOUT, e.to_string()))
                }
                Err(e @ SynthError::Invalid(_)) => Err(Failure::input(e.to_string())),
                Err(e @ SynthError::Unsound(_)) => Err(Failure(EXIT_NO_SOLUTION, e.to_string())),
            }
        }
        Command::Check { file, program } => {
            let problem = load_problem(&file)?;
            let sugar = Sugar::from_decls(&problem.decls);
            let text = read(&program)?;
            let expr = parse_expr(&text, &sugar)
                .map_err(|e| Failure::input(format!("{}: {e}", program.display())))?;
            let fuel = limits(&config, &SearchFlags::default())?.eval_fuel;
            match verify(&problem, &expr, fuel) {
                Ok(()) => {
                    println!("ok");
                    Ok(())
                }
                Err(why) => Err(Failure(
                    EXIT_NO_SOLUTION,
                    format!("program rejected: {why}"),
                )),
            }
        }
        Command::Census {
            r#type,
            max_nodes,
            mode,
        } => {
            let ty = parse_type(&r#type).map_err(|e| Failure::input(e.to_string()))?;
            let sigma = ConstructorContext::from_decls(&prodsynth::census::nat_decls())
                .map_err(|e| Failure::input(e.to_string()))?;
            let modes: &[CensusMode] = match mode {
                ModeArg::All => &[CensusMode::All],
                ModeArg::Typed => &[CensusMode::Typed],
                ModeArg::Normal => &[CensusMode::Normal],
                ModeArg::Compare => &[CensusMode::All, CensusMode::Typed, CensusMode::Normal],
            };
            let rows = census_rows(&sigma, &ty, max_nodes, modes)
                .map_err(|e| Failure::input(e.to_string()))?;
            let header: Vec<&str> = modes.iter().map(|m| m.as_str()).collect();
            if modes.len() == 1 {
                println!("n,count");
            } else {
                println!("n,{}", header.join(","));
            }
            for (n, counts) in rows {
                let cols: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
                println!("{n},{}", cols.join(","));
            }
            Ok(())
        }
        Command::Bench {
            command:
                BenchCommand::Run {
                    dir,
                    search,
                    format,
                    parallel,
                },
        } => {
            let cases = load_corpus(&dir).map_err(|e| Failure::input(e.to_string()))?;
            let limits = limits(&config, &search)?;
            let report = run_suite(&cases, &limits, Parallelism::from_flag(parallel));
            match format {
                Format::Csv => print!("{}", report.to_csv()),
                Format::Md => print!("{}", report.to_markdown()),
            }
            let failures = report.acceptance_failures();
            if failures.is_empty() {
                Ok(())
            } else {
                let names: Vec<&str> = failures.iter().map(|r| r.name.as_str()).collect();
                Err(Failure(
                    EXIT_NO_SOLUTION,
                    format!("unsolved: {}", names.join(", ")),
                ))
            }
        }
    }
}
