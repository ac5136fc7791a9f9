//! Command-line front end: `run` executes a scenario and its checks,
//! `compare` diffs two finished run directories, `render` draws SVG frames
//! from stored trajectories.
//!
//! Exit codes: 0 all enabled checks passed; 1 a check failed or the solve
//! aborted; 2 usage error (unknown command or scenario name); 3 invalid
//! configuration (validation, CFL, parse). `MCF_THREADS` caps the worker
//! pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mcflow::cli_io::runner::{compare_runs, parse_checks, render_run, run_scenario};
use mcflow::cli_io::scenario::{builtin, builtin_names, ScenarioConfig};
use mcflow::cli_io::io::read_config;
use mcflow::Error;

#[derive(Parser)]
#[command(
    name = "mcflow",
    about = "Graphical mean curvature flow simulator and verification harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario (built-in name or path to a JSON config) with checks
    Run {
        /// built-in scenario name or path to a .json config
        #[arg(long)]
        scenario: String,
        /// override the grid spacing h
        #[arg(long)]
        h: Option<f64>,
        /// override the time horizon T
        #[arg(long = "T")]
        horizon: Option<f64>,
        /// output directory (default runs/<name>)
        #[arg(long)]
        out: Option<PathBuf>,
        /// all, none, or a comma-separated list of check names
        #[arg(long, default_value = "all")]
        checks: String,
    },
    /// Compare two finished run directories
    Compare {
        #[arg(long = "runA")]
        run_a: PathBuf,
        #[arg(long = "runB")]
        run_b: PathBuf,
    },
    /// Render SVG frames from a finished run directory
    Render {
        #[arg(long)]
        run: PathBuf,
        /// comma-separated snapshot times
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
}

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

fn config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidConfig(_)
            | Error::InvalidGrid(_)
            | Error::Parse(_)
            | Error::CflViolation { .. }
            | Error::Io(_)
    )
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if config_error(e) {
        ExitCode::from(EXIT_CONFIG)
    } else {
        ExitCode::from(EXIT_CHECK_FAILURE)
    }
}

fn resolve_scenario(arg: &str) -> Result<ScenarioConfig, ExitCode> {
    let path = PathBuf::from(arg);
    if arg.ends_with(".json") || path.is_file() {
        return read_config(&path).map_err(|e| fail(&e));
    }
    match builtin(arg) {
        Some(cfg) => Ok(cfg),
        None => {
            eprintln!(
                "error: unknown scenario {arg:?}\nusage: --scenario <name|path.json>; built-in scenarios: {}",
                builtin_names().join(", ")
            );
            Err(ExitCode::from(EXIT_USAGE))
        }
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("MCF_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid MCF_THREADS value {v:?}"),
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run {
            scenario,
            h,
            horizon,
            out,
            checks,
        } => {
            let mut cfg = match resolve_scenario(&scenario) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(h) = h {
                cfg.h = h;
            }
            if let Some(t) = horizon {
                cfg.horizon = t;
            }
            let selection = match parse_checks(&checks) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            let out_dir = out.unwrap_or_else(|| PathBuf::from("runs").join(&cfg.name));
            match run_scenario(&cfg, &out_dir, &selection) {
                Ok(outcome) => {
                    for w in &outcome.warnings {
                        eprintln!("warning: {w}");
                    }
                    for r in &outcome.reports {
                        println!(
                            "[{}] {} worst={:.6e} threshold={:.6e}",
                            if r.pass { "PASS" } else { "FAIL" },
                            r.name,
                            r.worst_value,
                            r.threshold
                        );
                    }
                    println!("run written to {}", outcome.out_dir.display());
                    if outcome.all_passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_CHECK_FAILURE)
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Cmd::Compare { run_a, run_b } => match compare_runs(&run_a, &run_b) {
            Ok(reports) => {
                for r in &reports {
                    println!("{} {} worst={:.6e}", r.scenario, r.name, r.worst_value);
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Cmd::Render { run, times } => match render_run(&run, &times) {
            Ok((files, warnings)) => {
                for w in &warnings {
                    eprintln!("warning: {w}");
                }
                for f in &files {
                    println!("{}", f.path.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
