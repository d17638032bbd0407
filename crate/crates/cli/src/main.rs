use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use kr_core::eval::{eval_map, sample_member, EvalOptions, MAP_NAMES};
use kr_core::module::{build_universe, Context};
use kr_core::suites::{configure_threads_from_env, run_suite, SuiteDescriptor, SUITE_NAMES};
use kr_core::{Error, Result};

#[derive(Parser)]
#[command(name = "krlab", version, about = "Finite operator models of connective Real K-theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite; exits 0 iff every check passes.
    Suite {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        factor_level: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        /// Restrict the corpus to one context `p,q,k,l`.
        #[arg(long, value_parser = parse_context)]
        signature: Option<Context>,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate a map on JSON inputs.
    Eval {
        map: String,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 1)]
        factor_level: usize,
        #[arg(long, default_value_t = 33)]
        grid: usize,
        #[arg(long, value_parser = parse_context)]
        signature: Option<Context>,
        #[command(flatten)]
        out: Output,
    },
    /// Write a seeded random member of a universe.
    Sample {
        #[arg(long, value_parser = parse_context)]
        signature: Context,
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Draw from the θ-fixed part.
        #[arg(long)]
        fixed: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Describe the universe module for a context.
    Universe {
        #[arg(long, value_parser = parse_context)]
        signature: Context,
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[command(flatten)]
        out: Output,
    },
    /// List suites and maps.
    List,
}

#[derive(Args)]
struct Output {
    /// Write JSON here instead of standard output.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_context(text: &str) -> std::result::Result<Context, String> {
    Context::parse(text).map_err(|e| e.to_string())
}

fn emit(value: &Value, out: &Output) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match &out.json {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads_from_env()?;
    match cli.command {
        Command::Suite {
            name,
            seed,
            level,
            factor_level,
            samples,
            tol,
            grid,
            signature,
            out,
        } => {
            let mut desc = SuiteDescriptor::new(&name)?;
            let p = &mut desc.params;
            p.seed = seed.unwrap_or(p.seed);
            p.level = level.unwrap_or(p.level);
            p.factor_level = factor_level.unwrap_or(p.factor_level);
            p.samples = samples.unwrap_or(p.samples);
            p.tol = tol.unwrap_or(p.tol);
            p.grid = grid.unwrap_or(p.grid);
            p.signature = signature.or(p.signature);
            if !(p.tol.is_finite() && p.tol >= 0.0) {
                return Err(Error::InvalidArgument(format!("tolerance {}", p.tol)));
            }
            let report = run_suite(&desc)?;
            emit(&serde_json::to_value(&report)?, &out)?;
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: residual {:e}", c.check, c.residual);
            }
            Ok(report.passed)
        }
        Command::Eval {
            map,
            inputs,
            level,
            factor_level,
            grid,
            signature,
            out,
        } => {
            let docs = inputs.iter().map(|p| read_json(p)).collect::<Result<Vec<_>>>()?;
            let opts = EvalOptions {
                level,
                factor_level,
                grid,
                signature,
            };
            emit(&eval_map(&map, &docs, &opts)?, &out)?;
            Ok(true)
        }
        Command::Sample {
            signature,
            level,
            seed,
            fixed,
            out,
        } => {
            emit(&sample_member(signature, level, seed, fixed)?, &out)?;
            Ok(true)
        }
        Command::Universe { signature, level, out } => {
            let m = build_universe(signature, level)?;
            emit(&serde_json::to_value(m.to_json())?, &out)?;
            Ok(true)
        }
        Command::List => {
            println!("suites: {}", SUITE_NAMES.join(" "));
            println!("maps: {}", MAP_NAMES.join(" "));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("krlab: {e}");
            ExitCode::from(2)
        }
    }
}
