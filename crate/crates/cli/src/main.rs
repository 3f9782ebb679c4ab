//! `tfclass`: classification tables, verification reports and lattices.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
//! verification finds a counterexample.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, CliResult, Output, P1Command, Session, Theorem};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "tfclass", version, about = "Classify torsionfree classes, torsion classes and Serre subcategories inside finite windows")]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    config: PathBuf,
    /// Override a configuration key, e.g. `--set window.max_rank=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Also write the output to this file (overrides `output` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    Takahashi,
    GabrielSerre,
    IeTorf,
    SerreInTorf,
}

#[derive(Subcommand)]
enum Command {
    /// Ass, Min, Assh, Supp and purity predicates of the configured objects.
    Ass(RunArgs),
    /// Identify the torsionfree class generated by the configured generators.
    Classify(RunArgs),
    /// Check a classification exhaustively inside the window; prints a JSON report.
    Verify {
        theorem: TheoremArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Serre lattice of the configured point set, as Graphviz DOT.
    Lattice(RunArgs),
    /// Hom and Ext dimensions and split decompositions of sheaves on P1.
    P1 {
        /// Base field, `F<p>` or `Q`.
        #[arg(long, default_value = "F2")]
        field: String,
        #[command(subcommand)]
        op: P1Op,
    },
}

#[derive(Subcommand)]
enum P1Op {
    /// dim Hom(F, G)
    Hom { f: String, g: String },
    /// dim Ext^1(F, G)
    Ext { f: String, g: String },
    /// Torsion and vector-bundle parts of F
    Decompose { f: String },
}

fn load(run: &RunArgs) -> CliResult<(RunConfig, String)> {
    let source = std::fs::read_to_string(&run.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", run.config.display())))?;
    let config = RunConfig::parse(&source, &run.set)?;
    Ok((config, source))
}

fn with_session(run: &RunArgs, f: impl FnOnce(&Session) -> CliResult<Output>) -> CliResult<(Output, Option<PathBuf>)> {
    let (config, source) = load(run)?;
    let session = Session::new(&config, &source)?;
    let out = f(&session)?;
    let path = run.out.clone().or_else(|| config.output.as_ref().map(PathBuf::from));
    Ok((out, path))
}

fn run(cli: Cli) -> CliResult<(Output, Option<PathBuf>)> {
    match cli.command {
        Command::Ass(run) => with_session(&run, commands::cmd_ass),
        Command::Classify(run) => with_session(&run, commands::cmd_classify),
        Command::Verify { theorem, run } => {
            let theorem = match theorem {
                TheoremArg::Takahashi => Theorem::Takahashi,
                TheoremArg::GabrielSerre => Theorem::GabrielSerre,
                TheoremArg::IeTorf => Theorem::IeTorf,
                TheoremArg::SerreInTorf => Theorem::SerreInTorf,
            };
            with_session(&run, |s| commands::cmd_verify(s, theorem))
        }
        Command::Lattice(run) => with_session(&run, commands::cmd_lattice),
        Command::P1 { field, op } => {
            let op = match op {
                P1Op::Hom { f, g } => P1Command::Hom(f, g),
                P1Op::Ext { f, g } => P1Command::Ext(f, g),
                P1Op::Decompose { f } => P1Command::Decompose(f),
            };
            Ok((commands::cmd_p1(&field, &op)?, None))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: invalid --threads value {n}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok((out, path)) => {
            print!("{}", out.text);
            if let Some(p) = path {
                if let Err(e) = std::fs::write(&p, &out.text) {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    return ExitCode::from(1);
                }
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("counterexample found");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
