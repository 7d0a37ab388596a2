use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use symlab::report::{run, CommandKind, ExperimentConfig, RunArgs, RunManifest};
use symlab::Error;

/// Exact-arithmetic experiments on random symmetric matrices.
#[derive(Parser)]
#[command(name = "symlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Singularity probability and determinant growth of independent samples.
    Survey(RunArgs),
    /// Nested rank chains with X_n and conditional increments.
    Chain(RunArgs),
    /// Structural classes of sampled matrices.
    Classify(RunArgs),
    /// Largest point mass of a family of forms.
    Concentration(RunArgs),
    /// Exact decoupling-inequality sweeps.
    Decoupling(RunArgs),
    /// Exact singularity probability by enumeration.
    Oracle(RunArgs),
    /// Re-run the config stored in a manifest.
    Replay {
        manifest: PathBuf,
        /// Write to this path instead of the recorded one.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn config(cmd: Command) -> symlab::Result<ExperimentConfig> {
    let (kind, args) = match cmd {
        Command::Survey(a) => (CommandKind::Survey, a),
        Command::Chain(a) => (CommandKind::Chain, a),
        Command::Classify(a) => (CommandKind::Classify, a),
        Command::Concentration(a) => (CommandKind::Concentration, a),
        Command::Decoupling(a) => (CommandKind::Decoupling, a),
        Command::Oracle(a) => (CommandKind::Oracle, a),
        Command::Replay {
            manifest,
            output,
            threads,
        } => {
            let mut c = RunManifest::load_config(&manifest)?;
            if output.is_some() {
                c.args.output = output;
            }
            if threads.is_some() {
                c.args.threads = threads;
            }
            return Ok(c);
        }
    };
    Ok(ExperimentConfig::new(kind, args))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_guard() => 3,
        Error::Config(_)
        | Error::Parse(_)
        | Error::EpsilonOutOfRange(_)
        | Error::NotPrime(_)
        | Error::EmptyPrimes
        | Error::InvalidDistribution(_)
        | Error::Capability(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(cli.command).and_then(|c| run(&c).map(|out| (c, out)));
    match result {
        Ok((c, out)) => {
            if c.args.output.is_none() {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(out.data.as_bytes());
                let m = serde_json::to_string_pretty(&out.manifest).expect("manifest serializes");
                eprintln!("{m}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("symlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
