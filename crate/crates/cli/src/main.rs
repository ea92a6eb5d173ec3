use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cuspfs_cli::{init_threads, list_checks, run_command, thread_cap, Command, Outcome, EXIT_CONFIG, THREADS_ENV};

#[derive(Parser)]
#[command(name = "cuspfs", version, about = "Numerical checks for weighted spaces on cusp manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Seed of the test-function corpus; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bound constants and divergence of cusp characteristics.
    ValidateCharacteristic(RunArgs),
    /// Model cusp geometry: arclength, cone and cusp metrics, gluing.
    CuspReport(RunArgs),
    /// Localization pair and localized norms.
    Localization(RunArgs),
    /// Connection identities and weighted norm equivalences.
    NormEquivalence(RunArgs),
    /// Monotonicity and embedding inequalities.
    Embedding(RunArgs),
    /// Product estimate.
    Multiplication(RunArgs),
    /// Desingularized operator and the time-stepping solver.
    Solve(RunArgs),
    /// Maximal-regularity functional under refinement.
    MrStudy(RunArgs),
    /// Kondratiev norms on conical domains.
    Kondratiev(RunArgs),
    /// Print every registered check id with a description.
    ListChecks,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::ListChecks => {
            print!("{}", list_checks());
            return ExitCode::SUCCESS;
        }
        Cmd::ValidateCharacteristic(a) => (Command::ValidateCharacteristic, a),
        Cmd::CuspReport(a) => (Command::CuspReport, a),
        Cmd::Localization(a) => (Command::Localization, a),
        Cmd::NormEquivalence(a) => (Command::NormEquivalence, a),
        Cmd::Embedding(a) => (Command::Embedding, a),
        Cmd::Multiplication(a) => (Command::Multiplication, a),
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::MrStudy(a) => (Command::MrStudy, a),
        Cmd::Kondratiev(a) => (Command::Kondratiev, a),
    };
    match thread_cap(std::env::var(THREADS_ENV).ok().as_deref()) {
        Ok(cap) => init_threads(cap),
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    let outcome = run_command(command, &args.config, &args.out, args.seed, &mut |line| println!("{line}"));
    match &outcome {
        Outcome::Finished(r) => {
            let failed = r.iter().filter(|c| !c.pass).count();
            eprintln!("{command}: {} checks, {failed} failed", r.len());
        }
        Outcome::Config(e) => eprintln!("config error: {e}"),
        Outcome::Io(e) => eprintln!("cannot write outputs: {e}"),
        Outcome::Numerical { diagnostic, .. } => {
            eprintln!("numerical failure in {}: {} (see diagnostic.json)", diagnostic.check_id, diagnostic.error)
        }
    }
    ExitCode::from(outcome.exit_code() as u8)
}
