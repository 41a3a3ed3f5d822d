//! `relaxdr`: generate feasibility instances, run the relaxed operators, compare
//! them with RAAR, evaluate convergence constants and run self-checks.

mod analyze;
mod config;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{OutArgs, SourceArgs, StopArgs};

#[derive(Parser, Debug)]
#[command(
    name = "relaxdr",
    version,
    about = "Relaxed Douglas-Rachford feasibility experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated instance to a JSON file.
    Generate(GenerateArgs),
    /// Run one operator and write its trace.
    Solve(SolveArgs),
    /// Run T_lambda and RAAR on the same instance and starting point.
    Compare(CompareArgs),
    /// Print convergence constants, optionally measured on an instance.
    Analyze(analyze::AnalyzeArgs),
    /// Run the built-in property checks.
    Verify(verify::VerifyArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    generator: config::GeneratorArgs,
    /// Output file; defaults to `<out-dir>/<instance name>.json`.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    TLambda,
    Raar,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value_t = OperatorKind::TLambda)]
    operator: OperatorKind,
    /// Relaxation of T_lambda; defaults to 0.45 (consistent) or 0.40.
    #[arg(long)]
    lambda: Option<f64>,
    /// RAAR parameter; defaults to 0.65 (consistent) or 0.60.
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    stop: StopArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// T_lambda relaxations; repeat for a sweep.
    #[arg(long = "lambda")]
    lambdas: Vec<f64>,
    /// RAAR parameters; repeat for a sweep.
    #[arg(long = "beta")]
    betas: Vec<f64>,
    #[command(flatten)]
    stop: StopArgs,
    #[command(flatten)]
    out: OutArgs,
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    File(String),
    Verification(String),
}

impl CliError {
    /// Classifies a core error raised while reading or writing `path`.
    pub fn from_file(path: &Path, e: relaxdr::Error) -> Self {
        CliError::File(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::File(_) => 3,
        }
    }
}

impl From<relaxdr::Error> for CliError {
    fn from(e: relaxdr::Error) -> Self {
        use relaxdr::Error as E;
        match e {
            E::Io(_) | E::Parse { .. } | E::VersionMismatch { .. } => CliError::File(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::File(m) => write!(f, "file error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let inst = args.generator.build()?;
    let path = match &args.output {
        Some(p) => p.clone(),
        None => args.out.prepare()?.join(format!("{}.json", inst.name())),
    };
    relaxdr::io::write_atomic(&path, inst.to_json().as_bytes())
        .map_err(|e| CliError::from_file(&path, e))?;
    println!("wrote {} ({})", path.display(), inst.name());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Solve(a) => solve::solve(&a),
        Command::Compare(a) => solve::compare(&a),
        Command::Analyze(a) => analyze::analyze(&a),
        Command::Verify(a) => verify::verify(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relaxdr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
