//! Batch runner behind the `hifi` binary.
//!
//! Every command produces a [`Table`] that is written as CSV (first line is a
//! `# {metadata}` comment) or JSON. Exit codes: 0 success, 1 a check failed,
//! 2 configuration or resource error.

mod commands;
mod oracle;
mod spec;
mod table;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use oracle::{run_oracle_checks, CheckResult, Fault};
pub use spec::{InputSpec, NRange, ProfileSpec};
pub use table::{Cell, Table};

use crate::ancilla::CoefficientProfile;
use crate::error::Result;

#[derive(Debug, Parser, Serialize)]
#[command(name = "hifi", version, about = "Teleportation-gate simulator and ancilla optimizer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Enumerate every branch of a single-qubit teleportation.
    Teleport(TeleportArgs),
    /// Enumerate every branch of the controlled sign flip.
    Cz(CzArgs),
    /// Output purities of the direct-CNOT construction against the CZ.
    CnotDemo(CnotArgs),
    /// Closed-form error rates over a range of n.
    Scan(ScanArgs),
    /// Optimize the ancilla coefficients.
    Optimize(OptimizeArgs),
    /// Cross-check the simulator against the closed-form results.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleArg {
    /// `|α0|²` uniform on [0, 1].
    UniformP0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveArg {
    SecondOrder,
    ExactSingle,
    ExactCz,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TeleportArgs {
    /// Ancilla size; taken from the profile file when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "sine")]
    pub profile: ProfileSpec,
    /// `a0,a1` (real, normalized on parse) or `file:PATH` with `[[re,im],[re,im]]`.
    #[arg(long)]
    pub input: Option<InputSpec>,
    /// One row per detection pattern instead of one per photon count.
    #[arg(long)]
    pub patterns: bool,
    /// Also draw this many seeded samples and count them per row.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CzArgs {
    /// Ancilla size per register.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "sine")]
    pub profile: ProfileSpec,
    /// Profile of the second register; defaults to `--profile`.
    #[arg(long)]
    pub profile2: Option<ProfileSpec>,
    #[arg(long)]
    pub input: Option<InputSpec>,
    #[arg(long)]
    pub input2: Option<InputSpec>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CnotArgs {
    /// Ancilla size per register, 2 or 3.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value = "uniform")]
    pub profile: ProfileSpec,
    #[arg(long)]
    pub input: Option<InputSpec>,
    #[arg(long)]
    pub input2: Option<InputSpec>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, conflicts_with = "n_range")]
    pub n: Option<usize>,
    /// `A:B:step`, inclusive of `B`.
    #[arg(long)]
    pub n_range: Option<NRange>,
    /// Defaults to uniform, linear and sine.
    #[arg(long)]
    pub profile: Option<ProfileSpec>,
    /// Average over a single fixed input instead of the ensemble.
    #[arg(long)]
    pub input: Option<InputSpec>,
    #[arg(long, value_enum, default_value_t = EnsembleArg::UniformP0)]
    pub ensemble: EnsembleArg,
    /// Gauss-Legendre order for the two-qubit column.
    #[arg(long, default_value_t = 2)]
    pub cz_order: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long, conflicts_with = "n_range")]
    pub n: Option<usize>,
    /// `A:B:step`, inclusive of `B`.
    #[arg(long)]
    pub n_range: Option<NRange>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::SecondOrder)]
    pub objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = EnsembleArg::UniformP0)]
    pub ensemble: EnsembleArg,
    /// Optimize the two registers' profiles separately (exact-cz only).
    #[arg(long)]
    pub independent: bool,
    /// Allow negative coefficients.
    #[arg(long)]
    pub unrestricted: bool,
    #[arg(long, default_value_t = 20_000)]
    pub max_iterations: usize,
    /// Random starts on top of linear, sine and uniform.
    #[arg(long, default_value_t = 3)]
    pub starts: usize,
    /// Write the optimized profile as a JSON array (single n only).
    #[arg(long)]
    #[serde(skip)]
    pub profile_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    /// Largest n checked, at most 4.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, hide = true)]
    pub inject_fault: Option<Fault>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

/// What a successful run produced.
#[derive(Debug)]
pub struct Report {
    pub table: Table,
    /// Names of failed checks; non-empty means exit code 1.
    pub failures: Vec<String>,
    /// Optimized profile, for `optimize` on a single n.
    pub profile: Option<CoefficientProfile>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Teleport(_) => "teleport",
            Command::Cz(_) => "cz",
            Command::CnotDemo(_) => "cnot-demo",
            Command::Scan(_) => "scan",
            Command::Optimize(_) => "optimize",
            Command::OracleCheck(_) => "oracle-check",
        }
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::Teleport(a) => &a.output,
            Command::Cz(a) => &a.output,
            Command::CnotDemo(a) => &a.output,
            Command::Scan(a) => &a.output,
            Command::Optimize(a) => &a.output,
            Command::OracleCheck(a) => &a.output,
        }
    }
}

/// Runs a parsed command and returns its table without writing it.
pub fn execute(command: &Command) -> Result<Report> {
    let mut profile = None;
    let table = match command {
        Command::Teleport(a) => commands::teleport(a)?,
        Command::Cz(a) => commands::cz(a)?,
        Command::CnotDemo(a) => commands::cnot_demo(a)?,
        Command::Scan(a) => commands::scan(a)?,
        Command::Optimize(a) => {
            let (table, best) = commands::optimize(a)?;
            profile = best;
            table
        }
        Command::OracleCheck(a) => {
            let checks = run_oracle_checks(a.n, a.output.seed, a.inject_fault)?;
            let failures = checks.iter().filter(|c| !c.passed()).map(|c| c.name.to_string()).collect();
            return Ok(Report {
                table: oracle::checks_table(&checks),
                failures,
                profile: None,
            });
        }
    };
    Ok(Report {
        table,
        failures: Vec::new(),
        profile,
    })
}

/// Renders the report for `command` in its requested format.
pub fn render(command: &Command, report: &Report) -> Result<String> {
    let meta = table::metadata(command.name(), command.output().seed, command)?;
    match command.output().format {
        Format::Csv => report.table.to_csv(&meta),
        Format::Json => report.table.to_json(&meta),
    }
}

/// Parses `args`, runs the command and writes its output.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run_command(&cli.command) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for name in failures {
                eprintln!("check failed: {name}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run_command(command: &Command) -> Result<Vec<String>> {
    let report = execute(command)?;
    let text = render(command, &report)?;
    match &command.output().out {
        Some(path) => table::write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    if let (Command::Optimize(args), Some(profile)) = (command, &report.profile) {
        if let Some(path) = &args.profile_out {
            table::write_atomic(path, &format!("{}\n", profile.to_json()))?;
        }
    }
    Ok(report.failures)
}
