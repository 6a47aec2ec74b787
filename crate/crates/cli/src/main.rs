//! Command line front end: read a group, run one verification, write a
//! JSON report (and optionally CSV), exit 0 on pass, 1 on fail, 2 on error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{emit_error, write_outcome, CliError};

#[derive(Parser, Debug)]
#[command(name = "mcshane", version, about = "Verify length identities for marked Schottky groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    Double,
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Oddodd,
    Oddeven,
    Evenodd,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Direct,
    Maskit,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// Group document, or `-` for stdin.
    #[arg(long, value_name = "FILE|-")]
    pub group: Option<String>,
    /// Group document given inline.
    #[arg(long, value_name = "JSON", conflicts_with = "group")]
    pub group_json: Option<String>,
    /// Sign changes of the generator lifts, e.g. `+,-`.
    #[arg(long, value_name = "s1,s2,...")]
    pub lift: Option<String>,
    /// Run even if no circle certificate can be found.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 40)]
    pub max_sum: i64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Report file (default: stdout).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// CSV data file.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Precision::Double)]
    pub precision: Precision,
    /// Keep every summand in the report.
    #[arg(long)]
    pub per_term: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Torus identity mod 2 pi i.
    VerifyTorus {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Weierstrass identities mod pi.
    VerifyWeierstrass {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum, default_value_t = ClassArg::All)]
        class: ClassArg,
        #[arg(long, default_value_t = 0)]
        quarter: u8,
    },
    /// The pair of pants identity, for given lengths or a random sweep.
    VerifyPantsTrivial {
        /// Three lengths; complex entries as `re:im`.
        #[arg(long, value_name = "l0,l1,l2")]
        lengths: Option<String>,
        /// Random real triples in [0.1, 8].
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Random triples with one entry i theta, theta in (0, pi].
        #[arg(long, default_value_t = 20)]
        cone: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Trace form of the torus identity.
    VerifyMarkoff {
        #[command(flatten)]
        group: GroupArgs,
        /// Real trace triple `x,y,z` instead of a group.
        #[arg(long, value_name = "x,y,z", conflicts_with_all = ["group", "group_json"])]
        traces: Option<String>,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// General identity mod pi i over a decomposition file.
    VerifyGeneral {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_name = "FILE")]
        decomposition: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for a classical circle certificate and report kappa.
    Certify {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Continue half lengths along a path and rerun the torus identity at its end.
    Deform {
        #[command(flatten)]
        group: GroupArgs,
        /// End point group document.
        #[arg(long, value_name = "FILE", required_unless_present = "path")]
        target: Option<PathBuf>,
        /// Explicit path document instead of a constructed one.
        #[arg(long, value_name = "FILE", conflicts_with = "target")]
        path: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Maskit)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Longest tracked word.
        #[arg(long, default_value_t = 4)]
        word_len: usize,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gap endpoints on the boundary axis, as CSV.
    EmitGaps {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 8)]
        max_sum: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Slope traces and lengths, as CSV.
    EmitTraces {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_name = "x,y,z", conflicts_with_all = ["group", "group_json"])]
        traces: Option<String>,
        #[arg(long, default_value_t = 12)]
        max_sum: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::VerifyTorus { output, .. }
            | Command::VerifyWeierstrass { output, .. }
            | Command::VerifyPantsTrivial { output, .. }
            | Command::VerifyMarkoff { output, .. }
            | Command::VerifyGeneral { output, .. }
            | Command::Certify { output, .. }
            | Command::Deform { output, .. }
            | Command::EmitGaps { output, .. }
            | Command::EmitTraces { output, .. } => output,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return emit_error(&CliError::config(e.to_string())),
    };
    let output = cli.command.output().clone();
    let result = match output.precision {
        Precision::Double => commands::run::<f64>(&cli.command),
        Precision::Extended => commands::run::<mcshane::Quad>(&cli.command),
    };
    match result.and_then(|outcome| write_outcome(&outcome, &output).map(|_| outcome)) {
        Ok(outcome) if outcome.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => emit_error(&e),
    }
}
