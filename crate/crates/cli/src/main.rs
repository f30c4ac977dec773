//! `lrc`: compile, run, analyze and audit leakage-resilient circuits.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "lrc", version, about = "Leakage-resilient circuit compiler and leakage lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a logical {NOT, CNOT, TOF} netlist into an encoded circuit.
    Compile(CompileArgs),
    /// Run leakage rounds and write one JSON transcript per line.
    Run(RunArgs),
    /// Estimate the distinguishing advantage between two secrets.
    Analyze(AnalyzeArgs),
    /// Structural and code-level audits.
    Audit(AuditArgs),
    /// Compare leakage channels with dephasing channels numerically.
    NoiseEquiv(NoiseArgs),
    /// Location and size report of a compiled circuit.
    Report(ReportArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args, Debug)]
struct CompileArgs {
    /// Logical netlist.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Compiled netlist; metadata goes to FILE.meta.json.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Concatenation level (1 or 2).
    #[arg(long, default_value_t = 1)]
    level: u8,
    /// Steane error correction after every logical gate.
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    ec: OnOff,
    /// Include the gadget records in the report.
    #[arg(long)]
    dump_gadgets: bool,
    /// Include the wire-event listing in the report.
    #[arg(long)]
    dump_events: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Circuit netlist; a FILE.meta.json next to it marks it as compiled.
    #[arg(long, value_name = "FILE")]
    circuit: PathBuf,
    /// Secret bits, e.g. 10.
    #[arg(long, value_name = "BITS")]
    secret: String,
    /// Public input bits; repeat to cycle through several inputs.
    #[arg(long = "input", value_name = "BITS", required = true)]
    inputs: Vec<String>,
    #[arg(long)]
    rounds: usize,
    /// Leak probability of every non-leak-free wire event.
    #[arg(long)]
    leak_p: f64,
    #[arg(long)]
    seed: u64,
    /// Use this tape (encoding bits first) in every round instead of fresh ones.
    #[arg(long, value_name = "BITS")]
    tape: Option<String>,
    /// Output file; standard output if omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Transcript TV by mask-decomposed Monte Carlo.
    Tv,
    /// Transcript TV by exhaustive enumeration (tiny circuits only).
    Exact,
    /// Largest single-event marginal TV.
    Marginal,
    /// Largest pairwise marginal TV.
    Pairwise,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, value_name = "FILE")]
    circuit: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, value_name = "BITS")]
    y0: String,
    #[arg(long, value_name = "BITS")]
    y1: String,
    /// Public input; without it the maximum over all public inputs is reported.
    #[arg(long, value_name = "BITS")]
    x: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Required for the tv and exact modes.
    #[arg(long)]
    leak_p: Option<f64>,
    /// Estimate inner TVs from this many paired tapes instead of exactly.
    #[arg(long, value_name = "N")]
    sampled_inner: Option<usize>,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(subcommand)]
    which: AuditKind,
}

#[derive(Subcommand, Debug)]
enum AuditKind {
    /// Steane code tables, overlap lemma and pairwise uniformity.
    Steane,
    /// Single-fault analysis of the Shor-state preparation.
    Shor,
    /// Transversality of a compiled circuit.
    Transversality {
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
    },
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// Wires of the random leakage functions (1 to 4).
    #[arg(long)]
    wires: usize,
    /// Random functions and random mixtures to test.
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Leakage alphabet size.
    #[arg(long, default_value_t = 4)]
    alphabet: usize,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Compiled netlist with its FILE.meta.json.
    #[arg(long, value_name = "FILE")]
    circuit: PathBuf,
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Pass,
    Fail,
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
    let result = match cli.command {
        Command::Compile(a) => commands::compile(a),
        Command::Run(a) => commands::run(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Audit(a) => commands::audit(a),
        Command::NoiseEquiv(a) => commands::noise_equiv(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(2),
        // The reader went away, as with `lrc ... | head`.
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
