//! Command-line harness for the `qdrepeater` simulator: parameter sweeps with
//! deterministic CSV output and repeater-chain scenario reports.

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;

pub mod args;
pub mod config;
pub mod grid;
pub mod output;
pub mod scenario;
pub mod sweep;

use args::{Cli, Command, PurifyArgs};
use config::{load_toml, Quantity, SweepConfig, SweepFile, MAX_ROUNDS};
use output::{fmt_num, Format};
use qdrepeater::protocols::{rounds_to_reach, Scenario};

/// Failure of a command, split by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, config or scenario: exit code 1.
    Usage(String),
    /// Simulation or I/O failure: exit code 2.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

/// Parse `args`, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn sweep_file(path: Option<&Path>) -> Result<SweepFile, CliError> {
    path.map(load_toml).transpose().map(Option::unwrap_or_default)
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Coeffs(a) => sweep(Some(Quantity::Coeffs), a.config.as_deref(), a.overrides()),
        Command::Distribute(a) => {
            sweep(Some(Quantity::Distribution), a.config.as_deref(), a.overrides())
        }
        Command::Pcd(a) => sweep(Some(Quantity::Pcd), a.config.as_deref(), a.overrides()),
        Command::Sweep(a) => sweep(None, a.config.as_deref(), a.overrides()),
        Command::Purify(a) => purify(&a),
        Command::Chain(a) => {
            let mut s: Scenario = load_toml(&a.scenario)?;
            if let Some(r) = a.purification_rounds {
                if r > MAX_ROUNDS {
                    return Err(CliError::Usage(format!(
                        "--purification-rounds must be at most {MAX_ROUNDS}"
                    )));
                }
                s.purification_rounds = r;
            }
            if a.eta_in.is_some() {
                s.input_coupling = a.eta_in;
            }
            let report = scenario::run(&s)?;
            let format = a.out.format.unwrap_or(Format::Text);
            emit(a.out.output.as_deref(), |w| {
                scenario::write_report(&report, format, w)
            })
        }
    }
}

fn sweep(fixed: Option<Quantity>, path: Option<&Path>, flags: config::Overrides) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(fixed, sweep_file(path)?, flags)?;
    let table = sweep::run_sweep(&cfg)?;
    emit(cfg.output.as_deref(), |w| table.write(cfg.format, w))
}

fn purify(a: &PurifyArgs) -> Result<(), CliError> {
    if !(0.5..1.0).contains(&a.threshold) {
        return Err(CliError::Usage(format!(
            "--threshold must lie in [0.5, 1), got {}",
            a.threshold
        )));
    }
    let cfg = SweepConfig::resolve(
        Some(Quantity::Purify),
        sweep_file(a.config.as_deref())?,
        a.overrides(),
    )?;
    let table = sweep::run_sweep(&cfg)?;
    let notes = threshold_notes(cfg.mu.values(), a.threshold)?;
    emit(cfg.output.as_deref(), |w| {
        table.write(cfg.format, w)?;
        if cfg.format == Format::Text {
            writeln!(w)?;
            for n in &notes {
                writeln!(w, "{n}")?;
            }
        }
        Ok(())
    })
}

/// One line per starting μ stating after how many rounds μ first exceeds
/// `threshold` under the recursion.
pub fn threshold_notes(mus: &[f64], threshold: f64) -> Result<Vec<String>, CliError> {
    mus.iter()
        .map(|&mu| {
            let n = rounds_to_reach(mu, threshold, MAX_ROUNDS)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(match n {
                Some(n) => format!(
                    "mu0 = {}: fidelity > {threshold} first reached after {n} round{}",
                    fmt_num(mu),
                    if n == 1 { "" } else { "s" }
                ),
                None => format!(
                    "mu0 = {}: fidelity > {threshold} not reached within {MAX_ROUNDS} rounds",
                    fmt_num(mu)
                ),
            })
        })
        .collect()
}

fn emit<F>(path: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let io_err = |e: io::Error| {
        let target = path.map_or("standard output".to_string(), |p| p.display().to_string());
        CliError::Runtime(format!("cannot write {target}: {e}"))
    };
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err)?);
            write(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
    }
}
