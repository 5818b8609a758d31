use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, Quantity};
use crate::grid::Grid;
use crate::output::Format;

/// Heralded quantum-repeater simulator: cavity coefficients, protocol
/// efficiencies and fidelities, purification tables and repeater chains.
///
/// Rates are in units of the cavity decay rate κ. Grids are written as
/// `start:stop:step`, a comma list or a single value.
#[derive(Debug, Parser)]
#[command(name = "qdrepeater", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reflection, transmission, leak and noise amplitudes vs detuning.
    Coeffs(SweepArgs),
    /// Heralded Bell-pair distribution efficiencies and fidelities.
    Distribute(SweepArgs),
    /// Parity-check detector efficiencies and fidelities.
    Pcd(SweepArgs),
    /// Purification recursion table.
    Purify(PurifyArgs),
    /// Run a repeater-chain scenario file and print a stage report.
    Chain(ChainArgs),
    /// Run a sweep described by a config file.
    Sweep(GenericSweepArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write output to this file instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Coupling strength g/κ.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<Grid>,
    /// Side-leakage rate κ_s/κ.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_s: Option<Grid>,
    /// Dipole decay rate γ/κ.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<Grid>,
    /// Cavity-probe detuning Δ/κ.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<Grid>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML config; command-line flags override its values.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Input-coupling efficiency η_in applied to the total efficiency.
    #[arg(long)]
    pub eta_in: Option<f64>,
    /// Evaluate by full state evolution instead of closed forms.
    #[arg(long)]
    pub simulate: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PurifyArgs {
    /// TOML config; command-line flags override its values.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Initial weight μ of the target Bell state.
    #[arg(long)]
    pub mu: Option<Grid>,
    /// Number of purification rounds.
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Run each round by state evolution with ideal parity checks.
    #[arg(long)]
    pub simulate: bool,
    /// Fidelity threshold reported in text output.
    #[arg(long, default_value_t = 0.997)]
    pub threshold: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Scenario file (TOML) listing nodes and segments.
    pub scenario: PathBuf,
    /// Override the purification rounds per segment.
    #[arg(long)]
    pub purification_rounds: Option<usize>,
    /// Override the input-coupling efficiency η_in.
    #[arg(long)]
    pub eta_in: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GenericSweepArgs {
    /// TOML config describing the sweep.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Quantity to sweep.
    #[arg(short, long, value_enum)]
    pub quantity: Option<Quantity>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Initial Bell-state weight μ (purify).
    #[arg(long)]
    pub mu: Option<Grid>,
    /// Purification rounds (purify, chain).
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Chain lengths in segments (chain).
    #[arg(long)]
    pub segments: Option<Grid>,
    /// Input-coupling efficiency η_in.
    #[arg(long)]
    pub eta_in: Option<f64>,
    /// Evaluate by full state evolution instead of closed forms.
    #[arg(long)]
    pub simulate: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

impl GridArgs {
    fn apply(&self, o: &mut Overrides) {
        o.g = self.g.clone();
        o.kappa_s = self.kappa_s.clone();
        o.gamma = self.gamma.clone();
        o.delta = self.delta.clone();
    }
}

impl OutputArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            output: self.output.clone(),
            format: self.format,
            ..Overrides::default()
        }
    }
}

impl SweepArgs {
    pub fn overrides(&self) -> Overrides {
        let mut o = self.out.overrides();
        self.grid.apply(&mut o);
        o.eta_in = self.eta_in;
        o.simulate = self.simulate;
        o
    }
}

impl PurifyArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            mu: self.mu.clone(),
            rounds: self.rounds,
            simulate: self.simulate,
            ..self.out.overrides()
        }
    }
}

impl GenericSweepArgs {
    pub fn overrides(&self) -> Overrides {
        let mut o = Overrides {
            quantity: self.quantity,
            mu: self.mu.clone(),
            rounds: self.rounds,
            segments: self.segments.clone(),
            eta_in: self.eta_in,
            simulate: self.simulate,
            ..self.out.overrides()
        };
        self.grid.apply(&mut o);
        o
    }
}
