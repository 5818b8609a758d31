//! Sweep configuration: TOML file values merged under command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::grid::{Grid, GridValue, MAX_POINTS};
use crate::output::Format;
use crate::CliError;

/// Longest chain accepted by the chain sweep.
pub const MAX_SEGMENTS: usize = 8;
/// Most purification rounds accepted anywhere.
pub const MAX_ROUNDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Coeffs,
    Distribution,
    Pcd,
    Purify,
    Chain,
}

/// Sweep settings as written in a config file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub quantity: Option<Quantity>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub g: Option<GridValue>,
    pub kappa_s: Option<GridValue>,
    pub gamma: Option<GridValue>,
    pub delta: Option<GridValue>,
    pub mu: Option<GridValue>,
    pub rounds: Option<usize>,
    pub eta_in: Option<f64>,
    pub segments: Option<GridValue>,
    pub simulate: Option<bool>,
}

/// Values given on the command line; these win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub quantity: Option<Quantity>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub g: Option<Grid>,
    pub kappa_s: Option<Grid>,
    pub gamma: Option<Grid>,
    pub delta: Option<Grid>,
    pub mu: Option<Grid>,
    pub rounds: Option<usize>,
    pub eta_in: Option<f64>,
    pub segments: Option<Grid>,
    pub simulate: bool,
}

/// A fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub quantity: Quantity,
    pub g: Grid,
    pub kappa_s: Grid,
    pub gamma: Grid,
    pub delta: Grid,
    pub mu: Grid,
    pub rounds: usize,
    pub eta_in: Option<f64>,
    pub segments: Vec<usize>,
    pub simulate: bool,
    pub output: Option<PathBuf>,
    pub format: Format,
}

struct Defaults {
    g: &'static str,
    kappa_s: &'static str,
    delta: &'static str,
}

fn defaults(q: Quantity) -> Defaults {
    match q {
        Quantity::Coeffs => Defaults {
            g: "2.4",
            kappa_s: "0.1",
            delta: "-5:5:0.1",
        },
        Quantity::Distribution | Quantity::Pcd => Defaults {
            g: "0:3:0.05",
            kappa_s: "0,0.2",
            delta: "0",
        },
        Quantity::Purify | Quantity::Chain => Defaults {
            g: "1.2",
            kappa_s: "0.2",
            delta: "0",
        },
    }
}

/// Read and parse a TOML file. Parse errors carry line and column.
pub fn load_toml<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn grid(key: &str, v: Option<GridValue>) -> Result<Option<Grid>, CliError> {
    v.map(|v| Grid::try_from(v).map_err(|e| CliError::Usage(format!("`{key}`: {e}"))))
        .transpose()
}

impl SweepConfig {
    /// Merge `flags` over `file`, fill per-quantity defaults and validate.
    /// `fixed` is the quantity implied by the subcommand, if any.
    pub fn resolve(
        fixed: Option<Quantity>,
        file: SweepFile,
        flags: Overrides,
    ) -> Result<Self, CliError> {
        let quantity = fixed
            .or(flags.quantity)
            .or(file.quantity)
            .ok_or_else(|| CliError::Usage("no quantity given (use --quantity or `quantity` in the config)".into()))?;
        let d = defaults(quantity);
        let pick = |key: &str, flag: Option<Grid>, f: Option<GridValue>, default: &str| -> Result<Grid, CliError> {
            match flag {
                Some(g) => Ok(g),
                None => Ok(grid(key, f)?.unwrap_or_else(|| default.parse().expect("valid default grid"))),
            }
        };
        let segments = pick("segments", flags.segments, file.segments, "1")?;
        let cfg = SweepConfig {
            quantity,
            g: pick("g", flags.g, file.g, d.g)?,
            kappa_s: pick("kappa_s", flags.kappa_s, file.kappa_s, d.kappa_s)?,
            gamma: pick("gamma", flags.gamma, file.gamma, "0.1")?,
            delta: pick("delta", flags.delta, file.delta, d.delta)?,
            mu: pick("mu", flags.mu, file.mu, "0.6,0.7,0.8,0.9")?,
            rounds: flags
                .rounds
                .or(file.rounds)
                .unwrap_or(if quantity == Quantity::Purify { 3 } else { 0 }),
            eta_in: flags.eta_in.or(file.eta_in),
            segments: segment_counts(&segments)?,
            simulate: flags.simulate || file.simulate.unwrap_or(false),
            output: flags.output.or(file.output),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        let nonneg = [("g", &self.g), ("kappa_s", &self.kappa_s)];
        for (key, g) in nonneg {
            if let Some(v) = g.values().iter().find(|v| **v < 0.0) {
                return usage(format!("`{key}` must be ≥ 0, got {v}"));
            }
        }
        if let Some(v) = self.gamma.values().iter().find(|v| **v <= 0.0) {
            return usage(format!("`gamma` must be positive, got {v}"));
        }
        if let Some(v) = self.mu.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return usage(format!("`mu` must lie in [0, 1], got {v}"));
        }
        if self.rounds > MAX_ROUNDS {
            return usage(format!("`rounds` must be at most {MAX_ROUNDS}, got {}", self.rounds));
        }
        if let Some(e) = self.eta_in {
            if !(e > 0.0 && e <= 1.0) {
                return usage(format!("`eta_in` must lie in (0, 1], got {e}"));
            }
        }
        let points = match self.quantity {
            Quantity::Purify => self.mu.len() as f64 * self.rounds.max(1) as f64,
            _ => {
                self.g.len() as f64
                    * self.kappa_s.len() as f64
                    * self.gamma.len() as f64
                    * self.delta.len() as f64
                    * self.segments.len() as f64
            }
        };
        if points > MAX_POINTS as f64 {
            return usage(format!("sweep has {points} points, more than {MAX_POINTS}"));
        }
        Ok(())
    }
}

fn segment_counts(g: &Grid) -> Result<Vec<usize>, CliError> {
    g.values()
        .iter()
        .map(|&v| {
            if v.fract() != 0.0 || v < 1.0 || v > MAX_SEGMENTS as f64 {
                Err(CliError::Usage(format!(
                    "`segments` must be whole numbers in 1..={MAX_SEGMENTS}, got {v}"
                )))
            } else {
                Ok(v as usize)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> SweepFile {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn flags_win_over_file() {
        let f = file("quantity = \"distribution\"\ng = \"0:1:0.5\"\nkappa_s = [0, 0.1]\ngamma = 0.2\n");
        let flags = Overrides {
            g: Some(Grid::single(2.0)),
            ..Overrides::default()
        };
        let c = SweepConfig::resolve(None, f, flags).unwrap();
        assert_eq!(c.quantity, Quantity::Distribution);
        assert_eq!(c.g.values(), &[2.0]);
        assert_eq!(c.kappa_s.values(), &[0.0, 0.1]);
        assert_eq!(c.gamma.values(), &[0.2]);
        assert_eq!(c.delta.values(), &[0.0]);
    }

    #[test]
    fn defaults_per_quantity() {
        let c = SweepConfig::resolve(Some(Quantity::Coeffs), SweepFile::default(), Overrides::default()).unwrap();
        assert_eq!(c.delta.len(), 101);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        for text in ["gamma = 0", "mu = [1.5]", "g = \"-1,2\"", "segments = 0.5", "eta_in = 2.0"] {
            let r = SweepConfig::resolve(Some(Quantity::Chain), file(text), Overrides::default());
            assert!(matches!(r, Err(CliError::Usage(_))), "{text}");
        }
        assert!(SweepConfig::resolve(None, SweepFile::default(), Overrides::default()).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = toml::from_str::<SweepFile>("g = 1\nfoo = 2\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }
}
