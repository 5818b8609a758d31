//! Heralded protocols: entanglement distribution (Bell and GHZ), the
//! parity-check detector, chain extension, purification and end-to-end
//! chains.
//!
//! Every protocol returns a [`ProtocolRun`]: the list of heralded detection
//! branches plus the probability lost to leak and noise modes, so that
//! efficiency bookkeeping can be checked branch by branch.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{levels, Ensemble, LinearMap, Register, StateVector, Subsystem, PRUNE_TOL};

mod chain;
mod distribution;
mod extension;
mod pcd;
mod purification;

pub use chain::{run_chain, ChainReport, NodeSpec, NoiseSpec, Scenario, SegmentSpec, StageReport};
pub use distribution::{
    asymmetric_mu, distribute_bell, distribute_bell_between, distribute_ghz, ghz_correction_table,
    MAX_GHZ_PHOTONS,
};
pub use extension::{extend_chain, extend_ensembles};
pub use pcd::{merge_by_parity, pcd, pcd_ensemble, pcd_with_probe, PROBE};
pub use purification::{
    bell_mixture, purify_analytic, purify_ensemble, purify_round, rounds_to_reach,
    PurificationState, PurificationStep,
};

/// Parity class of a heralded branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParityClass {
    Even,
    Odd,
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityClass::Even => "even",
            ParityClass::Odd => "odd",
        })
    }
}

/// Single-spin gate used as a feed-forward correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    X,
    Z,
    H,
}

impl Gate {
    pub fn map(&self) -> LinearMap {
        match self {
            Gate::X => LinearMap::pauli_x(),
            Gate::Z => LinearMap::pauli_z(),
            Gate::H => LinearMap::hadamard(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Correction {
    pub gate: Gate,
    pub spin: String,
}

impl Correction {
    pub fn new(gate: Gate, spin: &str) -> Self {
        Self {
            gate,
            spin: spin.to_string(),
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.gate {
            Gate::X => "σx",
            Gate::Z => "σz",
            Gate::H => "H",
        };
        write!(f, "{g}({})", self.spin)
    }
}

/// Apply corrections in list order.
pub fn apply_corrections(state: &StateVector, corrections: &[Correction]) -> Result<StateVector> {
    corrections
        .iter()
        .try_fold(state.clone(), |s, c| s.apply_map(&c.gate.map(), &[&c.spin]))
}

/// One heralded detection branch.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedOutcome {
    /// Detector pattern, e.g. `R↑L↓` or `R_a1`.
    pub detection: String,
    pub class: ParityClass,
    /// Absolute probability of this branch.
    pub probability: f64,
    pub correction: Vec<Correction>,
    /// Corrected state of the surviving subsystems; `None` when the branch
    /// has zero probability.
    pub post_state: Option<Ensemble>,
    /// Fidelity of `post_state` against the protocol target.
    pub fidelity: Option<f64>,
}

/// All heralded branches of one protocol execution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub outcomes: Vec<HeraldedOutcome>,
    /// Probability carried off by leak and noise modes.
    pub discarded_probability: f64,
    /// Norm² of the input (1 unless the input was itself heralded).
    pub input_probability: f64,
    pub target: Option<StateVector>,
}

impl ProtocolRun {
    pub fn heralded_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// `|Σ p + discarded − input|`.
    pub fn completeness_error(&self) -> f64 {
        (self.heralded_probability() + self.discarded_probability - self.input_probability).abs()
    }

    pub fn class_probability(&self, class: ParityClass) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.class == class)
            .map(|o| o.probability)
            .sum()
    }

    /// Probability-weighted fidelity of one class; `None` if the class never
    /// fires.
    pub fn class_fidelity(&self, class: ParityClass) -> Option<f64> {
        weighted_fidelity(self.outcomes.iter().filter(|o| o.class == class))
    }

    /// Probability-weighted fidelity over every branch.
    pub fn average_fidelity(&self) -> Option<f64> {
        weighted_fidelity(self.outcomes.iter())
    }

    /// The state conditioned on success, i.e. any branch firing.
    pub fn heralded_ensemble(&self) -> Result<Ensemble> {
        let parts: Vec<(f64, Ensemble)> = self
            .outcomes
            .iter()
            .filter_map(|o| o.post_state.as_ref().map(|e| (o.probability, e.clone())))
            .collect();
        if parts.is_empty() {
            return Err(Error::ZeroNorm);
        }
        Ensemble::combine(&parts)
    }

    pub fn outcome(&self, detection: &str) -> Option<&HeraldedOutcome> {
        self.outcomes.iter().find(|o| o.detection == detection)
    }
}

fn weighted_fidelity<'a, I: Iterator<Item = &'a HeraldedOutcome>>(outcomes: I) -> Option<f64> {
    let (mut p, mut pf) = (0.0, 0.0);
    for o in outcomes {
        if let Some(f) = o.fidelity {
            p += o.probability;
            pf += o.probability * f;
        }
    }
    (p > 0.0).then(|| pf / p)
}

/// Description of one detection pattern to herald.
pub(crate) struct Pattern {
    pub detection: String,
    pub class: ParityClass,
    pub levels: Vec<String>,
    pub correction: Vec<Correction>,
}

/// Project `state` onto each pattern of the `measured` subsystems, apply the
/// pattern's corrections and trace out `traced`. Patterns with vanishing
/// probability are kept with no post state.
pub(crate) fn herald(
    state: &StateVector,
    measured: &[&str],
    patterns: Vec<Pattern>,
    traced: &[&str],
    target: Option<&StateVector>,
) -> Result<Vec<HeraldedOutcome>> {
    patterns
        .into_iter()
        .map(|pat| {
            let fixed: Vec<(&str, &str)> = measured
                .iter()
                .zip(&pat.levels)
                .map(|(m, l)| (*m, l.as_str()))
                .collect();
            let branch = state.project_many(&fixed)?;
            let probability = branch.norm_sqr();
            let (post_state, fidelity) = if probability < PRUNE_TOL {
                (None, None)
            } else {
                let corrected = apply_corrections(&branch, &pat.correction)?.normalized()?;
                let post = Ensemble::trace_out(&corrected, traced)?;
                let fid = target.map(|t| post.fidelity(t)).transpose()?;
                (Some(post), fid)
            };
            Ok(HeraldedOutcome {
                detection: pat.detection,
                class: pat.class,
                probability,
                correction: pat.correction,
                post_state,
                fidelity,
            })
        })
        .collect()
}

/// `(|↑↑⟩ + sign·|↓↓⟩)/√2` on spins `a`, `b`.
pub fn phi(a: &str, b: &str, sign: f64) -> Result<StateVector> {
    ghz(&[a, b], sign)
}

/// `(|↑↓⟩ + sign·|↓↑⟩)/√2` on spins `a`, `b`.
pub fn psi(a: &str, b: &str, sign: f64) -> Result<StateVector> {
    let reg = Register::new(vec![Subsystem::spin(a), Subsystem::spin(b)])?;
    StateVector::superposition(
        reg,
        &[
            (Complex64::new(1.0, 0.0), &[levels::UP, levels::DOWN]),
            (Complex64::new(sign, 0.0), &[levels::DOWN, levels::UP]),
        ],
    )
}

/// `(|↑…↑⟩ + sign·|↓…↓⟩)/√2` on the listed spins.
pub fn ghz(spins: &[&str], sign: f64) -> Result<StateVector> {
    let reg = Register::new(spins.iter().map(|s| Subsystem::spin(*s)).collect())?;
    let ups = vec![levels::UP; spins.len()];
    let downs = vec![levels::DOWN; spins.len()];
    StateVector::superposition(
        reg,
        &[
            (Complex64::new(1.0, 0.0), &ups),
            (Complex64::new(sign, 0.0), &downs),
        ],
    )
}

/// `(|↑⟩ + |↓⟩)/√2` on each listed spin.
pub fn uniform_spins(spins: &[&str]) -> Result<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    spins.iter().try_fold(StateVector::scalar(Complex64::new(1.0, 0.0)), |acc, s| {
        let one = StateVector::single(
            Subsystem::spin(*s),
            &[Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        )?;
        acc.tensor(&one)
    })
}
