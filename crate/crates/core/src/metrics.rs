//! Closed-form heralding efficiencies and fidelities, and their comparison
//! with full state evolution.

use crate::cavity::ScatterCoeffs;
use crate::error::{Error, Result};
use crate::protocols::{distribute_bell, pcd, uniform_spins, ParityClass};
use crate::timebin::NoiseChannel;

/// Efficiencies and fidelities of the even and odd heralding classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionMetrics {
    pub eta_d_even: f64,
    pub eta_d_odd: f64,
    pub eta_d: f64,
    pub f_even: f64,
    pub f_odd: f64,
    /// `eta_d` scaled by the input-coupling factor, when one is applied.
    pub eta_in_adjusted: Option<f64>,
}

struct Closed {
    even: f64,
    odd: f64,
    total: f64,
    diff: f64,
}

fn closed(c: &ScatterCoeffs) -> Closed {
    let (t, t0) = (c.t, c.t0);
    let a = (2.0 * t + 1.0).norm_sqr();
    let b = (2.0 * t0 + 1.0).norm_sqr();
    let cross = (1.0 + t + t0).norm_sqr();
    let diff = (t0 - t).norm_sqr();
    Closed {
        even: (a + b + 2.0 * cross) / 4.0,
        odd: diff / 2.0,
        total: (a + b) / 2.0,
        diff,
    }
}

/// `η^E = (|2t+1|²+|2t₀+1|²+2|1+t+t₀|²)/4`, `η^O = |t₀−t|²/2`,
/// `η = (|2t+1|²+|2t₀+1|²)/2`, `F^E = |t₀−t|²/(2η^E)`, `F^O = 1`.
pub fn distribution_metrics(coeffs: &ScatterCoeffs) -> Result<DistributionMetrics> {
    coeffs.validate()?;
    let c = closed(coeffs);
    let gap = (c.even + c.odd - c.total).abs();
    if gap > 1e-12 {
        return Err(Error::Precondition(format!(
            "η^E + η^O differs from η by {gap:.3e}"
        )));
    }
    Ok(DistributionMetrics {
        eta_d_even: c.even,
        eta_d_odd: c.odd,
        eta_d: c.total,
        f_even: if c.even > 0.0 { c.diff / (2.0 * c.even) } else { 0.0 },
        f_odd: 1.0,
        eta_in_adjusted: None,
    })
}

/// Parity-check detector metrics. The efficiencies coincide with the
/// distribution ones and `F_p^E = |t₀−t|²/(2η_p^E)`.
pub fn pcd_metrics(coeffs: &ScatterCoeffs) -> Result<DistributionMetrics> {
    distribution_metrics(coeffs)
}

impl DistributionMetrics {
    /// Scale the total efficiency by `eta_in^photons`: two for distribution,
    /// one for a parity check.
    pub fn with_input_coupling(mut self, eta_in: f64, photons: i32) -> Result<Self> {
        if !(eta_in > 0.0 && eta_in <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "input coupling must be in (0, 1], got {eta_in}"
            )));
        }
        self.eta_in_adjusted = Some(self.eta_d * eta_in.powi(photons));
        Ok(self)
    }
}

/// One closed-form vs simulated comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: String,
    pub closed_form: f64,
    pub simulated: f64,
}

impl Comparison {
    pub fn deviation(&self) -> f64 {
        (self.closed_form - self.simulated).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    pub comparisons: Vec<Comparison>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Largest deviation tolerated by [`crosscheck`].
pub const CROSSCHECK_TOL: f64 = 1e-10;

/// Run distribution (through a non-trivial collective-noise channel) and the
/// parity check on uniform spins by state evolution and compare every class
/// probability and fidelity with the closed forms.
pub fn crosscheck(coeffs: &ScatterCoeffs) -> Result<CrosscheckReport> {
    let m = distribution_metrics(coeffs)?;
    let noise = NoiseChannel::from_angles(0.37, 1.1, 0.37, 1.1);
    let dist = distribute_bell(&noise, &NoiseChannel::IDENTITY, coeffs, coeffs)?;
    let spins = uniform_spins(&["e1", "e2"])?;
    let check = pcd(&spins, "e1", "e2", coeffs)?;

    let mut comparisons = Vec::new();
    let mut push = |quantity: &str, closed_form: f64, simulated: f64| {
        comparisons.push(Comparison {
            quantity: quantity.to_string(),
            closed_form,
            simulated,
        })
    };
    for (name, run) in [("d", &dist), ("p", &check)] {
        push(
            &format!("eta_{name}_even"),
            m.eta_d_even,
            run.class_probability(ParityClass::Even),
        );
        push(
            &format!("eta_{name}_odd"),
            m.eta_d_odd,
            run.class_probability(ParityClass::Odd),
        );
        push(&format!("eta_{name}"), m.eta_d, run.heralded_probability());
        if let Some(f) = run.class_fidelity(ParityClass::Even) {
            push(&format!("f_{name}_even"), m.f_even, f);
        }
        if let Some(f) = run.class_fidelity(ParityClass::Odd) {
            push(&format!("f_{name}_odd"), m.f_odd, f);
        }
        push(
            &format!("completeness_{name}"),
            run.input_probability,
            run.heralded_probability() + run.discarded_probability,
        );
    }
    let max_deviation = comparisons
        .iter()
        .map(Comparison::deviation)
        .fold(0.0, f64::max);
    Ok(CrosscheckReport {
        passed: max_deviation < CROSSCHECK_TOL,
        comparisons,
        max_deviation,
    })
}
