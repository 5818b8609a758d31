use super::{apply_corrections, pcd, phi, Correction, Gate, ParityClass};
use crate::cavity::ScatterCoeffs;
use crate::error::{Error, Result};
use crate::qcore::{Basis, Ensemble, StateVector, PRUNE_TOL};

/// Pair quality after a number of purification rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurificationState {
    /// Weight of `(|↑↑⟩−|↓↓⟩)/√2`.
    pub mu: f64,
    pub round: usize,
    /// Success probability of this round.
    pub success_probability: f64,
    /// Product of the success probabilities of all rounds so far.
    pub cumulative_probability: f64,
}

/// Result of one purification round on two copies of a mixed pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationStep {
    /// Surviving pair, on the input's spin labels; `None` if no branch fires.
    pub state: Option<Ensemble>,
    /// Both parity checks fired with equal parity.
    pub success_probability: f64,
    /// Both checks fired but with different parities.
    pub rejected_probability: f64,
    /// Probe photon lost to leak or noise modes in either check.
    pub lost_probability: f64,
}

fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside [0, 1]")));
    }
    Ok(())
}

/// `μΦ⁻ + (1−μ)Φ⁺` on spins `a`, `b`.
pub fn bell_mixture(a: &str, b: &str, mu: f64) -> Result<Ensemble> {
    check_mu(mu)?;
    let mut members = Vec::with_capacity(2);
    if mu > 0.0 {
        members.push((mu, phi(a, b, -1.0)?));
    }
    if mu < 1.0 {
        members.push((1.0 - mu, phi(a, b, 1.0)?));
    }
    Ensemble::new(members)
}

/// One round on two copies of `pair` (spins `x`, `y`): rotate both copies
/// by H⊗H, parity-check `(x, x′)` with `coeffs_a` and `(y, y′)` with
/// `coeffs_b`, keep equal parities (σx on `x`, `y` after odd–odd), measure
/// the first copy in the Hadamard basis, apply σz on `x′` when the results
/// differ and undo the rotation with H⊗H on the second copy.
pub fn purify_ensemble(
    pair: &Ensemble,
    coeffs_a: &ScatterCoeffs,
    coeffs_b: &ScatterCoeffs,
) -> Result<PurificationStep> {
    let labels: Vec<String> = pair.register().labels().map(str::to_string).collect();
    if labels.len() != 2 {
        return Err(Error::Precondition(format!(
            "purification acts on two-spin pairs, got {} subsystems",
            labels.len()
        )));
    }
    let (x, y) = (labels[0].as_str(), labels[1].as_str());
    let (xp, yp) = (format!("{x}′"), format!("{y}′"));
    let h = Gate::H.map();
    let rotate = |s: &StateVector| -> Result<StateVector> { s.apply_map(&h, &[x])?.apply_map(&h, &[y]) };

    let mut kept: Vec<(f64, StateVector)> = Vec::new();
    let (mut success, mut rejected, mut lost) = (0.0, 0.0, 0.0);
    for (w1, s1) in pair.members() {
        for (w2, s2) in pair.members() {
            let w = w1 * w2;
            let second = rotate(s2)?.rename(x, &xp)?.rename(y, &yp)?;
            let joint = rotate(s1)?.tensor(&second)?;
            let alice = pcd(&joint, x, &xp, coeffs_a)?;
            lost += w * alice.discarded_probability;
            for oa in &alice.outcomes {
                let Some(post_a) = oa.post_state.as_ref().and_then(Ensemble::as_pure) else {
                    continue;
                };
                let bob = pcd(post_a, y, &yp, coeffs_b)?;
                lost += w * oa.probability * bob.discarded_probability;
                for ob in &bob.outcomes {
                    let p = w * oa.probability * ob.probability;
                    if oa.class != ob.class {
                        rejected += p;
                        continue;
                    }
                    success += p;
                    let Some(post) = ob.post_state.as_ref().and_then(Ensemble::as_pure) else {
                        continue;
                    };
                    let mut s = post.clone();
                    if oa.class == ParityClass::Odd {
                        s = apply_corrections(
                            &s,
                            &[Correction::new(Gate::X, x), Correction::new(Gate::X, y)],
                        )?;
                    }
                    for m in s.apply_map(&h, &[x])?.apply_map(&h, &[y])?.measure(
                        &[x, y],
                        &Basis::Computational,
                    )? {
                        let mut fin = m.state;
                        if m.levels[0] != m.levels[1] {
                            fin = fin.apply_map(&Gate::Z.map(), &[&xp])?;
                        }
                        fin = fin
                            .apply_map(&h, &[&xp])?
                            .apply_map(&h, &[&yp])?
                            .rename(&xp, x)?
                            .rename(&yp, y)?;
                        kept.push((p * m.probability, fin));
                    }
                }
            }
        }
    }
    let state = if success > PRUNE_TOL {
        let total: f64 = kept.iter().map(|(p, _)| p).sum();
        Some(Ensemble::new(
            kept.into_iter().map(|(p, s)| (p / total, s)).collect(),
        )?)
    } else {
        None
    };
    Ok(PurificationStep {
        state,
        success_probability: success,
        rejected_probability: rejected,
        lost_probability: lost,
    })
}

/// Simulate one round on `μΦ⁻ + (1−μ)Φ⁺`. Returns the accepted pair and the
/// probability that the round fails (parity mismatch or probe loss).
pub fn purify_round(mu: f64, coeffs: &ScatterCoeffs) -> Result<(PurificationState, f64)> {
    let pair = bell_mixture("e_a", "e_b", mu)?;
    let step = purify_ensemble(&pair, coeffs, coeffs)?;
    let new_mu = match &step.state {
        Some(e) => e.fidelity(&phi("e_a", "e_b", -1.0)?)?,
        None => 0.0,
    };
    let accepted = PurificationState {
        mu: new_mu,
        round: 1,
        success_probability: step.success_probability,
        cumulative_probability: step.success_probability,
    };
    Ok((accepted, 1.0 - step.success_probability))
}

/// Iterate `μ ↦ μ²/(μ²+(1−μ)²)` for `rounds` rounds.
pub fn purify_analytic(mu: f64, rounds: usize) -> Result<Vec<PurificationState>> {
    check_mu(mu)?;
    let mut out = Vec::with_capacity(rounds);
    let (mut m, mut cumulative) = (mu, 1.0);
    for round in 1..=rounds {
        let success = m * m + (1.0 - m) * (1.0 - m);
        m = m * m / success;
        cumulative *= success;
        out.push(PurificationState {
            mu: m,
            round,
            success_probability: success,
            cumulative_probability: cumulative,
        });
    }
    Ok(out)
}

/// Smallest number of rounds after which μ exceeds `threshold`, searching up
/// to `max_rounds`.
pub fn rounds_to_reach(mu: f64, threshold: f64, max_rounds: usize) -> Result<Option<usize>> {
    if mu > threshold {
        return Ok(Some(0));
    }
    Ok(purify_analytic(mu, max_rounds)?
        .iter()
        .find(|s| s.mu > threshold)
        .map(|s| s.round))
}
