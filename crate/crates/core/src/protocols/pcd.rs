use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{herald, HeraldedOutcome, ParityClass, Pattern, ProtocolRun};
use crate::cavity::ScatterCoeffs;
use crate::error::{Error, Result};
use crate::interface::{direction_label, scatter};
use crate::qcore::{levels, Ensemble, LinearMap, StateVector, Subsystem, TOL};
use crate::timebin::{apply_element, OpticalElement};

/// Label of the probe photon's polarization subsystem.
pub const PROBE: &str = "probe";
const PATH: &str = "probe.path";
const ARMS: [&str; 2] = ["a1", "a2"];

/// Parity check on `spin1`, `spin2` with the standard `(|R⟩+|L⟩)/√2` probe.
pub fn pcd(
    state: &StateVector,
    spin1: &str,
    spin2: &str,
    coeffs: &ScatterCoeffs,
) -> Result<ProtocolRun> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    pcd_with_probe(state, spin1, spin2, coeffs, [h, h])
}

/// Parity check with an explicit probe polarization `[R, L]`; anything other
/// than `(|R⟩+|L⟩)/√2` up to a global phase is rejected.
///
/// The probe is split into arms a1 (to `spin1`) and a2 (to `spin2`); in each
/// arm R enters along the axis and L against it. Reflected and transmitted
/// outputs are recombined, the arms interfere on a circular beam splitter
/// and a half-wave plate precedes detection. R clicks herald even parity, L
/// clicks odd parity. Outcome fidelities are measured against the input
/// projected by the ideal detector, `diag(1,0,0,−1)` (even) or
/// `diag(0,1,−1,0)` (odd) on the two spins.
pub fn pcd_with_probe(
    state: &StateVector,
    spin1: &str,
    spin2: &str,
    coeffs: &ScatterCoeffs,
    probe: [Complex64; 2],
) -> Result<ProtocolRun> {
    coeffs.validate()?;
    check_probe(probe)?;
    if spin1 == spin2 {
        return Err(Error::DuplicateLabel(spin1.to_string()));
    }
    state.register().get(spin1)?;
    state.register().get(spin2)?;
    let input_probability = state.norm_sqr();
    let dir = direction_label(PROBE);

    let mut s = StateVector::single(Subsystem::circular(PROBE), &probe)?.tensor(state)?;
    s = s.insert_subsystem(1, Subsystem::direction(dir.clone()), levels::UP)?;
    s = apply_element(&s, &OpticalElement::Cpbs, &[PROBE, &dir])?;
    s = s.insert_subsystem(2, Subsystem::path(PATH, &ARMS)?, ARMS[0])?;
    s = apply_element(&s, &OpticalElement::BeamSplitter, &[PATH])?;

    let mut arms = Vec::with_capacity(2);
    for (arm, spin) in ARMS.iter().zip([spin1, spin2]) {
        let hit = scatter(&s.project(PATH, arm)?, PROBE, spin, coeffs)?;
        arms.push(hit.insert_subsystem(2, Subsystem::path(PATH, &ARMS)?, arm)?);
    }
    s = arms[0].add(&arms[1])?;
    let discarded_probability = input_probability - s.norm_sqr();

    s = apply_element(&s, &OpticalElement::Cpbs, &[PROBE, &dir])?;
    s = s.remove_definite(&dir, levels::UP)?;
    s = apply_element(&s, &OpticalElement::Cpbs, &[PROBE, PATH])?;
    s = apply_element(&s, &OpticalElement::Hwp, &[PROBE])?;

    let mut outcomes = Vec::with_capacity(4);
    for arm in ARMS {
        for (pol, class) in [(levels::R, ParityClass::Even), (levels::L, ParityClass::Odd)] {
            let target = ideal_image(state, spin1, spin2, class)?;
            let pattern = Pattern {
                detection: format!("{pol}_{arm}"),
                class,
                levels: vec![pol.to_string(), arm.to_string()],
                correction: vec![],
            };
            outcomes.extend(herald(&s, &[PROBE, PATH], vec![pattern], &[], target.as_ref())?);
        }
    }
    // R_a1, R_a2, L_a1, L_a2
    outcomes.sort_by_key(|o| o.class);
    Ok(ProtocolRun {
        outcomes,
        discarded_probability,
        input_probability,
        target: None,
    })
}

fn check_probe(probe: [Complex64; 2]) -> Result<()> {
    let [r, l] = probe;
    let ok = (r.norm_sqr() - 0.5).abs() <= TOL
        && (l.norm_sqr() - 0.5).abs() <= TOL
        && (r - l).norm() <= 1e-9;
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(
            "probe photon must be prepared in (|R⟩+|L⟩)/√2".into(),
        ))
    }
}

fn ideal_image(
    state: &StateVector,
    spin1: &str,
    spin2: &str,
    class: ParityClass,
) -> Result<Option<StateVector>> {
    let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let diag = match class {
        ParityClass::Even => [one, zero, zero, -one],
        ParityClass::Odd => [zero, one, -one, zero],
    };
    let img = state.apply_map(&LinearMap::diagonal(&diag)?, &[spin1, spin2])?;
    if img.norm_sqr() < crate::qcore::PRUNE_TOL {
        return Ok(None);
    }
    img.normalized().map(Some)
}

/// Parity check on every member of a mixed state; outcomes are averaged
/// with the member weights.
pub fn pcd_ensemble(
    ensemble: &Ensemble,
    spin1: &str,
    spin2: &str,
    coeffs: &ScatterCoeffs,
) -> Result<ProtocolRun> {
    let runs = ensemble
        .members()
        .iter()
        .map(|(w, s)| Ok((*w, pcd(s, spin1, spin2, coeffs)?)))
        .collect::<Result<Vec<_>>>()?;
    let first = &runs[0].1;
    let outcomes = (0..first.outcomes.len())
        .map(|k| {
            let parts: Vec<(f64, &HeraldedOutcome)> =
                runs.iter().map(|(w, r)| (*w, &r.outcomes[k])).collect();
            let template = &first.outcomes[k];
            merge_outcomes(template.detection.clone(), template.class, &parts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtocolRun {
        outcomes,
        discarded_probability: runs.iter().map(|(w, r)| w * r.discarded_probability).sum(),
        input_probability: runs.iter().map(|(w, r)| w * r.input_probability).sum(),
        target: None,
    })
}

/// Merge outcome records with extra weights; post states are mixed and
/// fidelities averaged by probability.
pub(crate) fn merge_outcomes(
    detection: String,
    class: ParityClass,
    parts: &[(f64, &HeraldedOutcome)],
) -> Result<HeraldedOutcome> {
    let probability: f64 = parts.iter().map(|(w, o)| w * o.probability).sum();
    let live: Vec<(f64, &HeraldedOutcome)> = parts
        .iter()
        .filter(|(w, o)| w * o.probability > 0.0 && o.post_state.is_some())
        .map(|(w, o)| (w * o.probability, *o))
        .collect();
    let post_state = if live.is_empty() {
        None
    } else {
        let ens: Vec<(f64, Ensemble)> = live
            .iter()
            .map(|(p, o)| (*p, o.post_state.clone().unwrap()))
            .collect();
        Some(Ensemble::combine(&ens)?)
    };
    let fidelity = if live.iter().all(|(_, o)| o.fidelity.is_some()) && !live.is_empty() {
        let total: f64 = live.iter().map(|(p, _)| p).sum();
        Some(live.iter().map(|(p, o)| p * o.fidelity.unwrap()).sum::<f64>() / total)
    } else {
        None
    };
    let correction = parts
        .first()
        .map(|(_, o)| o.correction.clone())
        .unwrap_or_default();
    Ok(HeraldedOutcome {
        detection,
        class,
        probability,
        correction,
        post_state,
        fidelity,
    })
}

/// Combine outcomes that differ only in which detector of a parity class
/// clicked. Detectors of the same class herald the same spin state up to a
/// global phase, so nothing is lost. Any suffix after `|` (a later spin
/// measurement) is kept apart: `R_a1|↑↓` and `R_a2|↑↓` merge into `even|↑↓`.
pub fn merge_by_parity(run: &ProtocolRun) -> Result<ProtocolRun> {
    let mut keys: Vec<(ParityClass, String)> = Vec::new();
    for o in &run.outcomes {
        let key = (o.class, suffix(&o.detection).to_string());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.sort_by_key(|(c, _)| *c);
    let outcomes = keys
        .into_iter()
        .map(|(class, rest)| {
            let parts: Vec<(f64, &HeraldedOutcome)> = run
                .outcomes
                .iter()
                .filter(|o| o.class == class && suffix(&o.detection) == rest)
                .map(|o| (1.0, o))
                .collect();
            let label = if rest.is_empty() {
                class.to_string()
            } else {
                format!("{class}|{rest}")
            };
            merge_outcomes(label, class, &parts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtocolRun {
        outcomes,
        ..run.clone()
    })
}

fn suffix(detection: &str) -> &str {
    detection.split_once('|').map(|(_, r)| r).unwrap_or("")
}
