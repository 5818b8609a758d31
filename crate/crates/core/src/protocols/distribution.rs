use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::{ghz, herald, phi, uniform_spins, Correction, Gate, ParityClass, Pattern, ProtocolRun};
use crate::cavity::ScatterCoeffs;
use crate::error::{Error, Result};
use crate::interface::{direction_label, scatter};
use crate::qcore::{fidelity, levels, Register, StateVector, Subsystem};
use crate::timebin::{
    apply_element, apply_noise, decode, encode, time_label, NoiseChannel, OpticalElement,
};

/// Largest photon number accepted by [`distribute_ghz`]; the register grows
/// as 16ⁿ.
pub const MAX_GHZ_PHOTONS: usize = 4;

fn photon_name(i: usize) -> String {
    ((b'a' + i as u8) as char).to_string()
}

/// Source → encoder → fiber → decoder → π phase on one V component → QWPs →
/// scattering off each photon's spin. Spins start in `(|↑⟩+|↓⟩)/√2`.
fn scattered_state(
    photons: &[String],
    spins: &[String],
    noise: &[NoiseChannel],
    coeffs: &[ScatterCoeffs],
    phase_on: usize,
) -> Result<StateVector> {
    let reg = Register::new(photons.iter().map(Subsystem::polarization).collect())?;
    let hs = vec![levels::H; photons.len()];
    let vs = vec![levels::V; photons.len()];
    let one = Complex64::new(1.0, 0.0);
    let mut s = StateVector::superposition(reg, &[(one, &hs), (one, &vs)])?;
    for (p, ch) in photons.iter().zip(noise) {
        s = encode(&s, p)?;
        s = apply_noise(&s, p, ch)?;
        s = decode(&s, p)?;
    }
    let phase = OpticalElement::Phase {
        level: levels::V.into(),
        angle: PI,
    };
    s = apply_element(&s, &phase, &[&photons[phase_on]])?;
    for p in photons {
        s = apply_element(&s, &OpticalElement::Qwp, &[p])?;
    }
    let spin_refs: Vec<&str> = spins.iter().map(String::as_str).collect();
    s = s.tensor(&uniform_spins(&spin_refs)?)?;
    for ((p, e), c) in photons.iter().zip(spins).zip(coeffs) {
        s = scatter(&s, p, e, c)?;
    }
    Ok(s)
}

/// Every photon exits either as R↑ or as L↓.
fn detection_patterns(photons: &[String]) -> Vec<(String, Vec<String>, usize)> {
    let n = photons.len();
    (0..1usize << n)
        .map(|mask| {
            let mut label = String::new();
            let mut lv = Vec::with_capacity(2 * n);
            for i in 0..n {
                // most significant bit is the first photon
                let late = mask >> (n - 1 - i) & 1 == 1;
                let (pol, dir) = if late {
                    (levels::L, levels::DOWN)
                } else {
                    (levels::R, levels::UP)
                };
                label.push_str(pol);
                label.push_str(dir);
                lv.push(pol.to_string());
                lv.push(dir.to_string());
            }
            (label, lv, mask)
        })
        .collect()
}

fn measured_labels(photons: &[String]) -> Vec<String> {
    photons
        .iter()
        .flat_map(|p| [p.clone(), direction_label(p)])
        .collect()
}

/// Bell-pair distribution between spins `e_a` and `e_b`.
pub fn distribute_bell(
    noise_a: &NoiseChannel,
    noise_b: &NoiseChannel,
    coeffs_a: &ScatterCoeffs,
    coeffs_b: &ScatterCoeffs,
) -> Result<ProtocolRun> {
    distribute_bell_between("e_a", "e_b", noise_a, noise_b, coeffs_a, coeffs_b)
}

/// Bell-pair distribution with caller-chosen spin labels. Even patterns need
/// no correction; odd patterns get σx on `spin_b`. Target `(|↑↑⟩−|↓↓⟩)/√2`.
pub fn distribute_bell_between(
    spin_a: &str,
    spin_b: &str,
    noise_a: &NoiseChannel,
    noise_b: &NoiseChannel,
    coeffs_a: &ScatterCoeffs,
    coeffs_b: &ScatterCoeffs,
) -> Result<ProtocolRun> {
    coeffs_a.validate()?;
    coeffs_b.validate()?;
    let photons = vec!["a".to_string(), "b".to_string()];
    let spins = vec![spin_a.to_string(), spin_b.to_string()];
    let state = scattered_state(
        &photons,
        &spins,
        &[*noise_a, *noise_b],
        &[*coeffs_a, *coeffs_b],
        1,
    )?;
    let target = phi(spin_a, spin_b, -1.0)?;
    let mut patterns: Vec<Pattern> = detection_patterns(&photons)
        .into_iter()
        .map(|(detection, lv, mask)| {
            let odd = mask.count_ones() % 2 == 1;
            Pattern {
                detection,
                class: if odd { ParityClass::Odd } else { ParityClass::Even },
                levels: lv,
                correction: if odd {
                    vec![Correction::new(Gate::X, spin_b)]
                } else {
                    vec![]
                },
            }
        })
        .collect();
    // report order: R↑R↑, L↓L↓, R↑L↓, L↓R↑
    patterns.sort_by_key(|p| (p.class, p.detection != "R↑R↑" && p.detection != "R↑L↓"));
    finish(&state, &photons, patterns, target)
}

fn finish(
    state: &StateVector,
    photons: &[String],
    patterns: Vec<Pattern>,
    target: StateVector,
) -> Result<ProtocolRun> {
    let measured = measured_labels(photons);
    let measured: Vec<&str> = measured.iter().map(String::as_str).collect();
    let times: Vec<String> = photons.iter().map(|p| time_label(p)).collect();
    let times: Vec<&str> = times.iter().map(String::as_str).collect();
    let outcomes = herald(state, &measured, patterns, &times, Some(&target))?;
    Ok(ProtocolRun {
        outcomes,
        discarded_probability: 1.0 - state.norm_sqr(),
        input_probability: 1.0,
        target: Some(target),
    })
}

fn ghz_spins(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e_{}", photon_name(i))).collect()
}

fn check_ghz_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "GHZ distribution needs at least two photons, got {n}"
        )));
    }
    if n > MAX_GHZ_PHOTONS {
        return Err(Error::InvalidParameter(format!(
            "GHZ distribution supports at most {MAX_GHZ_PHOTONS} photons, got {n}"
        )));
    }
    Ok(())
}

/// Feed-forward corrections for every n-photon detection pattern, derived by
/// evolving the ideal noiseless protocol and searching the smallest set of σx
/// gates (optionally followed by σz on the first spin) that maps the heralded
/// state onto `(|↑…↑⟩+|↓…↓⟩)/√2`. Candidates are tried by number of σx gates,
/// then by spin position.
///
/// Each table is derived once per process and cached.
pub fn ghz_correction_table(n: usize) -> Result<CorrectionTable> {
    check_ghz_size(n)?;
    if let Some(t) = TABLES[n].get() {
        return Ok(t.clone());
    }
    let t = derive_correction_table(n)?;
    Ok(TABLES[n].get_or_init(|| t).clone())
}

type CorrectionTable = Vec<(String, Vec<Correction>)>;

static TABLES: [OnceLock<CorrectionTable>; MAX_GHZ_PHOTONS + 1] =
    [const { OnceLock::new() }; MAX_GHZ_PHOTONS + 1];

fn derive_correction_table(n: usize) -> Result<CorrectionTable> {
    let photons: Vec<String> = (0..n).map(photon_name).collect();
    let spins = ghz_spins(n);
    let state = scattered_state(
        &photons,
        &spins,
        &vec![NoiseChannel::IDENTITY; n],
        &vec![ScatterCoeffs::IDEAL; n],
        0,
    )?;
    let spin_refs: Vec<&str> = spins.iter().map(String::as_str).collect();
    let target = ghz(&spin_refs, 1.0)?;
    let measured = measured_labels(&photons);
    let times: Vec<String> = photons.iter().map(|p| time_label(p)).collect();

    let mut masks: Vec<usize> = (0..1usize << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let candidates: Vec<Vec<Correction>> = masks
        .iter()
        .flat_map(|&m| {
            let xs: Vec<Correction> = (0..n)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| Correction::new(Gate::X, &spins[i]))
                .collect();
            let mut with_z = xs.clone();
            with_z.push(Correction::new(Gate::Z, &spins[0]));
            [xs, with_z]
        })
        .collect();

    detection_patterns(&photons)
        .into_iter()
        .map(|(label, lv, _)| {
            let fixed: Vec<(&str, &str)> = measured
                .iter()
                .zip(&lv)
                .map(|(m, l)| (m.as_str(), l.as_str()))
                .collect();
            let mut branch = state.project_many(&fixed)?;
            for t in &times {
                // noiseless decoder output sits in the two-delay class
                branch = branch.remove_definite(t, levels::LATE_CLASS)?;
            }
            for c in &candidates {
                let corrected = super::apply_corrections(&branch, c)?;
                if fidelity(&corrected, &target)? > 1.0 - 1e-9 {
                    return Ok((label, c.clone()));
                }
            }
            Err(Error::Precondition(format!(
                "no correction found for GHZ pattern {label}"
            )))
        })
        .collect()
}

/// n-photon GHZ distribution over spins `e_a, e_b, …`, with the π phase on
/// the first photon's V component. Target `(|↑…↑⟩+|↓…↓⟩)/√2`.
pub fn distribute_ghz(
    n: usize,
    noise: &[NoiseChannel],
    coeffs: &[ScatterCoeffs],
) -> Result<ProtocolRun> {
    check_ghz_size(n)?;
    if noise.len() != n || coeffs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if noise.len() != n { noise.len() } else { coeffs.len() },
        });
    }
    for c in coeffs {
        c.validate()?;
    }
    let photons: Vec<String> = (0..n).map(photon_name).collect();
    let spins = ghz_spins(n);
    let state = scattered_state(&photons, &spins, noise, coeffs, 0)?;
    let table = ghz_correction_table(n)?;
    let patterns = detection_patterns(&photons)
        .into_iter()
        .zip(table)
        .map(|((detection, lv, mask), (_, correction))| Pattern {
            detection,
            class: if mask.count_ones() % 2 == 1 {
                ParityClass::Odd
            } else {
                ParityClass::Even
            },
            levels: lv,
            correction,
        })
        .collect();
    let spin_refs: Vec<&str> = spins.iter().map(String::as_str).collect();
    finish(&state, &photons, patterns, ghz(&spin_refs, 1.0)?)
}

/// Weight μ of `(|↑↑⟩−|↓↓⟩)/√2` in the heralded two-spin state, for channels
/// whose early and late bins rotate differently.
pub fn asymmetric_mu(
    noise_a: &NoiseChannel,
    noise_b: &NoiseChannel,
    coeffs_a: &ScatterCoeffs,
    coeffs_b: &ScatterCoeffs,
) -> Result<f64> {
    let run = distribute_bell(noise_a, noise_b, coeffs_a, coeffs_b)?;
    run.heralded_ensemble()?.fidelity(&phi("e_a", "e_b", -1.0)?)
}
