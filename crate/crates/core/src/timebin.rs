//! Linear-optical elements, the time-bin encoder, collective fiber noise and
//! the decoder.
//!
//! Photon `x` owns a polarization subsystem labeled `x`, a time-bin subsystem
//! `x.t` and, once routed by a polarizing beam splitter, a direction
//! subsystem `x.dir`. Inside the decoder the time register holds one letter
//! per delay stage (`s` for no delay, `l` for a Δt delay); after decoding the
//! variants are merged into the classes `s′` (one delay) and `l′` (two).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interface::direction_label;
use crate::qcore::{levels, LinearMap, StateVector, Subsystem, SubsystemKind, TOL};

/// Label of the time-bin subsystem attached to `photon`.
pub fn time_label(photon: &str) -> String {
    format!("{photon}.t")
}

/// Polarization rotation picked up in a fiber, possibly different for the
/// early and late bins: `U|H⟩ = δ|H⟩ + η|V⟩`, `U|V⟩ = −η*|H⟩ + δ*|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChannel {
    pub delta: Complex64,
    pub eta: Complex64,
    pub delta_l: Complex64,
    pub eta_l: Complex64,
}

impl NoiseChannel {
    pub const IDENTITY: NoiseChannel = NoiseChannel {
        delta: Complex64::new(1.0, 0.0),
        eta: Complex64::new(0.0, 0.0),
        delta_l: Complex64::new(1.0, 0.0),
        eta_l: Complex64::new(0.0, 0.0),
    };

    /// Collective noise: both bins see the same rotation.
    pub fn symmetric(delta: Complex64, eta: Complex64) -> Result<Self> {
        Self::asymmetric(delta, eta, delta, eta)
    }

    pub fn asymmetric(
        delta: Complex64,
        eta: Complex64,
        delta_l: Complex64,
        eta_l: Complex64,
    ) -> Result<Self> {
        for (d, e) in [(delta, eta), (delta_l, eta_l)] {
            let n = d.norm_sqr() + e.norm_sqr();
            if !n.is_finite() || (n - 1.0).abs() > TOL {
                return Err(Error::InvalidParameter(format!(
                    "noise rotation is not unitary: |δ|²+|η|² = {n}"
                )));
            }
        }
        Ok(Self {
            delta,
            eta,
            delta_l,
            eta_l,
        })
    }

    /// `δ = cos θ`, `η = e^{iφ} sin θ` for each bin.
    pub fn from_angles(theta: f64, phi: f64, theta_l: f64, phi_l: f64) -> Self {
        let rot = |th: f64, ph: f64| {
            (
                Complex64::new(th.cos(), 0.0),
                Complex64::from_polar(th.sin(), ph),
            )
        };
        let (delta, eta) = rot(theta, phi);
        let (delta_l, eta_l) = rot(theta_l, phi_l);
        Self {
            delta,
            eta,
            delta_l,
            eta_l,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (self.delta - self.delta_l).norm() <= TOL && (self.eta - self.eta_l).norm() <= TOL
    }

    fn rotation(d: Complex64, e: Complex64) -> [Complex64; 4] {
        [d, -e.conj(), e, d.conj()]
    }
}

/// One optical component of the encoder, decoder or parity-check circuits.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    /// Polarizing beam splitter on `[polarization, direction]`: H exits into
    /// the ↑ port, V into the ↓ port.
    Pbs,
    /// Circular polarizing beam splitter on `[polarization, path]`: R is
    /// transmitted, L switches between the two path modes.
    Cpbs,
    /// Quarter-wave plate: H ↔ R, V ↔ L.
    Qwp,
    /// Half-wave plate acting as a polarization Hadamard.
    Hwp,
    /// Pockels cell on `[polarization, time]`: flips polarization in the
    /// listed time windows.
    PockelsCell { window: Vec<String> },
    /// Δt delay on `[polarization, time]` applied to the `on` polarization;
    /// marks letter `stage` of the time label.
    Delay { on: String, stage: usize },
    /// 50/50 beam splitter on a two-mode path.
    BeamSplitter,
    /// Phase `e^{iθ}` on one level of any subsystem.
    Phase { level: String, angle: f64 },
}

impl OpticalElement {
    /// Number of target subsystems the element acts on.
    pub fn arity(&self) -> usize {
        match self {
            OpticalElement::Pbs
            | OpticalElement::Cpbs
            | OpticalElement::PockelsCell { .. }
            | OpticalElement::Delay { .. } => 2,
            OpticalElement::Qwp
            | OpticalElement::Hwp
            | OpticalElement::BeamSplitter
            | OpticalElement::Phase { .. } => 1,
        }
    }
}

fn expect_kind(state: &StateVector, label: &str, kind: SubsystemKind) -> Result<Subsystem> {
    let s = state.register().get(label)?;
    if s.kind() != kind {
        return Err(Error::KindMismatch {
            label: label.to_string(),
            expected: kind.to_string(),
            found: s.kind().to_string(),
        });
    }
    Ok(s.clone())
}

fn expect_levels(sub: &Subsystem, want: &[&str]) -> Result<()> {
    if sub.levels() != want {
        return Err(Error::Precondition(format!(
            "`{}` has levels {:?}, expected {:?}",
            sub.label(),
            sub.levels(),
            want
        )));
    }
    Ok(())
}

/// Controlled permutation: where the control subsystem (first target) is in
/// one of `active` levels, apply `perm` to the second target.
fn controlled_perm(control_dim: usize, active: &[usize], perm: &[usize]) -> Result<LinearMap> {
    let d = perm.len();
    let mut full = Vec::with_capacity(control_dim * d);
    for c in 0..control_dim {
        for k in 0..d {
            let to = if active.contains(&c) { perm[k] } else { k };
            full.push(c * d + to);
        }
    }
    LinearMap::permutation(&full)
}

/// Apply one optical element. Targets follow [`OpticalElement`]'s
/// documentation; kinds and level sets are checked.
pub fn apply_element(
    state: &StateVector,
    element: &OpticalElement,
    targets: &[&str],
) -> Result<StateVector> {
    if targets.len() != element.arity() {
        return Err(Error::DimensionMismatch {
            expected: element.arity(),
            found: targets.len(),
        });
    }
    match element {
        OpticalElement::Pbs => {
            let pol = expect_kind(state, targets[0], SubsystemKind::Polarization)?;
            expect_levels(&pol, &[levels::H, levels::V])?;
            let dir = expect_kind(state, targets[1], SubsystemKind::Path)?;
            expect_levels(&dir, &[levels::UP, levels::DOWN])?;
            state.apply_map(&controlled_perm(2, &[1], &[1, 0])?, targets)
        }
        OpticalElement::Cpbs => {
            let pol = expect_kind(state, targets[0], SubsystemKind::Polarization)?;
            expect_levels(&pol, &[levels::R, levels::L])?;
            let path = expect_kind(state, targets[1], SubsystemKind::Path)?;
            if path.dim() != 2 {
                return Err(Error::Precondition(format!(
                    "CPBS needs a two-mode path, `{}` has {}",
                    path.label(),
                    path.dim()
                )));
            }
            state.apply_map(&controlled_perm(2, &[1], &[1, 0])?, targets)
        }
        OpticalElement::Qwp => {
            let pol = expect_kind(state, targets[0], SubsystemKind::Polarization)?;
            let flipped: [&str; 2] = if pol.levels() == [levels::H, levels::V] {
                [levels::R, levels::L]
            } else if pol.levels() == [levels::R, levels::L] {
                [levels::H, levels::V]
            } else {
                return Err(Error::Precondition(format!(
                    "QWP cannot act on levels {:?}",
                    pol.levels()
                )));
            };
            state.relabel_levels(targets[0], &flipped)
        }
        OpticalElement::Hwp => {
            expect_kind(state, targets[0], SubsystemKind::Polarization)?;
            state.apply_map(&LinearMap::hadamard(), targets)
        }
        OpticalElement::PockelsCell { window } => {
            expect_kind(state, targets[0], SubsystemKind::Polarization)?;
            let time = expect_kind(state, targets[1], SubsystemKind::TimeBin)?;
            let active = window
                .iter()
                .map(|w| time.level_index(w))
                .collect::<Result<Vec<_>>>()?;
            // order the targets so the time bin controls the polarization flip
            let swapped = [targets[1], targets[0]];
            state.apply_map(&controlled_perm(time.dim(), &active, &[1, 0])?, &swapped)
        }
        OpticalElement::Delay { on, stage } => {
            let pol = expect_kind(state, targets[0], SubsystemKind::Polarization)?;
            let control = pol.level_index(on)?;
            let time = expect_kind(state, targets[1], SubsystemKind::TimeBin)?;
            let perm = delay_permutation(&time, *stage)?;
            state.apply_map(&controlled_perm(2, &[control], &perm)?, targets)
        }
        OpticalElement::BeamSplitter => {
            let path = expect_kind(state, targets[0], SubsystemKind::Path)?;
            if path.dim() != 2 {
                return Err(Error::Precondition(format!(
                    "beam splitter needs a two-mode path, `{}` has {}",
                    path.label(),
                    path.dim()
                )));
            }
            state.apply_map(&LinearMap::hadamard(), targets)
        }
        OpticalElement::Phase { level, angle } => {
            let sub = state.register().get(targets[0])?;
            let k = sub.level_index(level)?;
            let mut diag = vec![Complex64::new(1.0, 0.0); sub.dim()];
            diag[k] = Complex64::from_polar(1.0, *angle);
            state.apply_map(&LinearMap::diagonal(&diag)?, targets)
        }
    }
}

/// Swap `s` and `l` at letter `stage` of every time label. On the states the
/// circuits produce the letter is always `s` beforehand, so this is a delay.
fn delay_permutation(time: &Subsystem, stage: usize) -> Result<Vec<usize>> {
    time.levels()
        .iter()
        .map(|lv| {
            let mut chars: Vec<char> = lv.chars().collect();
            let c = chars.get_mut(stage).ok_or_else(|| {
                Error::Precondition(format!(
                    "time level `{lv}` of `{}` has no delay stage {stage}",
                    time.label()
                ))
            })?;
            *c = match *c {
                's' => 'l',
                'l' => 's',
                other => {
                    return Err(Error::Precondition(format!(
                        "time level `{lv}` has unexpected letter `{other}`"
                    )))
                }
            };
            let swapped: String = chars.into_iter().collect();
            time.level_index(&swapped)
        })
        .collect()
}

/// Time-bin encoder: `α|H⟩ + β|V⟩ ↦ |H⟩(α|s⟩ + β|l⟩)`.
///
/// A missing time subsystem is created in `|s⟩` right after the polarization.
pub fn encode(state: &StateVector, photon: &str) -> Result<StateVector> {
    let pol = expect_kind(state, photon, SubsystemKind::Polarization)?;
    expect_levels(&pol, &[levels::H, levels::V])?;
    let tl = time_label(photon);
    let state = if state.register().contains(&tl) {
        let time = expect_kind(state, &tl, SubsystemKind::TimeBin)?;
        expect_levels(&time, &[levels::EARLY, levels::LATE])?;
        let late = state.project(&tl, levels::LATE)?.norm_sqr();
        if late > TOL {
            return Err(Error::Precondition(format!(
                "time bin of `{photon}` is not in |s⟩ (late weight {late:.3e})"
            )));
        }
        state.clone()
    } else {
        let at = state.register().position(photon)? + 1;
        state.insert_subsystem(at, Subsystem::time_bin(tl.clone()), levels::EARLY)?
    };
    let delayed = apply_element(
        &state,
        &OpticalElement::Delay {
            on: levels::V.into(),
            stage: 0,
        },
        &[photon, &tl],
    )?;
    apply_element(
        &delayed,
        &OpticalElement::PockelsCell {
            window: vec![levels::LATE.into()],
        },
        &[photon, &tl],
    )
}

/// Fiber noise: early and late bins get their own rotation.
pub fn apply_noise(state: &StateVector, photon: &str, ch: &NoiseChannel) -> Result<StateVector> {
    let pol = expect_kind(state, photon, SubsystemKind::Polarization)?;
    expect_levels(&pol, &[levels::H, levels::V])?;
    let tl = time_label(photon);
    let time = expect_kind(state, &tl, SubsystemKind::TimeBin)?;
    expect_levels(&time, &[levels::EARLY, levels::LATE])?;
    let us = NoiseChannel::rotation(ch.delta, ch.eta);
    let ul = NoiseChannel::rotation(ch.delta_l, ch.eta_l);
    // block diagonal on [time, polarization]
    let zero = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let entries = [
        us[0], us[1], zero, zero,
        us[2], us[3], zero, zero,
        zero, zero, ul[0], ul[1],
        zero, zero, ul[2], ul[3],
    ];
    let map = LinearMap::unitary(nalgebra::DMatrix::from_row_slice(4, 4, &entries))?;
    state.apply_map(&map, &[&tl, photon])
}

/// Three-letter time labels used inside the decoder.
pub const DECODER_BINS: [&str; 8] = ["sss", "ssl", "sls", "sll", "lss", "lsl", "lls", "lll"];

/// Decoder: delay on H, Pockels-cell flip in the `sl`/`ls` windows, PBS
/// routing into `x.dir` (H → ↑, V → ↓), delay on V, then merge the time
/// variants by delay count.
///
/// For an encoder-early input the output is `|V,↓⟩(δ|l′⟩ + η|s′⟩)`; for an
/// encoder-late input `|H,↑⟩(δ′|l′⟩ + η′|s′⟩)`.
pub fn decode(state: &StateVector, photon: &str) -> Result<StateVector> {
    decode_unmerged(state, photon).and_then(|s| merge_delay_classes(&s, photon))
}

/// The decoder circuit without the final merge of time variants.
pub fn decode_unmerged(state: &StateVector, photon: &str) -> Result<StateVector> {
    let pol = expect_kind(state, photon, SubsystemKind::Polarization)?;
    expect_levels(&pol, &[levels::H, levels::V])?;
    let tl = time_label(photon);
    let time = expect_kind(state, &tl, SubsystemKind::TimeBin)?;
    if time.levels() != [levels::EARLY, levels::LATE] {
        return Err(Error::Precondition(format!(
            "time register `{tl}` is already expanded"
        )));
    }
    let dl = direction_label(photon);
    let targets = [photon, tl.as_str()];

    let s = state.expand_levels(&tl, &DECODER_BINS, &[0, 4])?;
    let s = apply_element(
        &s,
        &OpticalElement::Delay {
            on: levels::H.into(),
            stage: 1,
        },
        &targets,
    )?;
    let window = DECODER_BINS
        .iter()
        .filter(|b| matches!(&b[..2], "sl" | "ls"))
        .map(|b| b.to_string())
        .collect();
    let s = apply_element(&s, &OpticalElement::PockelsCell { window }, &targets)?;
    let at = s.register().position(photon)? + 1;
    let s = s.insert_subsystem(at, Subsystem::direction(dl.clone()), levels::UP)?;
    let s = apply_element(&s, &OpticalElement::Pbs, &[photon, &dl])?;
    apply_element(
        &s,
        &OpticalElement::Delay {
            on: levels::V.into(),
            stage: 2,
        },
        &targets,
    )
}

/// Merge the eight decoder time labels into `s′` (one delay) and `l′`
/// (two delays). Zero-delay and three-delay bins are never populated.
pub fn merge_delay_classes(state: &StateVector, photon: &str) -> Result<StateVector> {
    let tl = time_label(photon);
    let time = expect_kind(state, &tl, SubsystemKind::TimeBin)?;
    let bins: Vec<&str> = time.levels().iter().map(String::as_str).collect();
    if bins != DECODER_BINS {
        return Err(Error::Precondition(format!(
            "`{tl}` does not carry decoder time labels"
        )));
    }
    let mut merge = Vec::with_capacity(8);
    for b in DECODER_BINS {
        let delays = b.chars().filter(|&c| c == 'l').count();
        if delays != 1 && delays != 2 {
            let w = state.project(&tl, b)?.norm_sqr();
            if w > TOL {
                return Err(Error::Precondition(format!(
                    "time bin `{b}` of `{photon}` is populated (weight {w:.3e})"
                )));
            }
        }
        merge.push(if delays == 2 { 1 } else { 0 });
    }
    state.collapse_levels(&tl, &[levels::EARLY_CLASS, levels::LATE_CLASS], &merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Register;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell_hv() -> StateVector {
        let reg = Register::new(vec![
            Subsystem::polarization("a"),
            Subsystem::polarization("b"),
        ])
        .unwrap();
        StateVector::superposition(reg, &[(c(1.0), &["H", "H"]), (c(1.0), &["V", "V"])]).unwrap()
    }

    fn single(amps: [Complex64; 2]) -> StateVector {
        StateVector::single(Subsystem::polarization("a"), &amps).unwrap()
    }

    #[test]
    fn encoder_basis_states() {
        let h = encode(&single([c(1.0), c(0.0)]), "a").unwrap();
        assert_eq!(h.amplitude(&["H", "s"]).unwrap(), c(1.0));
        let v = encode(&single([c(0.0), c(1.0)]), "a").unwrap();
        assert_eq!(v.amplitude(&["H", "l"]).unwrap(), c(1.0));
    }

    #[test]
    fn encoder_on_bell_pair() {
        let s = encode(&encode(&bell_hv(), "a").unwrap(), "b").unwrap();
        let labels: Vec<&str> = s.register().labels().collect();
        assert_eq!(labels, ["a", "a.t", "b", "b.t"]);
        let h = FRAC_1_SQRT_2;
        assert!((s.amplitude(&["H", "s", "H", "s"]).unwrap() - h).norm() < 1e-15);
        assert!((s.amplitude(&["H", "l", "H", "l"]).unwrap() - h).norm() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn encoder_rejects_late_input() {
        let s = encode(&single([c(1.0), c(0.0)]), "a").unwrap();
        let late = apply_element(
            &s,
            &OpticalElement::Delay {
                on: "H".into(),
                stage: 0,
            },
            &["a", "a.t"],
        )
        .unwrap();
        assert!(matches!(encode(&late, "a"), Err(Error::Precondition(_))));
    }

    #[test]
    fn identity_noise() {
        let s = encode(&single([c(0.6), c(0.8)]), "a").unwrap();
        let out = apply_noise(&s, "a", &NoiseChannel::IDENTITY).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn noise_rotations_per_bin() {
        let s = encode(&single([c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]), "a").unwrap();
        let d = Complex64::new(0.6, 0.0);
        let e = Complex64::new(0.0, 0.8);
        let dl = Complex64::new(0.0, 1.0);
        let el = c(0.0);
        let ch = NoiseChannel::asymmetric(d, e, dl, el).unwrap();
        let out = apply_noise(&s, "a", &ch).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((out.amplitude(&["H", "s"]).unwrap() - d * h).norm() < 1e-15);
        assert!((out.amplitude(&["V", "s"]).unwrap() - e * h).norm() < 1e-15);
        assert!((out.amplitude(&["H", "l"]).unwrap() - dl * h).norm() < 1e-15);
        assert!((out.amplitude(&["V", "l"]).unwrap() - el * h).norm() < 1e-15);
    }

    #[test]
    fn non_unitary_noise_rejected() {
        assert!(NoiseChannel::symmetric(c(1.0), c(0.5)).is_err());
    }

    #[test]
    fn decoder_time_factor() {
        let d = Complex64::new(0.6, 0.0);
        let e = Complex64::from_polar(0.8, 0.4);
        let ch = NoiseChannel::symmetric(d, e).unwrap();
        let early = encode(&single([c(1.0), c(0.0)]), "a").unwrap();
        let out = decode(&apply_noise(&early, "a", &ch).unwrap(), "a").unwrap();
        let labels: Vec<&str> = out.register().labels().collect();
        assert_eq!(labels, ["a", "a.dir", "a.t"]);
        assert!((out.amplitude(&["V", "↓", "l′"]).unwrap() - d).norm() < 1e-15);
        assert!((out.amplitude(&["V", "↓", "s′"]).unwrap() - e).norm() < 1e-15);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-14);

        let late = encode(&single([c(0.0), c(1.0)]), "a").unwrap();
        let out = decode(&apply_noise(&late, "a", &ch).unwrap(), "a").unwrap();
        assert!((out.amplitude(&["H", "↑", "l′"]).unwrap() - d).norm() < 1e-15);
        assert!((out.amplitude(&["H", "↑", "s′"]).unwrap() - e).norm() < 1e-15);
    }

    #[test]
    fn decoder_on_bell_pair_factorizes() {
        let ca = NoiseChannel::from_angles(0.7, 1.1, 0.7, 1.1);
        let cb = NoiseChannel::from_angles(-0.3, 2.5, -0.3, 2.5);
        let mut s = encode(&encode(&bell_hv(), "a").unwrap(), "b").unwrap();
        s = apply_noise(&s, "a", &ca).unwrap();
        s = apply_noise(&s, "b", &cb).unwrap();
        s = decode(&decode(&s, "a").unwrap(), "b").unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-13);
        let rank = s
            .schmidt_rank(&["a", "a.dir", "b", "b.dir"], 1e-10)
            .unwrap();
        assert_eq!(rank, 1);
        // polarization part is (H↑H↑ + V↓V↓)/√2
        let time = [(ca.delta, "l′"), (ca.eta, "s′")];
        for (da, ta) in time {
            for (db, tb) in [(cb.delta, "l′"), (cb.eta, "s′")] {
                let hh = s.amplitude(&["H", "↑", ta, "H", "↑", tb]).unwrap();
                let vv = s.amplitude(&["V", "↓", ta, "V", "↓", tb]).unwrap();
                let want = da * db * FRAC_1_SQRT_2;
                assert!((hh - want).norm() < 1e-14);
                assert!((vv - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn noiseless_decoder_output_is_single_class() {
        let s = encode(&single([c(0.6), c(0.8)]), "a").unwrap();
        let out = decode(&s, "a").unwrap();
        let one = out.project("a.t", "l′").unwrap();
        assert!((one.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decoder_rejects_expanded_register() {
        let s = encode(&single([c(1.0), c(0.0)]), "a").unwrap();
        let once = decode_unmerged(&s, "a").unwrap();
        assert!(decode(&once, "a").is_err());
    }

    #[test]
    fn element_examples() {
        let h = single([c(1.0), c(0.0)]);
        let r = apply_element(&h, &OpticalElement::Qwp, &["a"]).unwrap();
        assert_eq!(r.amplitude(&["R"]).unwrap(), c(1.0));

        let path = StateVector::single(Subsystem::path("p", &["a1", "a2"]).unwrap(), &[c(1.0), c(0.0)])
            .unwrap();
        let split = apply_element(&path, &OpticalElement::BeamSplitter, &["p"]).unwrap();
        assert!((split.amplitude(&["a1"]).unwrap() - FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((split.amplitude(&["a2"]).unwrap() - FRAC_1_SQRT_2).norm() < 1e-15);

        let v = single([c(0.0), c(1.0)]);
        let phase = OpticalElement::Phase {
            level: "V".into(),
            angle: std::f64::consts::PI,
        };
        let out = apply_element(&v, &phase, &["a"]).unwrap();
        assert!((out.amplitude(&["V"]).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn kind_mismatch_rejected() {
        let s = StateVector::single(Subsystem::spin("e"), &[c(1.0), c(0.0)]).unwrap();
        assert!(matches!(
            apply_element(&s, &OpticalElement::Hwp, &["e"]),
            Err(Error::KindMismatch { .. })
        ));
        assert!(matches!(
            apply_element(&s, &OpticalElement::BeamSplitter, &["e"]),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn elements_preserve_norm() {
        let mut s = encode(&single([Complex64::new(0.3, 0.4), Complex64::new(0.0, (0.75f64).sqrt())]), "a")
            .unwrap();
        s = apply_noise(&s, "a", &NoiseChannel::from_angles(0.3, 0.2, 1.0, -0.4)).unwrap();
        s = decode(&s, "a").unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        s = apply_element(&s, &OpticalElement::Qwp, &["a"]).unwrap();
        s = apply_element(&s, &OpticalElement::Hwp, &["a"]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
