//! Photon-spin scattering at a spin-cavity unit.
//!
//! A photon is described by a circular polarization subsystem (levels R, L)
//! and a direction subsystem (↑ along the quantization axis, ↓ against it).
//! The direction subsystem of photon `x` is labeled `x.dir`.

use num_complex::Complex64;

use crate::cavity::ScatterCoeffs;
use crate::error::{Error, Result};
use crate::qcore::{levels, LinearMap, StateVector, SubsystemKind};

/// Label of the direction subsystem attached to `photon`.
pub fn direction_label(photon: &str) -> String {
    format!("{photon}.dir")
}

/// Index of `(polarization, direction, spin)` inside the 8-dimensional block,
/// with R/L, ↑/↓ and ↑/↓ in canonical order.
fn idx(pol: usize, dir: usize, spin: usize) -> usize {
    pol * 4 + dir * 2 + spin
}

const R: usize = 0;
const L: usize = 1;
const UP: usize = 0;
const DOWN: usize = 1;

/// The 8×8 scattering matrix on (polarization, direction, spin).
///
/// For spin ↑ the pair {R↑, L↓} sees the hot cavity and {R↓, L↑} the cold
/// one; spin ↓ swaps the roles. Reflection flips both polarization and
/// direction, transmission keeps both.
pub fn scatter_map(c: &ScatterCoeffs) -> Result<LinearMap> {
    c.validate()?;
    let zero = Complex64::new(0.0, 0.0);
    let mut m = nalgebra::DMatrix::from_element(8, 8, zero);
    let mut rule = |pol: usize, dir: usize, spin: usize, refl: Complex64, trans: Complex64| {
        let input = idx(pol, dir, spin);
        m[(idx(1 - pol, 1 - dir, spin), input)] = refl;
        m[(input, input)] = trans;
    };
    // spin ↑
    rule(R, UP, UP, c.r, c.t);
    rule(L, DOWN, UP, c.r, c.t);
    rule(R, DOWN, UP, c.r0, c.t0);
    rule(L, UP, UP, c.r0, c.t0);
    // spin ↓
    rule(R, UP, DOWN, c.r0, c.t0);
    rule(L, DOWN, DOWN, c.r0, c.t0);
    rule(R, DOWN, DOWN, c.r, c.t);
    rule(L, UP, DOWN, c.r, c.t);
    LinearMap::contraction(m)
}

/// Scatter `photon` off the spin `spin`. The photon must be in the circular
/// basis and carry a direction subsystem. Leak and noise amplitudes are
/// dropped, so the result is unnormalized for imperfect coefficients.
pub fn scatter(
    state: &StateVector,
    photon: &str,
    spin: &str,
    coeffs: &ScatterCoeffs,
) -> Result<StateVector> {
    let dir = direction_label(photon);
    let reg = state.register();
    if !reg.contains(&dir) {
        return Err(Error::Precondition(format!(
            "photon `{photon}` has no direction subsystem `{dir}`"
        )));
    }
    let pol = reg.get(photon)?;
    if pol.kind() != SubsystemKind::Polarization {
        return Err(Error::KindMismatch {
            label: photon.to_string(),
            expected: SubsystemKind::Polarization.to_string(),
            found: pol.kind().to_string(),
        });
    }
    if pol.levels() != [levels::R, levels::L] {
        return Err(Error::Precondition(format!(
            "photon `{photon}` must be in the circular (R, L) basis"
        )));
    }
    let d = reg.get(&dir)?;
    if d.levels() != [levels::UP, levels::DOWN] {
        return Err(Error::Precondition(format!(
            "`{dir}` is not a direction qubit"
        )));
    }
    let s = reg.get(spin)?;
    if s.kind() != SubsystemKind::Spin {
        return Err(Error::KindMismatch {
            label: spin.to_string(),
            expected: SubsystemKind::Spin.to_string(),
            found: s.kind().to_string(),
        });
    }
    state.apply_map(&scatter_map(coeffs)?, &[photon, &dir, spin])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{full_coeffs, resonant_coeffs, CavityParams};
    use crate::qcore::{Register, Subsystem};
    use proptest::prelude::*;

    fn register() -> Register {
        Register::new(vec![
            Subsystem::circular("p"),
            Subsystem::direction("p.dir"),
            Subsystem::spin("e"),
        ])
        .unwrap()
    }

    fn ket(pol: &str, dir: &str, spin: &str) -> StateVector {
        StateVector::basis(register(), &[pol, dir, spin]).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ideal_spin_up_rules() {
        let id = ScatterCoeffs::IDEAL;
        let out = scatter(&ket("R", "↑", "↑"), "p", "e", &id).unwrap();
        assert!(out.approx_eq_up_to_phase(&ket("L", "↓", "↑"), 1e-14));
        assert_eq!(out.amplitude(&["L", "↓", "↑"]).unwrap(), c(1.0));

        let out = scatter(&ket("R", "↓", "↑"), "p", "e", &id).unwrap();
        assert_eq!(out.amplitude(&["R", "↓", "↑"]).unwrap(), c(-1.0));
        assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ideal_spin_down_rules() {
        let id = ScatterCoeffs::IDEAL;
        let out = scatter(&ket("L", "↑", "↓"), "p", "e", &id).unwrap();
        assert_eq!(out.amplitude(&["R", "↓", "↓"]).unwrap(), c(1.0));
        let out = scatter(&ket("R", "↑", "↓"), "p", "e", &id).unwrap();
        assert_eq!(out.amplitude(&["R", "↑", "↓"]).unwrap(), c(-1.0));
        assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn practical_example() {
        let co = resonant_coeffs(&CavityParams::new(1.2, 0.2), 0.0).unwrap();
        let out = scatter(&ket("R", "↑", "↑"), "p", "e", &co).unwrap();
        let refl = out.amplitude(&["L", "↓", "↑"]).unwrap();
        let trans = out.amplitude(&["R", "↑", "↑"]).unwrap();
        assert!((refl - c(0.966555183946)).norm() < 1e-11);
        assert!((trans - c(-0.033444816054)).norm() < 1e-11);
    }

    #[test]
    fn missing_direction_rejected() {
        let reg = Register::new(vec![Subsystem::circular("p"), Subsystem::spin("e")]).unwrap();
        let s = StateVector::basis(reg, &["R", "↑"]).unwrap();
        assert!(matches!(
            scatter(&s, "p", "e", &ScatterCoeffs::IDEAL),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn linear_basis_rejected() {
        let reg = Register::new(vec![
            Subsystem::polarization("p"),
            Subsystem::direction("p.dir"),
            Subsystem::spin("e"),
        ])
        .unwrap();
        let s = StateVector::basis(reg, &["H", "↑", "↑"]).unwrap();
        assert!(scatter(&s, "p", "e", &ScatterCoeffs::IDEAL).is_err());
    }

    #[test]
    fn ideal_map_is_unitary() {
        assert!(scatter_map(&ScatterCoeffs::IDEAL).unwrap().is_unitary());
    }

    #[test]
    fn deficit_matches_leak_and_noise() {
        let p = CavityParams::new(1.2, 0.2).with_detuning(0.3);
        let co = resonant_coeffs(&p, 0.3).unwrap();
        let hot = full_coeffs(&p).unwrap();
        let cold = full_coeffs(&p.cold()).unwrap();
        // R↑ with spin ↑ couples to the dipole; R↓ with spin ↑ sees the cold cavity.
        let out = scatter(&ket("R", "↑", "↑"), "p", "e", &co).unwrap();
        assert!((1.0 - out.norm_sqr() - hot.lost_probability()).abs() < 1e-12);
        let out = scatter(&ket("R", "↓", "↑"), "p", "e", &co).unwrap();
        assert!((1.0 - out.norm_sqr() - cold.lost_probability()).abs() < 1e-12);
    }

    fn random_state(seed: &[f64]) -> StateVector {
        let amps: Vec<Complex64> = seed.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let s = StateVector::from_amplitudes(register(), amps.iter().map(|a| a * 0.1).collect())
            .unwrap();
        s.normalized().unwrap()
    }

    proptest! {
        #[test]
        fn ideal_preserves_norm(seed in prop::collection::vec(-1.0..1.0f64, 16)) {
            prop_assume!(seed.iter().any(|x| x.abs() > 1e-3));
            let s = random_state(&seed);
            let out = scatter(&s, "p", "e", &ScatterCoeffs::IDEAL).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn linear(a in prop::collection::vec(-1.0..1.0f64, 16),
                  b in prop::collection::vec(-1.0..1.0f64, 16),
                  g in 0.0..3.0f64, ks in 0.0..0.3f64) {
            prop_assume!(a.iter().any(|x| x.abs() > 1e-3) && b.iter().any(|x| x.abs() > 1e-3));
            let co = resonant_coeffs(&CavityParams::new(g, ks), 0.0).unwrap();
            let x = random_state(&a);
            let y = random_state(&b);
            let alpha = Complex64::new(0.6, 0.2);
            let beta = Complex64::new(-0.3, 0.7);
            let mixed = x.scaled(alpha).add(&y.scaled(beta)).unwrap();
            let lhs = scatter(&mixed, "p", "e", &co).unwrap();
            let rhs = scatter(&x, "p", "e", &co).unwrap().scaled(alpha)
                .add(&scatter(&y, "p", "e", &co).unwrap().scaled(beta)).unwrap();
            for (l, r) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
                prop_assert!((l - r).norm() < 1e-12);
            }
        }

        #[test]
        fn spin_populations_unchanged(g in 0.0..3.0f64, ks in 0.0..0.3f64,
                                      pol in 0usize..2, dir in 0usize..2, spin in 0usize..2) {
            let co = resonant_coeffs(&CavityParams::new(g, ks), 0.0).unwrap();
            let pols = ["R", "L"];
            let dirs = ["↑", "↓"];
            let spins = ["↑", "↓"];
            let s = ket(pols[pol], dirs[dir], spins[spin]);
            let out = scatter(&s, "p", "e", &co).unwrap().normalized().unwrap();
            let before = s.reduced_density(&["e"]).unwrap();
            let after = out.reduced_density(&["e"]).unwrap();
            prop_assert!((&before - &after).iter().all(|z| z.norm() < 1e-12));
        }
    }
}
