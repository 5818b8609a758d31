use num_complex::Complex64;
use proptest::prelude::*;

use qdrepeater::cavity::{resonant_coeffs, CavityParams, ScatterCoeffs};
use qdrepeater::interface::{direction_label, scatter};
use qdrepeater::metrics::distribution_metrics;
use qdrepeater::protocols::{
    bell_mixture, distribute_bell, pcd, phi, purify_analytic, purify_ensemble, purify_round,
    uniform_spins, ParityClass,
};
use qdrepeater::qcore::{Basis, Ensemble, Register, StateVector, Subsystem};
use qdrepeater::timebin::NoiseChannel;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coeffs(g: f64, ks: f64, gamma: f64, delta: f64) -> ScatterCoeffs {
    resonant_coeffs(&CavityParams::new(g, ks).with_gamma(gamma), delta).unwrap()
}

fn unit(amps: &[(f64, f64)]) -> Vec<Complex64> {
    let n = amps.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    amps.iter().map(|&(re, im)| c(re / n, im / n)).collect()
}

fn three_spins(amps: &[(f64, f64)]) -> StateVector {
    let reg = Register::new(vec![
        Subsystem::spin("a"),
        Subsystem::spin("b"),
        Subsystem::spin("c"),
    ])
    .unwrap();
    StateVector::from_amplitudes(reg, unit(amps)).unwrap()
}

fn amps(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measurement_is_complete(v in amps(8)) {
        let s = three_spins(&v);
        for targets in [&["a"][..], &["b", "c"], &["a", "b", "c"]] {
            let outcomes = s.measure(targets, &Basis::Computational).unwrap();
            let total: f64 = outcomes.iter().map(|o| o.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for o in &outcomes {
                prop_assert!(o.state.is_normalized());
            }
        }
    }

    #[test]
    fn measuring_a_factor_leaves_the_rest(x in amps(2), y in amps(4)) {
        let a = StateVector::single(Subsystem::spin("a"), &unit(&x)).unwrap();
        let reg = Register::new(vec![Subsystem::spin("b"), Subsystem::spin("c")]).unwrap();
        let b = StateVector::from_amplitudes(reg, unit(&y)).unwrap();
        let joint = a.tensor(&b).unwrap();
        for o in joint.measure(&["a"], &Basis::Computational).unwrap() {
            prop_assert!(o.state.approx_eq_up_to_phase(&b, 1e-10));
        }
    }

    #[test]
    fn fidelity_is_affine_in_mixtures(v in amps(8), u in amps(8), w in 0.0..1.0f64) {
        let (a, b) = (three_spins(&v), three_spins(&u));
        let target = three_spins(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0),
                                   (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let (ea, eb) = (Ensemble::pure(a).unwrap(), Ensemble::pure(b).unwrap());
        let mixed = Ensemble::mix(w, &ea, &eb).unwrap();
        let lhs = mixed.fidelity(&target).unwrap();
        let rhs = w * ea.fidelity(&target).unwrap() + (1.0 - w) * eb.fidelity(&target).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn scattering_never_gains_norm(g in 0.0..3.0f64, ks in 0.0..0.3f64, delta in -2.0..2.0f64,
                                   p in amps(2), s in amps(2)) {
        let k = coeffs(g, ks, 0.1, delta);
        let photon = StateVector::single(Subsystem::circular("x"), &unit(&p))
            .unwrap()
            .insert_subsystem(1, Subsystem::direction(direction_label("x")), "↑").unwrap();
        let spin = StateVector::single(Subsystem::spin("e"), &unit(&s)).unwrap();
        let out = scatter(&photon.tensor(&spin).unwrap(), "x", "e", &k).unwrap();
        prop_assert!(out.norm_sqr() <= 1.0 + 1e-12);
        let ideal = scatter(&photon.tensor(&spin).unwrap(), "x", "e", &ScatterCoeffs::IDEAL).unwrap();
        prop_assert!((ideal.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn heralded_fidelity_ignores_collective_noise(th in 0.0..3.2f64, ph in -3.2..3.2f64, al in -3.2..3.2f64) {
        let noise = NoiseChannel::symmetric(Complex64::from_polar(th.cos(), al), Complex64::from_polar(th.sin(), ph)).unwrap();
        let k = coeffs(1.2, 0.2, 0.1, 0.0);
        let noisy = distribute_bell(&noise, &noise, &k, &k).unwrap();
        let clean = distribute_bell(&NoiseChannel::IDENTITY, &NoiseChannel::IDENTITY, &k, &k).unwrap();
        for (a, b) in noisy.outcomes.iter().zip(&clean.outcomes) {
            prop_assert!((a.probability - b.probability).abs() < 1e-12);
            match (a.fidelity, b.fidelity) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-10),
                (x, y) => prop_assert_eq!(x.is_some(), y.is_some()),
            }
        }
    }

    #[test]
    fn protocols_account_for_every_photon(g in 0.2..3.0f64, ks in 0.0..0.3f64, gamma in 0.05..0.5f64, delta in -1.0..1.0f64) {
        let k = coeffs(g, ks, gamma, delta);
        let d = distribute_bell(&NoiseChannel::from_angles(0.4, 0.2, 0.4, 0.2), &NoiseChannel::IDENTITY, &k, &k).unwrap();
        prop_assert!(d.completeness_error() < 1e-10);
        let p = pcd(&uniform_spins(&["e1", "e2"]).unwrap(), "e1", "e2", &k).unwrap();
        prop_assert!(p.completeness_error() < 1e-10);
        let step = purify_ensemble(&bell_mixture("e_a", "e_b", 0.8).unwrap(), &k, &k).unwrap();
        let total = step.success_probability + step.rejected_probability + step.lost_probability;
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn simulation_matches_closed_forms(g in 0.2..3.0f64, ks in 0.0..0.3f64) {
        let k = coeffs(g, ks, 0.1, 0.0);
        let m = distribution_metrics(&k).unwrap();
        let p = pcd(&uniform_spins(&["e1", "e2"]).unwrap(), "e1", "e2", &k).unwrap();
        prop_assert!((p.class_probability(ParityClass::Even) - m.eta_d_even).abs() < 1e-10);
        prop_assert!((p.class_probability(ParityClass::Odd) - m.eta_d_odd).abs() < 1e-10);
        prop_assert!((p.class_fidelity(ParityClass::Even).unwrap() - m.f_even).abs() < 1e-10);
        prop_assert!((p.class_fidelity(ParityClass::Odd).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn purification_matches_recursion(mu in 0.0..1.0f64) {
        let (sim, failed) = purify_round(mu, &ScatterCoeffs::IDEAL).unwrap();
        let ana = purify_analytic(mu, 1).unwrap()[0];
        prop_assert!((sim.mu - ana.mu).abs() < 1e-10);
        prop_assert!((sim.success_probability - ana.success_probability).abs() < 1e-10);
        prop_assert!((failed + sim.success_probability - 1.0).abs() < 1e-10);
        if mu > 0.5 && mu < 1.0 - 1e-9 {
            prop_assert!(ana.mu > mu);
        }
    }
}

#[test]
fn purified_pair_is_the_target_bell_state() {
    let step = purify_ensemble(
        &bell_mixture("e_a", "e_b", 0.7).unwrap(),
        &ScatterCoeffs::IDEAL,
        &ScatterCoeffs::IDEAL,
    )
    .unwrap();
    let f = step
        .state
        .unwrap()
        .fidelity(&phi("e_a", "e_b", -1.0).unwrap())
        .unwrap();
    assert!((f - 0.8448275862068965).abs() < 1e-10);
}
