use super::pcd::merge_outcomes;
use super::{ghz, herald, pcd, Correction, Gate, HeraldedOutcome, ParityClass, Pattern, ProtocolRun};
use crate::cavity::ScatterCoeffs;
use crate::error::{Error, Result};
use crate::qcore::{levels, Ensemble, StateVector};

/// Join a GHZ state and a Bell pair sharing a node.
///
/// A parity check on the co-located spins `(z, z′)` is followed by Hadamards
/// on both and a measurement in {↑, ↓}. The far spin `d` of the Bell pair
/// gets σx after an odd parity and σz when the two results differ. The
/// target is `(|↑…↑⟩−|↓…↓⟩)/√2` over the GHZ spins without `z`, then `d`.
///
/// Returns 16 branches labeled `<detector>|<m_z><m_z′>`.
pub fn extend_chain(
    ghz_state: &StateVector,
    bell: &StateVector,
    joint: (&str, &str),
    coeffs: &ScatterCoeffs,
) -> Result<ProtocolRun> {
    let (z, zp) = joint;
    ghz_state.register().get(z)?;
    bell.register().get(zp)?;
    if bell.register().len() != 2 {
        return Err(Error::Precondition(format!(
            "Bell input must hold two spins, found {}",
            bell.register().len()
        )));
    }
    let d = bell
        .register()
        .labels()
        .find(|l| *l != zp)
        .ok_or_else(|| Error::UnknownLabel(zp.to_string()))?
        .to_string();
    let mut kept: Vec<&str> = ghz_state.register().labels().filter(|l| *l != z).collect();
    kept.push(&d);
    let target = ghz(&kept, -1.0)?;

    let joined = ghz_state.tensor(bell)?;
    let check = pcd(&joined, z, zp, coeffs)?;
    let h = Gate::H.map();
    let results = [
        (levels::UP, levels::UP),
        (levels::UP, levels::DOWN),
        (levels::DOWN, levels::UP),
        (levels::DOWN, levels::DOWN),
    ];

    let mut outcomes = Vec::with_capacity(16);
    for o in &check.outcomes {
        let patterns = results
            .iter()
            .map(|&(mz, mzp)| {
                let mut correction = Vec::new();
                if o.class == ParityClass::Odd {
                    correction.push(Correction::new(Gate::X, &d));
                }
                if mz != mzp {
                    correction.push(Correction::new(Gate::Z, &d));
                }
                Pattern {
                    detection: format!("{}|{mz}{mzp}", o.detection),
                    class: o.class,
                    levels: vec![mz.to_string(), mzp.to_string()],
                    correction,
                }
            })
            .collect::<Vec<_>>();
        match o.post_state.as_ref().and_then(Ensemble::as_pure) {
            Some(post) => {
                let rotated = post.apply_map(&h, &[z])?.apply_map(&h, &[zp])?;
                for mut branch in herald(&rotated, &[z, zp], patterns, &[], Some(&target))? {
                    branch.probability *= o.probability;
                    outcomes.push(branch);
                }
            }
            None => outcomes.extend(patterns.into_iter().map(|p| HeraldedOutcome {
                detection: p.detection,
                class: p.class,
                probability: 0.0,
                correction: p.correction,
                post_state: None,
                fidelity: None,
            })),
        }
    }
    Ok(ProtocolRun {
        outcomes,
        discarded_probability: check.discarded_probability,
        input_probability: check.input_probability,
        target: Some(target),
    })
}

/// [`extend_chain`] on mixed inputs: every pair of members is joined and the
/// branches are averaged with the product weights.
pub fn extend_ensembles(
    ghz_state: &Ensemble,
    bell: &Ensemble,
    joint: (&str, &str),
    coeffs: &ScatterCoeffs,
) -> Result<ProtocolRun> {
    let mut runs = Vec::new();
    for (wg, g) in ghz_state.members() {
        for (wb, b) in bell.members() {
            runs.push((wg * wb, extend_chain(g, b, joint, coeffs)?));
        }
    }
    let first = &runs[0].1;
    let outcomes = (0..first.outcomes.len())
        .map(|k| {
            let parts: Vec<(f64, &HeraldedOutcome)> =
                runs.iter().map(|(w, r)| (*w, &r.outcomes[k])).collect();
            let t = &first.outcomes[k];
            merge_outcomes(t.detection.clone(), t.class, &parts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtocolRun {
        outcomes,
        discarded_probability: runs.iter().map(|(w, r)| w * r.discarded_probability).sum(),
        input_probability: runs.iter().map(|(w, r)| w * r.input_probability).sum(),
        target: first.target.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{resonant_coeffs, CavityParams};
    use crate::protocols::{merge_by_parity, phi};

    const ID: ScatterCoeffs = ScatterCoeffs::IDEAL;

    #[test]
    fn bell_plus_bell() {
        let ab = phi("a", "b", -1.0).unwrap();
        let cd = phi("c", "d", -1.0).unwrap();
        let run = extend_chain(&ab, &cd, ("b", "c"), &ID).unwrap();
        assert_eq!(run.outcomes.len(), 16);
        assert!((run.heralded_probability() - 1.0).abs() < 1e-12);
        for o in run.outcomes.iter().filter(|o| o.probability > 0.0) {
            assert!((o.fidelity.unwrap() - 1.0).abs() < 1e-12, "{}", o.detection);
        }
        let labels: Vec<&str> = run.target.as_ref().unwrap().register().labels().collect();
        assert_eq!(labels, ["a", "d"]);
    }

    #[test]
    fn ghz3_plus_bell() {
        let g = ghz(&["a", "b", "z"], -1.0).unwrap();
        let bell = phi("z2", "d", -1.0).unwrap();
        let run = extend_chain(&g, &bell, ("z", "z2"), &ID).unwrap();
        assert_eq!(run.outcomes.len(), 16);
        assert!((run.heralded_probability() - 1.0).abs() < 1e-12);
        for o in &run.outcomes {
            assert!((o.probability - 1.0 / 16.0).abs() < 1e-12);
            assert!((o.fidelity.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn even_branch_before_measurement() {
        // the even-parity state right after the check is (|↑↑↑↑⟩−|↓↓↓↓⟩)/√2
        let ab = phi("a", "b", -1.0).unwrap();
        let cd = phi("c", "d", -1.0).unwrap();
        let check = pcd(&ab.tensor(&cd).unwrap(), "b", "c", &ID).unwrap();
        let even = merge_by_parity(&check).unwrap();
        let want = ghz(&["a", "b", "c", "d"], -1.0).unwrap();
        let post = even.outcomes[0].post_state.as_ref().unwrap();
        assert!((post.fidelity(&want).unwrap() - 1.0).abs() < 1e-12);
        assert!((even.outcomes[0].probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn practical_completeness() {
        let c = resonant_coeffs(&CavityParams::new(1.0, 0.15), 0.0).unwrap();
        let ab = phi("a", "b", -1.0).unwrap();
        let cd = phi("c", "d", -1.0).unwrap();
        let run = extend_chain(&ab, &cd, ("b", "c"), &c).unwrap();
        assert!(run.completeness_error() < 1e-12);
        assert!(run.discarded_probability > 0.0);
    }

    #[test]
    fn missing_joint_rejected() {
        let ab = phi("a", "b", -1.0).unwrap();
        let cd = phi("c", "d", -1.0).unwrap();
        assert!(extend_chain(&ab, &cd, ("x", "c"), &ID).is_err());
        assert!(extend_chain(&ab, &cd, ("b", "x"), &ID).is_err());
    }
}
