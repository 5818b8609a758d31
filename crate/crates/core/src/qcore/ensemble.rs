use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::state::StateVector;
use crate::qcore::TOL;

/// Weighted mixture of normalized pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, StateVector)>,
}

impl Ensemble {
    /// Build from weights and states; weights must be non-negative and sum to
    /// one within 1e-12, and every state must be normalized.
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("empty ensemble".into()));
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::InvalidParameter(format!(
                "ensemble weights sum to {total}"
            )));
        }
        for (w, s) in &members {
            if !(0.0..=1.0 + TOL).contains(w) {
                return Err(Error::InvalidParameter(format!("weight {w} outside [0,1]")));
            }
            if !s.is_normalized() {
                return Err(Error::InvalidParameter(format!(
                    "member state has norm² {}",
                    s.norm_sqr()
                )));
            }
            if s.register() != members[0].1.register() {
                return Err(Error::IncompatibleRegisters(
                    "ensemble members live on different registers".into(),
                ));
            }
        }
        Ok(Self { members })
    }

    pub fn pure(state: StateVector) -> Result<Self> {
        Self::new(vec![(1.0, state.normalized()?)])
    }

    /// Mixture from unnormalized branches; weights are proportional to each
    /// branch's norm². Zero-weight branches are dropped.
    pub fn from_branches(branches: Vec<StateVector>) -> Result<Self> {
        let total: f64 = branches.iter().map(StateVector::norm_sqr).sum();
        if total <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let members = branches
            .into_iter()
            .filter(|b| b.norm_sqr() > crate::qcore::PRUNE_TOL)
            .map(|b| Ok((b.norm_sqr() / total, b.normalized()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::renormalized(members)
    }

    /// Reduced state after discarding `labels`, unraveled in their
    /// computational basis.
    pub fn trace_out(state: &StateVector, labels: &[&str]) -> Result<Self> {
        if labels.is_empty() {
            return Self::pure(state.clone());
        }
        let reg = state.register();
        let positions = reg.positions(labels)?;
        let dims: Vec<usize> = positions.iter().map(|&p| reg.subsystems()[p].dim()).collect();
        let total: usize = dims.iter().product();
        let mut branches = Vec::with_capacity(total);
        for k in 0..total {
            let mut rem = k;
            let mut fixed = Vec::with_capacity(labels.len());
            for (j, &p) in positions.iter().enumerate().rev() {
                let level = reg.subsystems()[p].levels()[rem % dims[j]].as_str();
                rem /= dims[j];
                fixed.push((labels[j], level));
            }
            fixed.reverse();
            branches.push(state.project_many(&fixed)?);
        }
        Self::from_branches(branches)
    }

    /// Mixture `w·a + (1−w)·b`.
    pub fn mix(w: f64, a: &Ensemble, b: &Ensemble) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w}")));
        }
        let mut members: Vec<(f64, StateVector)> = a
            .members
            .iter()
            .map(|(x, s)| (w * x, s.clone()))
            .collect();
        members.extend(b.members.iter().map(|(x, s)| ((1.0 - w) * x, s.clone())));
        members.retain(|(x, _)| *x > 0.0);
        Self::new(members)
    }

    /// Weighted union of several ensembles; weights need not be normalized.
    pub fn combine(parts: &[(f64, Ensemble)]) -> Result<Self> {
        let members = parts
            .iter()
            .flat_map(|(w, e)| e.members.iter().map(move |(x, s)| (w * x, s.clone())))
            .filter(|(x, _)| *x > 0.0)
            .collect();
        Self::renormalized(members)
    }

    fn renormalized(mut members: Vec<(f64, StateVector)>) -> Result<Self> {
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if total <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        for (w, _) in &mut members {
            *w /= total;
        }
        Self::new(members)
    }

    /// The same mixed state with at most `dim` members: the eigenvectors of
    /// its density operator, weighted by the eigenvalues.
    pub fn compressed(&self) -> Result<Self> {
        let reg = self.register().clone();
        let d = reg.dim();
        let mut rho = DMatrix::<Complex64>::zeros(d, d);
        for (w, s) in &self.members {
            let v = DVector::from_column_slice(s.amplitudes());
            rho += (&v * v.adjoint()) * Complex64::new(*w, 0.0);
        }
        let eig = rho.symmetric_eigen();
        let mut members = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= crate::qcore::PRUNE_TOL {
                continue;
            }
            let col: Vec<Complex64> = eig.eigenvectors.column(k).iter().cloned().collect();
            let state = StateVector::from_amplitudes(reg.clone(), col)?.normalized()?;
            members.push((lambda, state));
        }
        Self::renormalized(members)
    }

    pub fn members(&self) -> &[(f64, StateVector)] {
        &self.members
    }

    /// The single member of a pure ensemble.
    pub fn as_pure(&self) -> Option<&StateVector> {
        match self.members.as_slice() {
            [(_, s)] => Some(s),
            _ => None,
        }
    }

    /// Apply a per-member transformation that keeps states normalized
    /// (unitaries, relabelings, reorderings).
    pub fn map_states<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&StateVector) -> Result<StateVector>,
    {
        let members = self
            .members
            .iter()
            .map(|(w, s)| Ok((*w, f(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    /// `Σ wᵢ |⟨target|ψᵢ⟩|²`.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64> {
        self.members
            .iter()
            .map(|(w, s)| Ok(w * fidelity(s, target)?))
            .sum()
    }

    pub fn register(&self) -> &crate::qcore::Register {
        self.members[0].1.register()
    }
}

/// `|⟨target|ψ⟩|² / ‖ψ‖²`, phase-insensitive. The candidate is reordered to
/// the target's subsystem order when both carry the same subsystems.
pub fn fidelity(state: &StateVector, target: &StateVector) -> Result<f64> {
    let n = state.norm_sqr();
    if n <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let tn = target.norm_sqr();
    if (tn - 1.0).abs() > TOL {
        return Err(Error::InvalidParameter(format!(
            "target state has norm² {tn}"
        )));
    }
    let aligned = state.aligned_to(target.register())?;
    let f = target.inner(&aligned)?.norm_sqr() / n;
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::register::levels::{DOWN, UP};
    use crate::qcore::{Register, Subsystem};
    use num_complex::Complex64;

    fn bell(sign: f64) -> StateVector {
        let reg = Register::new(vec![Subsystem::spin("a"), Subsystem::spin("b")]).unwrap();
        StateVector::superposition(
            reg,
            &[
                (Complex64::new(1.0, 0.0), &[UP, UP]),
                (Complex64::new(sign, 0.0), &[DOWN, DOWN]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bell_fidelities() {
        assert!((fidelity(&bell(-1.0), &bell(-1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&bell(-1.0), &bell(1.0)).unwrap() < 1e-15);
    }

    #[test]
    fn ensemble_fidelity() {
        let e = Ensemble::new(vec![(0.7, bell(-1.0)), (0.3, bell(1.0))]).unwrap();
        assert!((e.fidelity(&bell(-1.0)).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_norm_rejected() {
        let z = bell(-1.0).scaled(Complex64::new(0.0, 0.0));
        assert_eq!(fidelity(&z, &bell(-1.0)), Err(Error::ZeroNorm));
    }

    #[test]
    fn unnormalized_candidate_is_normalized() {
        let half = bell(-1.0).scaled(Complex64::new(0.5, 0.0));
        assert!((fidelity(&half, &bell(-1.0)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fidelity_aligns_subsystem_order() {
        let reg = Register::new(vec![Subsystem::spin("a"), Subsystem::spin("b")]).unwrap();
        let ud = StateVector::basis(reg, &[UP, DOWN]).unwrap();
        let du = ud.permute(&["b", "a"]).unwrap();
        assert!((fidelity(&du, &ud).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(Ensemble::new(vec![(0.6, bell(-1.0)), (0.6, bell(1.0))]).is_err());
        assert!(Ensemble::new(vec![(1.0, bell(-1.0).scaled(Complex64::new(2.0, 0.0)))]).is_err());
    }

    #[test]
    fn trace_out_bell_half() {
        let e = Ensemble::trace_out(&bell(-1.0), &["b"]).unwrap();
        assert_eq!(e.members().len(), 2);
        for (w, s) in e.members() {
            assert!((w - 0.5).abs() < 1e-15);
            assert_eq!(s.register().len(), 1);
        }
    }

    #[test]
    fn compression_keeps_fidelities() {
        let plus = bell(1.0);
        let minus = bell(-1.0);
        let e = Ensemble::new(vec![(0.25, plus.clone()), (0.25, plus.clone()), (0.5, minus.clone())])
            .unwrap();
        let c = e.compressed().unwrap();
        assert_eq!(c.members().len(), 2);
        for t in [&plus, &minus] {
            assert!((c.fidelity(t).unwrap() - e.fidelity(t).unwrap()).abs() < 1e-12);
        }
    }
}
