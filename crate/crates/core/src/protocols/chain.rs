use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{distribute_bell_between, extend_ensembles, phi, purify_ensemble};
use crate::cavity::{resonant_coeffs, CavityParams, ScatterCoeffs};
use crate::error::{Error, Result};
use crate::qcore::Ensemble;
use crate::timebin::NoiseChannel;

/// One repeater node: a spin-cavity unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub name: String,
    /// Use the ideal coefficients (r=1, t=0, r₀=0, t₀=−1) instead of `g`, `kappa_s`, ….
    #[serde(default)]
    pub ideal: bool,
    #[serde(default)]
    pub g: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default)]
    pub kappa_s: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub detuning: f64,
}

fn one() -> f64 {
    1.0
}

fn default_gamma() -> f64 {
    0.1
}

impl NodeSpec {
    pub fn ideal(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ideal: true,
            g: 0.0,
            kappa: 1.0,
            kappa_s: 0.0,
            gamma: 0.1,
            detuning: 0.0,
        }
    }

    pub fn practical(name: &str, g: f64, kappa_s: f64) -> Self {
        Self {
            ideal: false,
            g,
            kappa_s,
            ..Self::ideal(name)
        }
    }

    pub fn coeffs(&self) -> Result<ScatterCoeffs> {
        if self.ideal {
            return Ok(ScatterCoeffs::IDEAL);
        }
        let p = CavityParams {
            g: self.g,
            kappa: self.kappa,
            kappa_s: self.kappa_s,
            gamma: self.gamma,
            detuning: self.detuning,
            trion_detuning: 0.0,
        };
        resonant_coeffs(&p, self.detuning)
    }
}

/// Fiber rotation angles: `δ = cos θ`, `η = e^{iφ} sin θ`. Late-bin angles
/// default to the early ones (collective noise).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub theta_late: Option<f64>,
    #[serde(default)]
    pub phi_late: Option<f64>,
}

impl NoiseSpec {
    pub fn channel(&self) -> Result<NoiseChannel> {
        let vals = [
            self.theta,
            self.phi,
            self.theta_late.unwrap_or(0.0),
            self.phi_late.unwrap_or(0.0),
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite noise angle".into()));
        }
        Ok(NoiseChannel::from_angles(
            self.theta,
            self.phi,
            self.theta_late.unwrap_or(self.theta),
            self.phi_late.unwrap_or(self.phi),
        ))
    }
}

/// Elementary link between two adjacent nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub noise_left: NoiseSpec,
    #[serde(default)]
    pub noise_right: NoiseSpec,
}

/// A linear repeater chain: segments listed left to right, each sharing its
/// left node with the previous segment's right node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub nodes: Vec<NodeSpec>,
    pub segments: Vec<SegmentSpec>,
    /// Purification rounds applied to every segment before extension.
    #[serde(default)]
    pub purification_rounds: usize,
    /// Photon input-coupling efficiency η_in, if modeled.
    #[serde(default)]
    pub input_coupling: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub name: String,
    /// Success probability of this stage alone.
    pub probability: f64,
    /// Fidelity of the stage output against its target.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    /// Spins holding the final pair.
    pub endpoints: (String, String),
    /// Fidelity against `(|↑↑⟩−|↓↓⟩)/√2` on the endpoints.
    pub fidelity: f64,
    /// Probability that every stage succeeds.
    pub probability: f64,
    pub stages: Vec<StageReport>,
}

impl Scenario {
    /// Check names, wiring and numeric ranges.
    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for n in &self.nodes {
            if n.name.is_empty() || n.name.contains(':') {
                return Err(Error::InvalidParameter(format!(
                    "invalid node name `{}`",
                    n.name
                )));
            }
            if !names.insert(n.name.as_str()) {
                return Err(Error::DuplicateLabel(n.name.clone()));
            }
            n.coeffs()?;
        }
        if self.segments.is_empty() {
            return Err(Error::InvalidParameter("scenario has no segments".into()));
        }
        let mut visited = HashSet::new();
        for (i, seg) in self.segments.iter().enumerate() {
            for end in [&seg.left, &seg.right] {
                if !names.contains(end.as_str()) {
                    return Err(Error::UnknownLabel(end.clone()));
                }
            }
            if seg.left == seg.right {
                return Err(Error::InvalidParameter(format!(
                    "segment {i} connects `{}` to itself",
                    seg.left
                )));
            }
            if i > 0 && self.segments[i - 1].right != seg.left {
                return Err(Error::InvalidParameter(format!(
                    "segment {i} starts at `{}` but segment {} ends at `{}`",
                    seg.left,
                    i - 1,
                    self.segments[i - 1].right
                )));
            }
            if i == 0 {
                visited.insert(seg.left.as_str());
            }
            if !visited.insert(seg.right.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "node `{}` appears twice along the chain",
                    seg.right
                )));
            }
            seg.noise_left.channel()?;
            seg.noise_right.channel()?;
        }
        if let Some(unused) = self.nodes.iter().find(|n| !visited.contains(n.name.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "node `{}` is not connected to any segment",
                unused.name
            )));
        }
        if let Some(eta) = self.input_coupling {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "input_coupling must be in (0, 1], got {eta}"
                )));
            }
        }
        Ok(())
    }

    fn node(&self, name: &str) -> &NodeSpec {
        self.nodes.iter().find(|n| n.name == name).expect("validated")
    }
}

/// Run a chain: distribute a pair on every segment, purify each for the
/// configured number of rounds, then join the segments left to right with
/// parity-check extensions at the intermediate nodes.
///
/// A node's spins are labeled `<node>:0` (toward the left) and `<node>:1`.
/// Each purification round consumes two pairs, so a segment's probability
/// `P` becomes `P²·s` for round success `s`. The chain probability is the
/// product of the segment probabilities and the extension probabilities.
/// With `input_coupling` set, distribution stages are scaled by η_in² and
/// each parity check by η_in.
pub fn run_chain(scenario: &Scenario) -> Result<ChainReport> {
    scenario.validate()?;
    let eta_in = scenario.input_coupling.unwrap_or(1.0);
    let mut stages = Vec::new();
    let mut pairs: Vec<(Ensemble, f64)> = Vec::with_capacity(scenario.segments.len());

    for (i, seg) in scenario.segments.iter().enumerate() {
        let left = scenario.node(&seg.left);
        let right = scenario.node(&seg.right);
        let (cl, cr) = (left.coeffs()?, right.coeffs()?);
        let spin_l = format!("{}:{}", seg.left, if i == 0 { 0 } else { 1 });
        let spin_r = format!("{}:0", seg.right);
        let target = phi(&spin_l, &spin_r, -1.0)?;
        let run = distribute_bell_between(
            &spin_l,
            &spin_r,
            &seg.noise_left.channel()?,
            &seg.noise_right.channel()?,
            &cl,
            &cr,
        )?;
        let mut pair = run.heralded_ensemble()?.compressed()?;
        let mut p = run.heralded_probability() * eta_in * eta_in;
        stages.push(StageReport {
            name: format!("distribute {}-{}", seg.left, seg.right),
            probability: p,
            fidelity: pair.fidelity(&target)?,
        });
        for round in 1..=scenario.purification_rounds {
            let step = purify_ensemble(&pair, &cl, &cr)?;
            let s = step.success_probability * eta_in * eta_in;
            pair = step
                .state
                .ok_or_else(|| {
                    Error::Precondition(format!(
                        "purification round {round} on {}-{} never succeeds",
                        seg.left, seg.right
                    ))
                })?
                .compressed()?;
            p = p * p * s;
            stages.push(StageReport {
                name: format!("purify {}-{} round {round}", seg.left, seg.right),
                probability: s,
                fidelity: pair.fidelity(&target)?,
            });
        }
        pairs.push((pair, p));
    }

    let mut pairs = pairs.into_iter();
    let (mut current, mut probability) = pairs.next().expect("validated non-empty");
    let first = format!("{}:0", scenario.segments[0].left);
    for (seg, (pair, p)) in scenario.segments.iter().skip(1).zip(pairs) {
        let node = scenario.node(&seg.left);
        let z = format!("{}:0", seg.left);
        let zp = format!("{}:1", seg.left);
        let run = extend_ensembles(&current, &pair, (&z, &zp), &node.coeffs()?)?;
        let q = run.heralded_probability() * eta_in;
        current = run.heralded_ensemble()?.compressed()?;
        probability *= p * q;
        let target = run.target.as_ref().expect("extension declares a target");
        stages.push(StageReport {
            name: format!("extend at {}", seg.left),
            probability: q,
            fidelity: current.fidelity(target)?,
        });
    }
    let last = format!("{}:0", scenario.segments.last().expect("non-empty").right);
    let fidelity = current.fidelity(&phi(&first, &last, -1.0)?)?;
    Ok(ChainReport {
        endpoints: (first, last),
        fidelity,
        probability,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(l: &str, r: &str) -> SegmentSpec {
        SegmentSpec {
            left: l.into(),
            right: r.into(),
            noise_left: NoiseSpec {
                theta: 0.3,
                phi: 1.0,
                ..NoiseSpec::default()
            },
            noise_right: NoiseSpec::default(),
        }
    }

    fn scenario(nodes: Vec<NodeSpec>, segments: Vec<SegmentSpec>) -> Scenario {
        Scenario {
            nodes,
            segments,
            purification_rounds: 0,
            input_coupling: None,
        }
    }

    #[test]
    fn single_ideal_segment() {
        let s = scenario(
            vec![NodeSpec::ideal("A"), NodeSpec::ideal("B")],
            vec![segment("A", "B")],
        );
        let r = run_chain(&s).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        assert!((r.probability - 1.0).abs() < 1e-12);
        assert_eq!(r.endpoints, ("A:0".to_string(), "B:0".to_string()));
    }

    #[test]
    fn two_ideal_segments() {
        let s = scenario(
            vec![NodeSpec::ideal("A"), NodeSpec::ideal("B"), NodeSpec::ideal("C")],
            vec![segment("A", "B"), segment("B", "C")],
        );
        let r = run_chain(&s).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        assert!((r.probability - 1.0).abs() < 1e-12);
        assert_eq!(r.stages.len(), 3);
    }

    #[test]
    fn practical_segment_efficiency() {
        let s = scenario(
            vec![
                NodeSpec::practical("A", 1.2, 0.2),
                NodeSpec::practical("B", 1.2, 0.2),
            ],
            vec![segment("A", "B")],
        );
        let r = run_chain(&s).unwrap();
        assert!((r.probability - 0.770058223136336).abs() < 1e-12);
        let with_coupling = Scenario {
            input_coupling: Some(0.9),
            ..s
        };
        let r = run_chain(&with_coupling).unwrap();
        assert!((r.probability - 0.770058223136336 * 0.81).abs() < 1e-12);
    }

    #[test]
    fn wiring_errors() {
        let nodes = vec![NodeSpec::ideal("A"), NodeSpec::ideal("B"), NodeSpec::ideal("C")];
        let broken = scenario(nodes.clone(), vec![segment("A", "B"), segment("C", "A")]);
        assert!(run_chain(&broken).is_err());
        let unknown = scenario(nodes.clone(), vec![segment("A", "X")]);
        assert!(matches!(run_chain(&unknown), Err(Error::UnknownLabel(_))));
        let unused = scenario(nodes.clone(), vec![segment("A", "B")]);
        assert!(run_chain(&unused).is_err());
        let looped = scenario(nodes[..2].to_vec(), vec![segment("A", "B"), segment("B", "A")]);
        assert!(run_chain(&looped).is_err());
        let dup = scenario(
            vec![NodeSpec::ideal("A"), NodeSpec::ideal("A")],
            vec![segment("A", "A")],
        );
        assert!(matches!(run_chain(&dup), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn purification_stage_on_asymmetric_segment() {
        let mut seg = segment("A", "B");
        seg.noise_left.theta_late = Some(0.9);
        let s = Scenario {
            purification_rounds: 1,
            ..scenario(vec![NodeSpec::ideal("A"), NodeSpec::ideal("B")], vec![seg])
        };
        let r = run_chain(&s).unwrap();
        assert_eq!(r.stages.len(), 2);
        assert!(r.stages[1].fidelity >= r.stages[0].fidelity - 1e-12);
    }
}
