use std::fmt;

use crate::error::{Error, Result};

/// Physical role of a subsystem. Direction-of-propagation qubits and spatial
/// modes are both [`SubsystemKind::Path`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsystemKind {
    Polarization,
    TimeBin,
    Path,
    Spin,
}

impl fmt::Display for SubsystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SubsystemKind::Polarization => "polarization",
            SubsystemKind::TimeBin => "timebin",
            SubsystemKind::Path => "path",
            SubsystemKind::Spin => "spin",
        };
        f.write_str(s)
    }
}

/// Canonical level names.
pub mod levels {
    pub const H: &str = "H";
    pub const V: &str = "V";
    pub const R: &str = "R";
    pub const L: &str = "L";
    pub const UP: &str = "↑";
    pub const DOWN: &str = "↓";
    pub const EARLY: &str = "s";
    pub const LATE: &str = "l";
    pub const EARLY_CLASS: &str = "s′";
    pub const LATE_CLASS: &str = "l′";
}

/// One named factor of a composite Hilbert space, with labeled basis levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    label: String,
    kind: SubsystemKind,
    levels: Vec<String>,
}

impl Subsystem {
    pub fn new<S: Into<String>>(label: S, kind: SubsystemKind, levels: &[&str]) -> Result<Self> {
        let label = label.into();
        let levels: Vec<String> = levels.iter().map(|s| s.to_string()).collect();
        validate(&label, kind, &levels)?;
        Ok(Self {
            label,
            kind,
            levels,
        })
    }

    /// Linear polarization qubit in the (H, V) basis.
    pub fn polarization<S: Into<String>>(label: S) -> Self {
        Self::new(label, SubsystemKind::Polarization, &[levels::H, levels::V]).unwrap()
    }

    /// Circular polarization qubit in the (R, L) basis.
    pub fn circular<S: Into<String>>(label: S) -> Self {
        Self::new(label, SubsystemKind::Polarization, &[levels::R, levels::L]).unwrap()
    }

    /// Electron spin qubit in the (↑, ↓) basis.
    pub fn spin<S: Into<String>>(label: S) -> Self {
        Self::new(label, SubsystemKind::Spin, &[levels::UP, levels::DOWN]).unwrap()
    }

    /// Propagation direction along/against the quantization axis.
    pub fn direction<S: Into<String>>(label: S) -> Self {
        Self::new(label, SubsystemKind::Path, &[levels::UP, levels::DOWN]).unwrap()
    }

    /// Early/late time-bin qubit.
    pub fn time_bin<S: Into<String>>(label: S) -> Self {
        Self::new(label, SubsystemKind::TimeBin, &[levels::EARLY, levels::LATE]).unwrap()
    }

    pub fn path<S: Into<String>>(label: S, modes: &[&str]) -> Result<Self> {
        Self::new(label, SubsystemKind::Path, modes)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> SubsystemKind {
        self.kind
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, level: &str) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| l == level)
            .ok_or_else(|| Error::UnknownLevel {
                label: self.label.clone(),
                level: level.to_string(),
            })
    }

    pub(crate) fn with_levels(&self, levels: Vec<String>) -> Result<Self> {
        validate(&self.label, self.kind, &levels)?;
        Ok(Self {
            label: self.label.clone(),
            kind: self.kind,
            levels,
        })
    }
}

fn validate(label: &str, kind: SubsystemKind, levels: &[String]) -> Result<()> {
    if label.is_empty() {
        return Err(Error::InvalidSubsystem("empty label".into()));
    }
    let dim = levels.len();
    let ok = match kind {
        SubsystemKind::Polarization | SubsystemKind::Spin => dim == 2,
        SubsystemKind::TimeBin => (2..=8).contains(&dim),
        SubsystemKind::Path => dim >= 2,
    };
    if !ok {
        return Err(Error::InvalidSubsystem(format!(
            "{label}: {kind} subsystem cannot have dimension {dim}"
        )));
    }
    for (i, l) in levels.iter().enumerate() {
        if levels[..i].contains(l) {
            return Err(Error::InvalidSubsystem(format!(
                "{label}: repeated level `{l}`"
            )));
        }
    }
    Ok(())
}

/// Ordered list of subsystems; Kronecker ordering follows list order with the
/// last subsystem varying fastest.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Register {
    subsystems: Vec<Subsystem>,
}

impl Register {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        for (i, s) in subsystems.iter().enumerate() {
            if subsystems[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
        }
        Ok(Self { subsystems })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(Subsystem::dim).product()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|s| s.label.as_str())
    }

    pub fn contains(&self, label: &str) -> bool {
        self.subsystems.iter().any(|s| s.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn get(&self, label: &str) -> Result<&Subsystem> {
        Ok(&self.subsystems[self.position(label)?])
    }

    /// Row-major strides, one per subsystem.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.subsystems.len()];
        for i in (0..self.subsystems.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.subsystems[i + 1].dim();
        }
        strides
    }

    /// Per-subsystem level indices of a flat basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.subsystems.len()];
        for (i, s) in self.subsystems.iter().enumerate().rev() {
            out[i] = index % s.dim();
            index /= s.dim();
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.subsystems)
            .fold(0, |acc, (d, s)| acc * s.dim() + d)
    }

    /// Flat index of a basis state given one level name per subsystem.
    pub fn index_of_levels(&self, levels: &[&str]) -> Result<usize> {
        if levels.len() != self.subsystems.len() {
            return Err(Error::DimensionMismatch {
                expected: self.subsystems.len(),
                found: levels.len(),
            });
        }
        let digits = self
            .subsystems
            .iter()
            .zip(levels)
            .map(|(s, l)| s.level_index(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.index_of(&digits))
    }

    pub fn concat(&self, other: &Register) -> Result<Register> {
        let mut subsystems = self.subsystems.clone();
        subsystems.extend(other.subsystems.iter().cloned());
        Register::new(subsystems)
    }

    pub(crate) fn replace(&self, label: &str, subsystem: Subsystem) -> Result<Register> {
        let pos = self.position(label)?;
        let mut subsystems = self.subsystems.clone();
        subsystems[pos] = subsystem;
        Register::new(subsystems)
    }

    pub(crate) fn without(&self, labels: &[&str]) -> Register {
        Register {
            subsystems: self
                .subsystems
                .iter()
                .filter(|s| !labels.contains(&s.label.as_str()))
                .cloned()
                .collect(),
        }
    }

    /// Resolve target labels into positions, rejecting unknown or repeated ones.
    pub(crate) fn positions(&self, targets: &[&str]) -> Result<Vec<usize>> {
        if targets.is_empty() {
            return Err(Error::EmptyTargets);
        }
        let mut out = Vec::with_capacity(targets.len());
        for t in targets {
            let p = self.position(t)?;
            if out.contains(&p) {
                return Err(Error::DuplicateLabel(t.to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Flat offsets of every joint configuration of `positions` (in target
    /// order, last target fastest), plus the list of base indices where all
    /// target digits are zero.
    pub(crate) fn target_layout(&self, positions: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &p in positions {
            let d = self.subsystems[p].dim();
            let mut next = Vec::with_capacity(offsets.len() * d);
            for o in &offsets {
                for k in 0..d {
                    next.push(o + k * strides[p]);
                }
            }
            offsets = next;
        }
        let dims: Vec<(usize, usize)> = positions
            .iter()
            .map(|&p| (strides[p], self.subsystems[p].dim()))
            .collect();
        let bases = (0..self.dim())
            .filter(|&i| dims.iter().all(|&(st, d)| (i / st) % d == 0))
            .collect();
        (offsets, bases)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_labels() {
        let r = Register::new(vec![Subsystem::spin("e"), Subsystem::spin("e")]);
        assert_eq!(r, Err(Error::DuplicateLabel("e".into())));
    }

    #[test]
    fn dimension_rules() {
        assert!(Subsystem::new("p", SubsystemKind::Polarization, &["H", "V", "D"]).is_err());
        assert!(Subsystem::new("t", SubsystemKind::TimeBin, &["a"; 1]).is_err());
        let levels = ["1", "2", "3", "4", "5", "6", "7", "8"];
        assert!(Subsystem::new("t", SubsystemKind::TimeBin, &levels).is_ok());
        let mut nine = levels.to_vec();
        nine.push("9");
        assert!(Subsystem::new("t", SubsystemKind::TimeBin, &nine).is_err());
        assert!(Subsystem::new("t", SubsystemKind::Spin, &["u", "u"]).is_err());
    }

    #[test]
    fn digits_round_trip() {
        let r = Register::new(vec![
            Subsystem::spin("a"),
            Subsystem::path("p", &["x", "y", "z"]).unwrap(),
            Subsystem::spin("b"),
        ])
        .unwrap();
        assert_eq!(r.dim(), 12);
        assert_eq!(r.strides(), vec![6, 2, 1]);
        for i in 0..r.dim() {
            assert_eq!(r.index_of(&r.digits(i)), i);
        }
        assert_eq!(r.index_of_levels(&["↓", "y", "↑"]).unwrap(), 8);
    }
}
