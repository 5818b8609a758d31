use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::map::LinearMap;
use crate::qcore::register::{Register, Subsystem};
use crate::qcore::{PRUNE_TOL, TOL};

/// Complex amplitudes over a labeled composite register.
///
/// States are not forced to unit norm: after a heralded (non-unitary) map the
/// squared norm is the probability of the branch that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    register: Register,
    amplitudes: Vec<Complex64>,
}

/// Measurement basis for [`StateVector::measure`].
#[derive(Debug, Clone)]
pub enum Basis {
    Computational,
    /// Apply the unitary to the targets, then measure computationally. Outcome
    /// `j` therefore corresponds to the basis vector `U†|j⟩`.
    Rotated(LinearMap),
}

/// One branch of a projective measurement.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Concatenated level names of the measured subsystems.
    pub label: String,
    pub levels: Vec<String>,
    /// Absolute branch probability; sums to the input norm² over outcomes.
    pub probability: f64,
    /// Normalized post-measurement state with the measured subsystems removed.
    pub state: StateVector,
}

impl StateVector {
    pub fn from_amplitudes(register: Register, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                found: amplitudes.len(),
            });
        }
        let s = Self {
            register,
            amplitudes,
        };
        if s.norm_sqr() > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "state norm² {} exceeds one",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    /// Computational basis state, one level name per subsystem.
    pub fn basis(register: Register, levels: &[&str]) -> Result<Self> {
        let idx = register.index_of_levels(levels)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); register.dim()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Single-subsystem state from its amplitudes.
    pub fn single(subsystem: Subsystem, amplitudes: &[Complex64]) -> Result<Self> {
        Self::from_amplitudes(Register::new(vec![subsystem])?, amplitudes.to_vec())
    }

    /// Normalized superposition `Σ cᵢ |levelsᵢ⟩`.
    pub fn superposition(register: Register, terms: &[(Complex64, &[&str])]) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); register.dim()];
        for (c, levels) in terms {
            amplitudes[register.index_of_levels(levels)?] += c;
        }
        Self {
            register,
            amplitudes,
        }
        .normalized()
    }

    /// State of zero-dimensional register carrying a scalar amplitude.
    pub fn scalar(amplitude: Complex64) -> Self {
        Self {
            register: Register::empty(),
            amplitudes: vec![amplitude],
        }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, levels: &[&str]) -> Result<Complex64> {
        Ok(self.amplitudes[self.register.index_of_levels(levels)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= PRUNE_TOL * PRUNE_TOL {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            register: self.register.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
        }
    }

    /// Amplitude-wise sum of two states over the same register.
    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.check_same_register(other)?;
        Ok(Self {
            register: self.register.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_register(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_same_register(&self, other: &StateVector) -> Result<()> {
        if self.register != other.register {
            return Err(Error::IncompatibleRegisters(format!(
                "[{}] vs [{}]",
                self.register.labels().collect::<Vec<_>>().join(","),
                other.register.labels().collect::<Vec<_>>().join(",")
            )));
        }
        Ok(())
    }

    /// Kronecker product; the combined register is `self` followed by `other`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let register = self.register.concat(&other.register)?;
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Apply `map` to the listed subsystems (in that Kronecker order), acting
    /// as identity elsewhere. Lossy maps leave the result unnormalized.
    pub fn apply_map(&self, map: &LinearMap, targets: &[&str]) -> Result<Self> {
        let positions = self.register.positions(targets)?;
        let (offsets, bases) = self.register.target_layout(&positions);
        if offsets.len() != map.dim() {
            return Err(Error::DimensionMismatch {
                expected: offsets.len(),
                found: map.dim(),
            });
        }
        let m = map.matrix();
        let n = offsets.len();
        // most optical elements are permutations or nearly so
        let rows: Vec<Vec<(usize, Complex64)>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| m[(i, j)] != Complex64::new(0.0, 0.0))
                    .map(|j| (offsets[j], m[(i, j)]))
                    .collect()
            })
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for base in bases {
            for (row, o) in rows.iter().zip(&offsets) {
                out[base + o] = row
                    .iter()
                    .map(|&(src, v)| v * self.amplitudes[base + src])
                    .sum();
            }
        }
        Ok(Self {
            register: self.register.clone(),
            amplitudes: out,
        })
    }

    /// Unnormalized component with `label` in `level`; the subsystem is removed.
    pub fn project(&self, label: &str, level: &str) -> Result<Self> {
        self.project_many(&[(label, level)])
    }

    /// Project several subsystems at once and drop them from the register.
    pub fn project_many(&self, fixed: &[(&str, &str)]) -> Result<Self> {
        let labels: Vec<&str> = fixed.iter().map(|(l, _)| *l).collect();
        let positions = self.register.positions(&labels)?;
        let mut wanted = Vec::with_capacity(fixed.len());
        for (&(_, level), &p) in fixed.iter().zip(&positions) {
            wanted.push((p, self.register.subsystems()[p].level_index(level)?));
        }
        let register = self.register.without(&labels);
        let strides = self.register.strides();
        let dims: Vec<usize> = self.register.subsystems().iter().map(Subsystem::dim).collect();
        let wanted: Vec<(usize, usize, usize)> = wanted
            .into_iter()
            .map(|(p, l)| (strides[p], dims[p], l))
            .collect();
        let mut amplitudes = Vec::with_capacity(register.dim());
        for (i, a) in self.amplitudes.iter().enumerate() {
            if wanted.iter().all(|&(st, d, l)| (i / st) % d == l) {
                amplitudes.push(*a);
            }
        }
        debug_assert_eq!(amplitudes.len(), register.dim());
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Remove a subsystem known to sit in `level`; rejects if any amplitude
    /// lives outside that level.
    pub fn remove_definite(&self, label: &str, level: &str) -> Result<Self> {
        let kept = self.project(label, level)?;
        let lost = self.norm_sqr() - kept.norm_sqr();
        if lost > TOL * self.norm_sqr().max(1.0) {
            return Err(Error::Precondition(format!(
                "subsystem `{label}` is not in level `{level}` (weight {lost:.3e} elsewhere)"
            )));
        }
        Ok(kept)
    }

    /// Insert a new subsystem prepared in `level` at register position `at`.
    pub fn insert_subsystem(&self, at: usize, subsystem: Subsystem, level: &str) -> Result<Self> {
        let level = subsystem.level_index(level)?;
        let mut subsystems = self.register.subsystems().to_vec();
        if at > subsystems.len() {
            return Err(Error::InvalidParameter(format!(
                "insert position {at} beyond register length {}",
                subsystems.len()
            )));
        }
        subsystems.insert(at, subsystem);
        let register = Register::new(subsystems)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); register.dim()];
        // old index = high·inner + low, new index = (high·d + level)·inner + low
        let inner: usize = self.register.subsystems()[at..].iter().map(Subsystem::dim).product();
        let d = register.subsystems()[at].dim();
        for (i, a) in self.amplitudes.iter().enumerate() {
            let (high, low) = (i / inner, i % inner);
            amplitudes[(high * d + level) * inner + low] = *a;
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Give subsystem `label` a new name.
    pub fn rename(&self, label: &str, new_label: &str) -> Result<Self> {
        let sub = self.register.get(label)?;
        let lv: Vec<&str> = sub.levels().iter().map(String::as_str).collect();
        let renamed = Subsystem::new(new_label, sub.kind(), &lv)?;
        Ok(Self {
            register: self.register.replace(label, renamed)?,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Rename the levels of a subsystem without touching amplitudes.
    pub fn relabel_levels(&self, label: &str, levels: &[&str]) -> Result<Self> {
        let sub = self.register.get(label)?;
        if levels.len() != sub.dim() {
            return Err(Error::DimensionMismatch {
                expected: sub.dim(),
                found: levels.len(),
            });
        }
        let new = sub.with_levels(levels.iter().map(|s| s.to_string()).collect())?;
        Ok(Self {
            register: self.register.replace(label, new)?,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Isometrically embed a subsystem into a larger level set: old level `i`
    /// becomes new level `embed[i]`.
    pub fn expand_levels(&self, label: &str, levels: &[&str], embed: &[usize]) -> Result<Self> {
        let pos = self.register.position(label)?;
        let sub = &self.register.subsystems()[pos];
        if embed.len() != sub.dim() {
            return Err(Error::DimensionMismatch {
                expected: sub.dim(),
                found: embed.len(),
            });
        }
        let mut seen = vec![false; levels.len()];
        for &e in embed {
            if e >= levels.len() || seen[e] {
                return Err(Error::InvalidParameter(format!(
                    "embedding of `{label}` is not injective"
                )));
            }
            seen[e] = true;
        }
        let new = sub.with_levels(levels.iter().map(|s| s.to_string()).collect())?;
        let register = self.register.replace(label, new)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); register.dim()];
        let reindex = resize_index(&self.register, pos, levels.len());
        for (i, a) in self.amplitudes.iter().enumerate() {
            amplitudes[reindex(i, &|k| embed[k])] = *a;
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Merge levels of a subsystem: old level `i` maps to new level `merge[i]`.
    ///
    /// Only valid when the merged variants never coexist for the same
    /// configuration of the other subsystems; otherwise the norm would change
    /// and the call is rejected.
    pub fn collapse_levels(&self, label: &str, levels: &[&str], merge: &[usize]) -> Result<Self> {
        let pos = self.register.position(label)?;
        let sub = &self.register.subsystems()[pos];
        if merge.len() != sub.dim() {
            return Err(Error::DimensionMismatch {
                expected: sub.dim(),
                found: merge.len(),
            });
        }
        if merge.iter().any(|&m| m >= levels.len()) {
            return Err(Error::InvalidParameter(format!(
                "merge target out of range for `{label}`"
            )));
        }
        let new = sub.with_levels(levels.iter().map(|s| s.to_string()).collect())?;
        let register = self.register.replace(label, new)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); register.dim()];
        let mut weights = vec![0.0; register.dim()];
        let reindex = resize_index(&self.register, pos, levels.len());
        for (i, a) in self.amplitudes.iter().enumerate() {
            let j = reindex(i, &|k| merge[k]);
            amplitudes[j] += a;
            weights[j] += a.norm_sqr();
        }
        let merged: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        let before: f64 = weights.iter().sum();
        if (merged - before).abs() > TOL * before.max(1.0) {
            return Err(Error::Precondition(format!(
                "merging levels of `{label}` is not isometric on this state"
            )));
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Reorder subsystems to the given label order.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.register.len() {
            return Err(Error::DimensionMismatch {
                expected: self.register.len(),
                found: order.len(),
            });
        }
        let positions = self.register.positions(order)?;
        let register = Register::new(
            positions
                .iter()
                .map(|&p| self.register.subsystems()[p].clone())
                .collect(),
        )?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); register.dim()];
        let old_strides = self.register.strides();
        let new_strides = register.strides();
        let moves: Vec<(usize, usize, usize)> = positions
            .iter()
            .zip(&new_strides)
            .map(|(&p, &ns)| (old_strides[p], self.register.subsystems()[p].dim(), ns))
            .collect();
        for (i, a) in self.amplitudes.iter().enumerate() {
            let j: usize = moves.iter().map(|&(os, d, ns)| (i / os) % d * ns).sum();
            amplitudes[j] = *a;
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Reorder `self` to match `target`'s subsystem order when both carry the
    /// same subsystems.
    pub fn aligned_to(&self, target: &Register) -> Result<Self> {
        if &self.register == target {
            return Ok(self.clone());
        }
        let order: Vec<&str> = target.labels().collect();
        let permuted = self
            .permute(&order)
            .map_err(|e| Error::IncompatibleRegisters(e.to_string()))?;
        if permuted.register != *target {
            return Err(Error::IncompatibleRegisters(
                "subsystem levels differ".into(),
            ));
        }
        Ok(permuted)
    }

    /// Projective measurement of `targets`. Outcomes below 1e-14 probability
    /// are pruned.
    pub fn measure(&self, targets: &[&str], basis: &Basis) -> Result<Vec<Outcome>> {
        let positions = self.register.positions(targets)?;
        let rotated;
        let state = match basis {
            Basis::Computational => self,
            Basis::Rotated(u) => {
                if !u.is_unitary() {
                    return Err(Error::NotUnitary(f64::NAN));
                }
                rotated = self.apply_map(u, targets)?;
                &rotated
            }
        };
        let dims: Vec<usize> = positions
            .iter()
            .map(|&p| self.register.subsystems()[p].dim())
            .collect();
        let total: usize = dims.iter().product();
        let mut outcomes = Vec::new();
        for k in 0..total {
            let mut rem = k;
            let mut idx = vec![0; dims.len()];
            for j in (0..dims.len()).rev() {
                idx[j] = rem % dims[j];
                rem /= dims[j];
            }
            let levels: Vec<String> = positions
                .iter()
                .zip(&idx)
                .map(|(&p, &i)| self.register.subsystems()[p].levels()[i].clone())
                .collect();
            let fixed: Vec<(&str, &str)> = targets
                .iter()
                .zip(&levels)
                .map(|(t, l)| (*t, l.as_str()))
                .collect();
            let branch = state.project_many(&fixed)?;
            let p = branch.norm_sqr();
            if p < PRUNE_TOL {
                continue;
            }
            outcomes.push(Outcome {
                label: levels.concat(),
                levels,
                probability: p,
                state: branch.normalized()?,
            });
        }
        Ok(outcomes)
    }

    /// Equality up to one global phase, amplitude-wise within `tol`.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        if self.register != other.register {
            return false;
        }
        let overlap = match other.inner(self) {
            Ok(o) => o,
            Err(_) => return false,
        };
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .all(|(a, b)| (a - b * phase).norm() <= tol)
    }

    /// Schmidt coefficients (singular values) across the cut `labels | rest`.
    pub fn schmidt_coefficients(&self, labels: &[&str]) -> Result<Vec<f64>> {
        let (m, _, _) = self.bipartite_matrix(labels)?;
        let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(sv)
    }

    /// Number of Schmidt coefficients above `tol`.
    pub fn schmidt_rank(&self, labels: &[&str], tol: f64) -> Result<usize> {
        Ok(self
            .schmidt_coefficients(labels)?
            .into_iter()
            .filter(|s| *s > tol)
            .count())
    }

    /// Reduced density matrix of `labels` (tracing out the rest), in the
    /// given label order. Not renormalized.
    pub fn reduced_density(&self, labels: &[&str]) -> Result<DMatrix<Complex64>> {
        let (m, _, _) = self.bipartite_matrix(labels)?;
        Ok(&m * m.adjoint())
    }

    fn bipartite_matrix(&self, labels: &[&str]) -> Result<(DMatrix<Complex64>, usize, usize)> {
        let positions = self.register.positions(labels)?;
        let mut order: Vec<&str> = labels.to_vec();
        for (i, s) in self.register.subsystems().iter().enumerate() {
            if !positions.contains(&i) {
                order.push(s.label());
            }
        }
        let p = self.permute(&order)?;
        let da: usize = positions
            .iter()
            .map(|&i| self.register.subsystems()[i].dim())
            .product();
        let db = self.register.dim() / da;
        Ok((DMatrix::from_row_slice(da, db, &p.amplitudes), da, db))
    }
}

/// Index map for changing the dimension of subsystem `pos` to `new_dim`:
/// returns `f(i, level_map)` giving the new flat index of old index `i`.
fn resize_index(register: &Register, pos: usize, new_dim: usize) -> impl Fn(usize, &dyn Fn(usize) -> usize) -> usize {
    let stride = register.strides()[pos];
    let old_dim = register.subsystems()[pos].dim();
    move |i, level_map| {
        let (high, digit, low) = (i / (stride * old_dim), (i / stride) % old_dim, i % stride);
        (high * new_dim + level_map(digit)) * stride + low
    }
}
