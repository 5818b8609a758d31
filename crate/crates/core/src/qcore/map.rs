use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::TOL;

/// A square complex matrix acting on a target sub-register.
///
/// Unitary maps satisfy `M†M = 1`; heralded maps may shrink the norm but never
/// grow it.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<Complex64>,
    unitary: bool,
}

impl LinearMap {
    /// Build a unitary map, rejecting matrices with `‖M†M − 1‖ > 1e-12`.
    pub fn unitary(matrix: DMatrix<Complex64>) -> Result<Self> {
        check_square(&matrix)?;
        let dev = unitarity_deviation(&matrix);
        if dev > TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self {
            matrix,
            unitary: true,
        })
    }

    /// Build a contraction (heralded, possibly lossy) map. The largest singular
    /// value must not exceed `1 + 1e-12`.
    pub fn contraction(matrix: DMatrix<Complex64>) -> Result<Self> {
        check_square(&matrix)?;
        let smax = largest_singular_value(&matrix);
        if smax > 1.0 + TOL {
            return Err(Error::NormGrowth(smax));
        }
        let unitary = unitarity_deviation(&matrix) <= TOL;
        Ok(Self { matrix, unitary })
    }

    /// Build from a row-major slice of entries; unitarity is detected.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::contraction(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            unitary: true,
        }
    }

    /// Permutation map sending basis state `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            if i >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i + 1,
                });
            }
            m[(i, j)] = Complex64::new(1.0, 0.0);
        }
        Self::unitary(m)
    }

    /// Diagonal map; the result is unitary only if every entry has modulus one.
    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        Self::contraction(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            entries,
        )))
    }

    pub fn pauli_x() -> Self {
        Self::permutation(&[1, 0]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]).unwrap()
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_rows(
            2,
            &[
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        )
        .unwrap()
    }

    /// Projector onto basis state `level` of a `dim`-level system.
    pub fn projector(dim: usize, level: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(level, level)] = Complex64::new(1.0, 0.0);
        Self {
            matrix: m,
            unitary: dim == 1,
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            matrix: self.matrix.kronecker(&other.matrix),
            unitary: self.unitary && other.unitary,
        }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(LinearMap {
            matrix: &self.matrix * &other.matrix,
            unitary: self.unitary && other.unitary,
        })
    }

    pub fn adjoint(&self) -> LinearMap {
        LinearMap {
            matrix: self.matrix.adjoint(),
            unitary: self.unitary,
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn largest_singular_value(&self) -> f64 {
        largest_singular_value(&self.matrix)
    }
}

fn check_square(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(())
}

fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let g = m.adjoint() * m - DMatrix::<Complex64>::identity(n, n);
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn largest_singular_value(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.1), c(0.0), c(1.0)]);
        assert!(matches!(LinearMap::unitary(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn rejects_amplification() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.1), c(0.0), c(0.0), c(0.5)]);
        assert!(matches!(LinearMap::contraction(m), Err(Error::NormGrowth(_))));
    }

    #[test]
    fn contraction_detects_unitary() {
        let h = LinearMap::hadamard();
        assert!(h.is_unitary());
        let p = LinearMap::projector(2, 0);
        assert!(!p.is_unitary());
        assert!((p.largest_singular_value() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kron_order() {
        let xz = LinearMap::pauli_x().kron(&LinearMap::pauli_z());
        // |0,1> -> X|0> ⊗ Z|1> = -|1,1>
        let m = xz.matrix();
        assert_eq!(m[(3, 1)], c(-1.0));
        assert!(xz.is_unitary());
    }
}
