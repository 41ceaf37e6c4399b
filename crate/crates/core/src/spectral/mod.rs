//! Dense linear-algebra kernels: matrices, symmetric eigendecomposition,
//! singular value decomposition, pseudoinverse, Khatri-Rao products and
//! vectorization maps.
//!
//! All operations are pure functions on immutable inputs and reject
//! non-finite entries at the boundary. Matrices are stored row-major.

mod eig;
mod svd;

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{approx_f64, Real};

pub use eig::{sym_evd, EigPair};
pub use svd::{lstsq, pinv, svd, Svd, DEFAULT_PINV_RTOL};

/// Relative symmetry tolerance used by [`sym_evd`].
pub const SYMMETRY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not symmetric: relative asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NonSymmetric { asymmetry: f64, tolerance: f64 },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("column counts differ: {left} vs {right}")]
    ColumnMismatch { left: usize, right: usize },
    #[error("vector length {len} does not match {rows}x{cols}")]
    LengthMismatch { len: usize, rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Dense row-major matrix over a real scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> DenseMatrix<F> {
    /// Builds a matrix from row-major data, rejecting length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self, SpectralError> {
        if data.len() != rows * cols {
            return Err(SpectralError::LengthMismatch {
                len: data.len(),
                rows,
                cols,
            });
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix by evaluating `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn from_diag(d: &[F]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i] } else { F::zero() })
    }

    /// Column vector (n×1) from a slice.
    pub fn from_column(v: &[F]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[F] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[F]) {
        assert_eq!(v.len(), self.rows, "column length mismatch");
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn diag(&self) -> Vec<F> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix product; panics on dimension mismatch (internal invariant).
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == F::zero() {
                    continue;
                }
                let orow = k * other.cols;
                let row = i * other.cols;
                for j in 0..other.cols {
                    out.data[row + j] += aik * other.data[orow + j];
                }
            }
        }
        out
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn transpose_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "transpose_matmul dimension mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let aki = self[(k, i)];
                if aki == F::zero() {
                    continue;
                }
                let row = i * other.cols;
                let orow = k * other.cols;
                for j in 0..other.cols {
                    out.data[row + j] += aki * other.data[orow + j];
                }
            }
        }
        out
    }

    /// `self · otherᵀ`.
    pub fn matmul_transpose(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "matmul_transpose dimension mismatch");
        Self::from_fn(self.rows, other.rows, |i, j| {
            let mut acc = F::zero();
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(j, k)];
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum::<F>()
            })
            .collect()
    }

    /// `selfᵀ · v`.
    pub fn transpose_mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.rows, "transpose_mul_vec dimension mismatch");
        let mut out = vec![F::zero(); self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            for j in 0..self.cols {
                out[j] += self[(i, j)] * vi;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scaled(&self, s: F) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// `Diag(d) · self`: scales row `i` by `d[i]`.
    pub fn scale_rows(&self, d: &[F]) -> Self {
        assert_eq!(d.len(), self.rows, "scale_rows dimension mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| d[i] * self[(i, j)])
    }

    /// `self · Diag(d)`: scales column `j` by `d[j]`.
    pub fn scale_cols(&self, d: &[F]) -> Self {
        assert_eq!(d.len(), self.cols, "scale_cols dimension mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j])
    }

    pub fn frobenius_norm(&self) -> F {
        self.data.iter().map(|&a| a * a).sum::<F>().sqrt()
    }

    pub fn max_abs(&self) -> F {
        self.data
            .iter()
            .fold(F::zero(), |acc, &a| acc.max(a.abs()))
    }

    /// Relative asymmetry `‖M − Mᵀ‖_F / ‖M‖_F` (zero for the zero matrix).
    pub fn symmetry_gap(&self) -> F {
        assert_eq!(self.rows, self.cols, "symmetry_gap needs a square matrix");
        let norm = self.frobenius_norm();
        if norm == F::zero() {
            return F::zero();
        }
        let mut gap = F::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = self[(i, j)] - self[(j, i)];
                gap += (d * d) * crate::scalar::real(2.0);
            }
        }
        gap.sqrt() / norm
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn check_finite(&self) -> Result<(), SpectralError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_finite() {
                    return Err(SpectralError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

impl<F: Real> Index<(usize, usize)> for DenseMatrix<F> {
    type Output = F;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Real> IndexMut<(usize, usize)> for DenseMatrix<F> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Real> fmt::Display for DenseMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} matrix", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>12.5e}", approx_f64(self[(i, j)]))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// Serialized as nested row arrays.
impl<F: Real + Serialize> Serialize for DenseMatrix<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

impl<'de, F: Real + Deserialize<'de>> Deserialize<'de> for DenseMatrix<F> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<F>> = Vec::deserialize(deserializer)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(de::Error::custom(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        DenseMatrix::new(nrows, ncols, data).map_err(de::Error::custom)
    }
}

/// Column-wise Kronecker (Khatri-Rao) product.
///
/// Column `j` of the result is `kron(a[:, j], b[:, j])`; each entry is a
/// single product of the two source entries.
pub fn khatri_rao<F: Real>(
    a: &DenseMatrix<F>,
    b: &DenseMatrix<F>,
) -> Result<DenseMatrix<F>, SpectralError> {
    if a.cols() != b.cols() {
        return Err(SpectralError::ColumnMismatch {
            left: a.cols(),
            right: b.cols(),
        });
    }
    let rows = a.rows() * b.rows();
    let mut out = DenseMatrix::zeros(rows, a.cols());
    for j in 0..a.cols() {
        for ia in 0..a.rows() {
            let aij = a[(ia, j)];
            for ib in 0..b.rows() {
                out[(ia * b.rows() + ib, j)] = aij * b[(ib, j)];
            }
        }
    }
    Ok(out)
}

/// Column-stacking vectorization: `vec(M)[j·rows + i] = M[i, j]`.
pub fn vectorize<F: Real>(m: &DenseMatrix<F>) -> Vec<F> {
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vectorize`].
pub fn unvectorize<F: Real>(
    v: &[F],
    rows: usize,
    cols: usize,
) -> Result<DenseMatrix<F>, SpectralError> {
    if v.len() != rows * cols {
        return Err(SpectralError::LengthMismatch {
            len: v.len(),
            rows,
            cols,
        });
    }
    Ok(DenseMatrix::from_fn(rows, cols, |i, j| v[j * rows + i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DenseMatrix<f64> {
        DenseMatrix::new(rows, cols, data.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_finite_entries() {
        let err = DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).unwrap_err();
        assert_eq!(err, SpectralError::NonFinite { row: 0, col: 1 });
    }

    #[test]
    fn vectorize_stacks_columns() {
        let m = mat(2, 2, &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(vectorize(&m), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn unvectorize_inverts_vectorize() {
        let m = DenseMatrix::from_fn(3, 4, |i, j| (i * 7 + j) as f64 / 3.0);
        let back = unvectorize(&vectorize(&m), 3, 4).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn unvectorize_rejects_bad_length() {
        assert!(matches!(
            unvectorize(&[1.0, 2.0, 3.0], 2, 2),
            Err(SpectralError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn khatri_rao_of_identities() {
        let id = DenseMatrix::<f64>::identity(2);
        let kr = khatri_rao(&id, &id).unwrap();
        // Columns e1 ⊗ e1 and e2 ⊗ e2.
        assert_eq!(kr.column(0), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(kr.column(1), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn khatri_rao_with_ones_row_replicates() {
        let ones = mat(1, 3, &[1.0, 1.0, 1.0]);
        let b = DenseMatrix::from_fn(4, 3, |i, j| (i + 2 * j) as f64);
        let kr = khatri_rao(&ones, &b).unwrap();
        assert_eq!(kr, b);
    }

    #[test]
    fn khatri_rao_matches_nested_loop_kron() {
        let a = DenseMatrix::from_fn(3, 2, |i, j| (i as f64 + 1.3).powi(j as i32 + 1));
        let b = DenseMatrix::from_fn(4, 2, |i, j| (i as f64 - 0.7) * (j as f64 + 0.4));
        let kr = khatri_rao(&a, &b).unwrap();
        for j in 0..2 {
            for ia in 0..3 {
                for ib in 0..4 {
                    assert_eq!(kr[(ia * 4 + ib, j)], a[(ia, j)] * b[(ib, j)]);
                }
            }
        }
    }

    #[test]
    fn khatri_rao_rejects_column_mismatch() {
        let a = DenseMatrix::<f64>::zeros(2, 2);
        let b = DenseMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            khatri_rao(&a, &b),
            Err(SpectralError::ColumnMismatch { left: 2, right: 3 })
        ));
    }

    // vec(Diag(d)·M) = khatri_rao(Mᵀ, I)·d, the identity behind the
    // design-matrix construction.
    #[test]
    fn vectorization_identity_with_khatri_rao() {
        let m = DenseMatrix::from_fn(3, 5, |i, j| ((2 * i + 3 * j) as f64).sin());
        let d = [0.3, -1.2, 2.5];
        let lhs = vectorize(&m.scale_rows(&d));
        let kr = khatri_rao(&m.transpose(), &DenseMatrix::identity(3)).unwrap();
        let rhs = kr.mul_vec(&d);
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).abs() <= 1e-12, "identity violated: {l} vs {r}");
        }
    }

    #[test]
    fn serde_round_trip_nested_arrays() {
        let m = mat(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[1.0,2.0,3.0],[4.0,5.0,6.0]]");
        let back: DenseMatrix<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
