//! Symmetric eigendecomposition via cyclic Jacobi rotations.

use serde::{Deserialize, Serialize};

use super::{DenseMatrix, SpectralError, SYMMETRY_RTOL};
use crate::scalar::{approx_f64, real, Real};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a real symmetric matrix: `M = V · Diag(λ) · Vᵀ`.
///
/// Eigenvalues are sorted ascending; eigenvector column `i` pairs with
/// `values[i]`. Each eigenvector is normalized so that its entry of largest
/// magnitude is positive (first occurrence wins on ties), which pins the
/// otherwise free sign and keeps runs reproducible.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize + Real", deserialize = "F: Deserialize<'de> + Real"))]
pub struct EigPair<F> {
    pub vectors: DenseMatrix<F>,
    pub values: Vec<F>,
}

impl<F: Real> EigPair<F> {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Reassembles `V · Diag(λ) · Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix<F> {
        self.vectors
            .scale_cols(&self.values)
            .matmul_transpose(&self.vectors)
    }
}

/// Symmetric eigendecomposition.
///
/// Fails with [`SpectralError::NonSymmetric`] when the relative asymmetry
/// `‖M − Mᵀ‖_F / ‖M‖_F` exceeds `1e-10`; the strictly symmetric average
/// `(M + Mᵀ)/2` is then diagonalized.
pub fn sym_evd<F: Real>(m: &DenseMatrix<F>) -> Result<EigPair<F>, SpectralError> {
    if !m.is_square() {
        return Err(SpectralError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    m.check_finite()?;
    let gap = m.symmetry_gap();
    if gap > real(SYMMETRY_RTOL) {
        return Err(SpectralError::NonSymmetric {
            asymmetry: approx_f64(gap),
            tolerance: SYMMETRY_RTOL,
        });
    }

    let n = m.rows();
    let mut a = DenseMatrix::from_fn(n, n, |i, j| {
        (m[(i, j)] + m[(j, i)]) / real(2.0)
    });
    let mut v = DenseMatrix::<F>::identity(n);
    let stop = F::epsilon() * a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = F::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if (off + off).sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .partial_cmp(&a[(j, j)])
            .expect("finite eigenvalues")
    });

    let values: Vec<F> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_sign(&mut col);
        vectors.set_column(dst, &col);
    }

    Ok(EigPair { vectors, values })
}

/// One Jacobi rotation annihilating `a[p, q]`, accumulated into `v`.
fn rotate<F: Real>(a: &mut DenseMatrix<F>, v: &mut DenseMatrix<F>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == F::zero() {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (real::<F>(2.0) * apq);
    let t = if theta >= F::zero() {
        F::one() / (theta + (theta * theta + F::one()).sqrt())
    } else {
        -F::one() / (-theta + (theta * theta + F::one()).sqrt())
    };
    let c = F::one() / (t * t + F::one()).sqrt();
    let s = t * c;
    let tau = s / (F::one() + c);
    let h = t * apq;

    a[(p, p)] -= h;
    a[(q, q)] += h;
    a[(p, q)] = F::zero();
    a[(q, p)] = F::zero();

    let n = a.rows();
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        let new_p = aip - s * (aiq + tau * aip);
        let new_q = aiq + s * (aip - tau * aiq);
        a[(i, p)] = new_p;
        a[(p, i)] = new_p;
        a[(i, q)] = new_q;
        a[(q, i)] = new_q;
    }
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip - s * (viq + tau * vip);
        v[(i, q)] = viq + s * (vip - tau * viq);
    }
}

fn fix_sign<F: Real>(col: &mut [F]) {
    let mut best = 0;
    for (i, x) in col.iter().enumerate() {
        if x.abs() > col[best].abs() {
            best = i;
        }
    }
    if col[best] < F::zero() {
        for x in col.iter_mut() {
            *x = -*x;
        }
    }
}
