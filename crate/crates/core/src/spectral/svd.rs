//! Singular value decomposition (one-sided Jacobi), pseudoinverse and
//! least-squares solves built on it.

use super::{DenseMatrix, SpectralError};
use crate::scalar::{real, Real};

const MAX_SWEEPS: usize = 64;

/// Default relative truncation threshold for [`pinv`] and [`lstsq`]:
/// singular values below `rtol · σ_max` are treated as zero.
pub const DEFAULT_PINV_RTOL: f64 = 1e-12;

/// Economy-size SVD `M = U · Diag(σ) · Vᵀ` with `σ` descending and
/// nonnegative; `U` and `V` have orthonormal columns.
#[derive(Debug, Clone)]
pub struct Svd<F> {
    pub u: DenseMatrix<F>,
    pub sigma: Vec<F>,
    pub v: DenseMatrix<F>,
}

impl<F: Real> Svd<F> {
    pub fn rank(&self, rtol: F) -> usize {
        let smax = self.sigma.first().copied().unwrap_or(F::zero());
        self.sigma.iter().filter(|&&s| s > rtol * smax).count()
    }

    /// Ratio `σ_min / σ_max` over all economy singular values (0 when the
    /// matrix is zero).
    pub fn condition_ratio(&self) -> F {
        let smax = self.sigma.first().copied().unwrap_or(F::zero());
        let smin = self.sigma.last().copied().unwrap_or(F::zero());
        if smax == F::zero() {
            F::zero()
        } else {
            smin / smax
        }
    }

    pub fn reconstruct(&self) -> DenseMatrix<F> {
        self.u.scale_cols(&self.sigma).matmul_transpose(&self.v)
    }
}

/// Economy-size SVD of an arbitrary dense matrix.
///
/// Columns with singular value at rounding level are replaced by an
/// orthonormal completion, so `U` (and `V`) always have orthonormal columns
/// even for rank-deficient input.
pub fn svd<F: Real>(m: &DenseMatrix<F>) -> Result<Svd<F>, SpectralError> {
    m.check_finite()?;
    if m.rows() < m.cols() {
        let t = svd(&m.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }

    let rows = m.rows();
    let n = m.cols();
    let mut a = m.clone();
    let mut v = DenseMatrix::<F>::identity(n);
    let eps = F::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = F::zero();
                let mut beta = F::zero();
                let mut gamma = F::zero();
                for i in 0..rows {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    alpha += aip * aip;
                    beta += aiq * aiq;
                    gamma += aip * aiq;
                }
                if gamma == F::zero() || gamma.abs() <= eps * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (real::<F>(2.0) * gamma);
                let t = if zeta >= F::zero() {
                    F::one() / (zeta + (F::one() + zeta * zeta).sqrt())
                } else {
                    -F::one() / (-zeta + (F::one() + zeta * zeta).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<F> = (0..n)
        .map(|j| (0..rows).map(|i| a[(i, j)] * a[(i, j)]).sum::<F>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let mut u = DenseMatrix::zeros(rows, n);
    let mut vord = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        sigma.push(norms[src]);
        vord.set_column(dst, &v.column(src));
        if norms[src] > F::zero() {
            let col: Vec<F> = (0..rows).map(|i| a[(i, src)] / norms[src]).collect();
            u.set_column(dst, &col);
        }
    }
    // Columns at rounding level get an orthonormal completion; the
    // reconstruction is unaffected because the paired σ is negligible.
    let smax = sigma.first().copied().unwrap_or(F::zero());
    let floor = smax * eps * real::<F>(rows.max(n) as f64);
    for (j, &s) in sigma.iter().enumerate() {
        if s <= floor {
            let col = complete_column(&u, j, rows);
            u.set_column(j, &col);
        }
    }

    Ok(Svd { u, sigma, v: vord })
}

/// Finds a unit vector orthogonal to every other column of `u`.
///
/// Starts from the unit basis vector with the largest out-of-span residual
/// (at least `1/sqrt(rows)` for any partial orthonormal basis), then
/// re-orthogonalizes once more to recover full precision.
fn complete_column<F: Real>(u: &DenseMatrix<F>, skip: usize, rows: usize) -> Vec<F> {
    let orthogonalize = |cand: &mut [F]| {
        for j in 0..u.cols() {
            if j == skip {
                continue;
            }
            let proj: F = (0..rows).map(|i| u[(i, j)] * cand[i]).sum();
            for (i, c) in cand.iter_mut().enumerate() {
                *c -= proj * u[(i, j)];
            }
        }
    };

    let mut best: Vec<F> = Vec::new();
    let mut best_norm = F::neg_infinity();
    for k in 0..rows {
        let mut cand = vec![F::zero(); rows];
        cand[k] = F::one();
        orthogonalize(&mut cand);
        let norm: F = cand.iter().map(|&x| x * x).sum::<F>().sqrt();
        if norm > best_norm {
            best = cand;
            best_norm = norm;
        }
    }
    // Second pass against the same columns restores orthogonality lost to
    // cancellation when the best residual is small.
    orthogonalize(&mut best);
    let norm: F = best.iter().map(|&x| x * x).sum::<F>().sqrt();
    assert!(
        norm > F::zero(),
        "orthonormal completion exists whenever rows >= cols"
    );
    for x in best.iter_mut() {
        *x /= norm;
    }
    best
}

/// Moore-Penrose pseudoinverse via SVD truncation at `rtol · σ_max`.
///
/// The zero matrix maps to the (transposed) zero matrix.
pub fn pinv<F: Real>(m: &DenseMatrix<F>, rtol: F) -> Result<DenseMatrix<F>, SpectralError> {
    let d = svd(m)?;
    let smax = d.sigma.first().copied().unwrap_or(F::zero());
    let inv: Vec<F> = d
        .sigma
        .iter()
        .map(|&s| {
            if s > rtol * smax && s > F::zero() {
                F::one() / s
            } else {
                F::zero()
            }
        })
        .collect();
    Ok(d.v.scale_cols(&inv).matmul_transpose(&d.u))
}

/// Minimum-norm least-squares solution of `A · X ≈ B` via truncated SVD.
///
/// Returns the solution together with the condition ratio `σ_min / σ_max`
/// of `A` so callers can flag rank deficiency.
pub fn lstsq<F: Real>(
    a: &DenseMatrix<F>,
    b: &DenseMatrix<F>,
    rtol: F,
) -> Result<(DenseMatrix<F>, F), SpectralError> {
    assert_eq!(a.rows(), b.rows(), "lstsq dimension mismatch");
    let d = svd(a)?;
    let smax = d.sigma.first().copied().unwrap_or(F::zero());
    let inv: Vec<F> = d
        .sigma
        .iter()
        .map(|&s| {
            if s > rtol * smax && s > F::zero() {
                F::one() / s
            } else {
                F::zero()
            }
        })
        .collect();
    // X = V · Σ⁺ · Uᵀ · B
    let utb = d.u.transpose_matmul(b);
    let x = d.v.matmul(&utb.scale_rows(&inv));
    Ok((x, d.condition_ratio()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo_random(rows: usize, cols: usize, salt: usize) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(rows, cols, |i, j| {
            (((i * 37 + j * 23 + salt * 11 + 5) % 97) as f64 / 97.0 - 0.5) * 2.0
        })
    }

    fn orthonormal_columns(m: &DenseMatrix<f64>, tol: f64) {
        let gram = m.transpose_matmul(m);
        let id = DenseMatrix::identity(m.cols());
        let err = gram.sub(&id).frobenius_norm();
        assert!(err <= tol, "columns not orthonormal: {err}");
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let d = svd(&DenseMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(d.sigma, vec![1.0, 1.0]);
    }

    #[test]
    fn rank_one_outer_product() {
        let a: [f64; 3] = [1.0, -2.0, 2.0];
        let b = [3.0, 4.0];
        let m = DenseMatrix::from_fn(3, 2, |i, j| a[i] * b[j]);
        let d = svd(&m).unwrap();
        let expect = 3.0 * 5.0; // ‖a‖ ‖b‖
        assert!((d.sigma[0] - expect).abs() <= 1e-12 * expect);
        assert!(d.sigma[1].abs() <= 1e-12 * expect);
        orthonormal_columns(&d.u, 1e-12);
        orthonormal_columns(&d.v, 1e-12);
    }

    #[test]
    fn reconstructs_random_rectangular() {
        for (rows, cols, salt) in [(5, 3, 0), (3, 5, 1), (8, 8, 2), (12, 4, 3)] {
            let m = pseudo_random(rows, cols, salt);
            let d = svd(&m).unwrap();
            let err = d.reconstruct().sub(&m).frobenius_norm();
            assert!(err <= 1e-12 * m.frobenius_norm().max(1.0), "{rows}x{cols}: {err}");
            orthonormal_columns(&d.u, 1e-12);
            orthonormal_columns(&d.v, 1e-12);
            for w in d.sigma.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn pinv_matches_direct_inverse_2x2() {
        let m = DenseMatrix::new(2, 2, vec![3.0, 1.0, 2.0, 4.0]).unwrap();
        // det = 10, inverse computed by hand.
        let inv = DenseMatrix::new(2, 2, vec![0.4, -0.1, -0.2, 0.3]).unwrap();
        let p = pinv(&m, 1e-12).unwrap();
        assert!(p.sub(&inv).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn pinv_of_zero_is_zero() {
        let p = pinv(&DenseMatrix::<f64>::zeros(3, 2), 1e-12).unwrap();
        assert_eq!(p.rows(), 2);
        assert_eq!(p.cols(), 3);
        assert_eq!(p.frobenius_norm(), 0.0);
    }

    #[test]
    fn pinv_is_left_inverse_for_tall_full_rank() {
        let m = pseudo_random(7, 3, 4);
        let p = pinv(&m, 1e-12).unwrap();
        let prod = p.matmul(&m);
        let err = prod.sub(&DenseMatrix::identity(3)).frobenius_norm();
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn penrose_identities_hold() {
        for (rows, cols, salt) in [(6, 4, 5), (4, 6, 6), (5, 5, 7)] {
            let m = pseudo_random(rows, cols, salt);
            let x = pinv(&m, 1e-12).unwrap();
            let mx = m.matmul(&x);
            let xm = x.matmul(&m);
            assert!(mx.matmul(&m).sub(&m).frobenius_norm() <= 1e-9);
            assert!(xm.matmul(&x).sub(&x).frobenius_norm() <= 1e-9);
            assert!(mx.sub(&mx.transpose()).frobenius_norm() <= 1e-9);
            assert!(xm.sub(&xm.transpose()).frobenius_norm() <= 1e-9);
        }
    }

    #[test]
    fn lstsq_solves_consistent_systems() {
        let a = pseudo_random(9, 4, 8);
        let x_true = pseudo_random(4, 2, 9);
        let b = a.matmul(&x_true);
        let (x, ratio) = lstsq(&a, &b, 1e-12).unwrap();
        assert!(x.sub(&x_true).frobenius_norm() <= 1e-10);
        assert!(ratio > 1e-6);
    }

    #[test]
    fn svd_of_large_rank_one_matrix_completes_a_full_basis() {
        // 19 of 20 singular values vanish, so almost every left singular
        // vector comes from the completion path.
        let ones = DenseMatrix::<f64>::from_fn(20, 20, |_, _| 1.0);
        let d = svd(&ones).unwrap();
        orthonormal_columns(&d.u, 1e-12);
        orthonormal_columns(&d.v, 1e-12);
        assert!((d.sigma[0] - 20.0).abs() <= 1e-12 * 20.0);
        assert!(d.sigma[1] <= 1e-12 * d.sigma[0]);
        let err = d.reconstruct().sub(&ones).frobenius_norm();
        assert!(err <= 1e-12 * ones.frobenius_norm());
    }

    #[test]
    fn svd_handles_rank_deficient_with_orthonormal_u() {
        // Two identical columns plus a zero column.
        let mut m = DenseMatrix::<f64>::zeros(5, 3);
        for i in 0..5 {
            m[(i, 0)] = (i as f64) - 2.0;
            m[(i, 1)] = (i as f64) - 2.0;
        }
        let d = svd(&m).unwrap();
        orthonormal_columns(&d.u, 1e-12);
        assert!(d.sigma[1] <= 1e-12 * d.sigma[0]);
        let err = d.reconstruct().sub(&m).frobenius_norm();
        assert!(err <= 1e-12 * m.frobenius_norm());
    }
}
