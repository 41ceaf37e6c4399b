//! Node-variant filter-tap estimation from data.
//!
//! With input-output pairs, vectorizing `Y = H_I(P, S) X` gives the linear
//! system `A vec(P) = vec(Y)` with the Khatri-Rao design matrix
//! `A = [Xᵀ ∘ I_N ⋯ (S^{L-1}X)ᵀ ∘ I_N]`; the least-squares solve exploits
//! that under a row/column permutation `A` is block diagonal with one `T×L`
//! block per node, which is the same truncated-SVD solution as the dense
//! pseudoinverse route.
//!
//! With outputs only, the second-order fit `‖R − H_I(P,S) U‖_F²` over taps
//! and an orthogonal `U` alternates the closed-form tap solve with an
//! orthogonal Procrustes update; both half-steps are exact minimizers, so
//! the objective never increases.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::{nvgf_apply, nvgf_matrix, FilterError, FilterFlavor, NodeVariantTaps};
use crate::graph::ShiftOperator;
use crate::scalar::{real, Real};
use crate::signals::{
    covariance_factor, FactorKind, RngSeed, SignalEnsemble, SignalError,
};
use crate::spectral::{khatri_rao, svd, DenseMatrix, SpectralError, Svd, DEFAULT_PINV_RTOL};

const STREAM_ORTHO_INIT: u64 = 0x0f;

/// Relative singular-value ratio below which the design is flagged as rank
/// deficient (solves are truncated, not failed).
pub const RANK_DEFICIENT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("ensemble has {got} rows, expected {expected}")]
    RowMismatch { expected: usize, got: usize },
    #[error("input and output realization counts differ: {inputs} vs {outputs}")]
    RealizationMismatch { inputs: usize, outputs: usize },
    #[error("filter order must be at least 1")]
    ZeroOrder,
    #[error("orthogonal fit needs a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// Result of a tap-estimation run.
///
/// `iterations` is zero for the closed-form input-output solve; the
/// alternating method records its (non-increasing) objective per iteration.
///
/// Serializes with the tap matrix as plain nested arrays:
/// `{taps, flavor, residual_nse, iterations, objective_trace, warnings}`.
#[derive(Debug, Clone)]
pub struct TapEstimate<F> {
    pub taps: NodeVariantTaps<F>,
    pub residual_nse: F,
    pub iterations: usize,
    pub objective_trace: Vec<F>,
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize + Real", deserialize = "F: Deserialize<'de> + Real"))]
struct TapEstimateWire<F> {
    taps: DenseMatrix<F>,
    flavor: FilterFlavor,
    residual_nse: F,
    iterations: usize,
    objective_trace: Vec<F>,
    #[serde(default)]
    warnings: Vec<String>,
}

impl<F: Real + Serialize> Serialize for TapEstimate<F> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TapEstimateWire {
            taps: self.taps.matrix().clone(),
            flavor: self.taps.flavor(),
            residual_nse: self.residual_nse,
            iterations: self.iterations,
            objective_trace: self.objective_trace.clone(),
            warnings: self.warnings.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, F: Real + Deserialize<'de>> Deserialize<'de> for TapEstimate<F> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = TapEstimateWire::deserialize(deserializer)?;
        let taps = NodeVariantTaps::new(wire.taps, wire.flavor)
            .map_err(serde::de::Error::custom)?;
        Ok(TapEstimate {
            taps,
            residual_nse: wire.residual_nse,
            iterations: wire.iterations,
            objective_trace: wire.objective_trace,
            warnings: wire.warnings,
        })
    }
}

/// Initialization of the orthogonal factor in the alternating method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthogonalInit {
    #[default]
    Identity,
    RandomOrthogonal {
        seed: u64,
    },
}

/// Configuration of the output-only alternating minimization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize + Real", deserialize = "F: Deserialize<'de> + Real"))]
#[serde(default)]
pub struct AltMinConfig<F> {
    pub max_iters: usize,
    pub rel_obj_tol: F,
    pub factor: FactorKind,
    pub init: OrthogonalInit,
}

impl<F: Real> Default for AltMinConfig<F> {
    fn default() -> Self {
        Self {
            max_iters: 200,
            rel_obj_tol: real(1e-8),
            factor: FactorKind::SymSqrt,
            init: OrthogonalInit::Identity,
        }
    }
}

/// Dense Khatri-Rao design matrix `A` (NT × NL) with
/// `A vec(P) = vec(H_I(P, S) X)`.
pub fn design_matrix<F: Real>(
    x: &SignalEnsemble<F>,
    shift: &ShiftOperator<F>,
    order_l: usize,
) -> Result<DenseMatrix<F>, EstimationError> {
    if order_l == 0 {
        return Err(EstimationError::ZeroOrder);
    }
    if x.n() != shift.n() {
        return Err(EstimationError::RowMismatch {
            expected: shift.n(),
            got: x.n(),
        });
    }
    let n = shift.n();
    let t = x.t();
    let identity = DenseMatrix::<F>::identity(n);
    let mut out = DenseMatrix::zeros(n * t, n * order_l);
    let mut shifted = x.data().clone();
    for l in 0..order_l {
        if l > 0 {
            shifted = shift.matrix().matmul(&shifted);
        }
        let block = khatri_rao(&shifted.transpose(), &identity)?;
        for r in 0..n * t {
            for c in 0..n {
                out[(r, l * n + c)] = block[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Per-node blocks of the design: node `i` sees the `T×L` matrix whose
/// column `l` is row `i` of `S^l X`.
fn node_blocks<F: Real>(
    x: &DenseMatrix<F>,
    shift: &DenseMatrix<F>,
    order_l: usize,
) -> Vec<DenseMatrix<F>> {
    let n = x.rows();
    let t = x.cols();
    let mut blocks = vec![DenseMatrix::zeros(t, order_l); n];
    let mut shifted = x.clone();
    for l in 0..order_l {
        if l > 0 {
            shifted = shift.matmul(&shifted);
        }
        for i in 0..n {
            for tt in 0..t {
                blocks[i][(tt, l)] = shifted[(i, tt)];
            }
        }
    }
    blocks
}

/// Truncated least-squares tap solve shared by both estimators. Returns the
/// tap matrix and the condition ratio σ_min/σ_max of the full design.
fn solve_taps<F: Real>(
    x: &DenseMatrix<F>,
    y: &DenseMatrix<F>,
    shift: &DenseMatrix<F>,
    order_l: usize,
) -> Result<(DenseMatrix<F>, F), EstimationError> {
    let n = x.rows();
    let blocks = node_blocks(x, shift, order_l);
    let decomposed: Vec<Svd<F>> = blocks
        .iter()
        .map(svd)
        .collect::<Result<_, SpectralError>>()?;

    // The singular values of the permuted block-diagonal design are the
    // union of the per-node ones, so truncation must use the global σ_max.
    let mut smax = F::zero();
    let mut smin = F::infinity();
    for d in &decomposed {
        for &s in &d.sigma {
            smax = smax.max(s);
            smin = smin.min(s);
        }
    }
    let ratio = if smax > F::zero() { smin / smax } else { F::zero() };
    let floor = real::<F>(DEFAULT_PINV_RTOL) * smax;

    let mut taps = DenseMatrix::zeros(n, order_l);
    for (i, d) in decomposed.iter().enumerate() {
        let rhs: Vec<F> = (0..y.cols()).map(|tt| y[(i, tt)]).collect();
        let uty = d.u.transpose_mul_vec(&rhs);
        let scaled: Vec<F> = uty
            .iter()
            .zip(&d.sigma)
            .map(|(&v, &s)| if s > floor && s > F::zero() { v / s } else { F::zero() })
            .collect();
        let p_i = d.v.mul_vec(&scaled);
        for l in 0..order_l {
            taps[(i, l)] = p_i[l];
        }
    }
    Ok((taps, ratio))
}

/// Least-squares tap estimate from input-output data.
pub fn estimate_taps_io<F: Real>(
    x: &SignalEnsemble<F>,
    y: &SignalEnsemble<F>,
    shift: &ShiftOperator<F>,
    order_l: usize,
) -> Result<TapEstimate<F>, EstimationError> {
    if order_l == 0 {
        return Err(EstimationError::ZeroOrder);
    }
    for e in [x, y] {
        if e.n() != shift.n() {
            return Err(EstimationError::RowMismatch {
                expected: shift.n(),
                got: e.n(),
            });
        }
    }
    if x.t() != y.t() {
        return Err(EstimationError::RealizationMismatch {
            inputs: x.t(),
            outputs: y.t(),
        });
    }

    let mut warnings = Vec::new();
    if x.t() < order_l {
        warnings.push(format!(
            "underdetermined design: {} realizations for order {}",
            x.t(),
            order_l
        ));
    }
    let (taps, ratio) = solve_taps(x.data(), y.data(), shift.matrix(), order_l)?;
    if ratio < real(RANK_DEFICIENT_RTOL) {
        warnings.push(format!(
            "rank-deficient design (sigma_min/sigma_max = {:.3e}); solution truncated",
            crate::scalar::approx_f64(ratio)
        ));
    }

    let taps = NodeVariantTaps::new(taps, FilterFlavor::TypeI)?;
    let fitted = nvgf_apply(&taps, shift.matrix(), x.data())?;
    let y_norm = y.data().frobenius_norm();
    let residual_nse = if y_norm == F::zero() {
        F::zero()
    } else {
        let r = fitted.sub(y.data()).frobenius_norm() / y_norm;
        r * r
    };

    Ok(TapEstimate {
        taps,
        residual_nse,
        iterations: 0,
        objective_trace: Vec::new(),
        warnings,
    })
}

/// Output-only tap estimate: factor the sample covariance as `R Rᵀ`, then
/// alternate the closed-form tap solve (with the orthogonal factor as
/// surrogate input) and the Procrustes update of that factor.
pub fn estimate_taps_output_only<F: Real>(
    y: &SignalEnsemble<F>,
    shift: &ShiftOperator<F>,
    order_l: usize,
    cfg: &AltMinConfig<F>,
) -> Result<TapEstimate<F>, EstimationError> {
    if order_l == 0 {
        return Err(EstimationError::ZeroOrder);
    }
    if y.n() != shift.n() {
        return Err(EstimationError::RowMismatch {
            expected: shift.n(),
            got: y.n(),
        });
    }
    assert!(cfg.max_iters >= 1, "max_iters must be at least 1");
    assert!(cfg.rel_obj_tol > F::zero(), "rel_obj_tol must be positive");

    let n = shift.n();
    let mut centered = y.centered_copy();
    let cov = centered.sample_covariance();
    let target = covariance_factor(&cov, cfg.factor)?;

    let mut warnings = Vec::new();
    let mut u = match cfg.init {
        OrthogonalInit::Identity => DenseMatrix::identity(n),
        OrthogonalInit::RandomOrthogonal { seed } => random_orthogonal(n, RngSeed(seed)),
    };

    let target_norm = target.frobenius_norm();
    let mut trace: Vec<F> = Vec::new();
    let mut taps_matrix = DenseMatrix::zeros(n, order_l);
    let mut rank_warned = false;

    for _ in 0..cfg.max_iters {
        let (p, ratio) = solve_taps(&u, &target, shift.matrix(), order_l)?;
        if ratio < real(RANK_DEFICIENT_RTOL) && !rank_warned {
            warnings.push(format!(
                "rank-deficient inner design (sigma_min/sigma_max = {:.3e})",
                crate::scalar::approx_f64(ratio)
            ));
            rank_warned = true;
        }
        taps_matrix = p;
        let taps = NodeVariantTaps::new(taps_matrix.clone(), FilterFlavor::TypeI)?;
        let h = nvgf_matrix(&taps, shift.matrix())?;
        u = procrustes(&target.transpose_matmul(&h))?;

        let residual = target.sub(&h.matmul(&u)).frobenius_norm();
        let objective = residual * residual;
        let done = match trace.last() {
            Some(&prev) => prev - objective <= cfg.rel_obj_tol * prev.max(F::epsilon()),
            None => false,
        };
        trace.push(objective);
        if done {
            break;
        }
    }

    // A single-hop fit only determines |p₀|: flip signs (and the matching
    // rows of U) to make the window nonnegative; the product H·U and the
    // objective are unchanged.
    if order_l == 1 {
        for i in 0..n {
            if taps_matrix[(i, 0)] < F::zero() {
                taps_matrix[(i, 0)] = -taps_matrix[(i, 0)];
                for j in 0..n {
                    u[(i, j)] = -u[(i, j)];
                }
            }
        }
    }

    let iterations = trace.len();
    let objective = trace.last().copied().unwrap_or(F::zero());
    let residual_nse = if target_norm == F::zero() {
        F::zero()
    } else {
        objective / (target_norm * target_norm)
    };

    Ok(TapEstimate {
        taps: NodeVariantTaps::new(taps_matrix, FilterFlavor::TypeI)?,
        residual_nse,
        iterations,
        objective_trace: trace,
        warnings,
    })
}

/// Global maximizer of `trace(M · U)` over orthogonal `U`: with
/// `M = U_m Σ V_mᵀ`, the maximizer is `V_m U_mᵀ`.
pub fn procrustes<F: Real>(m: &DenseMatrix<F>) -> Result<DenseMatrix<F>, EstimationError> {
    if !m.is_square() {
        return Err(EstimationError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let d = svd(m)?;
    Ok(d.v.matmul_transpose(&d.u))
}

/// Orthogonal matrix from Gram-Schmidt on a seeded Gaussian matrix.
pub fn random_orthogonal<F: Real>(n: usize, seed: RngSeed) -> DenseMatrix<F> {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let mut rng = seed.rng(STREAM_ORTHO_INIT);
    let g = DenseMatrix::from_fn(n, n, |_, _| real::<F>(rng.sample::<f64, _>(StandardNormal)));
    let mut q = DenseMatrix::<F>::zeros(n, n);
    for j in 0..n {
        let mut col = g.column(j);
        for k in 0..j {
            let qk = q.column(k);
            let proj: F = qk.iter().zip(&col).map(|(&a, &b)| a * b).sum();
            for (c, &qv) in col.iter_mut().zip(&qk) {
                *c -= proj * qv;
            }
        }
        let norm: F = col.iter().map(|&v| v * v).sum::<F>().sqrt();
        // A Gaussian draw is never dependent in practice; fall back to a
        // unit vector if it happens at rounding level.
        if norm > real(1e-12) {
            for c in col.iter_mut() {
                *c /= norm;
            }
        } else {
            col = vec![F::zero(); n];
            col[j] = F::one();
        }
        q.set_column(j, &col);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ShiftKind;
    use crate::signals::white_ensemble;
    use crate::spectral::{unvectorize, vectorize};

    fn shift(n: usize, salt: usize) -> ShiftOperator<f64> {
        let raw = DenseMatrix::from_fn(n, n, |i, j| {
            (((i * 29 + j * 13 + salt * 7 + 3) % 83) as f64 / 83.0 - 0.5) * 2.0
        });
        let sym = DenseMatrix::from_fn(n, n, |i, j| (raw[(i, j)] + raw[(j, i)]) / 2.0);
        ShiftOperator::from_matrix(sym, ShiftKind::Custom).unwrap()
    }

    fn random_taps(n: usize, l: usize, salt: usize) -> NodeVariantTaps<f64> {
        let m = DenseMatrix::from_fn(n, l, |i, j| {
            (((i * 41 + j * 19 + salt * 5 + 1) % 89) as f64 / 89.0 - 0.5) * 2.0
        });
        NodeVariantTaps::new(m, FilterFlavor::TypeI).unwrap()
    }

    #[test]
    fn design_matrix_single_order_is_windowing() {
        let s = shift(3, 0);
        let x = white_ensemble::<f64>(3, 4, RngSeed(1));
        let a = design_matrix(&x, &s, 1).unwrap();
        let p = random_taps(3, 1, 2);
        let lhs = a.mul_vec(&vectorize(p.matrix()));
        let rhs = vectorize(&x.data().scale_rows(&p.matrix().column(0)));
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).abs() <= 1e-13);
        }
    }

    #[test]
    fn design_matrix_identity_inputs_vectorize_filter() {
        let s = shift(4, 1);
        let x = SignalEnsemble::from_matrix(DenseMatrix::identity(4));
        let a = design_matrix(&x, &s, 2).unwrap();
        let p = random_taps(4, 2, 3);
        let lhs = a.mul_vec(&vectorize(p.matrix()));
        let h = nvgf_matrix(&p, s.matrix()).unwrap();
        let rhs = vectorize(&h);
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).abs() <= 1e-12);
        }
    }

    #[test]
    fn design_matrix_identity_holds_for_random_instances() {
        let s = shift(4, 2);
        let x = white_ensemble::<f64>(4, 6, RngSeed(4));
        let a = design_matrix(&x, &s, 3).unwrap();
        let p = random_taps(4, 3, 5);
        let lhs = a.mul_vec(&vectorize(p.matrix()));
        let rhs = vectorize(&nvgf_apply(&p, s.matrix(), x.data()).unwrap());
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).abs() <= 1e-12);
        }
    }

    #[test]
    fn io_estimate_recovers_noiseless_taps() {
        let s = shift(10, 3);
        let p = random_taps(10, 3, 6);
        let x = white_ensemble::<f64>(10, 50, RngSeed(7));
        let y = SignalEnsemble::from_matrix(nvgf_apply(&p, s.matrix(), x.data()).unwrap());
        let est = estimate_taps_io(&x, &y, &s, 3).unwrap();
        let num = est.taps.matrix().sub(p.matrix()).frobenius_norm();
        let den = p.matrix().frobenius_norm();
        let nse = (num / den) * (num / den);
        assert!(nse <= 1e-16, "tap recovery NSE {nse}");
        assert!(est.residual_nse <= 1e-18);
        assert_eq!(est.iterations, 0);
    }

    #[test]
    fn io_estimate_matches_dense_pseudoinverse_route() {
        let s = shift(4, 8);
        let p = random_taps(4, 2, 9);
        let x = white_ensemble::<f64>(4, 5, RngSeed(10));
        let y = SignalEnsemble::from_matrix(nvgf_apply(&p, s.matrix(), x.data()).unwrap());
        let est = estimate_taps_io(&x, &y, &s, 2).unwrap();

        let a = design_matrix(&x, &s, 2).unwrap();
        let apinv = crate::spectral::pinv(&a, 1e-12).unwrap();
        let taps_dense =
            unvectorize(&apinv.mul_vec(&vectorize(y.data())), 4, 2).unwrap();
        let gap = est.taps.matrix().sub(&taps_dense).frobenius_norm();
        assert!(gap <= 1e-10, "block and dense routes differ by {gap}");
    }

    #[test]
    fn io_estimate_zero_output_gives_zero_taps() {
        let s = shift(5, 11);
        let x = white_ensemble::<f64>(5, 8, RngSeed(12));
        let y = SignalEnsemble::from_matrix(DenseMatrix::zeros(5, 8));
        let est = estimate_taps_io(&x, &y, &s, 2).unwrap();
        assert_eq!(est.taps.matrix().frobenius_norm(), 0.0);
        assert_eq!(est.residual_nse, 0.0);
    }

    #[test]
    fn io_estimate_warns_when_underdetermined() {
        let s = shift(3, 13);
        let x = white_ensemble::<f64>(3, 2, RngSeed(14));
        let y = white_ensemble::<f64>(3, 2, RngSeed(15));
        let est = estimate_taps_io(&x, &y, &s, 3).unwrap();
        assert!(!est.warnings.is_empty());
    }

    #[test]
    fn procrustes_identity_and_orthogonal_inputs() {
        let id = DenseMatrix::<f64>::identity(4);
        let u = procrustes(&id).unwrap();
        assert!(u.sub(&id).frobenius_norm() <= 1e-12);

        let q = random_orthogonal::<f64>(4, RngSeed(16));
        let u = procrustes(&q).unwrap();
        // trace(Q Qᵀ) = n is the maximum.
        let prod = q.matmul(&u);
        let trace: f64 = prod.diag().iter().sum();
        assert!((trace - 4.0).abs() <= 1e-10);
        assert!(u.sub(&q.transpose()).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn procrustes_output_is_orthogonal() {
        let m = DenseMatrix::from_fn(5, 5, |i, j| ((i * 3 + j * 5 + 1) as f64).sin());
        let u = procrustes(&m).unwrap();
        let gram = u.transpose_matmul(&u);
        assert!(gram.sub(&DenseMatrix::identity(5)).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn procrustes_beats_random_orthogonal_candidates() {
        let m = DenseMatrix::from_fn(5, 5, |i, j| ((i * 7 + j * 11 + 3) as f64).cos() * 2.0);
        let best = procrustes(&m).unwrap();
        let best_trace: f64 = m.matmul(&best).diag().iter().sum();
        for k in 0..10_000u64 {
            let q = random_orthogonal::<f64>(5, RngSeed(k));
            let t: f64 = m.matmul(&q).diag().iter().sum();
            assert!(
                t <= best_trace + 1e-9,
                "random candidate beats the closed form: {t} > {best_trace}"
            );
        }
    }

    #[test]
    fn alternating_objective_never_increases() {
        let s = shift(8, 17);
        let p = random_taps(8, 2, 18);
        let x = white_ensemble::<f64>(8, 400, RngSeed(19));
        let y = SignalEnsemble::from_matrix(nvgf_apply(&p, s.matrix(), x.data()).unwrap());
        let est =
            estimate_taps_output_only(&y, &s, 2, &AltMinConfig::default()).unwrap();
        for w in est.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "objective increased: {w:?}");
        }
        assert_eq!(est.iterations, est.objective_trace.len());
    }

    #[test]
    fn alternating_reaches_zero_for_orthogonal_target() {
        // Single-hop identity window makes H orthogonal when the target is.
        let s = shift(5, 20);
        let q = random_orthogonal::<f64>(5, RngSeed(21));
        // Target R = Q is orthogonal; H = Diag(p₀) with p₀ = 1 fits exactly.
        let y = SignalEnsemble::from_centered(q.scaled((5.0f64).sqrt()));
        let est =
            estimate_taps_output_only(&y, &s, 1, &AltMinConfig::default()).unwrap();
        let last = *est.objective_trace.last().unwrap();
        assert!(last <= 1e-10, "objective {last}");
    }

    #[test]
    fn windowing_recovery_matches_absolute_taps() {
        let s = shift(6, 22);
        let p0 = [1.5, 0.3, 2.0, 0.8, 1.1, 0.6];
        let x = white_ensemble::<f64>(6, 100_000, RngSeed(23));
        let y = SignalEnsemble::from_matrix(x.data().scale_rows(&p0));
        let est =
            estimate_taps_output_only(&y, &s, 1, &AltMinConfig::default()).unwrap();
        for (i, &want) in p0.iter().enumerate() {
            let got = est.taps.matrix()[(i, 0)];
            assert!(got >= 0.0, "sign convention violated at node {i}");
            let rel = (got - want).abs() / want;
            assert!(rel <= 0.05, "node {i}: recovered {got}, want {want}");
        }
    }

    #[test]
    fn procrustes_handles_rank_deficient_input() {
        let ones = DenseMatrix::<f64>::from_fn(9, 9, |_, _| 0.7);
        let u = procrustes(&ones).unwrap();
        let gram = u.transpose_matmul(&u);
        assert!(gram.sub(&DenseMatrix::identity(9)).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn output_only_estimation_completes_with_few_realizations() {
        // Fewer realizations than nodes leaves the covariance factor rank
        // deficient; the fit must still run to completion.
        let s = shift(6, 25);
        let y = white_ensemble::<f64>(6, 3, RngSeed(26));
        let est = estimate_taps_output_only(&y, &s, 2, &AltMinConfig::default()).unwrap();
        assert!(est.residual_nse.is_finite());
        assert!(est.taps.matrix().check_finite().is_ok());
    }

    #[test]
    fn random_orthogonal_is_orthogonal_and_deterministic() {
        let a = random_orthogonal::<f64>(7, RngSeed(24));
        let b = random_orthogonal::<f64>(7, RngSeed(24));
        assert_eq!(a, b);
        let gram = a.transpose_matmul(&a);
        assert!(gram.sub(&DenseMatrix::identity(7)).frobenius_norm() <= 1e-12);
    }
}
