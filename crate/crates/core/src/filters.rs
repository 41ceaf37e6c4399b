//! Classical and node-variant graph filters, the conversion between primal
//! and dual filter taps, and the consistency error between the two filter
//! routes.
//!
//! A type-I node-variant filter scales after shifting, `Σ Diag(p_l) S^l`;
//! a type-II filter scales before, `Σ S^l Diag(p_l)`. With taps expanded in
//! powers of the dual frequencies (`P = Ψ_f C`), a type-I filter on the
//! primal graph acts as a type-II filter with taps `P̂ = Ψ Cᵀ` on the dual
//! graph, and [`corollary_error`] measures how far a given tap pair is from
//! that equivalence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DualGraph, ShiftOperator, Vandermonde};
use crate::scalar::Real;
use crate::signals::SignalEnsemble;
use crate::spectral::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("tap matrix has {got} rows, expected {expected}")]
    RowMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tap matrix must have at least one column")]
    EmptyTaps,
    #[error("non-finite tap value")]
    NonFiniteTaps,
}

/// Node-variant filter flavor: scale-then-shift order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterFlavor {
    /// `Σ_l Diag(p_l) S^l` — scales the shifted signal per node.
    TypeI,
    /// `Σ_l S^l Diag(p_l)` — scales the signal per node before shifting.
    TypeII,
}

/// Per-node filter taps: column `l` holds the tap vector applied at hop `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize + Real", deserialize = "F: Deserialize<'de> + Real"))]
pub struct NodeVariantTaps<F> {
    taps: DenseMatrix<F>,
    flavor: FilterFlavor,
}

impl<F: Real> NodeVariantTaps<F> {
    pub fn new(taps: DenseMatrix<F>, flavor: FilterFlavor) -> Result<Self, FilterError> {
        if taps.cols() == 0 {
            return Err(FilterError::EmptyTaps);
        }
        if taps.check_finite().is_err() {
            return Err(FilterError::NonFiniteTaps);
        }
        Ok(Self { taps, flavor })
    }

    pub fn n(&self) -> usize {
        self.taps.rows()
    }

    /// Filter order plus one: the number of hop tap vectors.
    pub fn len(&self) -> usize {
        self.taps.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.cols() == 0
    }

    pub fn matrix(&self) -> &DenseMatrix<F> {
        &self.taps
    }

    pub fn flavor(&self) -> FilterFlavor {
        self.flavor
    }

    /// Tap vector for hop `l`.
    pub fn hop(&self, l: usize) -> Vec<F> {
        self.taps.column(l)
    }
}

/// Classical graph filter matrix `Σ_l p_l S^l`, evaluated by Horner
/// recursion on the shift matrix.
pub fn cgf_matrix<F: Real>(taps: &[F], shift: &DenseMatrix<F>) -> DenseMatrix<F> {
    assert!(shift.is_square(), "shift must be square");
    assert!(!taps.is_empty(), "need at least one tap");
    let n = shift.rows();
    let mut acc = DenseMatrix::identity(n).scaled(taps[taps.len() - 1]);
    for &p in taps[..taps.len() - 1].iter().rev() {
        acc = shift.matmul(&acc);
        for i in 0..n {
            acc[(i, i)] += p;
        }
    }
    acc
}

/// Node-variant filter matrix, accumulating successive shift powers rather
/// than forming each `S^l` from scratch.
pub fn nvgf_matrix<F: Real>(
    taps: &NodeVariantTaps<F>,
    shift: &DenseMatrix<F>,
) -> Result<DenseMatrix<F>, FilterError> {
    check_rows(taps, shift.rows())?;
    let n = shift.rows();
    let mut power = DenseMatrix::<F>::identity(n);
    let mut acc = DenseMatrix::zeros(n, n);
    for l in 0..taps.len() {
        if l > 0 {
            power = shift.matmul(&power);
        }
        let hop = taps.hop(l);
        let term = match taps.flavor() {
            FilterFlavor::TypeI => power.scale_rows(&hop),
            FilterFlavor::TypeII => power.scale_cols(&hop),
        };
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Applies a node-variant filter to the columns of `x`.
///
/// Uses the shift-and-scale recursion when there are fewer signal columns
/// than nodes; otherwise materializes the filter matrix once.
pub fn nvgf_apply<F: Real>(
    taps: &NodeVariantTaps<F>,
    shift: &DenseMatrix<F>,
    x: &DenseMatrix<F>,
) -> Result<DenseMatrix<F>, FilterError> {
    check_rows(taps, shift.rows())?;
    if x.rows() != shift.rows() {
        return Err(FilterError::DimensionMismatch {
            expected: shift.rows(),
            got: x.rows(),
        });
    }
    if x.cols() >= x.rows() {
        return Ok(nvgf_matrix(taps, shift)?.matmul(x));
    }
    let out = match taps.flavor() {
        FilterFlavor::TypeI => {
            // y = Σ_l Diag(p_l) (S^l x)
            let mut shifted = x.clone();
            let mut acc = shifted.scale_rows(&taps.hop(0));
            for l in 1..taps.len() {
                shifted = shift.matmul(&shifted);
                acc = acc.add(&shifted.scale_rows(&taps.hop(l)));
            }
            acc
        }
        FilterFlavor::TypeII => {
            // y = Σ_l S^l (Diag(p_l) x), evaluated by Horner on S.
            let last = taps.len() - 1;
            let mut acc = x.scale_rows(&taps.hop(last));
            for l in (0..last).rev() {
                acc = shift.matmul(&acc);
                acc = acc.add(&x.scale_rows(&taps.hop(l)));
            }
            acc
        }
    };
    Ok(out)
}

/// [`nvgf_apply`] over a [`SignalEnsemble`].
pub fn nvgf_apply_ensemble<F: Real>(
    taps: &NodeVariantTaps<F>,
    shift: &ShiftOperator<F>,
    x: &SignalEnsemble<F>,
) -> Result<SignalEnsemble<F>, FilterError> {
    let data = nvgf_apply(taps, shift.matrix(), x.data())?;
    Ok(SignalEnsemble::from_matrix(data))
}

fn check_rows<F: Real>(taps: &NodeVariantTaps<F>, n: usize) -> Result<(), FilterError> {
    if taps.n() != n {
        return Err(FilterError::RowMismatch {
            expected: n,
            got: taps.n(),
        });
    }
    Ok(())
}

/// Expansion of node-variant taps in powers of the dual frequencies.
///
/// The `K×L` coefficient matrix `C` links the two domains: primal taps are
/// `P = Ψ_f C` (type I) and dual taps are `P̂ = Ψ Cᵀ` (type II), with `Ψ_f`
/// the Vandermonde matrix of the dual frequencies and `Ψ` the Vandermonde
/// matrix of the primal eigenvalues.
#[derive(Debug, Clone)]
pub struct ExpansionModel<F> {
    coefficients: DenseMatrix<F>,
    lambda_f: Vec<F>,
    psi_f: Vandermonde<F>,
    psi: Vandermonde<F>,
}

impl<F: Real> ExpansionModel<F> {
    pub fn new(
        shift: &ShiftOperator<F>,
        lambda_f: Vec<F>,
        coefficients: DenseMatrix<F>,
    ) -> Result<Self, FilterError> {
        if lambda_f.len() != shift.n() {
            return Err(FilterError::DimensionMismatch {
                expected: shift.n(),
                got: lambda_f.len(),
            });
        }
        let degree_k = coefficients.rows();
        let order_l = coefficients.cols();
        if degree_k == 0 || order_l == 0 {
            return Err(FilterError::EmptyTaps);
        }
        let psi_f = Vandermonde::new(&lambda_f, degree_k);
        let psi = Vandermonde::new(shift.eigenvalues(), order_l);
        Ok(Self {
            coefficients,
            lambda_f,
            psi_f,
            psi,
        })
    }

    pub fn order_l(&self) -> usize {
        self.coefficients.cols()
    }

    pub fn degree_k(&self) -> usize {
        self.coefficients.rows()
    }

    pub fn coefficients(&self) -> &DenseMatrix<F> {
        &self.coefficients
    }

    pub fn lambda_f(&self) -> &[F] {
        &self.lambda_f
    }

    pub fn psi_f(&self) -> &Vandermonde<F> {
        &self.psi_f
    }

    pub fn psi(&self) -> &Vandermonde<F> {
        &self.psi
    }

    /// Primal taps `P = Ψ_f C`, used as a type-I filter on the primal graph.
    pub fn primal_taps(&self) -> NodeVariantTaps<F> {
        let p = self.psi_f.matrix().matmul(&self.coefficients);
        NodeVariantTaps {
            taps: p,
            flavor: FilterFlavor::TypeI,
        }
    }

    /// Dual taps `P̂ = Ψ Cᵀ`, used as a type-II filter on the dual graph.
    pub fn dual_taps(&self) -> NodeVariantTaps<F> {
        let p = self.psi.matrix().matmul_transpose(&self.coefficients);
        NodeVariantTaps {
            taps: p,
            flavor: FilterFlavor::TypeII,
        }
    }

    /// Consistency error of this model's tap pair on its own dual graph.
    pub fn corollary_error(&self, shift: &ShiftOperator<F>) -> Result<F, FilterError> {
        let dual = shift
            .dual_from_frequencies(&self.lambda_f)
            .map_err(|_| FilterError::DimensionMismatch {
                expected: shift.n(),
                got: self.lambda_f.len(),
            })?;
        corollary_error(&self.primal_taps(), &self.dual_taps(), shift, &dual)
    }
}

/// Relative squared gap between filtering-then-transforming and
/// transforming-then-filtering on the dual graph:
/// `‖Vᵀ H_I − H_II Vᵀ‖_F² / ‖Vᵀ H_I‖_F²`.
///
/// Zero exactly when the tap pair satisfies the expansion-model conversion.
pub fn corollary_error<F: Real>(
    primal: &NodeVariantTaps<F>,
    dual: &NodeVariantTaps<F>,
    shift: &ShiftOperator<F>,
    dual_graph: &DualGraph<F>,
) -> Result<F, FilterError> {
    if dual_graph.n() != shift.n() {
        return Err(FilterError::DimensionMismatch {
            expected: shift.n(),
            got: dual_graph.n(),
        });
    }
    let h_primal = nvgf_matrix(primal, shift.matrix())?;
    let h_dual = nvgf_matrix(dual, dual_graph.matrix())?;
    let vt = shift.eigenvectors().transpose();
    let lhs = vt.matmul(&h_primal);
    let rhs = h_dual.matmul(&vt);
    let den = lhs.frobenius_norm();
    if den == F::zero() {
        return Ok(if rhs.frobenius_norm() == F::zero() {
            F::zero()
        } else {
            F::one()
        });
    }
    let num = lhs.sub(&rhs).frobenius_norm();
    Ok((num / den) * (num / den))
}

/// Evaluates the dual-side action as a sum of `L` classical graph
/// convolutions on the dual graph, each fed a modulated spectral signal:
/// `Σ_l H(c_l, S_f)(λ^l ⊙ x̂)`.
pub fn dual_convolution_split<F: Real>(
    model: &ExpansionModel<F>,
    shift: &ShiftOperator<F>,
    xhat: &[F],
) -> Result<Vec<F>, FilterError> {
    let n = shift.n();
    if xhat.len() != n {
        return Err(FilterError::DimensionMismatch {
            expected: n,
            got: xhat.len(),
        });
    }
    let dual = shift
        .dual_from_frequencies(model.lambda_f())
        .map_err(|_| FilterError::DimensionMismatch {
            expected: n,
            got: model.lambda_f().len(),
        })?;
    let lambda = shift.eigenvalues();
    let mut modulated = xhat.to_vec();
    let mut out = vec![F::zero(); n];
    for l in 0..model.order_l() {
        if l > 0 {
            for (m, &lam) in modulated.iter_mut().zip(lambda) {
                *m *= lam;
            }
        }
        let h = cgf_matrix(&model.coefficients().column(l), dual.matrix());
        for (o, v) in out.iter_mut().zip(h.mul_vec(&modulated)) {
            *o += v;
        }
    }

    #[cfg(debug_assertions)]
    {
        use crate::scalar::{approx_f64, real};
        let direct = nvgf_apply(
            &model.dual_taps(),
            dual.matrix(),
            &DenseMatrix::from_column(xhat),
        )?;
        let mut gap = F::zero();
        let mut norm = F::zero();
        for (i, &o) in out.iter().enumerate() {
            let d = o - direct[(i, 0)];
            gap += d * d;
            norm += direct[(i, 0)] * direct[(i, 0)];
        }
        debug_assert!(
            gap.sqrt() <= real::<F>(1e-10) * (F::one() + norm.sqrt()),
            "split route diverges from the dual filter route: gap {:.3e}",
            approx_f64(gap.sqrt())
        );
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ShiftKind;

    fn path3() -> ShiftOperator<f64> {
        let w = DenseMatrix::new(
            3,
            3,
            vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        ShiftOperator::from_adjacency(w).unwrap()
    }

    fn pseudo_random_shift(n: usize, salt: usize) -> ShiftOperator<f64> {
        let raw = DenseMatrix::from_fn(n, n, |i, j| {
            (((i * 29 + j * 13 + salt * 7 + 3) % 83) as f64 / 83.0 - 0.5) * 2.0
        });
        let sym = DenseMatrix::from_fn(n, n, |i, j| (raw[(i, j)] + raw[(j, i)]) / 2.0);
        ShiftOperator::from_matrix(sym, ShiftKind::Custom).unwrap()
    }

    fn pseudo_random_mat(rows: usize, cols: usize, salt: usize) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(rows, cols, |i, j| {
            (((i * 41 + j * 19 + salt * 5 + 1) % 89) as f64 / 89.0 - 0.5) * 2.0
        })
    }

    fn taps(m: DenseMatrix<f64>, flavor: FilterFlavor) -> NodeVariantTaps<f64> {
        NodeVariantTaps::new(m, flavor).unwrap()
    }

    #[test]
    fn cgf_single_tap_is_scaled_identity() {
        let s = path3();
        let h = cgf_matrix(&[1.0], s.matrix());
        assert_eq!(h, DenseMatrix::identity(3));
        let h = cgf_matrix(&[0.0, 1.0], s.matrix());
        assert!(h.sub(s.matrix()).frobenius_norm() <= 1e-15);
    }

    #[test]
    fn cgf_on_path_graph_impulse() {
        // (I + S) e₁ touches node 0 and its neighbor.
        let s = path3();
        let h = cgf_matrix(&[1.0, 1.0], s.matrix());
        let y = h.mul_vec(&[1.0, 0.0, 0.0]);
        assert_eq!(y, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn cgf_horner_matches_explicit_powers() {
        let s = pseudo_random_shift(6, 0);
        let p = [0.5, -1.25, 0.75, 2.0];
        let horner = cgf_matrix(&p, s.matrix());
        let mut explicit = DenseMatrix::zeros(6, 6);
        let mut power = DenseMatrix::identity(6);
        for (l, &pl) in p.iter().enumerate() {
            if l > 0 {
                power = s.matrix().matmul(&power);
            }
            explicit = explicit.add(&power.scaled(pl));
        }
        assert!(horner.sub(&explicit).frobenius_norm() <= 1e-10 * explicit.frobenius_norm());
    }

    #[test]
    fn constant_columns_reduce_to_classical_filter() {
        let s = pseudo_random_shift(5, 1);
        let p = [1.1, -0.4, 0.9];
        let constant = DenseMatrix::from_fn(5, 3, |_, l| p[l]);
        for flavor in [FilterFlavor::TypeI, FilterFlavor::TypeII] {
            let h = nvgf_matrix(&taps(constant.clone(), flavor), s.matrix()).unwrap();
            let c = cgf_matrix(&p, s.matrix());
            assert!(h.sub(&c).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn single_hop_filter_is_diagonal() {
        let s = pseudo_random_shift(4, 2);
        let p = pseudo_random_mat(4, 1, 3);
        for flavor in [FilterFlavor::TypeI, FilterFlavor::TypeII] {
            let h = nvgf_matrix(&taps(p.clone(), flavor), s.matrix()).unwrap();
            let want = DenseMatrix::from_diag(&p.column(0));
            assert!(h.sub(&want).frobenius_norm() <= 1e-15);
        }
    }

    #[test]
    fn nvgf_matrix_matches_term_by_term_oracle() {
        let s = pseudo_random_shift(5, 4);
        let p = pseudo_random_mat(5, 3, 5);
        for flavor in [FilterFlavor::TypeI, FilterFlavor::TypeII] {
            let h = nvgf_matrix(&taps(p.clone(), flavor), s.matrix()).unwrap();
            let mut explicit = DenseMatrix::zeros(5, 5);
            for l in 0..3 {
                // S^l built from scratch per term.
                let mut power = DenseMatrix::identity(5);
                for _ in 0..l {
                    power = s.matrix().matmul(&power);
                }
                let term = match flavor {
                    FilterFlavor::TypeI => power.scale_rows(&p.column(l)),
                    FilterFlavor::TypeII => power.scale_cols(&p.column(l)),
                };
                explicit = explicit.add(&term);
            }
            assert!(h.sub(&explicit).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn apply_identity_returns_filter_matrix() {
        let s = pseudo_random_shift(4, 6);
        let p = pseudo_random_mat(4, 2, 7);
        let t = taps(p, FilterFlavor::TypeI);
        let applied = nvgf_apply(&t, s.matrix(), &DenseMatrix::identity(4)).unwrap();
        let h = nvgf_matrix(&t, s.matrix()).unwrap();
        assert!(applied.sub(&h).frobenius_norm() <= 1e-13);
    }

    #[test]
    fn apply_zero_taps_gives_zero() {
        let s = path3();
        let t = taps(DenseMatrix::zeros(3, 2), FilterFlavor::TypeII);
        let x = pseudo_random_mat(3, 5, 8);
        let y = nvgf_apply(&t, s.matrix(), &x).unwrap();
        assert_eq!(y.frobenius_norm(), 0.0);
    }

    #[test]
    fn apply_recursion_matches_matrix_route() {
        let s = pseudo_random_shift(7, 9);
        let p = pseudo_random_mat(7, 3, 10);
        for flavor in [FilterFlavor::TypeI, FilterFlavor::TypeII] {
            let t = taps(p.clone(), flavor);
            // Two columns < seven nodes forces the recursion path.
            let x = pseudo_random_mat(7, 2, 11);
            let y = nvgf_apply(&t, s.matrix(), &x).unwrap();
            let want = nvgf_matrix(&t, s.matrix()).unwrap().matmul(&x);
            assert!(y.sub(&want).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn apply_rejects_row_mismatch() {
        let s = path3();
        let t = taps(DenseMatrix::zeros(4, 2), FilterFlavor::TypeI);
        assert!(matches!(
            nvgf_apply(&t, s.matrix(), &DenseMatrix::zeros(3, 1)),
            Err(FilterError::RowMismatch { .. })
        ));
    }

    fn random_model(n: usize, l: usize, k: usize, salt: usize) -> (ShiftOperator<f64>, ExpansionModel<f64>) {
        let s = pseudo_random_shift(n, salt);
        let lambda_f: Vec<f64> = (0..n)
            .map(|i| (((i * 23 + salt * 3 + 1) % 19) as f64 / 19.0 - 0.5) * 2.0)
            .collect();
        let c = pseudo_random_mat(k, l, salt + 100);
        let model = ExpansionModel::new(&s, lambda_f, c).unwrap();
        (s, model)
    }

    #[test]
    fn first_row_only_coefficients_give_constant_primal_taps() {
        let (s, _) = random_model(5, 3, 3, 12);
        let p_row = [0.7, -0.2, 1.5];
        let mut c = DenseMatrix::zeros(3, 3);
        for (l, &v) in p_row.iter().enumerate() {
            c[(0, l)] = v;
        }
        let lambda_f = vec![0.3, -0.6, 0.9, 0.1, -0.8];
        let model = ExpansionModel::new(&s, lambda_f, c).unwrap();
        let p = model.primal_taps();
        for (l, &want) in p_row.iter().enumerate() {
            for i in 0..5 {
                assert!((p.matrix()[(i, l)] - want).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn first_column_only_coefficients_give_pure_windowing() {
        let (s, _) = random_model(5, 3, 3, 13);
        let phat = [0.4, 1.2, -0.6];
        let mut c = DenseMatrix::zeros(3, 3);
        for (k, &v) in phat.iter().enumerate() {
            c[(k, 0)] = v;
        }
        let lambda_f = vec![0.5, -0.25, 0.75, -0.9, 0.15];
        let model = ExpansionModel::new(&s, lambda_f.clone(), c).unwrap();

        // Dual taps have constant columns.
        let dual = model.dual_taps();
        for (k, &want) in phat.iter().enumerate() {
            let col = dual.matrix().column(k);
            for v in &col {
                assert!((v - want).abs() <= 1e-15);
            }
        }
        // Primal filter is Diag(Ψ_f p̂).
        let h = nvgf_matrix(&model.primal_taps(), s.matrix()).unwrap();
        let window = model.psi_f().matrix().mul_vec(&phat);
        let want = DenseMatrix::from_diag(&window);
        assert!(h.sub(&want).frobenius_norm() <= 1e-13);
    }

    #[test]
    fn coefficient_round_trip_through_pseudoinverse() {
        let (_, model) = random_model(8, 4, 3, 14);
        let p = model.primal_taps();
        let pinv_psi_f =
            crate::spectral::pinv(model.psi_f().matrix(), 1e-12).unwrap();
        let c_back = pinv_psi_f.matmul(p.matrix());
        let err = c_back.sub(model.coefficients()).frobenius_norm();
        assert!(err <= 1e-10, "coefficient recovery error {err}");
    }

    #[test]
    fn corollary_error_vanishes_for_consistent_models() {
        for salt in 0..5 {
            let (s, model) = random_model(6 + salt, 3, 3, 20 + salt);
            let eps = model.corollary_error(&s).unwrap();
            assert!(eps <= 1e-18, "consistency error {eps}");
        }
    }

    #[test]
    fn corollary_error_is_one_for_zeroed_dual_taps() {
        let (s, model) = random_model(6, 3, 3, 30);
        let dual_zero = taps(DenseMatrix::zeros(6, 3), FilterFlavor::TypeII);
        let dual = s.dual_from_frequencies(model.lambda_f()).unwrap();
        let eps = corollary_error(&model.primal_taps(), &dual_zero, &s, &dual).unwrap();
        assert!((eps - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn split_convolution_matches_dual_route() {
        let (s, model) = random_model(8, 3, 3, 40);
        let xhat: Vec<f64> = (0..8).map(|i| ((i as f64) - 3.5) / 2.0).collect();
        let split = dual_convolution_split(&model, &s, &xhat).unwrap();
        let dual = s.dual_from_frequencies(model.lambda_f()).unwrap();
        let direct = nvgf_apply(
            &model.dual_taps(),
            dual.matrix(),
            &DenseMatrix::from_column(&xhat),
        )
        .unwrap();
        for (i, v) in split.iter().enumerate() {
            assert!((v - direct[(i, 0)]).abs() <= 1e-10);
        }
    }

    // The two flavors coincide exactly when the taps are node-invariant
    // and diverge for generic per-node taps.
    #[test]
    fn flavor_duality_holds_only_for_constant_columns() {
        let s = pseudo_random_shift(6, 50);
        let constant = DenseMatrix::from_fn(6, 3, |_, l| [0.9, -0.1, 0.4][l]);
        let h1 = nvgf_matrix(&taps(constant.clone(), FilterFlavor::TypeI), s.matrix()).unwrap();
        let h2 = nvgf_matrix(&taps(constant, FilterFlavor::TypeII), s.matrix()).unwrap();
        assert!(h1.sub(&h2).frobenius_norm() <= 1e-12);

        let varying = pseudo_random_mat(6, 3, 51);
        let h1 = nvgf_matrix(&taps(varying.clone(), FilterFlavor::TypeI), s.matrix()).unwrap();
        let h2 = nvgf_matrix(&taps(varying, FilterFlavor::TypeII), s.matrix()).unwrap();
        let gap = h1.sub(&h2).frobenius_norm() / h1.frobenius_norm();
        assert!(gap > 1e-8, "flavors coincide for varying taps: {gap}");
    }

    #[test]
    fn split_convolution_single_order() {
        let (s, model) = random_model(5, 1, 1, 41);
        let xhat = vec![0.0; 5];
        assert_eq!(dual_convolution_split(&model, &s, &xhat).unwrap(), vec![0.0; 5]);
    }
}
