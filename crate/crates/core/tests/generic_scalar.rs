//! The numeric core is generic over the scalar; exercise the main code
//! paths at `f32` with correspondingly looser tolerances.

use graphfreq::filters::ExpansionModel;
use graphfreq::graph::{ShiftKind, ShiftOperator};
use graphfreq::signals::{white_ensemble, RngSeed};
use graphfreq::spectral::{pinv, sym_evd, DenseMatrix};
use graphfreq::Mat32;

fn random_symmetric_f32(n: usize, seed: u64) -> Mat32 {
    let g = white_ensemble::<f32>(n, n, RngSeed(seed)).into_matrix();
    Mat32::from_fn(n, n, |i, j| (g[(i, j)] + g[(j, i)]) / 2.0)
}

#[test]
fn eigendecomposition_works_in_single_precision() {
    let m = random_symmetric_f32(12, 1);
    let eig = sym_evd(&m).unwrap();
    let err = eig.reconstruct().sub(&m).frobenius_norm();
    assert!(err <= 1e-5 * m.frobenius_norm(), "reconstruction error {err}");
    for w in eig.values.windows(2) {
        assert!(w[0] <= w[1]);
    }
}

#[test]
fn pseudoinverse_works_in_single_precision() {
    let m = white_ensemble::<f32>(8, 4, RngSeed(2)).into_matrix();
    let p = pinv(&m, 1e-6f32).unwrap();
    let err = p
        .matmul(&m)
        .sub(&DenseMatrix::<f32>::identity(4))
        .frobenius_norm();
    assert!(err <= 1e-4, "left-inverse error {err}");
}

#[test]
fn filter_conversion_holds_in_single_precision() {
    let shift = ShiftOperator::from_matrix(random_symmetric_f32(10, 3), ShiftKind::Custom).unwrap();
    let lambda_f = white_ensemble::<f32>(10, 1, RngSeed(4)).into_matrix().column(0);
    let coeffs = white_ensemble::<f32>(3, 3, RngSeed(5)).into_matrix();
    let model = ExpansionModel::new(&shift, lambda_f, coeffs).unwrap();
    let eps = model.corollary_error(&shift).unwrap();
    assert!(eps <= 1e-9, "single-precision conversion error {eps}");
}
