//! Property tests for the structural invariants: the primal/dual filter
//! equivalence on random instances, vectorization round trips, and the
//! affine invariance of the Pascal-modulo error.

use proptest::prelude::*;

use graphfreq::dual_frequency::pne;
use graphfreq::filters::{nvgf_apply, ExpansionModel};
use graphfreq::graph::{ShiftKind, ShiftOperator, Vandermonde};
use graphfreq::spectral::{unvectorize, vectorize};
use graphfreq::Mat64;

fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Mat64 {
    Mat64::new(rows, cols, data).unwrap()
}

fn shift_strategy(max_n: usize) -> impl Strategy<Value = ShiftOperator<f64>> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |data| {
            let raw = matrix(n, n, data);
            let sym = Mat64::from_fn(n, n, |i, j| (raw[(i, j)] + raw[(j, i)]) / 2.0);
            ShiftOperator::from_matrix(sym, ShiftKind::Custom).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    // A type-I filter with expanded taps acts on the spectral signal as the
    // corresponding type-II filter on the dual graph.
    #[test]
    fn primal_and_dual_filter_routes_agree(
        (shift, lambda_f, coeffs, x) in (2usize..20, 1usize..6, 1usize..6).prop_flat_map(|(n, l, k)| {
            (
                prop::collection::vec(-2.0..2.0f64, n * n),
                prop::collection::vec(-1.5..1.5f64, n),
                prop::collection::vec(-2.0..2.0f64, k * l),
                prop::collection::vec(-3.0..3.0f64, n),
            )
                .prop_map(move |(s, lam, c, x)| {
                    let raw = matrix(n, n, s);
                    let sym = Mat64::from_fn(n, n, |i, j| (raw[(i, j)] + raw[(j, i)]) / 2.0);
                    (
                        ShiftOperator::from_matrix(sym, ShiftKind::Custom).unwrap(),
                        lam,
                        matrix(k, l, c),
                        x,
                    )
                })
        })
    ) {
        let model = ExpansionModel::new(&shift, lambda_f, coeffs).unwrap();
        let dual = shift.dual_from_frequencies(model.lambda_f()).unwrap();

        let y = nvgf_apply(&model.primal_taps(), shift.matrix(), &Mat64::from_column(&x)).unwrap();
        let lhs = shift.gft(&y.column(0)).unwrap();

        let xhat = shift.gft(&x).unwrap();
        let rhs = nvgf_apply(&model.dual_taps(), dual.matrix(), &Mat64::from_column(&xhat)).unwrap();

        let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let gap: f64 = lhs
            .iter()
            .zip(rhs.column(0))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        // Tap magnitudes scale the admissible rounding.
        let scale = 1.0 + model.primal_taps().matrix().max_abs();
        prop_assert!(gap <= 1e-9 * scale * (1.0 + x_norm), "route gap {gap}");
    }

    #[test]
    fn vectorization_round_trips(
        (rows, cols, data) in (1usize..10, 1usize..10).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(-10.0..10.0f64, r * c))
        })
    ) {
        let m = matrix(rows, cols, data);
        let back = unvectorize(&vectorize(&m), rows, cols).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn gft_round_trips(
        (shift, x) in shift_strategy(16).prop_flat_map(|s| {
            let n = s.n();
            (Just(s), prop::collection::vec(-5.0..5.0f64, n))
        })
    ) {
        let back = shift.igft(&shift.gft(&x).unwrap()).unwrap();
        let gap: f64 = x
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(gap <= 1e-12 * (1.0 + norm));
    }

    #[test]
    fn vandermonde_recurrence_is_exact(
        (nodes, degrees) in (prop::collection::vec(-3.0..3.0f64, 1..12), 2usize..7)
    ) {
        let v = Vandermonde::new(&nodes, degrees);
        let m = v.matrix();
        for k in 0..degrees - 1 {
            for (i, &x) in nodes.iter().enumerate() {
                prop_assert_eq!(m[(i, k + 1)], m[(i, k)] * x);
            }
        }
    }

    // Remapping an estimate affinely never changes its error modulo the
    // Pascal class.
    #[test]
    fn pne_is_invariant_under_affine_remaps(
        (reference, estimate, a, b) in (2usize..16).prop_flat_map(|n| {
            (
                prop::collection::vec(0.1..3.0f64, n),
                prop::collection::vec(-3.0..3.0f64, n),
                -4.0..4.0f64,
                prop_oneof![-4.0..-0.1f64, 0.1..4.0f64],
            )
        })
    ) {
        let base = pne(&estimate, &reference).unwrap();
        let remapped: Vec<f64> = estimate.iter().map(|&e| a + b * e).collect();
        let again = pne(&remapped, &reference).unwrap();
        prop_assert!(
            (base - again).abs() <= 1e-12 * base.max(1e-9),
            "pne changed: {base} vs {again}"
        );
    }
}
