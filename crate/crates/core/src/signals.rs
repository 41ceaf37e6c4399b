//! Random graph-signal generation, covariance propagation, and the
//! stationarity proxy.
//!
//! All randomness flows through an explicit [`RngSeed`]; there is no global
//! generator state, and the same seed reproduces the same ensemble bit for
//! bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::{nvgf_matrix, FilterError, NodeVariantTaps};
use crate::graph::ShiftOperator;
use crate::scalar::{approx_f64, real, Real};
use crate::spectral::{sym_evd, DenseMatrix, SpectralError};

/// Stream ids keep independently seeded generators decorrelated even when
/// callers reuse one seed across stages.
const STREAM_WHITE: u64 = 0x57;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spectral covariance is zero")]
    ZeroCovariance,
    #[error("covariance is indefinite: eigenvalue {min_eigenvalue:.3e} below -{threshold:.3e}")]
    IndefiniteInput { min_eigenvalue: f64, threshold: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// Seed for deterministic generation; the same seed yields a bit-identical
/// ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub(crate) fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

/// An N×T matrix of graph signals; column `t` is one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalEnsemble<F> {
    data: DenseMatrix<F>,
    centered: bool,
}

impl<F: Real> SignalEnsemble<F> {
    pub fn from_matrix(data: DenseMatrix<F>) -> Self {
        Self {
            data,
            centered: false,
        }
    }

    /// Wraps data the caller guarantees to be row-centered already.
    pub fn from_centered(data: DenseMatrix<F>) -> Self {
        Self {
            data,
            centered: true,
        }
    }

    pub fn n(&self) -> usize {
        self.data.rows()
    }

    pub fn t(&self) -> usize {
        self.data.cols()
    }

    pub fn data(&self) -> &DenseMatrix<F> {
        &self.data
    }

    pub fn into_matrix(self) -> DenseMatrix<F> {
        self.data
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Removes each row's mean and records the fact.
    pub fn center(&mut self) {
        if self.centered {
            return;
        }
        let t = self.t();
        if t > 0 {
            let tf = real::<F>(t as f64);
            for i in 0..self.n() {
                let mean = self.data.row(i).iter().copied().sum::<F>() / tf;
                for j in 0..t {
                    self.data[(i, j)] -= mean;
                }
            }
        }
        self.centered = true;
    }

    pub fn centered_copy(&self) -> Self {
        let mut c = self.clone();
        c.center();
        c
    }

    /// Sample covariance `(1/T) Y Yᵀ`, centering the ensemble first if it
    /// is not already centered.
    pub fn sample_covariance(&mut self) -> DenseMatrix<F> {
        self.center();
        let t = self.t().max(1);
        self.data
            .matmul_transpose(&self.data)
            .scaled(F::one() / real(t as f64))
    }
}

/// Zero-mean normal draw with standard deviation `sigma`, truncated at one
/// standard deviation by rejection sampling.
pub(crate) fn truncated_normal<F: Real>(rng: &mut ChaCha8Rng, sigma: F) -> F {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= 1.0 {
            return sigma * real(z);
        }
    }
}

/// I.i.d. standard-normal ensemble, deterministic per seed.
pub fn white_ensemble<F: Real>(n: usize, t: usize, seed: RngSeed) -> SignalEnsemble<F> {
    assert!(n >= 1 && t >= 1, "white ensemble needs n, t >= 1");
    let mut rng = seed.rng(STREAM_WHITE);
    let data = DenseMatrix::from_fn(n, t, |_, _| {
        real::<F>(rng.sample::<f64, _>(StandardNormal))
    });
    SignalEnsemble::from_matrix(data)
}

/// Colors an ensemble through a square factor: `Y = R X`. The population
/// covariance of the columns becomes `R Rᵀ` for white input.
pub fn generate_nonstationary<F: Real>(
    factor: &DenseMatrix<F>,
    x: &SignalEnsemble<F>,
) -> Result<SignalEnsemble<F>, SignalError> {
    if factor.cols() != x.n() {
        return Err(SignalError::DimensionMismatch {
            expected: factor.cols(),
            got: x.n(),
        });
    }
    Ok(SignalEnsemble::from_matrix(factor.matmul(x.data())))
}

/// Propagates an input covariance through a node-variant filter:
/// `C_y = H C_x Hᵀ` and its spectral image `C_ŷ = Vᵀ C_y V`.
pub fn covariance_propagate<F: Real>(
    taps: &NodeVariantTaps<F>,
    shift: &ShiftOperator<F>,
    c_x: &DenseMatrix<F>,
) -> Result<(DenseMatrix<F>, DenseMatrix<F>), SignalError> {
    if c_x.rows() != shift.n() || c_x.cols() != shift.n() {
        return Err(SignalError::DimensionMismatch {
            expected: shift.n(),
            got: c_x.rows(),
        });
    }
    let h = nvgf_matrix(taps, shift.matrix())?;
    let c_y = h.matmul(c_x).matmul_transpose(&h);
    let c_yhat = shift.gft_matrix(&c_y).matmul(shift.eigenvectors());
    Ok((c_y, c_yhat))
}

/// Diagonal dominance of the spectral covariance:
/// `ρ = ‖diag(Vᵀ Ĉ_y V)‖₂² / ‖Vᵀ Ĉ_y V‖_F²`, in `(0, 1]`, equal to one
/// exactly when the spectral covariance is diagonal.
pub fn stationarity_proxy<F: Real>(
    y: &mut SignalEnsemble<F>,
    shift: &ShiftOperator<F>,
) -> Result<F, SignalError> {
    if y.n() != shift.n() {
        return Err(SignalError::DimensionMismatch {
            expected: shift.n(),
            got: y.n(),
        });
    }
    let cov = y.sample_covariance();
    spectral_diagonal_dominance(&cov, shift)
}

/// [`stationarity_proxy`] on an explicit covariance matrix.
pub fn spectral_diagonal_dominance<F: Real>(
    cov: &DenseMatrix<F>,
    shift: &ShiftOperator<F>,
) -> Result<F, SignalError> {
    let spectral = shift.gft_matrix(cov).matmul(shift.eigenvectors());
    let total = spectral.frobenius_norm();
    if total == F::zero() {
        return Err(SignalError::ZeroCovariance);
    }
    let diag_sq: F = spectral.diag().iter().map(|&d| d * d).sum();
    Ok(diag_sq / (total * total))
}

/// Which square factor of a covariance matrix to construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    /// Symmetric square root `U Λ^{1/2} Uᵀ`; the default and the unique
    /// symmetric PSD factor.
    #[default]
    SymSqrt,
    /// `U_y Λ_y U_yᵀ` from the singular vectors of the data matrix; for a
    /// covariance input this coincides with the symmetric square root.
    SvdUyLyUyt,
    /// One-sided factor `U_y Λ_y` (orthogonally equivalent, not symmetric).
    SvdUyLy,
}

/// Negative eigenvalues at finite-sample rounding level are clipped to
/// zero; anything below `-1e-8·λ_max` is a genuine indefiniteness error.
const INDEFINITE_RTOL: f64 = 1e-8;

/// Factors a PSD covariance as `C_y = R Rᵀ`.
pub fn covariance_factor<F: Real>(
    c_y: &DenseMatrix<F>,
    kind: FactorKind,
) -> Result<DenseMatrix<F>, SignalError> {
    let eig = sym_evd(c_y)?;
    let lam_max = eig
        .values
        .iter()
        .fold(F::zero(), |acc, &v| acc.max(v));
    let threshold = real::<F>(INDEFINITE_RTOL) * lam_max;
    let mut clipped = Vec::with_capacity(eig.values.len());
    for &v in &eig.values {
        if v < -threshold {
            return Err(SignalError::IndefiniteInput {
                min_eigenvalue: approx_f64(v),
                threshold: approx_f64(threshold),
            });
        }
        clipped.push(v.max(F::zero()).sqrt());
    }
    let half = eig.vectors.scale_cols(&clipped);
    Ok(match kind {
        FactorKind::SymSqrt | FactorKind::SvdUyLyUyt => half.matmul_transpose(&eig.vectors),
        FactorKind::SvdUyLy => half,
    })
}
