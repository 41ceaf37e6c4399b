//! Primal and dual graph shift operators, the graph Fourier transform, and
//! Vandermonde frequency matrices.
//!
//! Shift operators are restricted to real symmetric matrices, so the
//! eigenvector matrix `V` is orthogonal and the GFT is `x̂ = Vᵀ x`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{real, Real};
use crate::spectral::{sym_evd, DenseMatrix, EigPair, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("input matrix is not symmetric")]
    AsymmetricInput,
    #[error("negative weight at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize },
    #[error("self loop at node {node}: adjacency input must have a zero diagonal")]
    SelfLoop { node: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// How a shift operator was derived from the underlying graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    Adjacency,
    Laplacian,
    NormalizedLaplacian,
    Custom,
}

/// A real symmetric graph shift operator with its cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct ShiftOperator<F> {
    matrix: DenseMatrix<F>,
    eig: EigPair<F>,
    kind: ShiftKind,
}

impl<F: Real> ShiftOperator<F> {
    /// Builds a shift operator from an arbitrary symmetric matrix.
    pub fn from_matrix(matrix: DenseMatrix<F>, kind: ShiftKind) -> Result<Self, GraphError> {
        let eig = sym_evd(&matrix).map_err(|e| match e {
            SpectralError::NonSymmetric { .. } => GraphError::AsymmetricInput,
            other => GraphError::Spectral(other),
        })?;
        Ok(Self { matrix, eig, kind })
    }

    /// Uses the weighted adjacency matrix itself as the shift.
    pub fn from_adjacency(weights: DenseMatrix<F>) -> Result<Self, GraphError> {
        validate_weights(&weights)?;
        Self::from_matrix(weights, ShiftKind::Adjacency)
    }

    /// Combinatorial Laplacian `D − W`.
    pub fn laplacian(weights: DenseMatrix<F>) -> Result<Self, GraphError> {
        validate_weights(&weights)?;
        let deg = degrees(&weights);
        let n = weights.rows();
        let lap = DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                deg[i]
            } else {
                -weights[(i, j)]
            }
        });
        Self::from_matrix(lap, ShiftKind::Laplacian)
    }

    /// Normalized Laplacian `I − D^{-1/2} W D^{-1/2}`; isolated nodes
    /// contribute a zero row and column.
    pub fn normalized_laplacian(weights: DenseMatrix<F>) -> Result<Self, GraphError> {
        validate_weights(&weights)?;
        let deg = degrees(&weights);
        let dinv: Vec<F> = deg
            .iter()
            .map(|&d| if d > F::zero() { F::one() / d.sqrt() } else { F::zero() })
            .collect();
        let n = weights.rows();
        let lap = DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                if deg[i] > F::zero() {
                    F::one()
                } else {
                    F::zero()
                }
            } else {
                -dinv[i] * weights[(i, j)] * dinv[j]
            }
        });
        Self::from_matrix(lap, ShiftKind::NormalizedLaplacian)
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix<F> {
        &self.matrix
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[F] {
        &self.eig.values
    }

    /// Orthogonal eigenvector matrix `V` (columns are eigenvectors).
    pub fn eigenvectors(&self) -> &DenseMatrix<F> {
        &self.eig.vectors
    }

    /// Graph Fourier transform `x̂ = Vᵀ x`.
    pub fn gft(&self, x: &[F]) -> Result<Vec<F>, GraphError> {
        self.check_len(x.len())?;
        Ok(self.eig.vectors.transpose_mul_vec(x))
    }

    /// Inverse GFT `x = V x̂`.
    pub fn igft(&self, xhat: &[F]) -> Result<Vec<F>, GraphError> {
        self.check_len(xhat.len())?;
        Ok(self.eig.vectors.mul_vec(xhat))
    }

    /// `Vᵀ · M`, the GFT applied to each column of `M`.
    pub fn gft_matrix(&self, m: &DenseMatrix<F>) -> DenseMatrix<F> {
        self.eig.vectors.transpose_matmul(m)
    }

    /// `V · M`.
    pub fn igft_matrix(&self, m: &DenseMatrix<F>) -> DenseMatrix<F> {
        self.eig.vectors.matmul(m)
    }

    /// Dual graph `S_f = V⁻¹ · Diag(λ_f) · V` for the given dual frequencies.
    pub fn dual_from_frequencies(&self, lambda_f: &[F]) -> Result<DualGraph<F>, GraphError> {
        self.check_len(lambda_f.len())?;
        if lambda_f.iter().any(|x| !x.is_finite()) {
            return Err(GraphError::Spectral(SpectralError::NonFinite {
                row: 0,
                col: 0,
            }));
        }
        // Vᵀ · Diag(λ_f) · V with V orthogonal.
        let vt = self.eig.vectors.transpose();
        let matrix = vt.scale_cols(lambda_f).matmul_transpose(&vt);
        Ok(DualGraph {
            lambda_f: lambda_f.to_vec(),
            matrix,
            primal_basis: self.eig.vectors.clone(),
        })
    }

    fn check_len(&self, len: usize) -> Result<(), GraphError> {
        if len != self.n() {
            return Err(GraphError::DimensionMismatch {
                expected: self.n(),
                got: len,
            });
        }
        Ok(())
    }
}

fn degrees<F: Real>(weights: &DenseMatrix<F>) -> Vec<F> {
    (0..weights.rows())
        .map(|i| weights.row(i).iter().copied().sum())
        .collect()
}

fn validate_weights<F: Real>(weights: &DenseMatrix<F>) -> Result<(), GraphError> {
    if !weights.is_square() || weights.symmetry_gap() > real(SYMMETRY_INPUT_RTOL) {
        return Err(GraphError::AsymmetricInput);
    }
    for i in 0..weights.rows() {
        if weights[(i, i)] != F::zero() {
            return Err(GraphError::SelfLoop { node: i });
        }
        for j in 0..weights.cols() {
            if weights[(i, j)] < F::zero() {
                return Err(GraphError::NegativeWeight { row: i, col: j });
            }
        }
    }
    Ok(())
}

const SYMMETRY_INPUT_RTOL: f64 = 1e-10;

/// Frequency-domain graph paired with the primal shift it was derived from.
///
/// Its eigenvector matrix is `Vᵀ`, so the dual GFT maps a spectral signal
/// back to the vertex domain.
#[derive(Debug, Clone)]
pub struct DualGraph<F> {
    lambda_f: Vec<F>,
    matrix: DenseMatrix<F>,
    primal_basis: DenseMatrix<F>,
}

impl<F: Real> DualGraph<F> {
    pub fn n(&self) -> usize {
        self.lambda_f.len()
    }

    /// Dual frequencies in the order paired with the primal eigenvectors
    /// (index `i` of `λ_f` pairs with eigenvector column `i`; no sorting).
    pub fn lambda_f(&self) -> &[F] {
        &self.lambda_f
    }

    pub fn matrix(&self) -> &DenseMatrix<F> {
        &self.matrix
    }

    /// Eigenvector matrix of the primal shift this dual graph derives from.
    pub fn primal_basis(&self) -> &DenseMatrix<F> {
        &self.primal_basis
    }

    /// Dual-graph GFT matrix `V_f⁻¹ = V`: maps `x̂` back to `x`.
    pub fn gft_inverse_apply(&self, xhat: &[F]) -> Vec<F> {
        self.primal_basis.mul_vec(xhat)
    }
}

/// Vandermonde matrix `[1, x, x², …, x^{K-1}]` built column by column, so
/// the recurrence `Ψ[:, k+1] = Ψ[:, k] ⊙ x` holds exactly per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Vandermonde<F> {
    nodes: Vec<F>,
    matrix: DenseMatrix<F>,
}

impl<F: Real> Vandermonde<F> {
    pub fn new(nodes: &[F], degree_count: usize) -> Self {
        assert!(degree_count >= 1, "degree count must be at least 1");
        let m = nodes.len();
        let mut matrix = DenseMatrix::zeros(m, degree_count);
        for i in 0..m {
            matrix[(i, 0)] = F::one();
        }
        for k in 1..degree_count {
            for i in 0..m {
                matrix[(i, k)] = matrix[(i, k - 1)] * nodes[i];
            }
        }
        Self {
            nodes: nodes.to_vec(),
            matrix,
        }
    }

    pub fn nodes(&self) -> &[F] {
        &self.nodes
    }

    pub fn degree_count(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &DenseMatrix<F> {
        &self.matrix
    }
}

/// Convenience constructor mirroring the matrix definition.
pub fn vandermonde<F: Real>(nodes: &[F], degree_count: usize) -> Vandermonde<F> {
    Vandermonde::new(nodes, degree_count)
}
