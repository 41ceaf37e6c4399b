//! Graph filters on a primal graph, their counterparts on the dual
//! frequency-domain graph, and a data-driven pipeline that identifies the
//! dual graph's eigenvalues from signals.
//!
//! The crate is organized around the flow of that pipeline:
//!
//! * [`spectral`] — dense linear-algebra kernels (symmetric EVD, SVD,
//!   pseudoinverse, Khatri-Rao products, vectorization maps);
//! * [`graph`] — shift operators, the graph Fourier transform, dual graphs
//!   and Vandermonde frequency matrices;
//! * [`filters`] — classical and node-variant graph filters plus the
//!   primal/dual filter conversion and its consistency error;
//! * [`signals`] — random graph-signal generation, covariance propagation
//!   and the stationarity proxy;
//! * [`tap_estimation`] — filter-tap recovery from input-output pairs or
//!   from outputs alone (alternating minimization with Procrustes updates);
//! * [`dual_frequency`] — subspace fitting for the dual eigenvalues, solved
//!   by multi-start sequential convex programming, with the Pascal
//!   ambiguity class and the PNE metric;
//! * [`workbench`] — the experiment harness: synthetic dataset generation,
//!   end-to-end runs, metrics and file I/O.
//!
//! Numeric modules are generic over the scalar type through [`scalar::Real`]
//! (`f32` or `f64`); the workbench and its file formats are `f64`-concrete.

pub mod dual_frequency;
pub mod filters;
pub mod graph;
pub mod scalar;
pub mod signals;
pub mod spectral;
pub mod tap_estimation;
pub mod workbench;

pub use scalar::Real;

/// `f64` matrix, the scalar used by the workbench and CLI.
pub type Mat64 = spectral::DenseMatrix<f64>;
/// `f32` matrix.
pub type Mat32 = spectral::DenseMatrix<f32>;
/// `f64` shift operator.
pub type Shift64 = graph::ShiftOperator<f64>;
/// `f64` signal ensemble.
pub type Signals64 = signals::SignalEnsemble<f64>;
