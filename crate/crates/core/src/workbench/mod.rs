//! Experiment harness: synthetic dataset generation, end-to-end pipeline
//! runs, metrics, and plot-ready result emission. Everything here is
//! `f64`-concrete and deterministic per seed (timings aside).

pub mod io;

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::dual_frequency::{
    affine_fit, generate_starts, multi_start, subspace_problem, DualFreqError, ScpConfig,
};
use crate::filters::{
    corollary_error, nvgf_apply, FilterError, FilterFlavor, NodeVariantTaps,
};
use crate::graph::{GraphError, ShiftOperator, Vandermonde};
use crate::scalar::real;
use crate::signals::{
    covariance_factor, generate_nonstationary, stationarity_proxy, truncated_normal,
    white_ensemble, FactorKind, RngSeed, SignalError,
};
use crate::spectral::{pinv, DenseMatrix, SpectralError, DEFAULT_PINV_RTOL};
use crate::tap_estimation::{
    estimate_taps_io, estimate_taps_output_only, AltMinConfig, EstimationError, TapEstimate,
};
use crate::{Mat64, Shift64, Signals64};

const STREAM_GRAPH: u64 = 0x06;
const STREAM_JITTER: u64 = 0x1a;
const STREAM_COEFF: u64 = 0x2b;
const STREAM_NOISE: u64 = 0x3c;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("failed to parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    DualFreq(#[from] DualFreqError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl WorkbenchError {
    /// Process exit code: 2 for validation/input problems, 3 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            WorkbenchError::Validation(_)
            | WorkbenchError::Parse { .. }
            | WorkbenchError::Io(_) => 2,
            _ => 3,
        }
    }
}

/// Primal graph used by the synthetic workflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Random geometric graph on the unit square (adjacency shift).
    RandomSensor,
    /// Four-neighbor grid (normalized-Laplacian shift); `n` must be square.
    Grid,
    /// Path graph (adjacency shift).
    Path,
    /// Graph loaded from an `.edges` or `.csv` file.
    FromFile(PathBuf),
}

/// Configuration of the synthetic generation workflow.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n: usize,
    pub graph_kind: GraphKind,
    pub u_min: f64,
    pub u_max: f64,
    /// Jitter scale δ: dual frequencies are grid points plus truncated
    /// normal jitter with standard deviation `δ·spacing/2`.
    pub delta: f64,
    pub order_l: usize,
    pub degree_k: usize,
    pub t: usize,
    /// Measurement-noise standard deviation.
    pub sigma: f64,
    /// Scale coefficient row `k` by `k+1` to keep high-order monomials
    /// from flattening out over the domain.
    pub curvature_mask: bool,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 40,
            graph_kind: GraphKind::RandomSensor,
            u_min: -1.0,
            u_max: 1.0,
            delta: 0.0,
            order_l: 3,
            degree_k: 3,
            t: 3000,
            sigma: 0.0,
            curvature_mask: true,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), WorkbenchError> {
        let fail = |m: String| Err(WorkbenchError::Validation(m));
        if self.n < 2 {
            return fail(format!("need at least 2 nodes, got {}", self.n));
        }
        if self.t == 0 {
            return fail("need at least one realization (t >= 1)".into());
        }
        if self.order_l == 0 || self.degree_k == 0 {
            return fail("orders must be at least 1".into());
        }
        if !(self.degree_k <= self.order_l && self.order_l <= self.n) {
            return fail(format!(
                "orders must satisfy K <= L <= N, got K={}, L={}, N={}",
                self.degree_k, self.order_l, self.n
            ));
        }
        if self.delta < 0.0 || self.sigma < 0.0 {
            return fail("delta and sigma must be nonnegative".into());
        }
        for (name, v) in [
            ("u_min", self.u_min),
            ("u_max", self.u_max),
            ("delta", self.delta),
            ("sigma", self.sigma),
        ] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite, got {v}"));
            }
        }
        if self.u_min >= self.u_max {
            return fail(format!(
                "grid endpoints must satisfy u_min < u_max, got [{}, {}]",
                self.u_min, self.u_max
            ));
        }
        if let GraphKind::Grid = self.graph_kind {
            let side = (self.n as f64).sqrt().round() as usize;
            if side * side != self.n {
                return fail(format!("grid graph needs a square node count, got {}", self.n));
            }
        }
        Ok(())
    }

    fn spacing(&self) -> f64 {
        (self.u_max - self.u_min) / (self.n - 1) as f64
    }
}

/// Dual frequencies for the synthetic workflow: the uniform grid over
/// `[u_min, u_max]` plus truncated-normal jitter. With `delta < 1` the
/// jitter cannot exceed half the spacing, so the grid ordering survives.
pub fn gen_dual_frequencies(cfg: &SynthConfig) -> Vec<f64> {
    let spacing = cfg.spacing();
    let sigma = cfg.delta * spacing / 2.0;
    let mut rng = RngSeed(cfg.seed).rng(STREAM_JITTER);
    (0..cfg.n)
        .map(|i| cfg.u_min + spacing * i as f64 + truncated_normal(&mut rng, sigma))
        .collect()
}

/// Standard-normal expansion coefficients, optionally curvature-masked.
pub fn gen_coefficients(cfg: &SynthConfig) -> Mat64 {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let mut rng = RngSeed(cfg.seed).rng(STREAM_COEFF);
    let mut c = DenseMatrix::from_fn(cfg.degree_k, cfg.order_l, |_, _| {
        rng.sample::<f64, _>(StandardNormal)
    });
    if cfg.curvature_mask {
        for k in 0..cfg.degree_k {
            for l in 0..cfg.order_l {
                c[(k, l)] *= (k + 1) as f64;
            }
        }
    }
    c
}

/// Random geometric graph: points uniform on the unit square, Gaussian
/// kernel weights with width half the mean pairwise distance, thresholded
/// at the sparsest level that keeps the graph connected.
pub fn random_sensor_graph(n: usize, seed: RngSeed) -> Result<Shift64, WorkbenchError> {
    use rand::Rng;
    if n < 2 {
        return Err(WorkbenchError::Validation(format!(
            "sensor graph needs at least 2 nodes, got {n}"
        )));
    }
    let mut rng = seed.rng(STREAM_GRAPH);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();

    let mut pair_count = 0usize;
    let mut dist_sum = 0.0;
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            let d = (dx * dx + dy * dy).sqrt();
            dist[i * n + j] = d;
            dist_sum += d;
            pair_count += 1;
        }
    }
    let width = dist_sum / pair_count as f64 / 2.0;

    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(pair_count);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = if width > 0.0 {
                let d = dist[i * n + j];
                (-d * d / (2.0 * width * width)).exp()
            } else {
                1.0
            };
            edges.push((i, j, w));
        }
    }
    edges.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap()
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });

    // Smallest prefix of the strongest edges that connects the graph:
    // connectivity is monotone in the threshold, so binary search works.
    let mut lo = n - 1;
    let mut hi = edges.len();
    if !connected(n, &edges[..hi]) {
        // Cannot happen for positive kernel weights, but keep the guard.
        return Err(WorkbenchError::Validation(
            "sensor graph construction produced a disconnected graph".into(),
        ));
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if connected(n, &edges[..mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }

    let mut weights = DenseMatrix::zeros(n, n);
    for &(i, j, w) in &edges[..lo] {
        weights[(i, j)] = w;
        weights[(j, i)] = w;
    }
    Ok(ShiftOperator::from_adjacency(weights)?)
}

fn connected(n: usize, edges: &[(usize, usize, f64)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for &(i, j, _) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            components -= 1;
            if components == 1 {
                return true;
            }
        }
    }
    components == 1
}

/// Four-neighbor grid adjacency on a `side × side` lattice.
pub fn grid_adjacency(side: usize) -> Mat64 {
    let n = side * side;
    let mut w = DenseMatrix::zeros(n, n);
    for r in 0..side {
        for c in 0..side {
            let i = r * side + c;
            if c + 1 < side {
                w[(i, i + 1)] = 1.0;
                w[(i + 1, i)] = 1.0;
            }
            if r + 1 < side {
                w[(i, i + side)] = 1.0;
                w[(i + side, i)] = 1.0;
            }
        }
    }
    w
}

/// Path-graph adjacency on `n` nodes.
pub fn path_adjacency(n: usize) -> Mat64 {
    let mut w = DenseMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        w[(i, i + 1)] = 1.0;
        w[(i + 1, i)] = 1.0;
    }
    w
}

/// Builds the primal shift for a synthetic configuration.
pub fn build_shift(cfg: &SynthConfig) -> Result<Shift64, WorkbenchError> {
    match &cfg.graph_kind {
        GraphKind::RandomSensor => random_sensor_graph(cfg.n, RngSeed(cfg.seed)),
        GraphKind::Grid => {
            let side = (cfg.n as f64).sqrt().round() as usize;
            Ok(ShiftOperator::normalized_laplacian(grid_adjacency(side))?)
        }
        GraphKind::Path => Ok(ShiftOperator::from_adjacency(path_adjacency(cfg.n))?),
        GraphKind::FromFile(path) => {
            let shift = io::load_graph(path, None)?;
            if shift.n() != cfg.n {
                return Err(WorkbenchError::Validation(format!(
                    "graph file has {} nodes but the configuration says {}",
                    shift.n(),
                    cfg.n
                )));
            }
            Ok(shift)
        }
    }
}

/// A complete synthetic instance: graph, ground truth, and data.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub shift: Shift64,
    pub lambda_f: Vec<f64>,
    pub coefficients: Mat64,
    /// Primal taps `P = Ψ_f(λ_f) C`.
    pub taps: Mat64,
    pub inputs: Signals64,
    pub outputs: Signals64,
    pub config: SynthConfig,
}

/// Runs the generation workflow: dual frequencies, coefficients, taps,
/// white inputs, filtered (optionally noisy) outputs.
pub fn synth_dataset(cfg: &SynthConfig) -> Result<SynthDataset, WorkbenchError> {
    use rand::Rng;
    use rand_distr::StandardNormal;

    cfg.validate()?;
    let shift = build_shift(cfg)?;
    let lambda_f = gen_dual_frequencies(cfg);
    let coefficients = gen_coefficients(cfg);
    let psi_f = Vandermonde::new(&lambda_f, cfg.degree_k);
    let taps = psi_f.matrix().matmul(&coefficients);
    let nv = NodeVariantTaps::new(taps.clone(), FilterFlavor::TypeI)?;

    let inputs = white_ensemble::<f64>(cfg.n, cfg.t, RngSeed(cfg.seed));
    let mut outputs = nvgf_apply(&nv, shift.matrix(), inputs.data())?;
    if cfg.sigma > 0.0 {
        let mut rng = RngSeed(cfg.seed).rng(STREAM_NOISE);
        for i in 0..cfg.n {
            for t in 0..cfg.t {
                outputs[(i, t)] += cfg.sigma * rng.sample::<f64, _>(StandardNormal);
            }
        }
    }

    Ok(SynthDataset {
        shift,
        lambda_f,
        coefficients,
        taps,
        inputs,
        outputs: Signals64::from_matrix(outputs),
        config: cfg.clone(),
    })
}

/// Which tap estimator the pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMode {
    InputOutput,
    OutputOnly,
}

/// Solver options carried through a pipeline run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub scp: ScpConfig<f64>,
    pub altmin: AltMinConfig<f64>,
}

/// Ground truth attached to synthetic runs; absent for real data.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub lambda_f: Vec<f64>,
    pub taps: Mat64,
}

/// Everything the learning pipeline consumes.
#[derive(Debug, Clone)]
pub struct PipelineInput {
    pub shift: Shift64,
    pub outputs: Signals64,
    pub inputs: Option<Signals64>,
    pub order_l: usize,
    pub degree_k: usize,
    /// Domain the start grid for the dual-frequency solver spans.
    pub domain: (f64, f64),
    pub truth: Option<GroundTruth>,
    pub config_echo: serde_json::Value,
}

impl SynthDataset {
    pub fn pipeline_input(&self) -> PipelineInput {
        PipelineInput {
            shift: self.shift.clone(),
            outputs: self.outputs.clone(),
            inputs: Some(self.inputs.clone()),
            order_l: self.config.order_l,
            degree_k: self.config.degree_k,
            domain: (self.config.u_min, self.config.u_max),
            truth: Some(GroundTruth {
                lambda_f: self.lambda_f.clone(),
                taps: self.taps.clone(),
            }),
            config_echo: serde_json::to_value(&self.config).unwrap_or(serde_json::Value::Null),
        }
    }
}

/// Per-stage wall-clock durations, in seconds. Excluded from the
/// determinism contract.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timings {
    pub tap_estimation_s: f64,
    pub subspace_s: f64,
    pub solver_s: f64,
    pub metrics_s: f64,
    pub total_s: f64,
}

/// Metrics and artifacts of one pipeline run. Tap error and PNE appear
/// only when ground truth is available; the corollary error, residual
/// error, and stationarity proxy are always emitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub nse_taps: Option<f64>,
    pub pne: Option<f64>,
    pub corollary_error: f64,
    pub objective: f64,
    pub residual_nse: f64,
    pub rho: f64,
    pub lambda_f: Vec<f64>,
    pub lambda_f_corrected: Option<Vec<f64>>,
    pub trace: Vec<f64>,
    pub start_index: usize,
    pub iterations: usize,
    pub timings: Timings,
    pub config_echo: serde_json::Value,
    pub warnings: Vec<String>,
}

/// Runs tap estimation, subspace fitting with multi-start SCP, and the
/// metric computations.
pub fn run_pipeline(
    input: &PipelineInput,
    mode: EstimationMode,
    opts: &PipelineOptions,
) -> Result<PipelineReport, WorkbenchError> {
    let total_clock = Instant::now();
    let mut warnings = Vec::new();

    let clock = Instant::now();
    let estimate: TapEstimate<f64> = match mode {
        EstimationMode::InputOutput => {
            let inputs = input.inputs.as_ref().ok_or_else(|| {
                WorkbenchError::Validation(
                    "input-output mode requires an input ensemble".into(),
                )
            })?;
            estimate_taps_io(inputs, &input.outputs, &input.shift, input.order_l)?
        }
        EstimationMode::OutputOnly => {
            estimate_taps_output_only(&input.outputs, &input.shift, input.order_l, &opts.altmin)?
        }
    };
    warnings.extend(estimate.warnings.iter().cloned());
    let tap_estimation_s = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let problem = subspace_problem(estimate.taps.matrix(), input.degree_k)?;
    warnings.extend(problem.warnings().iter().cloned());
    let subspace_s = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let starts = generate_starts(input.domain, input.shift.n(), &opts.scp);
    let solution = multi_start(&problem, &starts, &opts.scp)?;
    let solver_s = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let mut outputs = input.outputs.clone();
    let rho = stationarity_proxy(&mut outputs, &input.shift)?;
    let eps_c =
        estimated_corollary_error(&input.shift, &estimate.taps, &solution.lambda_f, input.degree_k)?;

    let mut nse_taps = None;
    let mut pne_value = None;
    let mut corrected = None;
    if let Some(truth) = &input.truth {
        let diff = estimate.taps.matrix().sub(&truth.taps).frobenius_norm();
        let norm = truth.taps.frobenius_norm();
        nse_taps = Some(if norm > 0.0 { (diff / norm).powi(2) } else { 0.0 });
        let fit = affine_fit(&solution.lambda_f, &truth.lambda_f)?;
        if fit.degenerate {
            warnings.push(
                "estimated frequencies are constant: affine scale unidentifiable".into(),
            );
        }
        pne_value = Some(fit.pne);
        corrected = Some(fit.corrected);
    }
    let metrics_s = clock.elapsed().as_secs_f64();

    Ok(PipelineReport {
        nse_taps,
        pne: pne_value,
        corollary_error: eps_c,
        objective: solution.objective,
        residual_nse: estimate.residual_nse,
        rho,
        lambda_f: solution.lambda_f,
        lambda_f_corrected: corrected,
        trace: solution.trace,
        start_index: solution.start_index,
        iterations: solution.iterations,
        timings: Timings {
            tap_estimation_s,
            subspace_s,
            solver_s,
            metrics_s,
            total_s: total_clock.elapsed().as_secs_f64(),
        },
        config_echo: json!({
            "mode": mode,
            "order_l": input.order_l,
            "degree_k": input.degree_k,
            "domain": [input.domain.0, input.domain.1],
            "scp": opts.scp,
            "altmin": opts.altmin,
            "source": input.config_echo,
        }),
        warnings,
    })
}

/// Corollary error of an estimated tap matrix against learned dual
/// frequencies: the expansion coefficients are refit as `C̃ = Ψ_f(λ̃)† P̃`
/// and the dual taps follow the conversion `P̂̃ = Ψ C̃ᵀ`.
pub fn estimated_corollary_error(
    shift: &Shift64,
    taps: &NodeVariantTaps<f64>,
    lambda_f: &[f64],
    degree_k: usize,
) -> Result<f64, WorkbenchError> {
    let psi_f = Vandermonde::new(lambda_f, degree_k);
    let psi_f_pinv = pinv(psi_f.matrix(), real(DEFAULT_PINV_RTOL))?;
    let coeffs = psi_f_pinv.matmul(taps.matrix());
    let psi = Vandermonde::new(shift.eigenvalues(), taps.len());
    let dual_taps = NodeVariantTaps::new(
        psi.matrix().matmul_transpose(&coeffs),
        FilterFlavor::TypeII,
    )?;
    let dual_graph = shift
        .dual_from_frequencies(lambda_f)
        .map_err(WorkbenchError::Graph)?;
    Ok(corollary_error(taps, &dual_taps, shift, &dual_graph)?)
}

/// Replaces an unpaired output ensemble by a matched input-output pair with
/// the same second-order statistics: factor the sample covariance as
/// `R Rᵀ`, draw a fresh white input, and filter it through `R`.
pub fn whiten_pair(
    outputs: &Signals64,
    seed: RngSeed,
) -> Result<(Signals64, Signals64), WorkbenchError> {
    if outputs.t() < 2 {
        return Err(WorkbenchError::Validation(
            "whitening needs at least two realizations".into(),
        ));
    }
    let mut centered = outputs.centered_copy();
    let cov = centered.sample_covariance();
    let factor = covariance_factor(&cov, FactorKind::SymSqrt)?;
    let white = white_ensemble::<f64>(outputs.n(), outputs.t(), seed);
    let colored = generate_nonstationary(&factor, &white)?;
    Ok((white, colored))
}

/// One undirected edge of a thresholded dual graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Keeps the strongest fraction of off-diagonal entries (by absolute
/// value) as an undirected edge list; the diagonal is always dropped.
pub fn threshold_edges(matrix: &Mat64, keep_fraction: f64) -> Result<Vec<Edge>, WorkbenchError> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(WorkbenchError::Validation(format!(
            "keep fraction must be in (0, 1], got {keep_fraction}"
        )));
    }
    let n = matrix.rows();
    let mut pairs: Vec<Edge> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = matrix[(i, j)];
            if w != 0.0 {
                pairs.push(Edge { u: i, v: j, weight: w });
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.weight
            .abs()
            .partial_cmp(&a.weight.abs())
            .unwrap()
            .then(a.u.cmp(&b.u))
            .then(a.v.cmp(&b.v))
    });
    let count = (keep_fraction * pairs.len() as f64).ceil() as usize;
    pairs.truncate(count);
    Ok(pairs)
}
