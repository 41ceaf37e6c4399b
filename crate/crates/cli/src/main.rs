//! Command-line workbench: synthetic data generation, tap estimation, dual
//! frequency learning, and dual-graph export.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use graphfreq::dual_frequency::{multi_start, subspace_problem, ScpConfig, StepNorm};
use graphfreq::signals::{stationarity_proxy, FactorKind};
use graphfreq::tap_estimation::{
    estimate_taps_io, estimate_taps_output_only, AltMinConfig, OrthogonalInit, TapEstimate,
};
use graphfreq::workbench::io::{self, GsoChoice};
use graphfreq::workbench::{
    run_pipeline, synth_dataset, threshold_edges, EstimationMode, PipelineOptions, SynthConfig,
    WorkbenchError,
};
use graphfreq::{Mat64, Signals64};

#[derive(Parser)]
#[command(
    name = "graphfreq",
    about = "Node-variant graph filters and data-driven dual frequency-domain graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and write its CSV artifacts.
    Synth(SynthArgs),
    /// Estimate node-variant filter taps from signals.
    EstimateTaps(EstimateArgs),
    /// Recover the dual frequencies from estimated taps.
    LearnDual(LearnDualArgs),
    /// Run the full synthetic generation + learning workflow.
    Pipeline(PipelineArgs),
    /// Print the stationarity proxy of a signal ensemble on a graph.
    Stationarity(StationarityArgs),
    /// Threshold a learned dual graph into a plot-ready edge list.
    DualGraph(DualGraphArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// JSON file mirroring SynthConfig (defaults apply to missing fields).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for S.csv, lambda_f.csv, C.csv, P.csv, X.csv, Y.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Io,
    OutputOnly,
}

impl From<ModeArg> for EstimationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Io => EstimationMode::InputOutput,
            ModeArg::OutputOnly => EstimationMode::OutputOnly,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum GsoArg {
    Matrix,
    Adjacency,
    Laplacian,
    NormalizedLaplacian,
}

impl From<GsoArg> for GsoChoice {
    fn from(g: GsoArg) -> Self {
        match g {
            GsoArg::Matrix => GsoChoice::Matrix,
            GsoArg::Adjacency => GsoChoice::Adjacency,
            GsoArg::Laplacian => GsoChoice::Laplacian,
            GsoArg::NormalizedLaplacian => GsoChoice::NormalizedLaplacian,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum FactorArg {
    SymSqrt,
    SvdUyLyUyt,
    SvdUyLy,
}

impl From<FactorArg> for FactorKind {
    fn from(f: FactorArg) -> Self {
        match f {
            FactorArg::SymSqrt => FactorKind::SymSqrt,
            FactorArg::SvdUyLyUyt => FactorKind::SvdUyLyUyt,
            FactorArg::SvdUyLy => FactorKind::SvdUyLy,
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Graph file (.edges or .csv).
    #[arg(long)]
    graph: PathBuf,
    /// How to interpret the graph file (defaults: .csv as the shift matrix,
    /// .edges as an adjacency).
    #[arg(long, value_enum)]
    graph_as: Option<GsoArg>,
    /// Output signals Y as CSV (rows = nodes, columns = realizations).
    #[arg(long)]
    signals: PathBuf,
    /// Input signals X as CSV (io mode).
    #[arg(long)]
    inputs: Option<PathBuf>,
    /// Derive inputs from the outputs by dropping the last k columns and
    /// the outputs' first k columns (io mode, k-step-ahead fitting).
    #[arg(long)]
    shift_input: Option<usize>,
    /// Filter order L (number of tap vectors).
    #[arg(long)]
    order: usize,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    rel_obj_tol: f64,
    #[arg(long, value_enum, default_value_t = FactorArg::SymSqrt)]
    factor: FactorArg,
    /// Seed a random orthogonal initialization instead of the identity.
    #[arg(long)]
    random_init_seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LearnDualArgs {
    /// Tap estimate JSON produced by estimate-taps.
    #[arg(long)]
    taps: PathBuf,
    /// Expansion degree K.
    #[arg(long)]
    degree: usize,
    #[arg(long, default_value_t = 5)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = -1.0)]
    domain_min: f64,
    #[arg(long, default_value_t = 1.0)]
    domain_max: f64,
    /// Jitter scale for the non-grid starting points.
    #[arg(long, default_value_t = ScpConfig::<f64>::default().start_jitter_delta)]
    jitter_delta: f64,
    #[arg(long, default_value_t = ScpConfig::<f64>::default().max_iters)]
    max_iters: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Report JSON; the solver trace and eigenvalue scatter data land next
    /// to it as `<out>.trace.csv` and `<out>.eigs.csv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5)]
    starts: usize,
    /// Overrides the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct StationarityArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    graph_as: Option<GsoArg>,
    #[arg(long)]
    signals: PathBuf,
}

#[derive(Args)]
struct DualGraphArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    graph_as: Option<GsoArg>,
    /// JSON with a `lambda_f` array (learn-dual or pipeline output).
    #[arg(long)]
    lambda_f: PathBuf,
    /// Fraction of the strongest off-diagonal weights to keep.
    #[arg(long, default_value_t = 0.5)]
    keep: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::EstimateTaps(a) => cmd_estimate(a),
        Command::LearnDual(a) => cmd_learn_dual(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Stationarity(a) => cmd_stationarity(a),
        Command::DualGraph(a) => cmd_dual_graph(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_config(path: &Path) -> Result<SynthConfig, WorkbenchError> {
    let cfg: SynthConfig = io::read_json(path)?;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_synth(args: SynthArgs) -> Result<(), WorkbenchError> {
    let cfg = read_config(&args.config)?;
    let ds = synth_dataset(&cfg)?;
    std::fs::create_dir_all(&args.out)?;
    io::write_matrix_csv(&args.out.join("S.csv"), ds.shift.matrix())?;
    io::write_vector_csv(&args.out.join("lambda_f.csv"), &ds.lambda_f)?;
    io::write_matrix_csv(&args.out.join("C.csv"), &ds.coefficients)?;
    io::write_matrix_csv(&args.out.join("P.csv"), &ds.taps)?;
    io::write_matrix_csv(&args.out.join("X.csv"), ds.inputs.data())?;
    io::write_matrix_csv(&args.out.join("Y.csv"), ds.outputs.data())?;
    println!("wrote dataset to {}", args.out.display());
    Ok(())
}

fn altmin_config(args: &EstimateArgs) -> AltMinConfig<f64> {
    AltMinConfig {
        max_iters: args.max_iters,
        rel_obj_tol: args.rel_obj_tol,
        factor: args.factor.into(),
        init: match args.random_init_seed {
            Some(seed) => OrthogonalInit::RandomOrthogonal { seed },
            None => OrthogonalInit::Identity,
        },
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), WorkbenchError> {
    let shift = io::load_graph(&args.graph, args.graph_as.map(Into::into))?;
    let outputs = Signals64::from_matrix(io::read_matrix_csv(&args.signals)?);

    let estimate: TapEstimate<f64> = match args.mode {
        ModeArg::Io => {
            let (x, y) = match (&args.inputs, args.shift_input) {
                (Some(path), None) => {
                    let x = Signals64::from_matrix(io::read_matrix_csv(path)?);
                    (x, outputs)
                }
                (None, Some(k)) => shifted_pair(&outputs, k)?,
                (Some(_), Some(_)) => {
                    return Err(WorkbenchError::Validation(
                        "--inputs and --shift-input are mutually exclusive".into(),
                    ))
                }
                (None, None) => {
                    return Err(WorkbenchError::Validation(
                        "io mode needs --inputs or --shift-input".into(),
                    ))
                }
            };
            estimate_taps_io(&x, &y, &shift, args.order)?
        }
        ModeArg::OutputOnly => {
            estimate_taps_output_only(&outputs, &shift, args.order, &altmin_config(&args))?
        }
    };

    for w in &estimate.warnings {
        eprintln!("warning: {w}");
    }
    io::write_json(&args.out, &estimate)?;
    println!(
        "estimated {}x{} taps, residual NSE {:.3e} -> {}",
        estimate.taps.n(),
        estimate.taps.len(),
        estimate.residual_nse,
        args.out.display()
    );
    Ok(())
}

/// Pairs each output column with the output k steps earlier, for fitting
/// k-step-ahead predictors from a single series.
fn shifted_pair(y: &Signals64, k: usize) -> Result<(Signals64, Signals64), WorkbenchError> {
    if k == 0 || k >= y.t() {
        return Err(WorkbenchError::Validation(format!(
            "shift must be in 1..{} realizations, got {k}",
            y.t()
        )));
    }
    let t = y.t() - k;
    let n = y.n();
    let x = Mat64::from_fn(n, t, |i, j| y.data()[(i, j)]);
    let shifted = Mat64::from_fn(n, t, |i, j| y.data()[(i, j + k)]);
    Ok((
        Signals64::from_matrix(x),
        Signals64::from_matrix(shifted),
    ))
}

fn cmd_learn_dual(args: LearnDualArgs) -> Result<(), WorkbenchError> {
    let estimate: TapEstimate<f64> = io::read_json(&args.taps)?;
    let problem = subspace_problem(estimate.taps.matrix(), args.degree)?;
    for w in problem.warnings() {
        eprintln!("warning: {w}");
    }
    let cfg = ScpConfig::<f64> {
        num_starts: args.starts,
        seed: args.seed,
        start_jitter_delta: args.jitter_delta,
        max_iters: args.max_iters,
        norm: StepNorm::L2,
        ..ScpConfig::default()
    };
    let starts = graphfreq::dual_frequency::generate_starts(
        (args.domain_min, args.domain_max),
        estimate.taps.n(),
        &cfg,
    );
    let result = multi_start(&problem, &starts, &cfg)?;
    let report = json!({
        "lambda_f": result.lambda_f,
        "objective": result.objective,
        "trace": result.trace,
        "start_index": result.start_index,
        "iterations": result.iterations,
        "config_echo": cfg,
    });
    io::write_json(&args.out, &report)?;
    println!(
        "objective {:.3e} from start {} -> {}",
        result.objective,
        result.start_index,
        args.out.display()
    );
    Ok(())
}

fn cmd_pipeline(args: PipelineArgs) -> Result<(), WorkbenchError> {
    let mut cfg = read_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let ds = synth_dataset(&cfg)?;
    let opts = PipelineOptions {
        scp: ScpConfig {
            num_starts: args.starts,
            seed: cfg.seed,
            ..ScpConfig::default()
        },
        ..PipelineOptions::default()
    };
    let report = run_pipeline(&ds.pipeline_input(), args.mode.into(), &opts)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    io::write_json(&args.out, &report)?;

    // Plot-ready companions: the solver trace and the eigenvalue scatter.
    let trace_path = companion(&args.out, "trace.csv");
    io::write_vector_csv(&trace_path, &report.trace)?;
    let eigs_path = companion(&args.out, "eigs.csv");
    let mut rows = String::from("index,true,estimated,corrected\n");
    for i in 0..ds.lambda_f.len() {
        let corrected = report
            .lambda_f_corrected
            .as_ref()
            .map_or(f64::NAN, |c| c[i]);
        rows.push_str(&format!(
            "{},{},{},{}\n",
            i, ds.lambda_f[i], report.lambda_f[i], corrected
        ));
    }
    io::write_atomic(&eigs_path, &rows)?;

    println!(
        "NSE {} PNE {} corollary error {:.3e} objective {:.3e} -> {}",
        report
            .nse_taps
            .map_or("n/a".to_string(), |v| format!("{v:.3e}")),
        report
            .pne
            .map_or("n/a".to_string(), |v| format!("{v:.3e}")),
        report.corollary_error,
        report.objective,
        args.out.display()
    );
    Ok(())
}

fn companion(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

fn cmd_stationarity(args: StationarityArgs) -> Result<(), WorkbenchError> {
    let shift = io::load_graph(&args.graph, args.graph_as.map(Into::into))?;
    let mut signals = Signals64::from_matrix(io::read_matrix_csv(&args.signals)?);
    let rho = stationarity_proxy(&mut signals, &shift)?;
    println!("{rho}");
    Ok(())
}

fn cmd_dual_graph(args: DualGraphArgs) -> Result<(), WorkbenchError> {
    #[derive(serde::Deserialize)]
    struct LambdaFile {
        lambda_f: Vec<f64>,
    }
    let shift = io::load_graph(&args.graph, args.graph_as.map(Into::into))?;
    let lambda: LambdaFile = io::read_json(&args.lambda_f)?;
    let dual = shift.dual_from_frequencies(&lambda.lambda_f)?;
    let edges = threshold_edges(dual.matrix(), args.keep)?;
    io::write_edges_csv(&args.out, &edges)?;
    println!("kept {} edges -> {}", edges.len(), args.out.display());
    Ok(())
}
