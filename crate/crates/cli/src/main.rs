use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use modframe::explorer::generators::{
    near_eip_parseval, random_frame, random_projection, random_tuple, random_unit_column_matrix, random_unitary,
    unit_norm_start,
};
use modframe::explorer::io::{
    frame_to_value, matrix_to_value, parse_frame, parse_matrix, parse_tuple, read_to_string, tuple_to_value,
};
use modframe::explorer::probes::bt_search_greedy;
use modframe::explorer::{
    bt_search, jl_trial, perturb_frame, random_parseval_frame, run_experiment, ExperimentConfig,
};
use modframe::frames::modular_distance;
use modframe::opscale::{operator_scale, tuple_certify};
use modframe::paulsen::{cfm_flow, imp_check, modular_paulsen_solve_with, projection_construct_with};
use modframe::{AlgebraSignature, Error, FrameSystem, PaulsenSolver};
use serde_json::{json, Value};

const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_MAX_ITER: usize = 500;

/// Frames, Paulsen-type solvers and operator scaling over finite-dimensional
/// C*-algebras.
#[derive(Parser)]
#[command(name = "modframe", version)]
struct Cli {
    /// Numerical tolerance [default: 1e-8]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for random generation and experiments [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Iteration cap for iterative solvers [default: 500]
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
    /// Output file (JSON for subcommands, CSV/JSON base path for experiments)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Experiment config (JSON); runs the experiment when no subcommand is given
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Alternation,
    OperatorScaling,
}

impl From<Solver> for PaulsenSolver {
    fn from(s: Solver) -> Self {
        match s {
            Solver::Alternation => PaulsenSolver::Alternation,
            Solver::OperatorScaling => PaulsenSolver::OperatorScaling,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RandomKind {
    /// Gaussian frame
    Frame,
    /// Parseval frame
    Parseval,
    /// Parseval frame moved by noise of modular norm `delta` per vector
    Perturbed,
    /// Frame with max(ε_P, ε_EIP) at most `eps`
    NearEip,
    /// Rank-n projection on A^d with diagonal within `eps` of n/d
    Projection,
    /// Unitary d x d matrix
    Unitary,
    /// Square matrix with unit columns (commutative signatures)
    UnitColumns,
    /// k Gaussian m x n matrices
    Tuple,
    /// Unit-norm n-vector frame in C^d near the tight one
    UnitNorm,
}

#[derive(Subcommand)]
enum Command {
    /// Frame bounds and nearness certificates of a frame
    Certify { frame: PathBuf },
    /// Closest Parseval frame
    Parsevalize { frame: PathBuf },
    /// Closest equal inner product frame
    Equalize { frame: PathBuf },
    /// Heuristic equal inner product Parseval frame near the input
    Paulsen {
        frame: PathBuf,
        #[arg(long, value_enum, default_value = "alternation")]
        solver: Solver,
    },
    /// Projection with constant diagonal near the input projection
    Project {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "alternation")]
        solver: Solver,
    },
    /// Distance of two Parseval frames against that of their analysis images
    ImpCheck { first: PathBuf, second: PathBuf },
    /// Alternating operator scaling of a matrix tuple
    Scale { tuple: PathBuf },
    /// Naimark complement of a Parseval frame
    Naimark { frame: PathBuf },
    /// Column subset with the best restricted invertibility certificate
    BtSearch {
        matrix: PathBuf,
        #[arg(long, default_value_t = 1)]
        min_card: usize,
        /// Use greedy removal even when exhaustive search is feasible
        #[arg(long)]
        greedy: bool,
    },
    /// One random projection trial
    JlTrial {
        #[arg(long, value_delimiter = ',', default_value = "1")]
        signature: Vec<usize>,
        /// Ambient dimension N
        #[arg(long = "big-n", default_value_t = 16)]
        big_n: usize,
        #[arg(long, default_value_t = 4)]
        points: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Target dimension
        #[arg(long, default_value_t = 12)]
        m: usize,
    },
    /// Unit-norm frame flow toward a tight frame
    Cfm {
        frame: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Seeded random input generation
    Random {
        #[arg(value_enum)]
        kind: RandomKind,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        signature: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
}

/// Process outcome other than success.
enum Failure {
    /// An asserted invariant did not hold.
    Violation(String),
    Error(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Settings {
    tol: f64,
    seed: u64,
    max_iter: usize,
    out: Option<PathBuf>,
}

fn load(path: &Path) -> Result<String, Failure> {
    Ok(read_to_string(path)?)
}

fn with_path<T>(path: &Path, r: modframe::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn frame(path: &Path) -> Result<FrameSystem, Failure> {
    with_path(path, parse_frame(&load(path)?))
}

fn emit(value: &Value, out: &Option<PathBuf>) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn certificate_value(f: &FrameSystem, tol: f64) -> Value {
    let c = f.certify(tol);
    json!({
        "lower": c.lower,
        "upper": c.upper,
        "parseval_eps": c.parseval_eps,
        "equal_inner_eps": c.equal_inner_eps,
        "combined_eps": c.combined_eps(),
        "is_frame": c.is_frame,
    })
}

fn run_command(command: Command, s: &Settings) -> Outcome {
    match command {
        Command::Certify { frame: path } => {
            let f = frame(&path)?;
            emit(&certificate_value(&f, s.tol), &s.out)
        }
        Command::Parsevalize { frame: path } => {
            let f = frame(&path)?;
            let g = f.closest_parseval(s.tol)?;
            let dist_sq = modular_distance(&f, &g)?.powi(2);
            emit(&json!({"dist_sq": dist_sq, "frame": frame_to_value(&g)}), &s.out)
        }
        Command::Equalize { frame: path } => {
            let f = frame(&path)?;
            let g = f.equal_inner_normalize(s.tol)?;
            let dist_sq = modular_distance(&f, &g)?.powi(2);
            emit(&json!({"dist_sq": dist_sq, "frame": frame_to_value(&g)}), &s.out)
        }
        Command::Paulsen { frame: path, solver } => {
            let f = frame(&path)?;
            let r = modular_paulsen_solve_with(&f, s.tol, s.max_iter, solver.into())?;
            emit(
                &json!({
                    "input": certificate_value(&f, s.tol),
                    "achieved_dist_sq": r.achieved_dist_sq,
                    "iterations": r.iterations,
                    "final_parseval_eps": r.final_parseval_eps,
                    "final_equal_inner_eps": r.final_equal_inner_eps,
                    "converged": r.converged,
                    "frame": frame_to_value(&r.output),
                }),
                &s.out,
            )
        }
        Command::Project { matrix, solver } => {
            let p = with_path(&matrix, parse_matrix(&load(&matrix)?))?;
            let r = projection_construct_with(&p, s.tol, s.max_iter, solver.into())?;
            emit(
                &json!({
                    "rank": r.rank,
                    "epsilon_in": r.epsilon_in,
                    "projection_dist_sq": r.projection_dist_sq,
                    "solver_dist_sq": r.solver_dist_sq,
                    "bound_ok": r.bound_ok,
                    "converged": r.converged,
                    "commutative": r.commutative,
                    "idempotence_error": r.idempotence_error,
                    "self_adjoint_error": r.self_adjoint_error,
                    "max_diag_error": r.max_diag_error,
                    "solver_iterations": r.solver_iterations,
                    "q": matrix_to_value(&r.q),
                }),
                &s.out,
            )?;
            if r.converged && r.commutative && !r.bound_ok {
                return Err(Failure::Violation("projection distance exceeds 4 x solver distance".into()));
            }
            Ok(())
        }
        Command::ImpCheck { first, second } => {
            let (f, g) = (frame(&first)?, frame(&second)?);
            let r = imp_check(&f, &g, s.tol)?;
            emit(
                &json!({
                    "dist_sq": r.dist_sq,
                    "image_dist_sq": r.image_dist_sq,
                    "ratio": r.ratio,
                    "hypothesis_ok": r.hypothesis_ok,
                    "bound_ok": r.bound_ok,
                }),
                &s.out,
            )?;
            if r.hypothesis_ok && !r.bound_ok {
                return Err(Failure::Violation("image distance exceeds 4 x frame distance".into()));
            }
            Ok(())
        }
        Command::Scale { tuple } => {
            let u = with_path(&tuple, parse_tuple(&load(&tuple)?))?;
            let r = operator_scale(&u, s.tol, s.max_iter)?;
            let report = tuple_certify(&r.scaled, s.tol);
            emit(
                &json!({
                    "converged": r.converged,
                    "iterations": r.iterations,
                    "nearly_eps": report.nearly_eps,
                    "is_doubly_stochastic": report.is_doubly_stochastic,
                    "residual_trace": r.residual_trace,
                    "left_step_errors": r.left_step_errors,
                    "right_step_errors": r.right_step_errors,
                    "l": matrix_to_value(&r.l),
                    "r": matrix_to_value(&r.r),
                    "scaled": tuple_to_value(&r.scaled),
                }),
                &s.out,
            )
        }
        Command::Naimark { frame: path } => {
            let f = frame(&path)?;
            let g = f.naimark_complement(s.tol)?;
            emit(
                &json!({"certificate": certificate_value(&g, s.tol), "frame": frame_to_value(&g)}),
                &s.out,
            )
        }
        Command::BtSearch { matrix, min_card, greedy } => {
            let m = with_path(&matrix, parse_matrix(&load(&matrix)?))?;
            let r = if greedy { bt_search_greedy(&m, min_card, s.tol)? } else { bt_search(&m, min_card, s.tol)? };
            emit(&serde_json::to_value(&r).expect("serializable"), &s.out)
        }
        Command::JlTrial { signature, big_n, points, eps, m } => {
            let sig = AlgebraSignature::new(signature)?;
            let r = jl_trial(&sig, big_n, points, eps, m, s.seed, s.tol)?;
            emit(&serde_json::to_value(&r).expect("serializable"), &s.out)
        }
        Command::Cfm { frame: path, step } => {
            let f = frame(&path)?;
            let (g, trace) = cfm_flow(&f, step, s.max_iter, s.tol)?;
            let residuals: Vec<f64> = trace.records.iter().map(|r| r.residual).collect();
            let deviation = trace.records.iter().map(|r| r.unit_norm_deviation).fold(0.0, f64::max);
            emit(
                &json!({
                    "step": trace.step,
                    "iterations": trace.iterations,
                    "residuals": residuals,
                    "max_unit_norm_deviation": deviation,
                    "frame": frame_to_value(&g),
                }),
                &s.out,
            )
        }
        Command::Random { kind, signature, d, n, k, m, eps, delta } => {
            let sig = AlgebraSignature::new(signature)?;
            let seed = s.seed;
            let value = match kind {
                RandomKind::Frame => frame_to_value(&random_frame(&sig, d, n, seed)?),
                RandomKind::Parseval => frame_to_value(&random_parseval_frame(&sig, d, n, seed)?),
                RandomKind::Perturbed => {
                    let base = random_parseval_frame(&sig, d, n, seed)?;
                    frame_to_value(&perturb_frame(&base, delta, seed.wrapping_add(1))?)
                }
                RandomKind::NearEip => frame_to_value(&near_eip_parseval(&sig, d, n, eps, seed)?),
                RandomKind::Projection => matrix_to_value(&random_projection(&sig, d, n, eps, seed)?),
                RandomKind::Unitary => matrix_to_value(&random_unitary(&sig, d, seed)),
                RandomKind::UnitColumns => matrix_to_value(&random_unit_column_matrix(&sig, d, seed)?),
                RandomKind::Tuple => tuple_to_value(&random_tuple(&sig, m, n, k, seed)?),
                RandomKind::UnitNorm => frame_to_value(&unit_norm_start(n, d, delta, seed)?),
            };
            emit(&value, &s.out)
        }
    }
}

fn run_config(path: &Path, cli: &Cli) -> Outcome {
    let mut config = with_path(path, ExperimentConfig::from_json(&load(path)?))?;
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(max_iter) = cli.max_iter {
        config.max_iter = max_iter;
    }
    if let Some(out) = &cli.out {
        config.output = Some(out.clone());
    }
    with_path(path, config.validate())?;
    let record = run_experiment(&config)?;
    match &config.output {
        Some(base) => {
            let (csv, summary) = record.write(base)?;
            eprintln!("wrote {} and {}", csv.display(), summary.display());
        }
        None => {
            print!("{}", record.to_csv());
            eprintln!("{}", serde_json::to_string_pretty(&record.summary()).expect("JSON values serialize"));
        }
    }
    if record.passed() {
        Ok(())
    } else {
        Err(Failure::Violation(format!(
            "{} asserted invariant violations in {} experiment",
            record.violations.len(),
            config.kind.name()
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match (&cli.command, &cli.config) {
        (None, Some(path)) => run_config(path, &cli),
        (Some(_), Some(_)) => Err(Failure::Error("--config runs an experiment and takes no subcommand".into())),
        (None, None) => Err(Failure::Error("nothing to do: give a subcommand or --config (see --help)".into())),
        (Some(_), None) => {
            let settings = Settings {
                tol: cli.tol.unwrap_or(DEFAULT_TOL),
                seed: cli.seed.unwrap_or(0),
                max_iter: cli.max_iter.unwrap_or(DEFAULT_MAX_ITER),
                out: cli.out.clone(),
            };
            let command = cli.command.expect("matched Some");
            run_command(command, &settings)
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
