//! Experiment configuration, per-trial pipelines and report writing.
//!
//! Kind-specific parameters: `paulsen`, `imp`, `naimark`, `cfm` draw `n`
//! vectors in `A^d`; `project` draws rank-`n` projections on `A^d`; `scale`
//! draws `k` matrices of shape `m x n`; `bt` uses `d x d` matrices with
//! `min_card = k`; `jl` projects `n` points of `A^d` to `A^m`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::generators::{
    near_eip_parseval, perturb_frame, random_parseval_frame, random_projection, random_tuple,
    random_unit_column_matrix, unit_norm_start,
};
use super::probes::{bt_search, bt_search_greedy, jl_trial, EXHAUSTIVE_LIMIT};
use super::rng::{derive_seed, stream};
use crate::cstar::{AlgebraSignature, CStarElement};
use crate::error::{Error, Result};
use crate::opscale::{operator_scale, tuple_distance};
use crate::paulsen::{cfm_flow, imp_check, modular_paulsen_solve_with, projection_construct_with, PaulsenSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Paulsen,
    Project,
    Imp,
    Scale,
    Naimark,
    Bt,
    Jl,
    Cfm,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::Paulsen,
        Self::Project,
        Self::Imp,
        Self::Scale,
        Self::Naimark,
        Self::Bt,
        Self::Jl,
        Self::Cfm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Paulsen => "paulsen",
            Self::Project => "project",
            Self::Imp => "imp",
            Self::Scale => "scale",
            Self::Naimark => "naimark",
            Self::Bt => "bt",
            Self::Jl => "jl",
            Self::Cfm => "cfm",
        }
    }

    /// CSV columns between `trial` and `error`.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Self::Paulsen => &[
                "input_eps",
                "achieved_dist_sq",
                "hm_bound",
                "within_hm_bound",
                "converged",
                "iterations",
                "final_parseval_eps",
                "final_equal_inner_eps",
            ],
            Self::Project => &[
                "epsilon_in",
                "projection_dist_sq",
                "solver_dist_sq",
                "bound_ok",
                "converged",
                "commutative",
                "idempotence_error",
                "self_adjoint_error",
                "max_diag_error",
                "iterations",
            ],
            Self::Imp => &["dist_sq", "image_dist_sq", "ratio", "hypothesis_ok", "bound_ok"],
            Self::Scale => &[
                "input_eps",
                "final_eps",
                "dist_sq",
                "iterations",
                "converged",
                "max_left_step_error",
                "max_right_step_error",
                "reconstruction_error",
            ],
            Self::Naimark => &[
                "n",
                "d",
                "complement_dim",
                "input_in_reduced_range",
                "complement_in_reduced_range",
                "complement_parseval_eps",
                "sum_identity_error",
            ],
            Self::Bt => &[
                "operator_norm_sq",
                "min_card",
                "mode",
                "sigma",
                "certificate",
                "greedy_certificate",
                "greedy_agrees",
            ],
            Self::Jl => &["success", "max_distortion"],
            Self::Cfm => &[
                "step",
                "initial_residual",
                "final_residual",
                "iterations",
                "max_unit_norm_deviation",
                "monotone",
            ],
        }
    }

    /// Kinds whose rows carry asserted invariants; the others are probes.
    pub fn is_asserted(self) -> bool {
        matches!(self, Self::Project | Self::Imp | Self::Scale | Self::Naimark | Self::Cfm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Alternation,
    OperatorScaling,
}

impl From<SolverChoice> for PaulsenSolver {
    fn from(s: SolverChoice) -> Self {
        match s {
            SolverChoice::Alternation => PaulsenSolver::Alternation,
            SolverChoice::OperatorScaling => PaulsenSolver::OperatorScaling,
        }
    }
}

fn default_signature() -> Vec<usize> {
    vec![1]
}
fn default_d() -> usize {
    2
}
fn default_n() -> usize {
    3
}
fn default_k() -> usize {
    2
}
fn default_m() -> usize {
    2
}
fn default_eps() -> f64 {
    0.1
}
fn default_trials() -> usize {
    100
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_signature")]
    pub signature: Vec<usize>,
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverChoice,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            signature: default_signature(),
            d: default_d(),
            n: default_n(),
            k: default_k(),
            m: default_m(),
            eps: default_eps(),
            trials: default_trials(),
            seed: 0,
            tol: default_tol(),
            max_iter: default_max_iter(),
            output: None,
            solver: SolverChoice::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value = super::io::parse_value(text)?;
        serde_json::from_value(value).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn algebra(&self) -> Result<AlgebraSignature> {
        AlgebraSignature::new(self.signature.clone()).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let sig = self.algebra()?;
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if self.d == 0 || self.n == 0 || self.k == 0 || self.m == 0 {
            return bad("d, n, k, m must be positive".into());
        }
        let needs_eps = matches!(
            self.kind,
            ExperimentKind::Paulsen | ExperimentKind::Project | ExperimentKind::Jl | ExperimentKind::Cfm
        );
        if needs_eps && !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        let (d, n, m, k) = (self.d, self.n, self.m, self.k);
        match self.kind {
            ExperimentKind::Paulsen | ExperimentKind::Imp if n < d => bad(format!("need n >= d, got n={n}, d={d}")),
            ExperimentKind::Naimark if n <= d => bad(format!("need n > d, got n={n}, d={d}")),
            ExperimentKind::Project if n >= d => bad(format!("need rank n < d, got n={n}, d={d}")),
            ExperimentKind::Scale if k * m.min(n) < m.max(n) => {
                bad(format!("k * min(m, n) must be at least max(m, n), got k={k}, m={m}, n={n}"))
            }
            ExperimentKind::Bt if !sig.is_commutative() => bad("bt needs a commutative signature".into()),
            ExperimentKind::Bt if k > d => bad(format!("min_card k={k} exceeds d={d}")),
            ExperimentKind::Jl if m > d || n < 2 => {
                bad(format!("jl needs m <= d and at least 2 points, got m={m}, d={d}, n={n}"))
            }
            ExperimentKind::Cfm if sig.sizes() != [1] => bad("cfm needs signature [1]".into()),
            ExperimentKind::Cfm if n < d => bad(format!("need n >= d, got n={n}, d={d}")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(usize),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(x) => x.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub cells: Vec<Cell>,
    pub error: Option<String>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub violations: Vec<Violation>,
    pub wall_time_seconds: f64,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRecord> {
    run_experiment_with(config, Execution::Parallel)
}

pub fn run_experiment_with(config: &ExperimentConfig, execution: Execution) -> Result<ExperimentRecord> {
    config.validate()?;
    let sig = config.algebra()?;
    let start = Instant::now();
    let one = |i: usize| run_trial(config, &sig, derive_seed(config.seed, i as u64));
    let rows: Vec<TrialRow> = match execution {
        Execution::Sequential => (0..config.trials).map(one).collect(),
        Execution::Parallel => (0..config.trials).into_par_iter().map(one).collect(),
    };
    let violations = rows
        .iter()
        .enumerate()
        .flat_map(|(trial, r)| {
            r.violations.iter().map(move |message| Violation {
                trial,
                message: message.clone(),
            })
        })
        .collect();
    Ok(ExperimentRecord {
        config: config.clone(),
        rows,
        violations,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

fn run_trial(cfg: &ExperimentConfig, sig: &AlgebraSignature, seed: u64) -> TrialRow {
    let width = cfg.kind.columns().len();
    let mut violations = Vec::new();
    let outcome = match cfg.kind {
        ExperimentKind::Paulsen => paulsen_trial(cfg, sig, seed),
        ExperimentKind::Project => project_trial(cfg, sig, seed, &mut violations),
        ExperimentKind::Imp => imp_trial(cfg, sig, seed, &mut violations),
        ExperimentKind::Scale => scale_trial(cfg, sig, seed, &mut violations),
        ExperimentKind::Naimark => naimark_trial(cfg, sig, seed, &mut violations),
        ExperimentKind::Bt => bt_trial(cfg, sig, seed),
        ExperimentKind::Jl => jl_row(cfg, sig, seed),
        ExperimentKind::Cfm => cfm_trial(cfg, seed, &mut violations),
    };
    match outcome {
        Ok(cells) => TrialRow {
            cells,
            error: None,
            violations,
        },
        Err(e) => {
            if cfg.kind.is_asserted() {
                violations.push(format!("trial failed: {e}"));
            }
            TrialRow {
                cells: vec![Cell::Empty; width],
                error: Some(e.to_string()),
                violations,
            }
        }
    }
}

fn paulsen_trial(cfg: &ExperimentConfig, sig: &AlgebraSignature, seed: u64) -> Result<Vec<Cell>> {
    let f = near_eip_parseval(sig, cfg.d, cfg.n, cfg.eps, seed)?;
    let input_eps = f.certify(cfg.tol).combined_eps();
    let r = modular_paulsen_solve_with(&f, cfg.tol, cfg.max_iter, cfg.solver.into())?;
    let hm_bound = 20.0 * input_eps * (cfg.d * cfg.d) as f64;
    Ok(vec![
        Cell::Float(input_eps),
        Cell::Float(r.achieved_dist_sq),
        Cell::Float(hm_bound),
        Cell::Bool(r.converged && r.achieved_dist_sq <= hm_bound),
        Cell::Bool(r.converged),
        Cell::Int(r.iterations),
        Cell::Float(r.final_parseval_eps),
        Cell::Float(r.final_equal_inner_eps),
    ])
}

fn project_trial(cfg: &ExperimentConfig, sig: &AlgebraSignature, seed: u64, v: &mut Vec<String>) -> Result<Vec<Cell>> {
    let p = random_projection(sig, cfg.d, cfg.n, cfg.eps, seed)?;
    let r = projection_construct_with(&p, cfg.tol, cfg.max_iter, cfg.solver.into())?;
    if r.commutative && r.converged {
        if r.projection_dist_sq > 4.0 * r.solver_dist_sq + 1e-6 {
            v.push(format!(
                "projection distance {:e} exceeds 4 x solver distance {:e}",
                r.projection_dist_sq, r.solver_dist_sq
            ));
        }
        if r.idempotence_error > 1e-8 || r.self_adjoint_error > 1e-8 {
            v.push(format!(
                "Q is not a projection (idempotence {:e}, self-adjointness {:e})",
                r.idempotence_error, r.self_adjoint_error
            ));
        }
        if r.max_diag_error > 1e-6 {
            v.push(format!("diagonal of Q off target by {:e}", r.max_diag_error));
        }
    }
    Ok(vec![
        Cell::Float(r.epsilon_in),
        Cell::Float(r.projection_dist_sq),
        Cell::Float(r.solver_dist_sq),
        Cell::Bool(r.bound_ok),
        Cell::Bool(r.converged),
        Cell::Bool(r.commutative),
        Cell::Float(r.idempotence_error),
        Cell::Float(r.self_adjoint_error),
        Cell::Float(r.max_diag_error),
        Cell::Int(r.solver_iterations),
    ])
}

fn imp_trial(cfg: &ExperimentConfig, sig: &AlgebraSignature, seed: u64, v: &mut Vec<String>) -> Result<Vec<Cell>> {
    let f = random_parseval_frame(sig, cfg.d, cfg.n, derive_seed(seed, 0))?;
    let mut rng = stream(derive_seed(seed, 1), 0);
    let delta = 10f64.powf(rng.random_range(-2.3..-0.4));
    let g = perturb_frame(&f, delta, derive_seed(seed, 2))?.closest_parseval(cfg.tol)?;
    let r = imp_check(&f, &g, cfg.tol)?;
    let bound_ok = r.image_dist_sq <= 4.0 * r.dist_sq + 1e-8;
    if r.hypothesis_ok && !bound_ok {
        v.push(format!("image distance {:e} exceeds 4 x {:e}", r.image_dist_sq, r.dist_sq));
    }
    Ok(vec![
        Cell::Float(r.dist_sq),
        Cell::Float(r.image_dist_sq),
        Cell::Float(r.ratio),
        Cell::Bool(r.hypothesis_ok),
        Cell::Bool(bound_ok),
    ])
}

fn scale_trial(cfg: &ExperimentConfig, sig: &AlgebraSignature, seed: u64, v: &mut Vec<String>) -> Result<Vec<Cell>> {
    let t = random_tuple(sig, cfg.m, cfg.n, cfg.k, seed)?;
    let r = operator_scale(&t, cfg.tol, cfg.max_iter)?;
    let max_left = r.left_step_errors.iter().copied().fold(0.0, f64::max);
    let max_right = r.right_step_errors.iter().copied().fold(0.0, f64::max);
    let reconstruction = t
        .matrices()
        .iter()
        .zip(r.scaled.matrices())
        .map(|(u, s)| r.l.compose(u).and_then(|x| x.compose(&r.r)).and_then(|x| x.sub(s)).map(|x| x.mhs_norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if max_left > 1e-10 || max_right > 1e-10 {
        v.push(format!("half-step marginal errors {max_left:e} (left), {max_right:e} (right)"));
    }
    if reconstruction > 1e-9 {
        v.push(format!("L U_j R differs from the scaled tuple by {reconstruction:e}"));
    }
    let input_eps = crate::opscale::tuple_certify(&t, 0.0).nearly_eps;
    let final_eps = r.residual_trace.last().copied().unwrap_or(input_eps);
    Ok(vec![
        Cell::Float(input_eps),
        Cell::Float(final_eps),
        Cell::Float(tuple_distance(&t, &r.scaled)?.powi(2)),
        Cell::Int(r.iterations),
        Cell::Bool(r.converged),
        Cell::Float(max_left),
        Cell::Float(max_right),
        Cell::Float(reconstruction),
    ])
}

fn naimark_trial(cfg: &ExperimentConfig, sig: &AlgebraSignature, seed: u64, v: &mut Vec<String>) -> Result<Vec<Cell>> {
    let f = random_parseval_frame(sig, cfg.d, cfg.n, seed)?;
    let c = f.naimark_complement(cfg.tol)?;
    let parseval_eps = c.certify(cfg.tol).parseval_eps;
    let one = CStarElement::identity(sig);
    let sum_error = f
        .self_inner_products()
        .iter()
        .zip(c.self_inner_products())
        .map(|(a, b)| a.add(&b).map(|s| s.max_abs_diff(&one)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if parseval_eps > 1e-8 {
        v.push(format!("complement is not Parseval (eps {parseval_eps:e})"));
    }
    if sum_error > 1e-8 {
        v.push(format!("<t_j, t_j> + <v_j, v_j> off the identity by {sum_error:e}"));
    }
    let (n, d) = (cfg.n, cfg.d);
    let dc = c.d();
    Ok(vec![
        Cell::Int(n),
        Cell::Int(d),
        Cell::Int(dc),
        Cell::Bool(n <= 2 * d),
        Cell::Bool(dc <= n && n <= 2 * dc),
        Cell::Float(parseval_eps),
        Cell::Float(sum_error),
    ])
}

fn bt_trial(cfg: &ExperimentConfig, sig: &AlgebraSignature, seed: u64) -> Result<Vec<Cell>> {
    let m = random_unit_column_matrix(sig, cfg.d, seed)?;
    let norm_sq = m.compose(&m.adjoint())?.as_algebra_element()?.cstar_norm();
    let r = bt_search(&m, cfg.k, cfg.tol)?;
    let g = bt_search_greedy(&m, cfg.k, cfg.tol)?;
    let sigma = r.sigma.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(";");
    let agrees = if cfg.d <= EXHAUSTIVE_LIMIT {
        Cell::Bool((g.certificate - r.certificate).abs() <= 1e-12)
    } else {
        Cell::Empty
    };
    Ok(vec![
        Cell::Float(norm_sq),
        Cell::Int(cfg.k),
        Cell::Text(r.mode.to_string()),
        Cell::Text(sigma),
        Cell::Float(r.certificate),
        Cell::Float(g.certificate),
        agrees,
    ])
}

fn jl_row(cfg: &ExperimentConfig, sig: &AlgebraSignature, seed: u64) -> Result<Vec<Cell>> {
    let r = jl_trial(sig, cfg.d, cfg.n, cfg.eps, cfg.m, seed, cfg.tol)?;
    Ok(vec![Cell::Bool(r.success), Cell::Float(r.max_distortion)])
}

fn cfm_trial(cfg: &ExperimentConfig, seed: u64, v: &mut Vec<String>) -> Result<Vec<Cell>> {
    let f = unit_norm_start(cfg.n, cfg.d, cfg.eps, seed)?;
    let step = 0.3 / cfg.n as f64;
    let (_, trace) = cfm_flow(&f, step, cfg.max_iter, cfg.tol)?;
    let initial = trace.records[0].residual;
    let last = trace.records[trace.records.len() - 1].residual;
    let max_dev = trace.records.iter().map(|r| r.unit_norm_deviation).fold(0.0, f64::max);
    let monotone = trace.records.windows(2).all(|w| w[1].residual <= w[0].residual);
    if max_dev > 1e-8 {
        v.push(format!("unit norms drifted by {max_dev:e}"));
    }
    if last > initial {
        v.push(format!("residual grew from {initial:e} to {last:e}"));
    }
    Ok(vec![
        Cell::Float(step),
        Cell::Float(initial),
        Cell::Float(last),
        Cell::Int(trace.iterations),
        Cell::Float(max_dev),
        Cell::Bool(monotone),
    ])
}

impl ExperimentRecord {
    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["trial"];
        h.extend_from_slice(self.config.kind.columns());
        h.push("error");
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header().join(",");
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let mut cells = vec![i.to_string()];
            cells.extend(row.cells.iter().map(Cell::render));
            cells.push(Cell::Text(row.error.clone().unwrap_or_default()).render());
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Per-column statistics: `{count, mean, min, max}` for numbers and
    /// `{count, true}` for booleans.
    pub fn aggregates(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (c, name) in self.config.kind.columns().iter().enumerate() {
            let cells: Vec<&Cell> = self.rows.iter().map(|r| &r.cells[c]).collect();
            let floats: Vec<f64> = cells
                .iter()
                .filter_map(|x| match x {
                    Cell::Float(v) if v.is_finite() => Some(*v),
                    Cell::Int(v) => Some(*v as f64),
                    _ => None,
                })
                .collect();
            let bools: Vec<bool> = cells
                .iter()
                .filter_map(|x| match x {
                    Cell::Bool(b) => Some(*b),
                    _ => None,
                })
                .collect();
            if !floats.is_empty() {
                let mean = floats.iter().sum::<f64>() / floats.len() as f64;
                map.insert(
                    name.to_string(),
                    json!({
                        "count": floats.len(),
                        "mean": mean,
                        "min": floats.iter().copied().fold(f64::INFINITY, f64::min),
                        "max": floats.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    }),
                );
            } else if !bools.is_empty() {
                map.insert(
                    name.to_string(),
                    json!({"count": bools.len(), "true": bools.iter().filter(|&&b| b).count()}),
                );
            }
        }
        map.insert("trials".into(), json!(self.rows.len()));
        map.insert("errors".into(), json!(self.rows.iter().filter(|r| r.error.is_some()).count()));
        map.insert("wall_time_seconds".into(), json!(self.wall_time_seconds));
        Value::Object(map)
    }

    pub fn summary(&self) -> Value {
        json!({
            "config": self.config,
            "aggregates": self.aggregates(),
            "violations": self.violations,
        })
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Writes `<base>.csv` and `<base>.json`; returns both paths.
    pub fn write(&self, base: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv = base.with_extension("csv");
        let summary = base.with_extension("json");
        if let Some(parent) = csv.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&csv, self.to_csv())?;
        let text = serde_json::to_string_pretty(&self.summary()).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&summary, text + "\n")?;
        Ok((csv, summary))
    }
}
