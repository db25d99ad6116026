//! Paulsen-type machinery.
//!
//! * [`imp_check`]: compares the distance between two Parseval frames with
//!   the distance between their analysis images (factor-4 inequality for
//!   commutative algebras).
//! * [`cfm_flow`]: the classical gradient-type flow on unit-norm frames.
//! * [`modular_paulsen_solve`]: heuristic search for a nearby equal inner
//!   product Parseval frame by alternating the two candidate maps of
//!   [`FrameSystem`].
//! * [`projection_construct`]: turns a solver output inside the range of a
//!   projection `P` into a projection `Q` with constant diagonal.
//! * [`lower_bound_witness`]: scaled harmonic frames.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cstar::{AlgebraSignature, CStarElement};
use crate::error::{Error, Result};
use crate::frames::{modular_distance, range_basis, FrameSystem};
use crate::module::ModuleMatrix;
use crate::opscale::{operator_scale, MatrixTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaulsenSolver {
    /// Parseval-ize, then equal-inner-normalize, repeated.
    #[default]
    Alternation,
    /// Alternating operator scaling of the tuple `(e_j ⊗ τ_j)_j`.
    OperatorScaling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaulsenResult {
    pub output: FrameSystem,
    pub achieved_dist_sq: f64,
    pub iterations: usize,
    pub final_parseval_eps: f64,
    pub final_equal_inner_eps: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpCheck {
    pub dist_sq: f64,
    pub image_dist_sq: f64,
    /// `image_dist_sq / dist_sq`, zero when both vanish.
    pub ratio: f64,
    /// The algebra is commutative, so the factor-4 bound is guaranteed.
    pub hypothesis_ok: bool,
    pub bound_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRecord {
    /// `‖S - (n/d) I‖_HS`.
    pub residual: f64,
    /// `max_j |‖τ_j‖ - 1|`.
    pub unit_norm_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub step: f64,
    /// One record per iterate, starting with the input.
    pub records: Vec<FlowRecord>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub q: ModuleMatrix,
    /// Module rank shared by `P` and `Q`.
    pub rank: usize,
    pub epsilon_in: f64,
    /// `‖Σ_k <P e_k - Q e_k, P e_k - Q e_k>‖`.
    pub projection_dist_sq: f64,
    pub solver_dist_sq: f64,
    pub bound_ok: bool,
    pub converged: bool,
    pub commutative: bool,
    pub idempotence_error: f64,
    pub self_adjoint_error: f64,
    /// `max_k ‖<Q e_k, Q e_k> - (n/d) 1_A‖`.
    pub max_diag_error: f64,
    pub solver_iterations: usize,
}

/// Factor-4 comparison between frame distance and analysis-image distance.
pub fn imp_check(f: &FrameSystem, g: &FrameSystem, tol: f64) -> Result<ImpCheck> {
    for frame in [f, g] {
        let eps = frame.certify(tol).parseval_eps;
        if eps > tol {
            return Err(Error::NotParseval { eps });
        }
    }
    let dist_sq = modular_distance(f, g)?.powi(2);
    let image_dist_sq = modular_distance(&f.analysis_image(), &g.analysis_image())?.powi(2);
    let ratio = if dist_sq > 0.0 { image_dist_sq / dist_sq } else { 0.0 };
    Ok(ImpCheck {
        dist_sq,
        image_dist_sq,
        ratio,
        hypothesis_ok: f.signature().is_commutative(),
        bound_ok: image_dist_sq <= 4.0 * dist_sq + tol,
    })
}

/// Runs the unit-norm frame flow
/// `τ_j ← cos(‖ω_j‖ t) τ_j − sin(‖ω_j‖ t) ω_j / ‖ω_j‖` with
/// `ω_j = τ_j S − <τ_j S, τ_j> τ_j`, on a classical frame (signature `[1]`).
pub fn cfm_flow(f: &FrameSystem, step: f64, max_iter: usize, tol: f64) -> Result<(FrameSystem, FlowTrace)> {
    if f.signature().sizes() != [1] {
        return Err(Error::HypothesisViolated("flow is defined for signature [1] only".into()));
    }
    let (n, d) = (f.n(), f.d());
    let limit = 1.0 / (2.0 * n as f64);
    if !(step > 0.0 && step < limit) {
        return Err(Error::StepSizeOutOfRange { step, limit });
    }
    let unit_tol = tol.max(1e-12);
    for (j, v) in f.vectors().iter().enumerate() {
        let norm = v.norm();
        if (norm - 1.0).abs() > unit_tol {
            return Err(Error::NotUnitNorm { index: j, norm });
        }
    }

    let mut t = f.frame_matrix().flattened()[0].clone();
    let target = DMatrix::<Complex64>::identity(d, d) * Complex64::new(n as f64 / d as f64, 0.0);
    let record = |t: &DMatrix<Complex64>| {
        let s = t.adjoint() * t;
        let residual = (&s - &target).norm();
        let unit_norm_deviation = t.row_iter().map(|r| (r.norm() - 1.0).abs()).fold(0.0, f64::max);
        (s, FlowRecord { residual, unit_norm_deviation })
    };

    let mut records = Vec::new();
    let mut iterations = 0;
    loop {
        let (s, rec) = record(&t);
        records.push(rec);
        if rec.residual <= tol || iterations >= max_iter {
            break;
        }
        let mut next = t.clone();
        for j in 0..n {
            let tau = t.row(j).into_owned();
            let y = &tau * &s;
            let proj = (&y * tau.adjoint())[(0, 0)];
            let omega = &y - &tau * proj;
            let w = omega.norm();
            if w > 1e-15 {
                let (sin, cos) = (w * step).sin_cos();
                let updated = &tau * Complex64::new(cos, 0.0) - &omega * Complex64::new(sin / w, 0.0);
                // The unit sphere repels rounding errors under this map (they
                // grow by about 1 + 2<τS, τ>t per step), so project back.
                let norm = updated.norm();
                next.set_row(j, &(updated / Complex64::new(norm, 0.0)));
            }
        }
        t = next;
        iterations += 1;
    }
    let out = FrameSystem::from_matrix(ModuleMatrix::from_blocks(f.signature(), n, d, vec![t])?)?;
    Ok((out, FlowTrace { step, records, iterations }))
}

pub fn modular_paulsen_solve(f: &FrameSystem, tol: f64, max_iter: usize) -> Result<PaulsenResult> {
    modular_paulsen_solve_with(f, tol, max_iter, PaulsenSolver::Alternation)
}

pub fn modular_paulsen_solve_with(
    f: &FrameSystem,
    tol: f64,
    max_iter: usize,
    solver: PaulsenSolver,
) -> Result<PaulsenResult> {
    let cert = f.certify(tol);
    if !cert.is_frame {
        return Err(Error::NotFrame { lower: cert.lower });
    }
    match solver {
        PaulsenSolver::Alternation => alternate(f, tol, max_iter),
        PaulsenSolver::OperatorScaling => scale_frame(f, tol, max_iter),
    }
}

fn alternate(f: &FrameSystem, tol: f64, max_iter: usize) -> Result<PaulsenResult> {
    let score = |g: &FrameSystem| {
        let c = g.certify(tol);
        (c.combined_eps(), c.parseval_eps, c.equal_inner_eps)
    };
    let mut best = (f.clone(), score(f));
    let mut iterations = 0;
    let mut current = f.clone();
    while best.1 .0 > tol && iterations < max_iter {
        iterations += 1;
        let parseval = current.closest_parseval(tol)?;
        let sp = score(&parseval);
        if sp.0 < best.1 .0 {
            best = (parseval.clone(), sp);
        }
        if best.1 .0 <= tol {
            break;
        }
        let normalized = parseval.equal_inner_normalize(tol)?;
        let sn = score(&normalized);
        if sn.0 < best.1 .0 {
            best = (normalized.clone(), sn);
        }
        current = normalized;
    }
    let (output, (combined, pe, eie)) = best;
    let achieved_dist_sq = modular_distance(f, &output)?.powi(2);
    Ok(PaulsenResult {
        output,
        achieved_dist_sq,
        iterations,
        final_parseval_eps: pe,
        final_equal_inner_eps: eie,
        converged: combined <= tol,
    })
}

/// Embeds the frame as the tuple `U_j = e_j ⊗ τ_j ∈ M_{n x d}(A)`; a doubly
/// stochastic scaling of it is `√(n/d)` times an equal inner product
/// Parseval frame.
fn scale_frame(f: &FrameSystem, tol: f64, max_iter: usize) -> Result<PaulsenResult> {
    let (n, d) = (f.n(), f.d());
    let sig = f.signature();
    let matrices: Vec<ModuleMatrix> = (0..n)
        .map(|j| {
            let mut m = ModuleMatrix::zeros(sig, n, d);
            for (k, e) in f.vectors()[j].entries().iter().enumerate() {
                m.set_entry(j, k, e);
            }
            m
        })
        .collect();
    let tuple = MatrixTuple::new(matrices)?;
    let scaled = operator_scale(&tuple, tol, max_iter).map_err(|e| match e {
        Error::SingularMarginal(_) => Error::NotFrame { lower: 0.0 },
        other => other,
    })?;
    let factor = (d as f64 / n as f64).sqrt();
    let rows: Vec<_> = scaled
        .scaled
        .matrices()
        .iter()
        .enumerate()
        .map(|(j, m)| m.row(j).scale(factor))
        .collect();
    let output = crate::frames::build_frame(rows)?;
    let cert = output.certify(tol);
    let achieved_dist_sq = modular_distance(f, &output)?.powi(2);
    Ok(PaulsenResult {
        converged: cert.combined_eps() <= tol,
        output,
        achieved_dist_sq,
        iterations: scaled.iterations,
        final_parseval_eps: cert.parseval_eps,
        final_equal_inner_eps: cert.equal_inner_eps,
    })
}

pub fn projection_construct(p: &ModuleMatrix, tol: f64, max_iter: usize) -> Result<ProjectionReport> {
    projection_construct_with(p, tol, max_iter, PaulsenSolver::Alternation)
}

/// Builds `Q` from a projection `P` of module rank `n` on `A^d`.
///
/// The Parseval frame `{P e_k}` of the range is written in coordinates of a
/// per-block isometry `V` (`V V* = I_n`, `V* V = P`), where it becomes the
/// frame of rows of `V*` in `A^n`. The solver output `W_c` (a `d x n`
/// matrix) is mapped back by `W = W_c V` and `Q = W W* = W_c W_c*`, the
/// canonical projection of `W_c`.
pub fn projection_construct_with(
    p: &ModuleMatrix,
    tol: f64,
    max_iter: usize,
    solver: PaulsenSolver,
) -> Result<ProjectionReport> {
    let rank = p.projection_rank(tol)?;
    let d = p.rows();
    let sig = p.signature().clone();
    if rank == 0 {
        return Err(Error::RankMismatch("projection has rank 0".into()));
    }
    let target = rank as f64 / d as f64;

    let rows = p.rows_vec();
    let epsilon_in = rows
        .iter()
        .map(|r| {
            let s = r.inner_raw(r).spectrum_unchecked();
            (1.0 - s.min / target).max(s.max / target - 1.0)
        })
        .fold(0.0, f64::max);

    // Columns of each range basis are the rows of V, so the basis itself is
    // the flattened V*.
    let v_adjoint_blocks: Vec<DMatrix<Complex64>> = p.flattened().iter().map(range_basis).collect();
    let v_adjoint = ModuleMatrix::from_blocks(&sig, d, rank, v_adjoint_blocks)?;
    let chart = FrameSystem::from_matrix(v_adjoint)?;

    let result = modular_paulsen_solve_with(&chart, tol, max_iter, solver)?;
    // The canonical projection equals W W* for Parseval W and stays an exact
    // projection when the solver stops within its tolerance.
    let q = result.output.canonical_projection(tol)?;

    let identity_target = CStarElement::scalar(&sig, target);
    let max_diag_error = q
        .rows_vec()
        .iter()
        .map(|r| r.inner_raw(r).sub_raw(&identity_target).hermitian_norm())
        .fold(0.0, f64::max);
    let diff = p.sub_raw(&q);
    let projection_dist_sq = diff.mhs_inner_raw(&diff).hermitian_norm();
    let solver_dist_sq = result.achieved_dist_sq;

    Ok(ProjectionReport {
        idempotence_error: q.compose_raw(&q).sub_raw(&q).mhs_norm(),
        self_adjoint_error: q.sub_raw(&q.adjoint()).mhs_norm(),
        q,
        rank,
        epsilon_in,
        projection_dist_sq,
        solver_dist_sq,
        bound_ok: projection_dist_sq <= 4.0 * solver_dist_sq + tol,
        converged: result.converged,
        commutative: sig.is_commutative(),
        max_diag_error,
        solver_iterations: result.iterations,
    })
}

/// Harmonic equal inner product Parseval frame: `n` vectors of `A^d` with
/// entries `n^{-1/2} exp(2πi jk/n) 1_A`, `k < d`.
pub fn harmonic_frame(signature: &AlgebraSignature, n: usize, d: usize) -> Result<FrameSystem> {
    if d == 0 || n < d {
        return Err(Error::InvalidDimension(format!("harmonic frame needs n >= d >= 1, got n={n}, d={d}")));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let blocks = signature
        .sizes()
        .iter()
        .map(|&ni| {
            let base = DMatrix::from_fn(n, d, |j, k| Complex64::from_polar(scale, 2.0 * PI * (j * k) as f64 / n as f64));
            base.kronecker(&DMatrix::<Complex64>::identity(ni, ni))
        })
        .collect();
    FrameSystem::from_matrix(ModuleMatrix::from_blocks(signature, n, d, blocks)?)
}

/// `√(1+ε)` times the harmonic frame: an ε-nearly equal inner product,
/// ε-nearly Parseval frame at squared distance `d(√(1+ε) - 1)²` from an
/// equal inner product Parseval frame.
pub fn lower_bound_witness(eps: f64, n: usize, d: usize, signature: &AlgebraSignature) -> Result<FrameSystem> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidDimension(format!("eps must lie in (0, 1), got {eps}")));
    }
    let h = harmonic_frame(signature, n, d)?;
    FrameSystem::from_matrix(h.frame_matrix().scale((1.0 + eps).sqrt()))
}

/// Squared distance between the witness and its unscaled harmonic frame.
pub fn witness_reference_dist_sq(eps: f64, d: usize) -> f64 {
    d as f64 * ((1.0 + eps).sqrt() - 1.0).powi(2)
}
