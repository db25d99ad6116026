//! Probes for the restricted invertibility and random projection questions.
//! Neither is asserted; both only report numbers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::rng::{complex_gaussian, gaussian_matrix, stream};
use crate::cstar::{AlgebraSignature, CStarElement, SpectralFn};
use crate::error::{Error, Result};
use crate::jacobi;
use crate::module::{ModuleMatrix, ModuleVector};

/// Largest subset size searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Greedy,
}

impl std::fmt::Display for SearchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMode::Exhaustive => "exhaustive",
            SearchMode::Greedy => "greedy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BtSearch {
    /// Zero-based column indices, ascending.
    pub sigma: Vec<usize>,
    pub certificate: f64,
    pub mode: SearchMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JlTrial {
    pub success: bool,
    /// `max |λ - 1|` over pairs, `λ` ranging over the spectrum of
    /// `a^{-1/2} b a^{-1/2}` with `a`, `b` the squared distances before and after.
    pub max_distortion: f64,
}

fn check_unit_columns(m: &ModuleMatrix, tol: f64) -> Result<()> {
    if !m.signature().is_commutative() {
        return Err(Error::NonCommutative);
    }
    if !m.is_square() {
        return Err(Error::ShapeMismatch("restricted invertibility needs a square matrix".into()));
    }
    let one = CStarElement::identity(m.signature());
    for j in 0..m.cols() {
        let c = m.column(j);
        let dev = c.inner_raw(&c).max_abs_diff(&one);
        if dev > tol {
            return Err(Error::HypothesisViolated(format!(
                "column {j} has <Me_j, Me_j> off 1 by {dev:e}"
            )));
        }
    }
    Ok(())
}

/// Least eigenvalue over blocks of the Gram matrix of the selected columns;
/// assumes the hypotheses were checked.
fn certificate_unchecked(m: &ModuleMatrix, sigma: &[usize]) -> f64 {
    m.flattened()
        .iter()
        .map(|b| {
            let cols = DMatrix::from_fn(b.nrows(), sigma.len(), |r, c| b[(r, sigma[c])]);
            let gram = cols.adjoint() * cols;
            jacobi::eigh(&gram.transpose()).values[0]
        })
        .fold(f64::INFINITY, f64::min)
}

fn check_sigma(sigma: &[usize], d: usize) -> Result<()> {
    if sigma.is_empty() {
        return Err(Error::InvalidDimension("sigma must be nonempty".into()));
    }
    if let Some(&j) = sigma.iter().find(|&&j| j >= d) {
        return Err(Error::InvalidDimension(format!("index {j} outside 0..{d}")));
    }
    let mut sorted = sigma.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != sigma.len() {
        return Err(Error::InvalidDimension("sigma has repeated indices".into()));
    }
    Ok(())
}

/// Largest `A` with `Σ_{j,k∈σ} a_j <Me_j, Me_k> a_k* ≥ A Σ a_j a_j*`.
pub fn bt_certificate(m: &ModuleMatrix, sigma: &[usize], tol: f64) -> Result<f64> {
    check_unit_columns(m, tol)?;
    check_sigma(sigma, m.cols())?;
    Ok(certificate_unchecked(m, sigma))
}

const TIE: f64 = 1e-12;

fn better(candidate: (f64, &[usize]), best: &Option<(f64, Vec<usize>)>) -> bool {
    match best {
        None => true,
        Some((a, s)) => candidate.0 > a + TIE || ((candidate.0 - a).abs() <= TIE && candidate.1 < s.as_slice()),
    }
}

/// Subset of cardinality at least `min_card` maximizing [`bt_certificate`].
pub fn bt_search(m: &ModuleMatrix, min_card: usize, tol: f64) -> Result<BtSearch> {
    check_unit_columns(m, tol)?;
    let d = m.cols();
    if min_card == 0 || min_card > d {
        return Err(Error::InvalidDimension(format!("min_card must lie in 1..={d}, got {min_card}")));
    }
    if d <= EXHAUSTIVE_LIMIT {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for mask in 1u32..(1u32 << d) {
            if (mask.count_ones() as usize) < min_card {
                continue;
            }
            let sigma: Vec<usize> = (0..d).filter(|&j| mask & (1 << j) != 0).collect();
            let a = certificate_unchecked(m, &sigma);
            if better((a, &sigma), &best) {
                best = Some((a, sigma));
            }
        }
        let (certificate, sigma) = best.expect("at least one subset");
        return Ok(BtSearch { sigma, certificate, mode: SearchMode::Exhaustive });
    }
    Ok(greedy(m, min_card))
}

/// Removes one column at a time, always the one whose removal leaves the
/// largest certificate (lowest index on ties).
pub fn bt_search_greedy(m: &ModuleMatrix, min_card: usize, tol: f64) -> Result<BtSearch> {
    check_unit_columns(m, tol)?;
    let d = m.cols();
    if min_card == 0 || min_card > d {
        return Err(Error::InvalidDimension(format!("min_card must lie in 1..={d}, got {min_card}")));
    }
    Ok(greedy(m, min_card))
}

fn greedy(m: &ModuleMatrix, min_card: usize) -> BtSearch {
    let mut sigma: Vec<usize> = (0..m.cols()).collect();
    while sigma.len() > min_card {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for drop in 0..sigma.len() {
            let mut candidate = sigma.clone();
            candidate.remove(drop);
            let a = certificate_unchecked(m, &candidate);
            if better((a, &candidate), &best) {
                best = Some((a, candidate));
            }
        }
        sigma = best.expect("nonempty").1;
    }
    BtSearch {
        certificate: certificate_unchecked(m, &sigma),
        sigma,
        mode: SearchMode::Greedy,
    }
}

fn random_point(signature: &AlgebraSignature, dim: usize, rng: &mut impl rand::Rng) -> ModuleVector {
    let entries = (0..dim)
        .map(|_| {
            let blocks = signature
                .sizes()
                .iter()
                .map(|&ni| DMatrix::from_fn(ni, ni, |_, _| complex_gaussian(rng)))
                .collect();
            CStarElement::from_blocks(signature.clone(), blocks).expect("block shapes")
        })
        .collect();
    ModuleVector::new(entries).expect("dim >= 1")
}

/// Random projection of `num_points` Gaussian points of `A^big_n` to `A^m`
/// by `x ↦ x G*`, `G` Gaussian `m x big_n` over `A` scaled by `1/√(m n_i)`.
pub fn jl_trial(
    signature: &AlgebraSignature,
    big_n: usize,
    num_points: usize,
    eps: f64,
    m: usize,
    seed: u64,
    tol: f64,
) -> Result<JlTrial> {
    if m == 0 || m > big_n {
        return Err(Error::InvalidDimension(format!("need 1 <= m <= N, got m={m}, N={big_n}")));
    }
    if num_points < 2 {
        return Err(Error::InvalidDimension(format!("need at least 2 points, got {num_points}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidDimension(format!("eps must lie in (0, 1), got {eps}")));
    }
    let blocks = signature
        .sizes()
        .iter()
        .enumerate()
        .map(|(i, &ni)| {
            let scale = 1.0 / ((m * ni) as f64).sqrt();
            gaussian_matrix(&mut stream(seed, i), m * ni, big_n * ni) * Complex64::new(scale, 0.0)
        })
        .collect();
    let g = ModuleMatrix::from_blocks(signature, m, big_n, blocks)?;
    let g_adj = g.adjoint();
    let mut rng = stream(seed, signature.num_blocks());
    let points: Vec<ModuleVector> = (0..num_points).map(|_| random_point(signature, big_n, &mut rng)).collect();
    let projected = points.iter().map(|x| x.apply(&g_adj)).collect::<Result<Vec<_>>>()?;

    let mut success = true;
    let mut max_distortion: f64 = 0.0;
    for j in 0..num_points {
        for k in j + 1..num_points {
            let diff = points[j].sub_raw(&points[k]);
            let a = diff.inner_raw(&diff);
            let pdiff = projected[j].sub_raw(&projected[k]);
            let b = pdiff.inner_raw(&pdiff);
            let lower = a.scale(1.0 - eps).order_leq(&b, tol)?;
            let upper = b.order_leq(&a.scale(1.0 + eps), tol)?;
            success &= lower && upper;
            if let Ok(w) = a.spectral_map(SpectralFn::InvSqrt, tol) {
                let ratio = w.mul_raw(&b).mul_raw(&w).spectrum_unchecked();
                max_distortion = max_distortion.max((ratio.min - 1.0).abs()).max((ratio.max - 1.0).abs());
            }
        }
    }
    Ok(JlTrial { success, max_distortion })
}
