//! Independent per-block reference computations built directly on nalgebra.
#![allow(dead_code)]

use modframe::{AlgebraSignature, CStarElement, Complex64, FrameSystem, ModuleMatrix, ModuleVector};
use nalgebra::DMatrix;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn sig(v: &[usize]) -> AlgebraSignature {
    AlgebraSignature::new(v.to_vec()).unwrap()
}

pub fn eigvals(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn spectral_radius(m: &CMat) -> f64 {
    eigvals(m).iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn psd_power(m: &CMat, p: f64) -> CMat {
    let h = (m + m.adjoint()) * c(0.5);
    let e = h.symmetric_eigen();
    let d = CMat::from_diagonal(&e.eigenvalues.map(|x| c(x.max(0.0).powf(p))));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// `U V*` from the thin SVD, the unitary part of the polar decomposition.
pub fn polar(t: &CMat) -> CMat {
    let svd = t.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The `n_i x cols` slab of rows belonging to vector `j`.
pub fn slab(m: &CMat, j: usize, ni: usize) -> CMat {
    m.rows(j * ni, ni).into_owned()
}

/// `Σ_j X_j X_j*` over the slabs of a flattened block.
pub fn slab_gram_sum(m: &CMat, count: usize, ni: usize) -> CMat {
    (0..count).fold(CMat::zeros(ni, ni), |acc, j| {
        let s = slab(m, j, ni);
        acc + &s * s.adjoint()
    })
}

/// Squared modular distance between two flattened frames.
pub fn distance_sq(a: &[CMat], b: &[CMat], n: usize, sizes: &[usize]) -> f64 {
    a.iter()
        .zip(b)
        .zip(sizes)
        .map(|((x, y), &ni)| spectral_radius(&slab_gram_sum(&(x - y), n, ni)))
        .fold(0.0, f64::max)
}

pub struct CertOracle {
    pub lower: f64,
    pub upper: f64,
    pub parseval_eps: f64,
    pub equal_inner_eps: f64,
}

pub fn certify(f: &FrameSystem) -> CertOracle {
    let (n, d) = (f.n(), f.d());
    let ratio = n as f64 / d as f64;
    let mut out = CertOracle {
        lower: f64::INFINITY,
        upper: f64::NEG_INFINITY,
        parseval_eps: 0.0,
        equal_inner_eps: 0.0,
    };
    for (t, &ni) in f.frame_matrix().flattened().iter().zip(f.signature().sizes()) {
        let e = eigvals(&(t.adjoint() * t));
        out.lower = out.lower.min(e[0]);
        out.upper = out.upper.max(e[e.len() - 1]);
        out.parseval_eps = out.parseval_eps.max((1.0 - e[0]).max(e[e.len() - 1] - 1.0));
        for j in 0..n {
            let s = slab(t, j, ni);
            let g = eigvals(&(&s * s.adjoint()));
            out.equal_inner_eps = out
                .equal_inner_eps
                .max((1.0 - ratio * g[0]).max(ratio * g[g.len() - 1] - 1.0));
        }
    }
    out
}

pub fn normalize(f: &FrameSystem) -> Vec<CMat> {
    let (n, d) = (f.n(), f.d());
    let factor = (d as f64 / n as f64).sqrt();
    f.frame_matrix()
        .flattened()
        .iter()
        .zip(f.signature().sizes())
        .map(|(t, &ni)| {
            let mut out = t.clone();
            for j in 0..n {
                let s = slab(t, j, ni);
                let w = psd_power(&(&s * s.adjoint()), -0.5) * &s * c(factor);
                out.rows_mut(j * ni, ni).copy_from(&w);
            }
            out
        })
        .collect()
}

pub fn real_element(values: &[f64]) -> CStarElement {
    CStarElement::from_reals(values).unwrap()
}

pub fn real_matrix(signature: &AlgebraSignature, rows: usize, cols: usize, per_block: &[Vec<f64>]) -> ModuleMatrix {
    let entries: Vec<CStarElement> = (0..rows * cols)
        .map(|idx| {
            let vals: Vec<f64> = per_block.iter().map(|b| b[idx]).collect();
            real_element(&vals)
        })
        .collect();
    let _ = signature;
    ModuleMatrix::from_entries(&entries[0].signature().clone(), rows, cols, &entries).unwrap()
}

pub fn vector_from_reals(rows: &[&[f64]]) -> ModuleVector {
    ModuleVector::new(rows.iter().map(|x| real_element(x)).collect()).unwrap()
}
