//! Seeded random inputs for the experiments.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::rng::{derive_seed, gaussian_matrix, stream};
use crate::cstar::{AlgebraSignature, CStarElement};
use crate::error::{Error, Result};
use crate::frames::FrameSystem;
use crate::jacobi;
use crate::module::ModuleMatrix;
use crate::opscale::MatrixTuple;
use crate::paulsen::harmonic_frame;

/// Tolerance used when Parseval-izing freshly drawn Gaussian frames.
const DRAW_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 40;

fn gaussian_module_matrix(signature: &AlgebraSignature, rows: usize, cols: usize, seed: u64) -> ModuleMatrix {
    let blocks = signature
        .sizes()
        .iter()
        .enumerate()
        .map(|(i, &ni)| gaussian_matrix(&mut stream(seed, i), rows * ni, cols * ni))
        .collect();
    ModuleMatrix::from_blocks(signature, rows, cols, blocks).expect("block shapes")
}

/// Gaussian frame of `n` vectors in `A^d`, not normalized.
pub fn random_frame(signature: &AlgebraSignature, d: usize, n: usize, seed: u64) -> Result<FrameSystem> {
    if d == 0 || n < d {
        return Err(Error::InvalidDimension(format!("need n >= d >= 1, got n={n}, d={d}")));
    }
    FrameSystem::from_matrix(gaussian_module_matrix(signature, n, d, seed))
}

pub fn random_parseval_frame(signature: &AlgebraSignature, d: usize, n: usize, seed: u64) -> Result<FrameSystem> {
    let f = random_frame(signature, d, n, seed)?.closest_parseval(DRAW_TOL)?;
    let eps = f.certify(DRAW_TOL).parseval_eps;
    if eps > 1e-10 {
        return Err(Error::NotParseval { eps });
    }
    Ok(f)
}

/// Adds Gaussian noise of modular norm exactly `delta` to every vector.
pub fn perturb_frame(f: &FrameSystem, delta: f64, seed: u64) -> Result<FrameSystem> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidDimension(format!("delta must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(f.clone());
    }
    let sig = f.signature();
    let noise = gaussian_module_matrix(sig, f.n(), f.d(), seed);
    let factors: Vec<CStarElement> = noise
        .rows_vec()
        .iter()
        .map(|r| {
            let norm = r.norm();
            CStarElement::scalar(sig, if norm > 0.0 { delta / norm } else { 0.0 })
        })
        .collect();
    let scaled = ModuleMatrix::diagonal(&factors)?.compose(&noise)?;
    FrameSystem::from_matrix(f.frame_matrix().add(&scaled)?)
}

/// Haar unitary of size `size` from the QR factorization of a Gaussian matrix.
pub fn haar_unitary<R: Rng>(rng: &mut R, size: usize) -> DMatrix<Complex64> {
    let qr = gaussian_matrix(rng, size, size).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            let z = r[(i, i)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * phases
}

/// `exp(i δ K)` for a Gaussian Hermitian `K` of unit Frobenius norm.
pub fn near_identity_unitary<R: Rng>(rng: &mut R, size: usize, delta: f64) -> DMatrix<Complex64> {
    let g = gaussian_matrix(rng, size, size);
    let mut k = &g + g.adjoint();
    let norm = k.norm();
    if norm > 0.0 {
        k /= Complex64::new(norm, 0.0);
    }
    let eig = jacobi::eigh(&k);
    let diag = DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, delta * eig.values[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &eig.vectors * diag * eig.vectors.adjoint()
}

/// Random unitary `d x d` matrix over `A`.
pub fn random_unitary(signature: &AlgebraSignature, d: usize, seed: u64) -> ModuleMatrix {
    let blocks = signature
        .sizes()
        .iter()
        .enumerate()
        .map(|(i, &ni)| haar_unitary(&mut stream(seed, i), d * ni))
        .collect();
    ModuleMatrix::from_blocks(signature, d, d, blocks).expect("block shapes")
}

/// Diagonal matrix whose entries are random unitaries of `A`.
fn random_diagonal_unitary(signature: &AlgebraSignature, d: usize, seed: u64) -> ModuleMatrix {
    let blocks = signature
        .sizes()
        .iter()
        .enumerate()
        .map(|(i, &ni)| {
            let mut rng = stream(seed, i);
            let mut b = DMatrix::zeros(d * ni, d * ni);
            for k in 0..d {
                let u = haar_unitary(&mut rng, ni);
                b.view_mut((k * ni, k * ni), (ni, ni)).copy_from(&u);
            }
            b
        })
        .collect();
    ModuleMatrix::from_blocks(signature, d, d, blocks).expect("block shapes")
}

/// Equal inner product Parseval frame: a harmonic frame with its vectors
/// multiplied by random unitaries of `A` and then by a random unitary of `A^d`.
pub fn random_eip_parseval(signature: &AlgebraSignature, d: usize, n: usize, seed: u64) -> Result<FrameSystem> {
    let h = harmonic_frame(signature, n, d)?;
    let left = random_diagonal_unitary(signature, n, derive_seed(seed, 0));
    let right = random_unitary(signature, d, derive_seed(seed, 1));
    FrameSystem::from_matrix(left.compose(h.frame_matrix())?.compose(&right)?)
}

/// Perturbation of a random equal inner product Parseval frame whose
/// certified `max(ε_P, ε_EIP)` is positive and at most `eps`.
pub fn near_eip_parseval(signature: &AlgebraSignature, d: usize, n: usize, eps: f64, seed: u64) -> Result<FrameSystem> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidDimension(format!("eps must lie in (0, 1), got {eps}")));
    }
    let g = random_eip_parseval(signature, d, n, derive_seed(seed, 0))?;
    let mut rng = stream(derive_seed(seed, 1), 0);
    let mut delta = eps * rng.random_range(0.05..0.5);
    for attempt in 0..MAX_HALVINGS {
        let f = perturb_frame(&g, delta, derive_seed(seed, 2 + attempt as u64))?;
        if f.certify(DRAW_TOL).combined_eps() <= eps {
            return Ok(f);
        }
        delta *= 0.5;
    }
    Ok(g)
}

/// Largest deviation of `<P e_k, P e_k>` from `(rank/d) 1_A`, relative to the target.
pub fn diagonal_eps(p: &ModuleMatrix, rank: usize) -> f64 {
    let target = rank as f64 / p.rows() as f64;
    (0..p.rows())
        .map(|k| {
            let s = p.entry(k, k).spectrum_unchecked();
            (1.0 - s.min / target).max(s.max / target - 1.0)
        })
        .fold(0.0, f64::max)
}

/// Rank-`n` projection on `A^d` whose diagonal deviates by at most `eps`
/// from `n/d`: the harmonic projection conjugated by a random diagonal
/// unitary and a near-identity unitary.
pub fn random_projection(signature: &AlgebraSignature, d: usize, n: usize, eps: f64, seed: u64) -> Result<ModuleMatrix> {
    if n == 0 || n >= d {
        return Err(Error::InvalidDimension(format!("need 0 < n < d, got n={n}, d={d}")));
    }
    let t = harmonic_frame(signature, d, n)?;
    let t = t.frame_matrix();
    let base = t.compose(&t.adjoint())?;
    let phases = random_diagonal_unitary(signature, d, derive_seed(seed, 0));
    let base = phases.adjoint().compose(&base)?.compose(&phases)?;
    let mut rng = stream(derive_seed(seed, 1), 0);
    let mut delta = eps * rng.random_range(0.2..1.0);
    let unitary_seed = derive_seed(seed, 2);
    for _ in 0..MAX_HALVINGS {
        let blocks = signature
            .sizes()
            .iter()
            .enumerate()
            .map(|(i, &ni)| near_identity_unitary(&mut stream(unitary_seed, i), d * ni, delta))
            .collect();
        let u = ModuleMatrix::from_blocks(signature, d, d, blocks)?;
        let p = u.adjoint().compose(&base)?.compose(&u)?;
        // Symmetrize away rounding.
        let p = p.add(&p.adjoint())?.scale(0.5);
        if diagonal_eps(&p, n) <= eps {
            return Ok(p);
        }
        delta *= 0.5;
    }
    Ok(base)
}

/// `k` Gaussian `m x n` matrices over `A`.
pub fn random_tuple(signature: &AlgebraSignature, m: usize, n: usize, k: usize, seed: u64) -> Result<MatrixTuple> {
    if m == 0 || n == 0 || k == 0 {
        return Err(Error::InvalidDimension(format!("need m, n, k >= 1, got {m}, {n}, {k}")));
    }
    let mut per_matrix: Vec<Vec<DMatrix<Complex64>>> = vec![Vec::new(); k];
    for (i, &ni) in signature.sizes().iter().enumerate() {
        let mut rng = stream(seed, i);
        for blocks in per_matrix.iter_mut() {
            blocks.push(gaussian_matrix(&mut rng, m * ni, n * ni));
        }
    }
    let matrices = per_matrix
        .into_iter()
        .map(|blocks| ModuleMatrix::from_blocks(signature, m, n, blocks))
        .collect::<Result<Vec<_>>>()?;
    MatrixTuple::new(matrices)
}

/// Gaussian `d x d` matrix over a commutative algebra with every column
/// normalized so that `<M e_j, M e_j> = 1_A`.
pub fn random_unit_column_matrix(signature: &AlgebraSignature, d: usize, seed: u64) -> Result<ModuleMatrix> {
    if !signature.is_commutative() {
        return Err(Error::NonCommutative);
    }
    if d == 0 {
        return Err(Error::InvalidDimension("need d >= 1".into()));
    }
    let blocks = (0..signature.num_blocks())
        .map(|i| {
            let mut g = gaussian_matrix(&mut stream(seed, i), d, d);
            for mut col in g.column_iter_mut() {
                let norm = col.norm();
                col /= Complex64::new(norm, 0.0);
            }
            g
        })
        .collect();
    ModuleMatrix::from_blocks(signature, d, d, blocks)
}

/// Unit-norm tight frame of `n` vectors in `C^d` (scaled harmonic), moved by
/// noise of norm `delta` and renormalized to unit norm.
pub fn unit_norm_start(n: usize, d: usize, delta: f64, seed: u64) -> Result<FrameSystem> {
    let sig = AlgebraSignature::new(vec![1])?;
    let h = harmonic_frame(&sig, n, d)?;
    let tight = FrameSystem::from_matrix(h.frame_matrix().scale((n as f64 / d as f64).sqrt()))?;
    let moved = perturb_frame(&tight, delta, seed)?;
    let mut b = moved.frame_matrix().flattened()[0].clone();
    for mut row in b.row_iter_mut() {
        let norm = row.norm();
        row /= Complex64::new(norm, 0.0);
    }
    FrameSystem::from_matrix(ModuleMatrix::from_blocks(&sig, n, d, vec![b])?)
}
