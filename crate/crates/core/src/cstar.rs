//! Finite-dimensional C*-algebras `A = M_{n_1}(C) ⊕ ... ⊕ M_{n_m}(C)`.
//!
//! Elements are stored block by block. Order questions (positivity, `a ≤ b`)
//! and the continuous functional calculus reduce to Hermitian eigenproblems
//! on the individual blocks.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi;

/// Default absolute tolerance for positivity and Hermitian checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Block sizes `[n_1, ..., n_m]` of the algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraSignature(Vec<usize>);

impl AlgebraSignature {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidSignature("signature has no blocks".into()));
        }
        if let Some(pos) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidSignature(format!("block {pos} has size 0")));
        }
        Ok(Self(sizes))
    }

    /// The commutative algebra `C^m`.
    pub fn commutative(m: usize) -> Result<Self> {
        Self::new(vec![1; m])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    pub fn block_size(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_commutative(&self) -> bool {
        self.0.iter().all(|&n| n == 1)
    }

    /// Signature of `M_k(A)`, i.e. every block size multiplied by `k`.
    pub fn amplified(&self, k: usize) -> Self {
        Self(self.0.iter().map(|&n| n * k).collect())
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SignatureMismatch {
                left: self.0.clone(),
                right: other.0.clone(),
            })
        }
    }
}

impl TryFrom<Vec<usize>> for AlgebraSignature {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AlgebraSignature> for Vec<usize> {
    fn from(s: AlgebraSignature) -> Self {
        s.0
    }
}

impl fmt::Display for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Functions available to the spectral calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralFn {
    Sqrt,
    InvSqrt,
    Inverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Ascending eigenvalues of each block.
    pub per_block: Vec<Vec<f64>>,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CStarElement {
    signature: AlgebraSignature,
    blocks: Vec<DMatrix<Complex64>>,
}

fn block_hermitian_deviation(b: &DMatrix<Complex64>) -> f64 {
    let n = b.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((b[(i, j)] - b[(j, i)].conj()).norm());
        }
    }
    dev
}

impl CStarElement {
    pub fn from_blocks(signature: AlgebraSignature, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if blocks.len() != signature.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                signature.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(signature.sizes()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { signature, blocks })
    }

    /// Element of a commutative algebra from its coordinates.
    pub fn from_diagonal(values: &[Complex64]) -> Result<Self> {
        let sig = AlgebraSignature::commutative(values.len())?;
        let blocks = values.iter().map(|&z| DMatrix::from_element(1, 1, z)).collect();
        Ok(Self { signature: sig, blocks })
    }

    /// Real coordinates of an element of `C^m`.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        let zs: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&zs)
    }

    pub fn zero(signature: &AlgebraSignature) -> Self {
        let blocks = signature.sizes().iter().map(|&n| DMatrix::zeros(n, n)).collect();
        Self {
            signature: signature.clone(),
            blocks,
        }
    }

    pub fn identity(signature: &AlgebraSignature) -> Self {
        Self::scalar(signature, 1.0)
    }

    /// `x · 1_A`.
    pub fn scalar(signature: &AlgebraSignature, x: f64) -> Self {
        let blocks = signature
            .sizes()
            .iter()
            .map(|&n| DMatrix::identity(n, n) * Complex64::new(x, 0.0))
            .collect();
        Self {
            signature: signature.clone(),
            blocks,
        }
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &DMatrix<Complex64> {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<DMatrix<Complex64>> {
        self.blocks
    }

    pub fn adjoint(&self) -> Self {
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.signature.check_same(&other.signature)?;
        Ok(self.mul_raw(other))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.signature.check_same(&other.signature)?;
        Ok(self.add_raw(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.signature.check_same(&other.signature)?;
        Ok(self.sub_raw(other))
    }

    pub(crate) fn mul_raw(&self, other: &Self) -> Self {
        debug_assert_eq!(self.signature, other.signature);
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        }
    }

    pub(crate) fn add_raw(&self, other: &Self) -> Self {
        debug_assert_eq!(self.signature, other.signature);
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(),
        }
    }

    pub(crate) fn sub_raw(&self, other: &Self) -> Self {
        debug_assert_eq!(self.signature, other.signature);
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect(),
        }
    }

    pub(crate) fn add_assign_raw(&mut self, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b;
        }
    }

    /// `a · b*`, the building block of every inner product.
    pub(crate) fn mul_adjoint_raw(&self, other: &Self) -> Self {
        Self {
            signature: self.signature.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b.adjoint())
                .collect(),
        }
    }

    pub fn scale(&self, x: f64) -> Self {
        self.scale_complex(Complex64::new(x, 0.0))
    }

    pub fn scale_complex(&self, z: Complex64) -> Self {
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    /// Largest entrywise deviation from Hermitian symmetry, over all blocks.
    pub fn hermitian_deviation(&self) -> f64 {
        self.blocks.iter().map(block_hermitian_deviation).fold(0.0, f64::max)
    }

    fn check_hermitian(&self, tol: f64) -> Result<()> {
        for (i, b) in self.blocks.iter().enumerate() {
            let dev = block_hermitian_deviation(b);
            if dev > tol * b.norm().max(1.0) {
                return Err(Error::NotHermitian { block: i, deviation: dev });
            }
        }
        Ok(())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.check_hermitian(tol).is_ok()
    }

    pub(crate) fn block_eigen(&self, i: usize) -> jacobi::HermitianEigen {
        jacobi::eigh(&self.blocks[i])
    }

    pub fn spectrum(&self, tol: f64) -> Result<SpectrumReport> {
        self.check_hermitian(tol)?;
        Ok(self.spectrum_unchecked())
    }

    pub(crate) fn spectrum_unchecked(&self) -> SpectrumReport {
        let per_block: Vec<Vec<f64>> = (0..self.blocks.len())
            .map(|i| {
                if self.blocks[i].nrows() == 1 {
                    vec![self.blocks[i][(0, 0)].re]
                } else {
                    self.block_eigen(i).values
                }
            })
            .collect();
        let min = per_block.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let max = per_block.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        SpectrumReport { per_block, min, max }
    }

    /// Hermitian within `tol` and no eigenvalue below `-tol`, measured after
    /// rescaling elements of norm above one to unit norm.
    pub fn is_positive(&self, tol: f64) -> bool {
        if self.check_hermitian(tol).is_err() {
            return false;
        }
        let spec = self.spectrum_unchecked();
        let scale = spec.min.abs().max(spec.max.abs()).max(1.0);
        spec.min >= -tol * scale
    }

    /// `self ≤ other` in the order of the algebra.
    pub fn order_leq(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(other.sub(self)?.is_positive(tol))
    }

    /// The C*-norm: largest block operator norm.
    pub fn cstar_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                if b.nrows() == 1 {
                    b[(0, 0)].norm()
                } else {
                    let gram = b.adjoint() * b;
                    jacobi::eigh(&gram).values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Norm of a Hermitian element, read off its spectrum.
    pub(crate) fn hermitian_norm(&self) -> f64 {
        let s = self.spectrum_unchecked();
        s.min.abs().max(s.max.abs())
    }

    pub fn spectral_map(&self, f: SpectralFn, tol: f64) -> Result<Self> {
        self.check_hermitian(tol)?;
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for i in 0..self.blocks.len() {
            let eig = self.block_eigen(i);
            let scale = eig
                .values
                .iter()
                .fold(1.0_f64, |m, &x| m.max(x.abs()));
            let mapped: Vec<f64> = eig
                .values
                .iter()
                .map(|&x| match f {
                    SpectralFn::Sqrt => {
                        if x < -tol * scale {
                            Err(Error::NotPositive { eigenvalue: x })
                        } else {
                            Ok(x.max(0.0).sqrt())
                        }
                    }
                    SpectralFn::InvSqrt | SpectralFn::Inverse => {
                        if x < tol {
                            Err(Error::Singular { eigenvalue: x })
                        } else if f == SpectralFn::InvSqrt {
                            Ok(1.0 / x.sqrt())
                        } else {
                            Ok(1.0 / x)
                        }
                    }
                })
                .collect::<Result<_>>()?;
            let d = DVector::from_iterator(mapped.len(), mapped.iter().map(|&x| Complex64::new(x, 0.0)));
            let v = &eig.vectors;
            let mut out = v * DMatrix::from_diagonal(&d) * v.adjoint();
            // Force exact Hermitian symmetry.
            out = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
            blocks.push(out);
        }
        Ok(Self {
            signature: self.signature.clone(),
            blocks,
        })
    }

    /// Largest entrywise modulus difference, useful for approximate equality.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}
