//! The free Hilbert module `A^d` and matrices over `A`.
//!
//! Vectors are rows. Left `A`-scalars multiply entries from the left and
//! module maps act by right multiplication with a [`ModuleMatrix`], so with
//! `<x, y> = Σ x_j y_j*` one has `<x M, y> = <x, y M*>`.
//!
//! A `p x q` matrix over `A` is stored through the *-isomorphism
//! `M_{p x q}(⊕ M_{n_i}) ≅ ⊕ M_{p n_i x q n_i}(C)`: block `i` keeps the
//! complex matrix whose `(j n_i + r, k n_i + s)` entry is entry `(r, s)` of
//! the `i`-th block of the algebra element at position `(j, k)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cstar::{AlgebraSignature, CStarElement, SpectralFn};
use crate::error::{Error, Result};
use crate::jacobi;

/// An element of `A^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    signature: AlgebraSignature,
    entries: Vec<CStarElement>,
}

impl ModuleVector {
    pub fn new(entries: Vec<CStarElement>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::InvalidDimension("module vector needs d >= 1".into()))?;
        let signature = first.signature().clone();
        for e in &entries[1..] {
            signature.check_same(e.signature())?;
        }
        Ok(Self { signature, entries })
    }

    pub fn zero(signature: &AlgebraSignature, d: usize) -> Self {
        Self {
            signature: signature.clone(),
            entries: vec![CStarElement::zero(signature); d],
        }
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[CStarElement] {
        &self.entries
    }

    pub fn entry(&self, j: usize) -> &CStarElement {
        &self.entries[j]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.signature.check_same(&other.signature)?;
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch(format!(
                "module dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// `<x, y> = Σ_j x_j y_j*`.
    pub fn inner(&self, other: &Self) -> Result<CStarElement> {
        self.check_compatible(other)?;
        Ok(self.inner_raw(other))
    }

    pub(crate) fn inner_raw(&self, other: &Self) -> CStarElement {
        let mut acc = CStarElement::zero(&self.signature);
        for (x, y) in self.entries.iter().zip(&other.entries) {
            acc.add_assign_raw(&x.mul_adjoint_raw(y));
        }
        acc
    }

    /// `‖x‖ = ‖<x, x>‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.inner_raw(self).hermitian_norm().sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a.add_raw(b)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.sub_raw(other))
    }

    pub(crate) fn sub_raw(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.sub_raw(b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CStarElement, &CStarElement) -> CStarElement) -> Self {
        Self {
            signature: self.signature.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, x: f64) -> Self {
        Self {
            signature: self.signature.clone(),
            entries: self.entries.iter().map(|e| e.scale(x)).collect(),
        }
    }

    /// Left module action `a · x`.
    pub fn left_mul(&self, a: &CStarElement) -> Result<Self> {
        self.signature.check_same(a.signature())?;
        Ok(Self {
            signature: self.signature.clone(),
            entries: self.entries.iter().map(|e| a.mul_raw(e)).collect(),
        })
    }

    /// Right action `x M` of a `d x q` matrix, giving a vector of `A^q`.
    pub fn apply(&self, m: &ModuleMatrix) -> Result<Self> {
        self.signature.check_same(&m.signature)?;
        if m.rows != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} times {}x{} matrix",
                self.dim(),
                m.rows,
                m.cols
            )));
        }
        Ok(ModuleMatrix::from_rows(std::slice::from_ref(self))?.compose_raw(m).row(0))
    }

    /// Block `i` of the vector as an `n_i x d n_i` complex matrix.
    pub fn flatten_block(&self, i: usize) -> DMatrix<Complex64> {
        let ni = self.signature.block_size(i);
        let mut out = DMatrix::zeros(ni, self.dim() * ni);
        for (k, e) in self.entries.iter().enumerate() {
            out.view_mut((0, k * ni), (ni, ni)).copy_from(e.block(i));
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// `e_1, ..., e_d` in `A^d`.
pub fn standard_basis(signature: &AlgebraSignature, d: usize) -> Result<Vec<ModuleVector>> {
    if d < 1 {
        return Err(Error::InvalidDimension("standard basis needs d >= 1".into()));
    }
    Ok((0..d)
        .map(|j| {
            let mut v = ModuleVector::zero(signature, d);
            v.entries[j] = CStarElement::identity(signature);
            v
        })
        .collect())
}

/// One block of a flattened module matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenedBlock {
    pub block_index: usize,
    pub matrix: DMatrix<Complex64>,
}

/// A `rows x cols` matrix over `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleMatrix {
    signature: AlgebraSignature,
    rows: usize,
    cols: usize,
    blocks: Vec<DMatrix<Complex64>>,
}

/// Result of the modular chordal distance computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordalDistance {
    pub distance: f64,
    /// `m 1_A - (tr(PQ) + tr(QP)) / 2`.
    pub expression: CStarElement,
    /// Whether `expression` is positive. Not guaranteed for noncommutative `A`.
    pub expression_positive: bool,
}

impl ModuleMatrix {
    pub fn zeros(signature: &AlgebraSignature, rows: usize, cols: usize) -> Self {
        let blocks = signature
            .sizes()
            .iter()
            .map(|&n| DMatrix::zeros(rows * n, cols * n))
            .collect();
        Self {
            signature: signature.clone(),
            rows,
            cols,
            blocks,
        }
    }

    pub fn identity(signature: &AlgebraSignature, d: usize) -> Self {
        let blocks = signature
            .sizes()
            .iter()
            .map(|&n| DMatrix::identity(d * n, d * n))
            .collect();
        Self {
            signature: signature.clone(),
            rows: d,
            cols: d,
            blocks,
        }
    }

    /// Builds a matrix from a row-major grid of algebra elements.
    pub fn from_entries(signature: &AlgebraSignature, rows: usize, cols: usize, entries: &[CStarElement]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let mut m = Self::zeros(signature, rows, cols);
        for (idx, e) in entries.iter().enumerate() {
            signature.check_same(e.signature())?;
            m.set_entry(idx / cols.max(1), idx % cols.max(1), e);
        }
        Ok(m)
    }

    /// The matrix whose rows are the given vectors.
    pub fn from_rows(vectors: &[ModuleVector]) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyFrame)?;
        let signature = first.signature().clone();
        let d = first.dim();
        let mut m = Self::zeros(&signature, vectors.len(), d);
        for (j, v) in vectors.iter().enumerate() {
            signature.check_same(v.signature())?;
            if v.dim() != d {
                return Err(Error::ShapeMismatch(format!(
                    "row {j} has length {}, expected {d}",
                    v.dim()
                )));
            }
            for (k, e) in v.entries().iter().enumerate() {
                m.set_entry(j, k, e);
            }
        }
        Ok(m)
    }

    /// Reassembles a matrix from its flattened blocks.
    pub fn from_blocks(signature: &AlgebraSignature, rows: usize, cols: usize, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if blocks.len() != signature.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} flattened blocks, got {}",
                signature.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(signature.sizes()).enumerate() {
            if b.nrows() != rows * n || b.ncols() != cols * n {
                return Err(Error::ShapeMismatch(format!(
                    "flattened block {i} is {}x{}, expected {}x{}",
                    b.nrows(),
                    b.ncols(),
                    rows * n,
                    cols * n
                )));
            }
        }
        Ok(Self {
            signature: signature.clone(),
            rows,
            cols,
            blocks,
        })
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, j: usize, k: usize) -> CStarElement {
        let blocks = self
            .signature
            .sizes()
            .iter()
            .zip(&self.blocks)
            .map(|(&n, b)| b.view((j * n, k * n), (n, n)).into_owned())
            .collect();
        CStarElement::from_blocks(self.signature.clone(), blocks).expect("block shapes are consistent")
    }

    pub fn set_entry(&mut self, j: usize, k: usize, e: &CStarElement) {
        for (i, &n) in self.signature.sizes().iter().enumerate() {
            self.blocks[i].view_mut((j * n, k * n), (n, n)).copy_from(e.block(i));
        }
    }

    pub fn row(&self, j: usize) -> ModuleVector {
        ModuleVector {
            signature: self.signature.clone(),
            entries: (0..self.cols).map(|k| self.entry(j, k)).collect(),
        }
    }

    pub fn rows_vec(&self) -> Vec<ModuleVector> {
        (0..self.rows).map(|j| self.row(j)).collect()
    }

    /// Column `k` read as a vector of `A^rows`.
    pub fn column(&self, k: usize) -> ModuleVector {
        ModuleVector {
            signature: self.signature.clone(),
            entries: (0..self.rows).map(|j| self.entry(j, k)).collect(),
        }
    }

    pub fn entries(&self) -> Vec<CStarElement> {
        (0..self.rows)
            .flat_map(|j| (0..self.cols).map(move |k| (j, k)))
            .map(|(j, k)| self.entry(j, k))
            .collect()
    }

    pub fn flattened(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn flatten_block(&self, i: usize) -> Result<FlattenedBlock> {
        let blocks = self.blocks.len();
        self.blocks
            .get(i)
            .map(|m| FlattenedBlock {
                block_index: i,
                matrix: m.clone(),
            })
            .ok_or(Error::IndexOutOfRange { index: i, blocks })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.signature.check_same(&other.signature)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// `M N`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.signature.check_same(&other.signature)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.compose_raw(other))
    }

    pub(crate) fn compose_raw(&self, other: &Self) -> Self {
        Self {
            signature: self.signature.clone(),
            rows: self.rows,
            cols: other.cols,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            signature: self.signature.clone(),
            rows: self.cols,
            cols: self.rows,
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.map2(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.map2(other, |a, b| a - b))
    }

    pub(crate) fn sub_raw(&self, other: &Self) -> Self {
        self.map2(other, |a, b| a - b)
    }

    fn map2(&self, other: &Self, f: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>) -> Self {
        Self {
            signature: self.signature.clone(),
            rows: self.rows,
            cols: self.cols,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, x: f64) -> Self {
        Self {
            signature: self.signature.clone(),
            rows: self.rows,
            cols: self.cols,
            blocks: self.blocks.iter().map(|b| b * Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Multiplies every entry on the left by `a` (`diag(a) M`).
    pub fn left_scalar_mul(&self, a: &CStarElement) -> Result<Self> {
        self.signature.check_same(a.signature())?;
        let diag = Self::diagonal(&vec![a.clone(); self.rows])?;
        Ok(diag.compose_raw(self))
    }

    /// Diagonal matrix over `A`.
    pub fn diagonal(entries: &[CStarElement]) -> Result<Self> {
        let first = entries.first().ok_or_else(|| Error::InvalidDimension("empty diagonal".into()))?;
        let mut m = Self::zeros(first.signature(), entries.len(), entries.len());
        for (j, e) in entries.iter().enumerate() {
            first.signature().check_same(e.signature())?;
            m.set_entry(j, j, e);
        }
        Ok(m)
    }

    /// `<A, B>_MHS = Σ_{j,k} a_jk b_jk*`.
    pub fn mhs_inner(&self, other: &Self) -> Result<CStarElement> {
        self.check_same_shape(other)?;
        Ok(self.mhs_inner_raw(other))
    }

    pub(crate) fn mhs_inner_raw(&self, other: &Self) -> CStarElement {
        // Σ_{j,k} a_jk b_jk* is the sum of the diagonal n_i x n_i blocks
        // of A_i B_i^† over the module index.
        let blocks = self
            .signature
            .sizes()
            .iter()
            .zip(self.blocks.iter().zip(&other.blocks))
            .map(|(&n, (a, b))| {
                let mut acc = DMatrix::zeros(n, n);
                for j in 0..self.rows {
                    let ra = a.view((j * n, 0), (n, self.cols * n));
                    let rb = b.view((j * n, 0), (n, self.cols * n));
                    acc += ra * rb.adjoint();
                }
                acc
            })
            .collect();
        CStarElement::from_blocks(self.signature.clone(), blocks).expect("consistent shapes")
    }

    pub fn mhs_norm(&self) -> f64 {
        self.mhs_inner_raw(self).hermitian_norm().sqrt()
    }

    /// Sum of the diagonal entries, an element of `A`.
    pub fn trace(&self) -> Result<CStarElement> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("trace of {}x{} matrix", self.rows, self.cols)));
        }
        let mut acc = CStarElement::zero(&self.signature);
        for j in 0..self.rows {
            acc.add_assign_raw(&self.entry(j, j));
        }
        Ok(acc)
    }

    /// Square matrix viewed as an element of `M_d(A) ≅ ⊕ M_{d n_i}(C)`.
    pub fn as_algebra_element(&self) -> Result<CStarElement> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("only square matrices form an algebra".into()));
        }
        CStarElement::from_blocks(self.signature.amplified(self.rows), self.blocks.clone())
    }

    pub(crate) fn from_algebra_element(signature: &AlgebraSignature, d: usize, e: CStarElement) -> Self {
        Self {
            signature: signature.clone(),
            rows: d,
            cols: d,
            blocks: e.into_blocks(),
        }
    }

    /// Functional calculus of a self-adjoint square matrix over `A`.
    pub fn spectral_map(&self, f: SpectralFn, tol: f64) -> Result<Self> {
        let e = self.as_algebra_element()?.spectral_map(f, tol)?;
        Ok(Self::from_algebra_element(&self.signature, self.rows, e))
    }

    /// `‖P - P*‖_MHS ≤ tol` and `‖P² - P‖_MHS ≤ tol`.
    pub fn is_projection(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let sa = self.sub_raw(&self.adjoint()).mhs_norm();
        let idem = self.compose_raw(self).sub_raw(self).mhs_norm();
        sa <= tol && idem <= tol
    }

    /// Module rank `n` of a projection: every flattened block must have
    /// complex rank `n · n_i` for one common `n`.
    pub fn projection_rank(&self, tol: f64) -> Result<usize> {
        if !self.is_projection(tol) {
            return Err(Error::NotProjection);
        }
        let mut rank: Option<usize> = None;
        for (i, (b, &ni)) in self.blocks.iter().zip(self.signature.sizes()).enumerate() {
            let r = jacobi::eigh(b).values.iter().filter(|&&x| x > 0.5).count();
            if r % ni != 0 {
                return Err(Error::RankMismatch(format!(
                    "block {i} has complex rank {r}, not divisible by {ni}"
                )));
            }
            match rank {
                None => rank = Some(r / ni),
                Some(n) if n != r / ni => {
                    return Err(Error::RankMismatch(format!(
                        "block {i} has module rank {}, earlier blocks {n}",
                        r / ni
                    )))
                }
                _ => {}
            }
        }
        Ok(rank.unwrap_or(0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// Modular chordal distance `‖m 1_A - (tr(PQ) + tr(QP))/2‖^{1/2}` between
/// the ranges of two projections of the same module rank `m`.
pub fn chordal_distance(p: &ModuleMatrix, q: &ModuleMatrix, tol: f64) -> Result<ChordalDistance> {
    p.check_same_shape(q)?;
    let m = p.projection_rank(tol)?;
    let mq = q.projection_rank(tol)?;
    if m != mq {
        return Err(Error::RankMismatch(format!("ranks {m} and {mq}")));
    }
    let pq = p.compose_raw(q).trace()?;
    let qp = q.compose_raw(p).trace()?;
    let expression = CStarElement::scalar(p.signature(), m as f64).sub_raw(&pq.add_raw(&qp).scale(0.5));
    let expression_positive = expression.is_positive(tol);
    let distance = expression.cstar_norm().sqrt();
    Ok(ChordalDistance {
        distance,
        expression,
        expression_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[usize]) -> AlgebraSignature {
        AlgebraSignature::new(v.to_vec()).unwrap()
    }

    fn reals(v: &[f64]) -> CStarElement {
        CStarElement::from_reals(v).unwrap()
    }

    fn vec_of(v: &[&[f64]]) -> ModuleVector {
        ModuleVector::new(v.iter().map(|x| reals(x)).collect()).unwrap()
    }

    fn scalar_matrix(rows: usize, cols: usize, data: &[f64]) -> ModuleMatrix {
        let entries: Vec<_> = data.iter().map(|&x| reals(&[x])).collect();
        ModuleMatrix::from_entries(&sig(&[1]), rows, cols, &entries).unwrap()
    }

    #[test]
    fn inner_examples() {
        let x = vec_of(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let y = vec_of(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert_eq!(x.inner(&y).unwrap(), reals(&[1.0, 1.0]));
        let s = sig(&[2, 1]);
        let e = standard_basis(&s, 3).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let expected = if j == k { CStarElement::identity(&s) } else { CStarElement::zero(&s) };
                assert_eq!(e[j].inner(&e[k]).unwrap(), expected);
            }
        }
        assert_eq!(x.inner(&ModuleVector::zero(x.signature(), 2)).unwrap(), reals(&[0.0, 0.0]));
        assert!(x.inner(&vec_of(&[&[1.0, 0.0]])).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(vec_of(&[&[3.0, 0.0], &[4.0, 0.0]]).norm(), 5.0);
        let e = standard_basis(&sig(&[1, 2]), 2).unwrap();
        assert!((e[0].norm() - 1.0).abs() < 1e-15);
        assert!((e[0].scale(2.0).norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_action_examples() {
        let x = vec_of(&[&[1.0], &[0.0]]);
        let shift = scalar_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(x.apply(&shift).unwrap(), vec_of(&[&[0.0], &[1.0]]));
        let id = ModuleMatrix::identity(&sig(&[1]), 2);
        assert_eq!(x.apply(&id).unwrap(), x);
        assert_eq!(shift.adjoint().adjoint(), shift);
        assert!(shift.compose(&scalar_matrix(3, 1, &[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn mhs_examples() {
        let s = sig(&[2]);
        let one = ModuleMatrix::identity(&s, 1);
        assert_eq!(one.mhs_inner(&one).unwrap(), CStarElement::identity(&s));
        assert!((one.mhs_norm() - 1.0).abs() < 1e-15);
        let z = ModuleMatrix::zeros(&s, 1, 1);
        assert_eq!(one.mhs_inner(&z).unwrap(), CStarElement::zero(&s));
        let a = scalar_matrix(2, 1, &[3.0, 4.0]);
        assert_eq!(a.mhs_inner(&a).unwrap(), reals(&[25.0]));
        assert_eq!(a.mhs_norm(), 5.0);
    }

    #[test]
    fn trace_examples() {
        let s = sig(&[1, 1]);
        assert_eq!(ModuleMatrix::identity(&s, 3).trace().unwrap(), reals(&[3.0, 3.0]));
        assert_eq!(ModuleMatrix::zeros(&s, 2, 2).trace().unwrap(), reals(&[0.0, 0.0]));
        assert!(ModuleMatrix::zeros(&s, 2, 3).trace().is_err());
    }

    #[test]
    fn projection_examples() {
        assert!(ModuleMatrix::identity(&sig(&[2, 1]), 3).is_projection(1e-8));
        assert!(!ModuleMatrix::identity(&sig(&[1]), 2).scale(2.0).is_projection(1e-8));
        assert!(scalar_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]).is_projection(1e-8));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(ModuleMatrix::identity(&sig(&[2, 3]), 4).projection_rank(1e-8).unwrap(), 4);
        let p = ModuleMatrix::diagonal(&[reals(&[1.0, 1.0]), reals(&[0.0, 0.0])]).unwrap();
        assert_eq!(p.projection_rank(1e-8).unwrap(), 1);
        let bad = ModuleMatrix::diagonal(&[reals(&[1.0, 1.0]), reals(&[0.0, 1.0])]).unwrap();
        assert!(matches!(bad.projection_rank(1e-8), Err(Error::RankMismatch(_))));
        // In M_2 a rank-one complex projection has no module rank.
        let m2 = sig(&[2]);
        let e11 = CStarElement::from_blocks(
            m2.clone(),
            vec![DMatrix::from_row_slice(
                2,
                2,
                &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            )],
        )
        .unwrap();
        let p = ModuleMatrix::diagonal(&[e11]).unwrap();
        assert!(matches!(p.projection_rank(1e-8), Err(Error::RankMismatch(_))));
    }

    #[test]
    fn chordal_examples() {
        let p = scalar_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let q = scalar_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert!(chordal_distance(&p, &p, 1e-8).unwrap().distance.abs() < 1e-15);
        let r = chordal_distance(&p, &q, 1e-8).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-15);
        assert!(r.expression_positive);
        let not_proj = p.scale(2.0);
        assert!(matches!(chordal_distance(&p, &not_proj, 1e-8), Err(Error::NotProjection)));
        let full = ModuleMatrix::identity(&sig(&[1]), 2);
        assert!(matches!(chordal_distance(&p, &full, 1e-8), Err(Error::RankMismatch(_))));
    }

    #[test]
    fn flatten_examples() {
        let s = sig(&[1, 1]);
        let id = ModuleMatrix::identity(&s, 2);
        for i in 0..2 {
            assert_eq!(id.flatten_block(i).unwrap().matrix, DMatrix::identity(2, 2));
        }
        assert!(matches!(id.flatten_block(2), Err(Error::IndexOutOfRange { .. })));
        let m2 = sig(&[2]);
        let a = CStarElement::from_blocks(
            m2.clone(),
            vec![DMatrix::from_fn(2, 2, |r, c| Complex64::new((r * 2 + c) as f64, 1.0))],
        )
        .unwrap();
        let m = ModuleMatrix::from_entries(&m2, 1, 1, std::slice::from_ref(&a)).unwrap();
        assert_eq!(&m.flatten_block(0).unwrap().matrix, a.block(0));
        assert_eq!(m.entry(0, 0), a);
    }

    #[test]
    fn basis_examples() {
        let s = sig(&[3]);
        let e = standard_basis(&s, 1).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].entry(0), &CStarElement::identity(&s));
        assert!(standard_basis(&s, 0).is_err());
        // Σ_j e_j* e_j = I_d.
        let e = standard_basis(&s, 3).unwrap();
        let t = ModuleMatrix::from_rows(&e).unwrap();
        assert_eq!(t.adjoint().compose(&t).unwrap(), ModuleMatrix::identity(&s, 3));
    }
}
