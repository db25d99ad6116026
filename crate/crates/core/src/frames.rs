//! Modular frames for `A^d`.
//!
//! A family `τ_1, ..., τ_n` is kept together with its frame matrix `T`
//! (row `j` is `τ_j`). With the row convention the analysis map is
//! `x ↦ x T*`, synthesis is `a ↦ a T` and the frame operator is `S = T* T`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cstar::{AlgebraSignature, CStarElement, SpectralFn, SpectrumReport};
use crate::error::{Error, Result};
use crate::jacobi;
use crate::module::{ModuleMatrix, ModuleVector};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSystem {
    vectors: Vec<ModuleVector>,
    matrix: ModuleMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameCertificate {
    /// Optimal lower frame bound (smallest eigenvalue of flattened `S`).
    pub lower: f64,
    /// Optimal upper frame bound.
    pub upper: f64,
    pub parseval_eps: f64,
    pub equal_inner_eps: f64,
    pub is_frame: bool,
    /// Spectra of `<τ_j, τ_j>`.
    pub per_vector_spectra: Vec<SpectrumReport>,
}

impl FrameCertificate {
    /// `max(parseval_eps, equal_inner_eps)`.
    pub fn combined_eps(&self) -> f64 {
        self.parseval_eps.max(self.equal_inner_eps)
    }
}

/// Assembles a frame system; no frame property is asserted.
pub fn build_frame(vectors: Vec<ModuleVector>) -> Result<FrameSystem> {
    let matrix = ModuleMatrix::from_rows(&vectors)?;
    Ok(FrameSystem { vectors, matrix })
}

impl FrameSystem {
    pub fn from_matrix(matrix: ModuleMatrix) -> Result<Self> {
        if matrix.rows() == 0 {
            return Err(Error::EmptyFrame);
        }
        let vectors = matrix.rows_vec();
        Ok(Self { vectors, matrix })
    }

    pub fn signature(&self) -> &AlgebraSignature {
        self.matrix.signature()
    }

    /// Module dimension.
    pub fn d(&self) -> usize {
        self.matrix.cols()
    }

    /// Frame cardinality.
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn vectors(&self) -> &[ModuleVector] {
        &self.vectors
    }

    pub fn frame_matrix(&self) -> &ModuleMatrix {
        &self.matrix
    }

    /// `S = T* T`.
    pub fn frame_operator(&self) -> ModuleMatrix {
        self.matrix.adjoint().compose_raw(&self.matrix)
    }

    /// `<τ_j, τ_j>` for every `j`.
    pub fn self_inner_products(&self) -> Vec<CStarElement> {
        self.vectors.iter().map(|v| v.inner_raw(v)).collect()
    }

    pub fn certify(&self, tol: f64) -> FrameCertificate {
        let s = self
            .frame_operator()
            .as_algebra_element()
            .expect("frame operator is square")
            .spectrum_unchecked();
        let (lower, upper) = (s.min, s.max);
        let ratio = self.n() as f64 / self.d() as f64;
        let per_vector_spectra: Vec<SpectrumReport> = self
            .self_inner_products()
            .iter()
            .map(|g| g.spectrum_unchecked())
            .collect();
        let equal_inner_eps = per_vector_spectra
            .iter()
            .map(|sp| (1.0 - ratio * sp.min).max(ratio * sp.max - 1.0))
            .fold(0.0, f64::max);
        FrameCertificate {
            lower,
            upper,
            parseval_eps: (1.0 - lower).max(upper - 1.0).max(0.0),
            equal_inner_eps,
            is_frame: lower > tol,
            per_vector_spectra,
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.signature().check_same(other.signature())?;
        if self.n() != other.n() || self.d() != other.d() {
            return Err(Error::ShapeMismatch(format!(
                "frames of shape (n={}, d={}) and (n={}, d={})",
                self.n(),
                self.d(),
                other.n(),
                other.d()
            )));
        }
        Ok(())
    }

    /// `{τ_j S^{-1/2}}`, the Parseval frame obtained by canonical
    /// normalization of the frame operator.
    pub fn closest_parseval(&self, tol: f64) -> Result<Self> {
        let s = self.frame_operator();
        let inv_sqrt = match s.spectral_map(SpectralFn::InvSqrt, tol) {
            Ok(m) => m,
            Err(Error::Singular { eigenvalue }) => return Err(Error::NotFrame { lower: eigenvalue }),
            Err(e) => return Err(e),
        };
        Self::from_matrix(self.matrix.compose_raw(&inv_sqrt))
    }

    /// `ω_j = √(d/n) <τ_j, τ_j>^{-1/2} τ_j`.
    pub fn equal_inner_normalize(&self, tol: f64) -> Result<Self> {
        let factor = (self.d() as f64 / self.n() as f64).sqrt();
        let mut out = Vec::with_capacity(self.n());
        for (j, v) in self.vectors.iter().enumerate() {
            let g = v.inner_raw(v);
            let inv = g
                .spectral_map(SpectralFn::InvSqrt, tol)
                .map_err(|_| Error::SingularGram { index: j })?;
            out.push(v.left_mul(&inv.scale(factor))?);
        }
        build_frame(out)
    }

    /// `P = T S^{-1} T*`, the projection onto the range of the analysis map.
    pub fn canonical_projection(&self, tol: f64) -> Result<ModuleMatrix> {
        let s = self.frame_operator();
        let inv = match s.spectral_map(SpectralFn::Inverse, tol) {
            Ok(m) => m,
            Err(Error::Singular { eigenvalue }) => return Err(Error::NotFrame { lower: eigenvalue }),
            Err(e) => return Err(e),
        };
        Ok(self.matrix.compose_raw(&inv).compose_raw(&self.matrix.adjoint()))
    }

    /// The vectors `τ_j T*` of `A^n`, i.e. the rows of the Gram matrix `T T*`.
    pub fn analysis_image(&self) -> Self {
        Self::from_matrix(self.matrix.compose_raw(&self.matrix.adjoint())).expect("n >= 1")
    }

    /// Naimark complement of a Parseval frame: `n` vectors of `A^{n-d}`
    /// whose Gram matrix is `I - T T*`.
    pub fn naimark_complement(&self, tol: f64) -> Result<Self> {
        let cert = self.certify(tol);
        if cert.parseval_eps > tol {
            return Err(Error::NotParseval { eps: cert.parseval_eps });
        }
        let (n, d) = (self.n(), self.d());
        if n <= d {
            return Err(Error::NoComplement);
        }
        let gram = self.matrix.compose_raw(&self.matrix.adjoint());
        let complement = ModuleMatrix::identity(self.signature(), n).sub_raw(&gram);
        let mut blocks = Vec::with_capacity(self.signature().num_blocks());
        for (i, &ni) in self.signature().sizes().iter().enumerate() {
            let cols = range_basis(&complement.flattened()[i]);
            if cols.ncols() != (n - d) * ni {
                return Err(Error::NotParseval { eps: cert.parseval_eps });
            }
            blocks.push(cols);
        }
        Self::from_matrix(ModuleMatrix::from_blocks(self.signature(), n, n - d, blocks)?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Orthonormal basis (as columns) of the range of a complex orthogonal
/// projection, with the phase of every column fixed.
pub(crate) fn range_basis(p: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = jacobi::eigh(p);
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > 0.5).collect();
    let mut out = DMatrix::zeros(p.nrows(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let mut col: Vec<Complex64> = eig.vectors.column(k).iter().copied().collect();
        jacobi::fix_phase(&mut col);
        for (r, z) in col.into_iter().enumerate() {
            out[(r, c)] = z;
        }
    }
    out
}

/// `‖Σ_j <τ_j - ω_j, τ_j - ω_j>‖^{1/2}`.
pub fn modular_distance(f: &FrameSystem, g: &FrameSystem) -> Result<f64> {
    f.check_same_shape(g)?;
    let mut acc = CStarElement::zero(f.signature());
    for (x, y) in f.vectors.iter().zip(&g.vectors) {
        let diff = x.sub_raw(y);
        acc.add_assign_raw(&diff.inner_raw(&diff));
    }
    Ok(acc.hermitian_norm().sqrt())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::module::standard_basis;

    fn sig(v: &[usize]) -> AlgebraSignature {
        AlgebraSignature::new(v.to_vec()).unwrap()
    }

    fn classical(rows: &[&[f64]]) -> FrameSystem {
        let vs = rows
            .iter()
            .map(|r| ModuleVector::new(r.iter().map(|&x| CStarElement::from_reals(&[x]).unwrap()).collect()).unwrap())
            .collect();
        build_frame(vs).unwrap()
    }

    pub(crate) fn mercedes_benz() -> FrameSystem {
        let s = (2.0f64 / 3.0).sqrt();
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
                vec![s * a.cos(), s * a.sin()]
            })
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        classical(&refs)
    }

    #[test]
    fn build_examples() {
        let s = sig(&[1, 2]);
        let f = build_frame(standard_basis(&s, 2).unwrap()).unwrap();
        assert_eq!(f.frame_matrix(), &ModuleMatrix::identity(&s, 2));
        let mixed = vec![ModuleVector::zero(&s, 2), ModuleVector::zero(&s, 3)];
        assert!(build_frame(mixed).is_err());
        assert!(matches!(build_frame(vec![]), Err(Error::EmptyFrame)));
        let z = build_frame(vec![ModuleVector::zero(&s, 1)]).unwrap();
        assert!(!z.certify(1e-9).is_frame);
    }

    #[test]
    fn frame_operator_examples() {
        let s = sig(&[2]);
        let f = build_frame(standard_basis(&s, 3).unwrap()).unwrap();
        assert_eq!(f.frame_operator(), ModuleMatrix::identity(&s, 3));
        // Gram oracle: Σ (2/3)(cos, sin)^T (cos, sin) = I_2.
        let mb = mercedes_benz();
        assert!(mb.frame_operator().max_abs_diff(&ModuleMatrix::identity(&sig(&[1]), 2)) < 1e-15);
        let f = classical(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.2]]);
        let expected = ModuleMatrix::diagonal(&[
            CStarElement::from_reals(&[1.0]).unwrap(),
            CStarElement::from_reals(&[1.04]).unwrap(),
        ])
        .unwrap();
        assert!(f.frame_operator().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn certify_examples() {
        let f = build_frame(standard_basis(&sig(&[1, 3]), 3).unwrap()).unwrap();
        let c = f.certify(1e-9);
        assert!(c.is_frame);
        assert!((c.lower - 1.0).abs() < 1e-14 && (c.upper - 1.0).abs() < 1e-14);
        assert!(c.parseval_eps < 1e-14 && c.equal_inner_eps < 1e-14);

        let c = classical(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.2]]).certify(1e-9);
        assert!((c.lower - 1.0).abs() < 1e-14 && (c.upper - 1.04).abs() < 1e-14);
        assert!((c.parseval_eps - 0.04).abs() < 1e-14);

        let c = mercedes_benz().certify(1e-9);
        assert!(c.parseval_eps < 1e-14);
        assert!(c.equal_inner_eps < 1e-14);
    }

    #[test]
    fn distance_examples() {
        let f = mercedes_benz();
        assert_eq!(modular_distance(&f, &f).unwrap(), 0.0);
        assert_eq!(modular_distance(&classical(&[&[1.0]]), &classical(&[&[0.0]])).unwrap(), 1.0);
        assert!(modular_distance(&f, &classical(&[&[1.0]])).is_err());
    }

    #[test]
    fn closest_parseval_examples() {
        let f = mercedes_benz();
        let p = f.closest_parseval(1e-9).unwrap();
        assert!(modular_distance(&f, &p).unwrap() < 1e-14);

        // τ_j = 1.1 e_j: S = 1.21 I, eps = 0.21, output e_j at distance² 0.02.
        let g = classical(&[&[1.1, 0.0], &[0.0, 1.1]]);
        let eps = g.certify(1e-9).parseval_eps;
        assert!((eps - 0.21).abs() < 1e-14);
        let p = g.closest_parseval(1e-9).unwrap();
        assert!(p.max_abs_diff(&classical(&[&[1.0, 0.0], &[0.0, 1.0]])) < 1e-14);
        let dist_sq = modular_distance(&g, &p).unwrap().powi(2);
        assert!((dist_sq - 0.02).abs() < 1e-13);
        assert!(dist_sq <= 2.0 * (2.0 - eps - 2.0 * (1.0 - eps).sqrt()) + 1e-12);

        let degenerate = classical(&[&[1.0, 0.0], &[2.0, 0.0]]);
        assert!(matches!(degenerate.closest_parseval(1e-9), Err(Error::NotFrame { .. })));
    }

    #[test]
    fn equal_inner_examples() {
        let f = classical(&[&[2.0], &[1.0]]);
        let w = f.equal_inner_normalize(1e-9).unwrap();
        let h = 0.5f64.sqrt();
        assert!(w.max_abs_diff(&classical(&[&[h], &[h]])) < 1e-15);

        let mb = mercedes_benz().frame_matrix().scale(3.0);
        let w = FrameSystem::from_matrix(mb).unwrap().equal_inner_normalize(1e-9).unwrap();
        assert!(w.max_abs_diff(&mercedes_benz()) < 1e-14);

        let zero_block = ModuleVector::new(vec![CStarElement::from_reals(&[1.0, 0.0]).unwrap()]).unwrap();
        let f = build_frame(vec![zero_block]).unwrap();
        assert!(matches!(f.equal_inner_normalize(1e-9), Err(Error::SingularGram { index: 0 })));
    }

    #[test]
    fn projection_examples() {
        let s = sig(&[1, 2]);
        let f = build_frame(standard_basis(&s, 2).unwrap()).unwrap();
        assert!(f.canonical_projection(1e-9).unwrap().max_abs_diff(&ModuleMatrix::identity(&s, 2)) < 1e-14);

        let p = mercedes_benz().canonical_projection(1e-9).unwrap();
        assert!(p.is_projection(1e-12));
        assert_eq!(p.projection_rank(1e-9).unwrap(), 2);
        for j in 0..3 {
            assert!((p.entry(j, j).block(0)[(0, 0)].re - 2.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn analysis_image_examples() {
        let s = sig(&[1, 1]);
        let f = build_frame(standard_basis(&s, 3).unwrap()).unwrap();
        assert_eq!(f.analysis_image(), f);
        let img = mercedes_benz().analysis_image();
        assert_eq!((img.n(), img.d()), (3, 3));
        // Gram entries: (2/3) cos(2π(j-k)/3) = 2/3 on the diagonal, -1/3 off it.
        for j in 0..3 {
            for k in 0..3 {
                let expected = if j == k { 2.0 / 3.0 } else { -1.0 / 3.0 };
                assert!((img.vectors()[j].entry(k).block(0)[(0, 0)].re - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn naimark_examples() {
        let c = mercedes_benz().naimark_complement(1e-9).unwrap();
        assert_eq!((c.n(), c.d()), (3, 1));
        for v in c.vectors() {
            assert!((v.norm().powi(2) - 1.0 / 3.0).abs() < 1e-14);
        }
        assert!(c.certify(1e-9).parseval_eps < 1e-13);

        let basis = build_frame(standard_basis(&sig(&[1]), 2).unwrap()).unwrap();
        assert!(matches!(basis.naimark_complement(1e-9), Err(Error::NoComplement)));
        let not_parseval = FrameSystem::from_matrix(mercedes_benz().frame_matrix().scale(2.0)).unwrap();
        assert!(matches!(not_parseval.naimark_complement(1e-9), Err(Error::NotParseval { .. })));
    }
}
