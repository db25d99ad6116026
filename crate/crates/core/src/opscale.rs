//! Matrix tuples over `A`, doubly stochastic certification, alternating
//! operator scaling and radial isotropic position.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cstar::{AlgebraSignature, CStarElement, SpectralFn};
use crate::error::{Error, Result};
use crate::jacobi;
use crate::module::{ModuleMatrix, ModuleVector};

/// `k` matrices of common shape `m x n` over a common algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    signature: AlgebraSignature,
    m: usize,
    n: usize,
    matrices: Vec<ModuleMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    pub is_balanced: bool,
    pub c: Option<CStarElement>,
    pub is_doubly_stochastic: bool,
    /// Reported as exactly zero once it falls below the tolerance.
    pub nearly_eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    pub l: ModuleMatrix,
    pub r: ModuleMatrix,
    pub scaled: MatrixTuple,
    /// Nearly doubly stochastic residual after each half-step.
    pub residual_trace: Vec<f64>,
    /// `‖Σ V_j V_j* - I_m‖` right after each left step.
    pub left_step_errors: Vec<f64>,
    /// `‖Σ V_j* V_j - (m/n) I_n‖` right after each right step.
    pub right_step_errors: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPaulsenProbe {
    pub scaled: MatrixTuple,
    pub dist_sq: f64,
    pub input_eps: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    entries: Vec<CStarElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForsterResult {
    pub a: ModuleMatrix,
    pub transformed: Vec<ModuleVector>,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
}

fn spectral_norm_hermitian(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let v = jacobi::eigh(m).values;
    v[0].abs().max(v[v.len() - 1].abs())
}

impl MatrixTuple {
    pub fn new(matrices: Vec<ModuleMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidDimension("tuple needs k >= 1".into()))?;
        let (signature, m, n) = (first.signature().clone(), first.rows(), first.cols());
        for (j, x) in matrices.iter().enumerate().skip(1) {
            signature.check_same(x.signature())?;
            if (x.rows(), x.cols()) != (m, n) {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {j} is {}x{}, expected {m}x{n}",
                    x.rows(),
                    x.cols()
                )));
            }
        }
        Ok(Self { signature, m, n, matrices })
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[ModuleMatrix] {
        &self.matrices
    }

    /// `Σ U_j U_j*`.
    pub fn left_marginal(&self) -> ModuleMatrix {
        self.marginal(|b| b * b.adjoint(), self.m)
    }

    /// `Σ U_j* U_j`.
    pub fn right_marginal(&self) -> ModuleMatrix {
        self.marginal(|b| b.adjoint() * b, self.n)
    }

    fn marginal(&self, f: impl Fn(&DMatrix<Complex64>) -> DMatrix<Complex64>, size: usize) -> ModuleMatrix {
        let blocks = self
            .signature
            .sizes()
            .iter()
            .enumerate()
            .map(|(i, &ni)| {
                self.matrices
                    .iter()
                    .fold(DMatrix::zeros(size * ni, size * ni), |acc, x| acc + f(&x.flattened()[i]))
            })
            .collect();
        ModuleMatrix::from_blocks(&self.signature, size, size, blocks).expect("marginal shape")
    }

    pub fn scale(&self, x: f64) -> Self {
        Self {
            matrices: self.matrices.iter().map(|u| u.scale(x)).collect(),
            ..self.clone()
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.signature.check_same(&other.signature)?;
        if (self.m, self.n, self.k()) != (other.m, other.n, other.k()) {
            return Err(Error::ShapeMismatch(format!(
                "tuples of shape {}x{}x{} and {}x{}x{}",
                self.k(),
                self.m,
                self.n,
                other.k(),
                other.m,
                other.n
            )));
        }
        Ok(())
    }

    /// Smallest `ε` with `(1-ε) I ≤ D_L ≤ (1+ε) I` and
    /// `(1-ε)(m/n) I ≤ D_R ≤ (1+ε)(m/n) I`.
    fn raw_nearly_eps(&self) -> f64 {
        let ratio = self.n as f64 / self.m as f64;
        let deviation = |m: &ModuleMatrix, factor: f64| {
            m.flattened()
                .iter()
                .flat_map(|b| jacobi::eigh(b).values)
                .map(|x| (factor * x - 1.0).abs())
                .fold(0.0, f64::max)
        };
        deviation(&self.left_marginal(), 1.0).max(deviation(&self.right_marginal(), ratio))
    }
}

/// Doubly balanced / doubly stochastic certification.
pub fn tuple_certify(t: &MatrixTuple, tol: f64) -> BalanceReport {
    let raw = t.raw_nearly_eps();
    let sig = t.signature();
    if raw <= tol {
        return BalanceReport {
            is_balanced: true,
            c: Some(CStarElement::scalar(sig, 1.0 / t.n() as f64)),
            is_doubly_stochastic: true,
            nearly_eps: 0.0,
        };
    }
    let dl = t.left_marginal();
    let dr = t.right_marginal();
    let c = dl.entry(0, 0).scale(1.0 / t.n() as f64);
    let scale = dl
        .flattened()
        .iter()
        .chain(dr.flattened())
        .flat_map(|b| b.iter().map(|z| z.norm()))
        .fold(1.0, f64::max);
    let slack = 2.0 * tol * scale;
    let expected_left = ModuleMatrix::diagonal(&vec![c.scale(t.n() as f64); t.m()]).expect("nonempty");
    let expected_right = ModuleMatrix::diagonal(&vec![c.scale(t.m() as f64); t.n()]).expect("nonempty");
    let c_positive = c.is_hermitian(tol) && c.spectrum_unchecked().min > tol;
    let is_balanced =
        c_positive && dl.max_abs_diff(&expected_left) <= slack && dr.max_abs_diff(&expected_right) <= slack;
    BalanceReport {
        is_balanced,
        c: is_balanced.then_some(c),
        is_doubly_stochastic: false,
        nearly_eps: raw,
    }
}

/// `‖Σ_j <U_j - V_j, U_j - V_j>_MHS‖^{1/2}`.
pub fn tuple_distance(u: &MatrixTuple, v: &MatrixTuple) -> Result<f64> {
    u.check_same_shape(v)?;
    let mut acc = CStarElement::zero(u.signature());
    for (a, b) in u.matrices.iter().zip(&v.matrices) {
        let diff = a.sub_raw(b);
        acc.add_assign_raw(&diff.mhs_inner_raw(&diff));
    }
    Ok(acc.hermitian_norm().max(0.0).sqrt())
}

fn inverse_sqrt(m: &ModuleMatrix, tol: f64, side: &str) -> Result<ModuleMatrix> {
    m.spectral_map(SpectralFn::InvSqrt, tol).map_err(|e| match e {
        Error::Singular { eigenvalue } => {
            Error::SingularMarginal(format!("{side} marginal has eigenvalue {eigenvalue:e}"))
        }
        other => other,
    })
}

/// Alternating left/right marginal normalization.
pub fn operator_scale(u: &MatrixTuple, tol: f64, max_iter: usize) -> Result<ScalingResult> {
    let (m, n) = (u.m(), u.n());
    let sig = u.signature().clone();
    for (side, marginal) in [("left", u.left_marginal()), ("right", u.right_marginal())] {
        let min = marginal
            .flattened()
            .iter()
            .map(|b| jacobi::eigh(b).values[0])
            .fold(f64::INFINITY, f64::min);
        if min < tol {
            return Err(Error::SingularMarginal(format!("{side} marginal has eigenvalue {min:e}")));
        }
    }

    let right_target = m as f64 / n as f64;
    let mut l = ModuleMatrix::identity(&sig, m);
    let mut r = ModuleMatrix::identity(&sig, n);
    let mut v = u.clone();
    let mut residual_trace = Vec::new();
    let mut left_step_errors = Vec::new();
    let mut right_step_errors = Vec::new();
    let mut iterations = 0;
    let mut eps = v.raw_nearly_eps();
    let mut converged = eps <= tol;

    while !converged && iterations < max_iter {
        iterations += 1;

        let x = inverse_sqrt(&v.left_marginal(), tol, "left")?;
        v.matrices = v.matrices.iter().map(|vj| x.compose_raw(vj)).collect();
        l = x.compose_raw(&l);
        let dl = v.left_marginal();
        left_step_errors.push(
            dl.flattened()
                .iter()
                .map(|b| spectral_norm_hermitian(&(b - DMatrix::identity(b.nrows(), b.ncols()))))
                .fold(0.0, f64::max),
        );
        eps = v.raw_nearly_eps();
        residual_trace.push(eps);
        if eps <= tol {
            converged = true;
            break;
        }

        let y = inverse_sqrt(&v.right_marginal(), tol, "right")?.scale(right_target.sqrt());
        v.matrices = v.matrices.iter().map(|vj| vj.compose_raw(&y)).collect();
        r = r.compose_raw(&y);
        let dr = v.right_marginal();
        right_step_errors.push(
            dr.flattened()
                .iter()
                .map(|b| {
                    let target = DMatrix::identity(b.nrows(), b.ncols()) * Complex64::new(right_target, 0.0);
                    spectral_norm_hermitian(&(b - target))
                })
                .fold(0.0, f64::max),
        );
        eps = v.raw_nearly_eps();
        residual_trace.push(eps);
        converged = eps <= tol;
    }

    Ok(ScalingResult {
        l,
        r,
        scaled: v,
        residual_trace,
        left_step_errors,
        right_step_errors,
        iterations,
        converged,
    })
}

/// Empirical `(ε, dist²)` pair for the matrix Paulsen question.
pub fn matrix_paulsen_probe(u: &MatrixTuple, tol: f64, max_iter: usize) -> Result<MatrixPaulsenProbe> {
    let input_eps = u.raw_nearly_eps();
    let result = operator_scale(u, tol, max_iter)?;
    let dist_sq = tuple_distance(u, &result.scaled)?.powi(2);
    Ok(MatrixPaulsenProbe {
        scaled: result.scaled,
        dist_sq,
        input_eps,
        converged: result.converged,
    })
}

impl CoefficientVector {
    pub fn new(entries: Vec<CStarElement>, tol: f64) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::InvalidDimension("coefficient vector needs at least one entry".into()))?;
        for c in &entries {
            first.signature().check_same(c.signature())?;
            if !c.is_positive(tol) {
                return Err(Error::NotPositive {
                    eigenvalue: c.spectrum_unchecked().min,
                });
            }
        }
        Ok(Self { entries })
    }

    /// Every coefficient equal to `x · 1_A`.
    pub fn constant(signature: &AlgebraSignature, len: usize, x: f64) -> Result<Self> {
        Self::new(vec![CStarElement::scalar(signature, x); len], 0.0)
    }

    pub fn entries(&self) -> &[CStarElement] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `û = <u, u>^{-1/2} u`.
fn normalize(u: &ModuleVector, index: usize, tol: f64) -> Result<ModuleVector> {
    let g = u.inner_raw(u);
    let g_inv = g
        .spectral_map(SpectralFn::InvSqrt, tol)
        .map_err(|_| Error::SingularGram { index })?;
    u.left_mul(&g_inv)
}

/// `Σ_j outer(c_j; v_j)` with `outer(c; v)_{pq} = v_p* c v_q`.
fn outer_sum(vs: &[ModuleVector], c: &CoefficientVector) -> ModuleMatrix {
    let sig = vs[0].signature().clone();
    let d = vs[0].dim();
    let mut acc = ModuleMatrix::zeros(&sig, d, d);
    for (v, cj) in vs.iter().zip(c.entries()) {
        let mut entries = Vec::with_capacity(d * d);
        for p in 0..d {
            let left = v.entry(p).adjoint().mul_raw(cj);
            for q in 0..d {
                entries.push(left.mul_raw(v.entry(q)));
            }
        }
        let term = ModuleMatrix::from_entries(&sig, d, d, &entries).expect("outer shape");
        acc = acc.add(&term).expect("same shape");
    }
    acc
}

fn check_lengths(u: &[ModuleVector], c: &CoefficientVector) -> Result<()> {
    if u.is_empty() || u.len() != c.len() {
        return Err(Error::ShapeMismatch(format!("{} vectors, {} coefficients", u.len(), c.len())));
    }
    for x in u {
        u[0].signature().check_same(x.signature())?;
        c.entries()[0].signature().check_same(x.signature())?;
        if x.dim() != u[0].dim() {
            return Err(Error::ShapeMismatch("vectors of different length".into()));
        }
    }
    Ok(())
}

fn isotropy_residual(u: &[ModuleVector], c: &CoefficientVector, tol: f64) -> Result<f64> {
    let normalized = u
        .iter()
        .enumerate()
        .map(|(j, x)| normalize(x, j, tol))
        .collect::<Result<Vec<_>>>()?;
    let sum = outer_sum(&normalized, c);
    let diff = sum.sub_raw(&ModuleMatrix::identity(u[0].signature(), u[0].dim()));
    Ok(diff.mhs_norm())
}

/// Modular radial isotropic position check.
pub fn radial_isotropic_check(u: &[ModuleVector], c: &CoefficientVector, tol: f64) -> Result<bool> {
    check_lengths(u, c)?;
    Ok(isotropy_residual(u, c, tol)? <= tol)
}

/// Forster-type iteration `u_j ← u_j M^{-1/2}` with
/// `M = Σ c_j û_j* û_j`, accumulating `A`. Commutative algebras only.
pub fn forster_transform(u: &[ModuleVector], c: &CoefficientVector, tol: f64, max_iter: usize) -> Result<ForsterResult> {
    check_lengths(u, c)?;
    let sig = u[0].signature().clone();
    if !sig.is_commutative() {
        return Err(Error::NonCommutative);
    }
    let d = u[0].dim();
    let mut total = CStarElement::zero(&sig);
    for cj in c.entries() {
        total.add_assign_raw(cj);
    }
    let total_dev = total.max_abs_diff(&CStarElement::scalar(&sig, d as f64));
    if total_dev > tol.max(1e-12) * d as f64 {
        return Err(Error::InvalidConfig(format!(
            "coefficients must sum to d = {d} in every block (deviation {total_dev:e})"
        )));
    }

    let mut a = ModuleMatrix::identity(&sig, d);
    let mut current: Vec<ModuleVector> = u.to_vec();
    let mut residual = isotropy_residual(&current, c, tol)?;
    let mut best = residual;
    let mut best_at = 0;
    let mut iterations = 0;
    const STALL_WINDOW: usize = 200;

    while residual > tol && iterations < max_iter {
        iterations += 1;
        let normalized = current
            .iter()
            .enumerate()
            .map(|(j, x)| normalize(x, j, tol))
            .collect::<Result<Vec<_>>>()?;
        let m = outer_sum(&normalized, c);
        let step = m
            .spectral_map(SpectralFn::InvSqrt, tol)
            .map_err(|_| Error::Degenerate { residual })?;
        a = a.compose_raw(&step);
        current = current.iter().map(|x| x.apply(&step)).collect::<Result<_>>()?;
        residual = isotropy_residual(&current, c, tol).map_err(|_| Error::Degenerate { residual })?;
        if residual < best * (1.0 - 1e-3) {
            best = residual;
            best_at = iterations;
        } else if iterations - best_at >= STALL_WINDOW {
            return Err(Error::Degenerate { residual });
        }
    }
    let converged = residual <= tol;
    let transformed = current
        .iter()
        .enumerate()
        .map(|(j, x)| normalize(x, j, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(ForsterResult {
        a,
        transformed,
        converged,
        iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::standard_basis;

    fn sig(v: &[usize]) -> AlgebraSignature {
        AlgebraSignature::new(v.to_vec()).unwrap()
    }

    fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> ModuleMatrix {
        let entries: Vec<_> = data.iter().map(|&x| CStarElement::from_reals(&[x]).unwrap()).collect();
        ModuleMatrix::from_entries(&sig(&[1]), rows, cols, &entries).unwrap()
    }

    fn real_vector(data: &[f64]) -> ModuleVector {
        ModuleVector::new(data.iter().map(|&x| CStarElement::from_reals(&[x]).unwrap()).collect()).unwrap()
    }

    #[test]
    fn certify_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = MatrixTuple::new(vec![real_matrix(2, 2, &[h, 0.0, 0.0, h]); 2]).unwrap();
        let r = tuple_certify(&t, 1e-9);
        assert!(r.is_doubly_stochastic && r.is_balanced);
        assert_eq!(r.nearly_eps, 0.0);
        assert!(r.c.unwrap().max_abs_diff(&CStarElement::scalar(&sig(&[1]), 0.5)) < 1e-15);

        let t = MatrixTuple::new(vec![real_matrix(2, 2, &[2.0, 0.0, 0.0, 2.0])]).unwrap();
        let r = tuple_certify(&t, 1e-9);
        assert!(r.is_balanced && !r.is_doubly_stochastic);
        assert!(r.c.unwrap().max_abs_diff(&CStarElement::scalar(&sig(&[1]), 2.0)) < 1e-15);
        assert!((r.nearly_eps - 3.0).abs() < 1e-14);

        let t = MatrixTuple::new(vec![real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])]).unwrap();
        let r = tuple_certify(&t, 1e-9);
        assert!(!r.is_balanced && r.c.is_none());
    }

    #[test]
    fn distance_examples() {
        let u = MatrixTuple::new(vec![real_matrix(1, 1, &[1.0])]).unwrap();
        let v = MatrixTuple::new(vec![real_matrix(1, 1, &[0.0])]).unwrap();
        assert_eq!(tuple_distance(&u, &u).unwrap(), 0.0);
        assert!((tuple_distance(&u, &v).unwrap() - 1.0).abs() < 1e-15);
        let w = MatrixTuple::new(vec![real_matrix(1, 2, &[0.0, 0.0])]).unwrap();
        assert!(tuple_distance(&u, &w).is_err());
    }

    #[test]
    fn scaling_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ds = MatrixTuple::new(vec![real_matrix(2, 2, &[h, 0.0, 0.0, h]); 2]).unwrap();
        let r = operator_scale(&ds, 1e-9, 10).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
        assert_eq!(r.l, ModuleMatrix::identity(&sig(&[1]), 2));

        let u = MatrixTuple::new(vec![real_matrix(1, 1, &[3.0]), real_matrix(1, 1, &[4.0])]).unwrap();
        let r = operator_scale(&u, 1e-12, 10).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.residual_trace.len(), 1);
        let s = r.scaled.matrices();
        assert!((s[0].entry(0, 0).block(0)[(0, 0)].re - 0.6).abs() < 1e-15);
        assert!((s[1].entry(0, 0).block(0)[(0, 0)].re - 0.8).abs() < 1e-15);

        let singular = MatrixTuple::new(vec![real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])]).unwrap();
        assert!(matches!(operator_scale(&singular, 1e-9, 10), Err(Error::SingularMarginal(_))));
    }

    #[test]
    fn scaling_rectangular_tuple_reproduces_from_l_and_r() {
        let u = MatrixTuple::new(vec![
            real_matrix(2, 3, &[1.0, 0.2, 0.0, 0.3, 1.0, 0.5]),
            real_matrix(2, 3, &[0.1, 0.0, 1.0, 0.7, 0.2, 0.1]),
        ])
        .unwrap();
        let r = operator_scale(&u, 1e-12, 500).unwrap();
        assert!(r.converged);
        assert!(r.left_step_errors.iter().all(|&e| e <= 1e-10));
        assert!(r.right_step_errors.iter().all(|&e| e <= 1e-10));
        for (uj, vj) in u.matrices().iter().zip(r.scaled.matrices()) {
            let rebuilt = r.l.compose(uj).unwrap().compose(&r.r).unwrap();
            assert!(rebuilt.sub(vj).unwrap().mhs_norm() < 1e-9);
        }
        assert!(tuple_certify(&r.scaled, 1e-10).is_doubly_stochastic);
    }

    #[test]
    fn probe_scaled_doubly_stochastic() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ds = MatrixTuple::new(vec![
            real_matrix(2, 2, &[h, 0.0, 0.0, h]),
            real_matrix(2, 2, &[0.0, h, h, 0.0]),
        ])
        .unwrap();
        let p = matrix_paulsen_probe(&ds, 1e-10, 10).unwrap();
        assert_eq!(p.dist_sq, 0.0);
        let eps: f64 = 0.1;
        let scaled = ds.scale((1.0 + eps).sqrt());
        let p = matrix_paulsen_probe(&scaled, 1e-12, 100).unwrap();
        assert!((p.input_eps - eps).abs() < 1e-12);
        // Σ <T_j, T_j>_MHS = 2 for this tuple.
        let expected = ((1.0 + eps).sqrt() - 1.0).powi(2) * 2.0;
        assert!((p.dist_sq - expected).abs() < 1e-12);
    }

    #[test]
    fn radial_isotropic_examples() {
        for s in [sig(&[1]), sig(&[2, 1])] {
            let basis = standard_basis(&s, 3).unwrap();
            let ones = CoefficientVector::constant(&s, 3, 1.0).unwrap();
            assert!(radial_isotropic_check(&basis, &ones, 1e-9).unwrap());
            let twos = CoefficientVector::constant(&s, 3, 2.0).unwrap();
            assert!(!radial_isotropic_check(&basis, &twos, 1e-9).unwrap());
        }
        // Direct sum: (1/2) e1 e1* + (1/2) e2 e2* + (1/2)(1,1)(1,1)* = [[1, 1/2], [1/2, 1]].
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = vec![real_vector(&[1.0, 0.0]), real_vector(&[0.0, 1.0]), real_vector(&[h, h])];
        let c = CoefficientVector::new(
            [0.5, 0.5, 1.0].iter().map(|&x| CStarElement::from_reals(&[x]).unwrap()).collect(),
            1e-12,
        )
        .unwrap();
        assert!(!radial_isotropic_check(&u, &c, 1e-9).unwrap());
        let zero = vec![real_vector(&[0.0, 0.0]), real_vector(&[0.0, 1.0]), real_vector(&[h, h])];
        assert!(matches!(radial_isotropic_check(&zero, &c, 1e-9), Err(Error::SingularGram { index: 0 })));
    }

    #[test]
    fn forster_examples() {
        let s = sig(&[1]);
        let basis = standard_basis(&s, 2).unwrap();
        let ones = CoefficientVector::constant(&s, 2, 1.0).unwrap();
        let r = forster_transform(&basis, &ones, 1e-10, 100).unwrap();
        assert!(r.converged && r.iterations == 0);
        assert_eq!(r.a, ModuleMatrix::identity(&s, 2));

        let u = vec![real_vector(&[1.0, 0.0]), real_vector(&[0.3, 1.0]), real_vector(&[0.8, 0.5])];
        let c = CoefficientVector::constant(&s, 3, 2.0 / 3.0).unwrap();
        let r = forster_transform(&u, &c, 1e-10, 1000).unwrap();
        assert!(r.converged);
        assert!(radial_isotropic_check(&r.transformed, &c, 1e-9).unwrap());

        let colinear = vec![real_vector(&[1.0, 0.0]), real_vector(&[2.0, 0.0]), real_vector(&[0.0, 1.0])];
        match forster_transform(&colinear, &c, 1e-10, 2000) {
            Err(Error::Degenerate { .. }) => {}
            Ok(r) => assert!(!r.converged),
            Err(e) => panic!("unexpected error {e:?}"),
        }

        let nc = standard_basis(&sig(&[2]), 2).unwrap();
        let c2 = CoefficientVector::constant(&sig(&[2]), 2, 1.0).unwrap();
        assert!(matches!(forster_transform(&nc, &c2, 1e-9, 10), Err(Error::NonCommutative)));
    }
}
