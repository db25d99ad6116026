//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real symmetric rotation, so the
//! combined transform `U = diag(1, e^{-iφ}) R` zeroes `a_pq` exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;
/// Sweeps stop once the off-diagonal Frobenius mass drops below this
/// fraction of the matrix Frobenius norm.
const OFF_DIAGONAL_RATIO: f64 = 1e-13;

/// Eigenvalues in ascending order with matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub(crate) struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

fn off_diagonal_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Decomposes the Hermitian part of `input`. Callers are expected to have
/// checked Hermitian-ness; the strictly lower triangle is ignored.
pub(crate) fn eigh(input: &DMatrix<Complex64>) -> HermitianEigen {
    let n = input.nrows();
    assert_eq!(n, input.ncols(), "eigh needs a square matrix");
    // Symmetrize from the upper triangle so tiny asymmetries cannot stall.
    let mut a = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(input[(i, i)].re, 0.0)
        } else if i < j {
            input[(i, j)]
        } else {
            input[(j, i)].conj()
        }
    });
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let scale = a.norm();

    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= OFF_DIAGONAL_RATIO * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

fn rotate(a: &mut DMatrix<Complex64>, v: &mut DMatrix<Complex64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots that are negligible relative to the diagonal.
    if b < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / b; // e^{iφ}
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let conj_phase = phase.conj(); // e^{-iφ}
    let n = a.nrows();

    // A <- A U, with U columns p = (c, -s e^{-iφ}), q = (s, c e^{-iφ}).
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * conj_phase * s;
        a[(k, q)] = akp * s + akq * conj_phase * c;
    }
    // A <- U^† A.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * conj_phase * s;
        v[(k, q)] = vkp * s + vkq * conj_phase * c;
    }
}

/// Rotates a vector so its first coordinate of non-negligible magnitude is
/// real and positive.
pub(crate) fn fix_phase(vec: &mut [Complex64]) {
    let max = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(z) = vec.iter().find(|z| z.norm() > 1e-8 * max).copied() {
        let rot = z.conj() / z.norm();
        for x in vec.iter_mut() {
            *x *= rot;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(e: &HermitianEigen) -> DMatrix<Complex64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            e.values.len(),
            e.values.iter().map(|&x| c(x, 0.0)),
        ));
        &e.vectors * d * e.vectors.adjoint()
    }

    #[test]
    fn diagonalizes_symmetric_two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let e = eigh(&a);
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(1.0, -1.0),
                c(0.0, 0.5),
                c(1.0, 1.0),
                c(-1.0, 0.0),
                c(0.3, 0.2),
                c(0.0, -0.5),
                c(0.3, -0.2),
                c(4.0, 0.0),
            ],
        );
        let e = eigh(&a);
        assert!((reconstruct(&e) - &a).norm() < 1e-12);
        let id = e.vectors.adjoint() * &e.vectors;
        assert!((id - DMatrix::identity(3, 3)).norm() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn matches_nalgebra_on_random_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=9 {
            let g = DMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let h = &g + g.adjoint();
            let e = eigh(&h);
            let mut reference: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            for (x, y) in e.values.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-11, "n={n}: {x} vs {y}");
            }
            assert!((reconstruct(&e) - &h).norm() < 1e-11);
        }
    }

    #[test]
    fn phase_convention() {
        let mut v = vec![c(0.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)];
        fix_phase(&mut v);
        assert!(v[1].im.abs() < 1e-15 && v[1].re > 0.0);
        assert!((v[2] - c(0.0, -1.0)).norm() < 1e-15);
    }
}
