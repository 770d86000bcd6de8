//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! The matrices here are at most 16×16 (informational-completeness checks)
//! and usually 4×4, where Jacobi is accurate to a few ulp and needs no
//! external LAPACK.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Input Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Most negative eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone)]
pub struct Eigensystem<T: Real = f64> {
    /// Sorted descending.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> Eigensystem<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V f(Λ) V†`.
    pub fn reassemble(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w.is_zero() {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }
}

/// Eigenvalues (descending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigensystem<T: Real>(m: &ComplexMatrix<T>) -> Result<Eigensystem<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let asym = m.hermiticity_error();
    if !(asym <= T::tol(HERMITIAN_TOL)) {
        return Err(Error::NotHermitian(asym.as_f64()));
    }
    Ok(jacobi(m.hermitian_part()))
}

fn jacobi<T: Real>(mut a: ComplexMatrix<T>) -> Eigensystem<T> {
    let n = a.rows();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= eps * eps.sqrt() * scale || off.is_zero() {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    Eigensystem { values, vectors }
}

/// Zeroes `a[p][q]` with `J = [[c, s·e], [-s·e*, c]]` on the (p, q) plane,
/// where `e` is the phase of `a[p][q]`: `a ← J† a J`, `v ← v J`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= T::min_positive_value() {
        return;
    }
    let e = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (T::c(2.0) * mag);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let se = e * s;
    let n = a.rows();

    // columns: a ← a J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * se.conj();
        a[(k, q)] = akp * se + akq * c;
    }
    // rows: a ← J† a
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * se;
        a[(q, k)] = apk * se.conj() + aqk * c;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * se.conj();
        v[(k, q)] = vkp * se + vkq * c;
    }
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
pub fn matrix_sqrt_psd<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let es = hermitian_eigensystem(m)?;
    let min = es.min_value();
    if min < -T::tol(PSD_TOL) {
        return Err(Error::NotPsd(min.as_f64()));
    }
    Ok(es.reassemble(|x| x.max(T::zero()).sqrt()))
}

/// Hilbert–Schmidt rank of a set of operators: the dimension of their real
/// span, found from the eigenvalues of their Gram matrix.
pub fn span_rank<T: Real>(ops: &[ComplexMatrix<T>], rel_tol: f64) -> usize {
    if ops.is_empty() {
        return 0;
    }
    let n = ops.len();
    let mut gram = ComplexMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g = ops[i].adjoint().trace_product(&ops[j]);
            gram[(i, j)] = g;
            gram[(j, i)] = g.conj();
        }
    }
    let es = jacobi(gram);
    let top = es.values[0].abs();
    let cut = top * T::c(rel_tol);
    es.values.iter().filter(|&&x| x > cut).count()
}
