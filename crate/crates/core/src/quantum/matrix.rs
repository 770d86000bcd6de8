use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real = f64> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong sizes and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{rows}x{cols} (positive)"),
                got: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: format!("{m} columns in every row"),
                got: "ragged rows".into(),
            });
        }
        Self::from_vec(n, m, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(T::c(x), T::zero())).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::from_diag(&d)
    }

    /// Column vector from amplitudes.
    pub fn column(v: &[Complex<T>]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `|a><b|` for two amplitude vectors.
    pub fn outer(a: &[Complex<T>], b: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    /// Projector `|v><v|`.
    pub fn projector(v: &[Complex<T>]) -> Self {
        Self::outer(v, v)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_error(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::c(0.5);
        let adj = self.adjoint();
        let mut out = self.clone();
        for (o, a) in out.data.iter_mut().zip(adj.data) {
            *o = (*o + a) * half;
        }
        out
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// `<v| self |v>`.
    pub fn expectation(&self, v: &[Complex<T>]) -> Complex<T> {
        assert!(self.is_square() && v.len() == self.rows);
        let mut acc = Complex::zero();
        for i in 0..self.rows {
            let mut row = Complex::zero();
            for j in 0..self.cols {
                row = row + self[(i, j)] * v[j];
            }
            acc = acc + v[i].conj() * row;
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch: {}x{} · {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `a · self · a†`.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        a.matmul(self).matmul(&a.adjoint())
    }

    /// Entries as `[re, im]` pairs, row-major.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let z = self[(i, j)];
                        [z.re.as_f64(), z.im.as_f64()]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let rows: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex::new(T::c(re), T::c(im))).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::c(z.re.as_f64()), U::c(z.im.as_f64())))
                .collect(),
        }
    }
}

/// Kronecker product, `(a.rows·b.rows) × (a.cols·b.cols)`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let x = a[(ai, aj)];
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = x * b[(bi, bj)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two amplitude vectors.
pub fn kron_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli matrices and the polarization basis, `H = (1,0)`, `V = (0,1)`.
pub mod pauli {
    use super::*;

    pub fn x<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn y<T: Real>() -> ComplexMatrix<T> {
        let i = Complex::new(T::zero(), T::one());
        ComplexMatrix::from_rows(&[vec![Complex::zero(), -i], vec![i, Complex::zero()]]).unwrap()
    }

    /// `Z = |H><H| - |V><V|`.
    pub fn z<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_diag(&[T::one(), -T::one()])
    }
}
