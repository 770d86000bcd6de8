use num_complex::Complex;
use num_traits::{One, Zero};

use super::eigen::{hermitian_eigensystem, HERMITIAN_TOL};
use super::matrix::{kron_vec, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on the density-operator invariants (Hermiticity, trace, PSD).
pub const STATE_TOL: f64 = 1e-10;
/// Traces at or below this are treated as zero.
pub const ZERO_TRACE: f64 = 1e-14;

/// Normalized polarization qubit over `(H, V)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationKet<T: Real = f64> {
    amps: [Complex<T>; 2],
}

impl<T: Real> PolarizationKet<T> {
    /// Normalizes the given amplitudes.
    pub fn new(h: Complex<T>, v: Complex<T>) -> Result<Self> {
        let norm = (h.norm_sqr() + v.norm_sqr()).sqrt();
        if !(norm > T::tol(ZERO_TRACE)) || !norm.is_finite() {
            return Err(Error::InvalidState("polarization ket has zero norm".into()));
        }
        Ok(Self {
            amps: [h / norm, v / norm],
        })
    }

    pub fn h() -> Self {
        Self {
            amps: [Complex::one(), Complex::zero()],
        }
    }

    pub fn v() -> Self {
        Self {
            amps: [Complex::zero(), Complex::one()],
        }
    }

    pub fn amplitudes(&self) -> &[Complex<T>; 2] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        (self.amps[0].norm_sqr() + self.amps[1].norm_sqr()).sqrt()
    }

    /// `|<self|other>|²`.
    pub fn overlap(&self, other: &Self) -> T {
        (self.amps[0].conj() * other.amps[0] + self.amps[1].conj() * other.amps[1]).norm_sqr()
    }

    /// The orthogonal polarization, `(-v*, h*)`.
    pub fn orthogonal(&self) -> Self {
        Self {
            amps: [-self.amps[1].conj(), self.amps[0].conj()],
        }
    }
}

/// Two-qubit density operator over the ordered basis `(HH, HV, VH, VV)`.
///
/// The first tensor factor is the Stokes-photon arm (before read-out: the
/// atomic rail), the second is the anti-Stokes arm, converted or not.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState<T: Real = f64> {
    rho: ComplexMatrix<T>,
}

impl<T: Real> TwoQubitState<T> {
    /// Validates `rho` against every density-operator invariant.
    pub fn new(rho: ComplexMatrix<T>) -> Result<Self> {
        if rho.rows() != 4 || rho.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4x4".into(),
                got: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        if !rho.is_finite() {
            return Err(Error::NonFinite);
        }
        let tol = T::tol(STATE_TOL);
        let asym = rho.hermiticity_error();
        if asym > tol {
            return Err(Error::InvalidState(format!("not Hermitian (asymmetry {asym:e})")));
        }
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eigensystem(&rho)?.min_value();
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { rho })
    }

    /// `|ψ><ψ|` for a (not necessarily normalized) 4-amplitude ket.
    pub fn from_pure(ket: &[Complex<T>]) -> Result<Self> {
        if ket.len() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4 amplitudes".into(),
                got: ket.len().to_string(),
            });
        }
        normalize_to_state(&ComplexMatrix::projector(ket))
    }

    pub fn product(a: &PolarizationKet<T>, b: &PolarizationKet<T>) -> Self {
        let ket = kron_vec(a.amplitudes(), b.amplitudes());
        Self {
            rho: ComplexMatrix::projector(&ket),
        }
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        Self {
            rho: ComplexMatrix::identity(4).scale(T::c(0.25)),
        }
    }

    /// `(|HH> + |VV>)/√2`.
    pub fn phi_plus() -> Self {
        Self {
            rho: ComplexMatrix::projector(&phi_plus_ket()),
        }
    }

    pub fn rho(&self) -> &ComplexMatrix<T> {
        &self.rho
    }

    pub fn into_rho(self) -> ComplexMatrix<T> {
        self.rho
    }

    /// `ρ_{ij}` in the `(HH, HV, VH, VV)` basis.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.rho[(i, j)]
    }

    /// `a ρ a†`, renormalized. Fails if the result has zero trace.
    pub fn transform(&self, a: &ComplexMatrix<T>) -> Result<Self> {
        normalize_to_state(&self.rho.conjugate_by(a))
    }

    /// `<ψ|ρ|ψ>`.
    pub fn fidelity_pure(&self, ket: &[Complex<T>]) -> T {
        self.rho.expectation(ket).re
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> T {
        let diff = &self.rho - &other.rho;
        let es = hermitian_eigensystem(&diff).expect("difference of Hermitian matrices");
        es.values.iter().map(|x| x.abs()).sum::<T>() * T::c(0.5)
    }

    pub fn cast<U: Real>(&self) -> TwoQubitState<U> {
        TwoQubitState { rho: self.rho.cast() }
    }
}

/// `(|HH> + |VV>)/√2` as amplitudes.
pub fn phi_plus_ket<T: Real>() -> [Complex<T>; 4] {
    let a = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    [a, Complex::zero(), Complex::zero(), a]
}

/// Rescales a Hermitian 4×4 matrix to unit trace and clips any negative
/// eigenvalues to zero, returning a valid density operator.
pub fn normalize_to_state<T: Real>(m: &ComplexMatrix<T>) -> Result<TwoQubitState<T>> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: "4x4".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let asym = m.hermiticity_error();
    if asym > T::tol(HERMITIAN_TOL) {
        return Err(Error::NotHermitian(asym.as_f64()));
    }
    let tr = m.trace().re;
    if !(tr > T::tol(ZERO_TRACE)) {
        return Err(Error::ZeroTrace(tr.as_f64()));
    }
    let mut rho = m.hermitian_part().scale(T::one() / tr);
    let es = hermitian_eigensystem(&rho)?;
    if es.min_value() < T::zero() {
        let clipped = es.reassemble(|x| x.max(T::zero()));
        let tr = clipped.trace().re;
        if !(tr > T::tol(ZERO_TRACE)) {
            return Err(Error::ZeroTrace(tr.as_f64()));
        }
        rho = clipped.hermitian_part().scale(T::one() / tr);
    }
    Ok(TwoQubitState { rho })
}
