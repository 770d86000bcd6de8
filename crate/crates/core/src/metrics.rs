//! Two-qubit entanglement and quality figures: concurrence, entanglement
//! of formation, purity, and fidelity to `U_θ|φ+⟩` maximized over `θ`.

use num_complex::Complex;
use num_traits::Zero;

use crate::qfc::reduce_phase;
use crate::quantum::{hermitian_eigensystem, kron, pauli, ComplexMatrix, TwoQubitState};
use crate::scalar::Real;

/// Index of `|HH⟩` and `|VV⟩` in the two-qubit basis.
const HH: usize = 0;
const VV: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport<T: Real = f64> {
    pub concurrence: T,
    pub eof: T,
    pub purity: T,
    pub max_fidelity: T,
    /// Maximizing rotation angle, degrees in `(-180, 180]`.
    pub theta_star_deg: T,
}

impl<T: Real> MetricsReport<T> {
    pub fn of(state: &TwoQubitState<T>) -> Self {
        let c = concurrence(state);
        let (f, theta) = max_fidelity(state);
        Self {
            concurrence: c,
            eof: eof_from_concurrence(c),
            purity: purity(state),
            max_fidelity: f,
            theta_star_deg: theta.to_degrees(),
        }
    }
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`, with `λᵢ` the
/// descending square roots of the eigenvalues of `ρ ρ̃`,
/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
///
/// The `λᵢ` are taken as the singular values of `τ_ij = w_i† (σ_y⊗σ_y) w_j*`
/// for the decomposition `ρ = Σ w_i w_i†`, read off the Hermitian dilation
/// `[[0, τ], [τ†, 0]]`. This avoids square-rooting eigenvalues of `ρ ρ̃`,
/// which turns rounding noise near zero into `~1e-8` errors on pure states.
pub fn concurrence<T: Real>(state: &TwoQubitState<T>) -> T {
    let es = hermitian_eigensystem(state.rho()).expect("density operator is Hermitian");
    let yy = kron(&pauli::y::<T>(), &pauli::y::<T>());
    let w: Vec<Vec<Complex<T>>> = (0..4)
        .map(|k| {
            let amp = es.values[k].max(T::zero()).sqrt();
            es.vector(k).into_iter().map(|z| z * amp).collect()
        })
        .collect();
    let flipped: Vec<Vec<Complex<T>>> = w
        .iter()
        .map(|wj| {
            let conj: Vec<Complex<T>> = wj.iter().map(|z| z.conj()).collect();
            (0..4).map(|r| (0..4).map(|c| yy[(r, c)] * conj[c]).sum()).collect()
        })
        .collect();
    let mut dilation = ComplexMatrix::<T>::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            let tau: Complex<T> = (0..4).map(|r| w[i][r].conj() * flipped[j][r]).sum();
            dilation[(i, 4 + j)] = tau;
            dilation[(4 + j, i)] = tau.conj();
        }
    }
    let sv = hermitian_eigensystem(&dilation)
        .expect("Hermitian by construction")
        .values;
    (sv[0] - sv[1] - sv[2] - sv[3]).max(T::zero()).min(T::one())
}

/// Binary entropy in bits with `h(0) = h(1) = 0`.
pub fn binary_entropy<T: Real>(x: T) -> T {
    let term = |p: T| if p <= T::zero() { T::zero() } else { -p * p.log2() };
    term(x) + term(T::one() - x)
}

/// Entanglement of formation `h((1 + √(1 − C²))/2)`.
pub fn eof_from_concurrence<T: Real>(c: T) -> T {
    if c <= T::zero() {
        return T::zero();
    }
    if c >= T::one() {
        return T::one();
    }
    let x = (T::one() + (T::one() - c * c).sqrt()) * T::c(0.5);
    binary_entropy(x)
}

pub fn eof<T: Real>(state: &TwoQubitState<T>) -> T {
    eof_from_concurrence(concurrence(state))
}

/// `tr(ρ²)`.
pub fn purity<T: Real>(state: &TwoQubitState<T>) -> T {
    let rho = state.rho();
    rho.trace_product(rho).re
}

/// `max_θ ⟨φ+|U_θ† ρ U_θ|φ+⟩` with `U_θ = exp(−iθZ/2) ⊗ I`, and the
/// maximizing `θ` in radians, `(-π, π]`.
///
/// `F(θ) = (ρ_HH,HH + ρ_VV,VV)/2 + Re(e^{iθ} ρ_HH,VV)`, so the maximum is
/// `(ρ_HH,HH + ρ_VV,VV)/2 + |ρ_HH,VV|` at `θ = −arg ρ_HH,VV`. When the
/// coherence vanishes `θ = 0`.
pub fn max_fidelity<T: Real>(state: &TwoQubitState<T>) -> (T, T) {
    let diag = (state.entry(HH, HH).re + state.entry(VV, VV).re) * T::c(0.5);
    let coh: Complex<T> = state.entry(HH, VV);
    let theta = if coh.is_zero() {
        T::zero()
    } else {
        reduce_phase(-coh.arg())
    };
    ((diag + coh.norm()).min(T::one()), theta)
}

/// `⟨φ+|U_θ† ρ U_θ|φ+⟩` at a fixed `θ` (radians).
pub fn fidelity_at<T: Real>(state: &TwoQubitState<T>, theta: T) -> T {
    let diag = (state.entry(HH, HH).re + state.entry(VV, VV).re) * T::c(0.5);
    let coh = state.entry(HH, VV);
    diag + (Complex::from_polar(T::one(), theta) * coh).re
}
