//! Atom–photon entangled source and the Stokes read-out that maps the
//! atomic rail onto a second photon's polarization.
//!
//! The atomic rail `{k₊, k₋}` occupies the first tensor factor and becomes
//! the Stokes polarization `{H, V}` on read-out; the anti-Stokes
//! polarization (`path₊ → H`, `path₋ → V`) is the second factor.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::quantum::{kron, normalize_to_state, ComplexMatrix, TwoQubitState, ZERO_TRACE};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceConfig<T: Real = f64> {
    /// Amplitude of `|k₊, H⟩`.
    pub alpha: Complex<T>,
    /// Amplitude of `|k₋, V⟩`.
    pub beta: Complex<T>,
    /// Fraction by which the path coherence is damped, in `[0, 1]`.
    pub dephasing: T,
    /// Weight of the maximally mixed admixture, in `[0, 1]`.
    pub white_noise: T,
    /// Relative phase between write and read branches, radians.
    pub read_phase: T,
}

impl<T: Real> SourceConfig<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>, dephasing: T, white_noise: T, read_phase: T) -> Result<Self> {
        let cfg = Self {
            alpha,
            beta,
            dephasing,
            white_noise,
            read_phase,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `α = β = 1/√2`, noiseless.
    pub fn ideal() -> Self {
        let a = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        Self {
            alpha: a,
            beta: a,
            dephasing: T::zero(),
            white_noise: T::zero(),
            read_phase: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if !((norm - T::one()).abs() <= T::tol(1e-12)) {
            return Err(Error::param(
                "alpha/beta",
                format!("|alpha|^2 + |beta|^2 = {norm}, expected 1"),
            ));
        }
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !unit(self.dephasing) {
            return Err(Error::param(
                "dephasing",
                format!("must be in [0, 1], got {}", self.dephasing),
            ));
        }
        if !unit(self.white_noise) {
            return Err(Error::param(
                "white_noise",
                format!("must be in [0, 1], got {}", self.white_noise),
            ));
        }
        if !self.read_phase.is_finite() {
            return Err(Error::param("read_phase", "must be finite"));
        }
        Ok(())
    }
}

/// Joint state of the atomic rail and the anti-Stokes polarization:
/// `α|k₊,H⟩ + β e^{iφ}|k₋,V⟩`, coherences scaled by `1 − dephasing`, then
/// mixed with `white_noise · I/4`.
pub fn atom_photon_state<T: Real>(cfg: &SourceConfig<T>) -> Result<TwoQubitState<T>> {
    cfg.validate()?;
    let ket = [
        cfg.alpha,
        Complex::zero(),
        Complex::zero(),
        cfg.beta * Complex::from_polar(T::one(), cfg.read_phase),
    ];
    let mut rho = ComplexMatrix::projector(&ket);
    let keep = T::one() - cfg.dephasing;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                rho[(i, j)] = rho[(i, j)] * keep;
            }
        }
    }
    let w = cfg.white_noise;
    let mixed = &rho.scale(T::one() - w) + &ComplexMatrix::identity(4).scale(w * T::c(0.25));
    normalize_to_state(&mixed)
}

/// Maps the atomic rail onto the Stokes polarization (`k₊ → H`, `k₋ → V`).
///
/// With `readout_balance = w ≠ 1/2` the two rails are read with unequal
/// efficiency, modelled by the filter `diag(√w, √(1−w))` on the first
/// factor followed by renormalization.
pub fn read_out<T: Real>(state: &TwoQubitState<T>, readout_balance: T) -> Result<TwoQubitState<T>> {
    if !(readout_balance >= T::zero() && readout_balance <= T::one()) {
        return Err(Error::param(
            "readout_balance",
            format!("must be in [0, 1], got {readout_balance}"),
        ));
    }
    if readout_balance == T::c(0.5) {
        return Ok(state.clone());
    }
    let filter = ComplexMatrix::from_real_diag(&[readout_balance.sqrt(), (T::one() - readout_balance).sqrt()]);
    let op = kron(&filter, &ComplexMatrix::identity(2));
    let unnorm = state.rho().conjugate_by(&op);
    let p = unnorm.trace().re;
    if !(p > T::tol(ZERO_TRACE)) {
        return Err(Error::ZeroSuccess(p.as_f64()));
    }
    normalize_to_state(&unnorm)
}

/// `U_θ = exp(−iθZ/2) ⊗ I`.
pub fn phase_rotation<T: Real>(theta: T) -> ComplexMatrix<T> {
    let half = theta * T::c(0.5);
    let z = ComplexMatrix::from_diag(&[
        Complex::from_polar(T::one(), -half),
        Complex::from_polar(T::one(), half),
    ]);
    kron(&z, &ComplexMatrix::identity(2))
}

/// `p · U_θ|φ+⟩⟨φ+|U_θ† + (1−p) · I/4`.
pub fn werner_state<T: Real>(p: T, theta: T) -> Result<TwoQubitState<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::param("p", format!("must be in [0, 1], got {p}")));
    }
    if !theta.is_finite() {
        return Err(Error::param("theta", "must be finite"));
    }
    let bell = TwoQubitState::<T>::phi_plus()
        .into_rho()
        .conjugate_by(&phase_rotation(theta));
    let mixed = &bell.scale(p) + &ComplexMatrix::identity(4).scale((T::one() - p) * T::c(0.25));
    normalize_to_state(&mixed)
}

/// Scalar metadata of the experimental sequence. Carried into reports; no
/// computational role.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMetadata {
    pub detuning_mhz: f64,
    pub write_pulse_ns: f64,
    pub read_pulse_ns: f64,
    pub init_pulse_ns: f64,
    pub trials_per_cycle: u32,
    pub mot_load_ms: f64,
    pub repetition_hz: f64,
    pub coincidence_window_ns: f64,
}

impl Default for ScenarioMetadata {
    fn default() -> Self {
        Self {
            detuning_mhz: 10.0,
            write_pulse_ns: 70.0,
            read_pulse_ns: 100.0,
            init_pulse_ns: 200.0,
            trials_per_cycle: 990,
            mot_load_ms: 20.0,
            repetition_hz: 47_000.0,
            coincidence_window_ns: 64.0,
        }
    }
}
