//! Dual-polarization frequency conversion treated as a frequency-domain
//! beamsplitter per polarization.
//!
//! Mode order for the single-photon sector is `(u,H), (u,V), (l,H), (l,V)`
//! where `u` is the upper (780 nm) and `l` the lower (1522 nm) frequency.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::quantum::{kron, normalize_to_state, ComplexMatrix, TwoQubitState, ZERO_TRACE};
use crate::scalar::Real;

/// Wavelengths of the three interacting fields. Informational only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyMeta {
    pub lambda_upper_nm: f64,
    pub lambda_lower_nm: f64,
    pub lambda_pump_nm: f64,
}

impl Default for FrequencyMeta {
    fn default() -> Self {
        Self {
            lambda_upper_nm: 780.0,
            lambda_lower_nm: 1522.0,
            lambda_pump_nm: 1600.0,
        }
    }
}

/// Pump-derived converter parameters.
///
/// `theta_h`/`theta_v` are the coupling-times-length products `|ξ|τ` for
/// each polarization, `phi_h`/`phi_v` the pump phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfcConfig<T: Real = f64> {
    pub theta_h: T,
    pub theta_v: T,
    pub phi_h: T,
    pub phi_v: T,
    /// Polarization-independent transmission of the fixed optics after the
    /// crystal; multiplies the postselection probability.
    pub transmission: T,
    pub freq: FrequencyMeta,
}

/// Reduces an angle to `(-π, π]`.
pub fn reduce_phase<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let r = x - two_pi * ((x - T::PI()) / two_pi).ceil();
    if r <= -T::PI() {
        r + two_pi
    } else {
        r
    }
}

impl<T: Real> QfcConfig<T> {
    pub fn new(theta_h: T, theta_v: T, phi_h: T, phi_v: T) -> Result<Self> {
        for (field, v) in [("theta_h", theta_h), ("theta_v", theta_v)] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::param(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        for (field, v) in [("phi_h", phi_h), ("phi_v", phi_v)] {
            if !v.is_finite() {
                return Err(Error::param(field, "must be finite"));
            }
        }
        Ok(Self {
            theta_h,
            theta_v,
            phi_h: reduce_phase(phi_h),
            phi_v: reduce_phase(phi_v),
            transmission: T::one(),
            freq: FrequencyMeta::default(),
        })
    }

    /// Equal conversion for both polarizations.
    pub fn balanced(theta: T, phi_h: T, phi_v: T) -> Result<Self> {
        Self::new(theta, theta, phi_h, phi_v)
    }

    pub fn with_transmission(mut self, transmission: T) -> Result<Self> {
        if !(transmission > T::zero() && transmission <= T::one()) {
            return Err(Error::param(
                "transmission",
                format!("must be in (0, 1], got {transmission}"),
            ));
        }
        self.transmission = transmission;
        Ok(self)
    }

    /// `t_H, t_V = cos θ`.
    pub fn transmission_amplitudes(&self) -> [T; 2] {
        [self.theta_h.cos(), self.theta_v.cos()]
    }

    /// `r_H, r_V = e^{iφ} sin θ`.
    pub fn reflection_amplitudes(&self) -> [Complex<T>; 2] {
        [
            Complex::from_polar(self.theta_h.sin(), self.phi_h),
            Complex::from_polar(self.theta_v.sin(), self.phi_v),
        ]
    }

    /// `T_H, T_V`.
    pub fn transmittances(&self) -> [T; 2] {
        let [th, tv] = self.transmission_amplitudes();
        [th * th, tv * tv]
    }

    /// `R_H, R_V`.
    pub fn reflectances(&self) -> [T; 2] {
        let [sh, sv] = [self.theta_h.sin(), self.theta_v.sin()];
        [sh * sh, sv * sv]
    }

    /// Phase written onto `V` relative to `H` by the postselected channel,
    /// `φ_H − φ_V` in `(-π, π]`.
    pub fn channel_phase(&self) -> T {
        reduce_phase(self.phi_h - self.phi_v)
    }
}

/// One photon spread over the four frequency/polarization modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourModeState<T: Real = f64> {
    amps: [Complex<T>; 4],
}

impl<T: Real> FourModeState<T> {
    pub fn new(amps: [Complex<T>; 4]) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::tol(ZERO_TRACE)) || !norm.is_finite() {
            return Err(Error::InvalidState("four-mode state has zero norm".into()));
        }
        Ok(Self {
            amps: amps.map(|z| z / norm),
        })
    }

    /// Photon in the upper-frequency band with polarization `(h, v)`.
    pub fn upper(h: Complex<T>, v: Complex<T>) -> Result<Self> {
        Self::new([h, v, Complex::zero(), Complex::zero()])
    }

    pub fn amplitudes(&self) -> &[Complex<T>; 4] {
        &self.amps
    }

    pub fn upper_probability(&self) -> T {
        self.amps[0].norm_sqr() + self.amps[1].norm_sqr()
    }

    pub fn lower_probability(&self) -> T {
        self.amps[2].norm_sqr() + self.amps[3].norm_sqr()
    }

    /// Applies a mode transform in the state picture.
    pub fn evolve(&self, u: &ComplexMatrix<T>) -> Self {
        assert_eq!((u.rows(), u.cols()), (4, 4));
        let mut out = [Complex::zero(); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..4 {
                *o = *o + u[(i, j)] * self.amps[j];
            }
        }
        Self { amps: out }
    }
}

/// Single-photon mode transform of the converter. For each polarization
/// `X` the block on `((u,X), (l,X))` is `[[t_X, -r_X], [r_X*, t_X]]`.
pub fn mode_transform<T: Real>(cfg: &QfcConfig<T>) -> ComplexMatrix<T> {
    let t = cfg.transmission_amplitudes();
    let r = cfg.reflection_amplitudes();
    let mut u = ComplexMatrix::zeros(4, 4);
    for x in 0..2 {
        let (up, lo) = (x, x + 2);
        u[(up, up)] = Complex::new(t[x], T::zero());
        u[(up, lo)] = -r[x];
        u[(lo, up)] = r[x].conj();
        u[(lo, lo)] = Complex::new(t[x], T::zero());
    }
    u
}

/// Kraus operator of the postselected converter on one polarization qubit,
/// `diag(r_H*, r_V*)`: the amplitude of an upper-band photon reaching the
/// lower band.
pub fn conversion_kraus<T: Real>(cfg: &QfcConfig<T>) -> ComplexMatrix<T> {
    let [rh, rv] = cfg.reflection_amplitudes();
    ComplexMatrix::from_diag(&[rh.conj(), rv.conj()])
}

/// Which photon of the pair is sent through the converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    /// First tensor factor.
    Stokes,
    /// Second tensor factor.
    AntiStokes,
}

/// Sends one photon of the pair through the converter and keeps only the
/// events where it emerged in the lower band.
///
/// Returns the conditional state and the postselection probability
/// (including `cfg.transmission`).
pub fn apply_qfc_postselected<T: Real>(
    rho_in: &TwoQubitState<T>,
    cfg: &QfcConfig<T>,
    arm: Arm,
) -> Result<(TwoQubitState<T>, T)> {
    let k = conversion_kraus(cfg);
    let id = ComplexMatrix::identity(2);
    let op = match arm {
        Arm::Stokes => kron(&k, &id),
        Arm::AntiStokes => kron(&id, &k),
    };
    let unnorm = rho_in.rho().conjugate_by(&op);
    let p = unnorm.trace().re;
    if !(p > T::tol(ZERO_TRACE)) {
        return Err(Error::ZeroSuccess(p.as_f64()));
    }
    let out = normalize_to_state(&unnorm)?;
    Ok((out, p * cfg.transmission))
}

/// Named regimes of the dual-polarization converter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatingPoint<T: Real = f64> {
    /// No conversion on either polarization.
    Identity,
    /// `T = R = 1/2` for both polarizations.
    HalfBs,
    /// One polarization fully transmitted, the other fully converted.
    FrequencyPbs,
    /// Unequal partial conversion.
    Ppbs,
    /// Equal conversion on both polarizations, with common reflectance `R`.
    PolarizationInsensitive(T),
}

/// Classifies a configuration by its transmittances `T_X = cos²θ_X`.
///
/// Checked in order: identity, half beamsplitter, polarization insensitive
/// (`T_H ≈ T_V`), frequency PBS (`{T_H, T_V} ≈ {1, 0}`); everything else is
/// a partially-polarizing beamsplitter.
pub fn classify_operating_point<T: Real>(cfg: &QfcConfig<T>, tol: T) -> Result<OperatingPoint<T>> {
    if !(tol > T::zero() && tol < T::c(0.1)) {
        return Err(Error::param("tol", format!("must be in (0, 0.1), got {tol}")));
    }
    let [th, tv] = cfg.transmittances();
    let [rh, rv] = cfg.reflectances();
    let near = |a: T, b: T| (a - b).abs() <= tol;
    let half = T::c(0.5);
    let one = T::one();
    let zero = T::zero();

    Ok(if near(rh, zero) && near(rv, zero) {
        OperatingPoint::Identity
    } else if near(th, half) && near(tv, half) {
        OperatingPoint::HalfBs
    } else if near(th, tv) {
        OperatingPoint::PolarizationInsensitive((rh + rv) * half)
    } else if (near(th, one) && near(tv, zero)) || (near(th, zero) && near(tv, one)) {
        OperatingPoint::FrequencyPbs
    } else {
        OperatingPoint::Ppbs
    })
}
