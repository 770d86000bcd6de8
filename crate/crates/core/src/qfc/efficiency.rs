//! Pump-power dependence of the end-to-end conversion efficiency,
//! `η(P) = η_max · sin²(√(g·P))`, and its least-squares calibration.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyModel<T: Real = f64> {
    pub eta_max: T,
    /// 1/W.
    pub g: T,
}

impl<T: Real> EfficiencyModel<T> {
    pub fn new(eta_max: T, g: T) -> Result<Self> {
        if !(eta_max >= T::zero() && eta_max <= T::one()) {
            return Err(Error::param("eta_max", format!("must be in [0, 1], got {eta_max}")));
        }
        if !(g > T::zero()) || !g.is_finite() {
            return Err(Error::param("g", format!("must be finite and > 0, got {g}")));
        }
        Ok(Self { eta_max, g })
    }

    /// Pump power of the first efficiency maximum, `(π/2)²/g`.
    pub fn peak_power(&self) -> T {
        let half_pi = T::FRAC_PI_2();
        half_pi * half_pi / self.g
    }

    /// Smallest pump power reaching `target`.
    pub fn power_for_efficiency(&self, target: T) -> Result<T> {
        if !(target >= T::zero()) {
            return Err(Error::param("target", format!("must be >= 0, got {target}")));
        }
        if target > self.eta_max {
            return Err(Error::UnreachableTarget {
                target: target.as_f64(),
                eta_max: self.eta_max.as_f64(),
            });
        }
        let ratio = if self.eta_max > T::zero() {
            (target / self.eta_max).min(T::one())
        } else {
            T::zero()
        };
        let u = ratio.sqrt().asin();
        Ok(u * u / self.g)
    }
}

/// `η_max · sin²(√(g·P))`.
pub fn efficiency<T: Real>(model: &EfficiencyModel<T>, pump_power_w: T) -> Result<T> {
    if !(pump_power_w >= T::zero()) {
        return Err(Error::NegativePower(pump_power_w.as_f64()));
    }
    Ok(eval(model.eta_max, model.g, pump_power_w))
}

#[inline]
fn eval<T: Real>(eta_max: T, g: T, p: T) -> T {
    let s = (g * p).sqrt().sin();
    eta_max * s * s
}

/// `(∂η/∂η_max, ∂η/∂g)`.
#[inline]
fn gradient<T: Real>(eta_max: T, g: T, p: T) -> (T, T) {
    let u = (g * p).sqrt();
    let s = u.sin();
    // d/dg sin²(√(gP)) = P · sin(2u)/(2u)
    let two_u = u + u;
    let sinc = if two_u > T::c(1e-8) {
        two_u.sin() / two_u
    } else {
        T::one() - two_u * two_u / T::c(6.0)
    };
    (s * s, eta_max * p * sinc)
}

/// Levenberg–Marquardt settings for [`fit_efficiency`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop when an accepted step changes the residual sum of squares by
    /// less than this fraction.
    pub rel_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            rel_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyFit<T: Real = f64> {
    pub model: EfficiencyModel<T>,
    /// Residual sum of squares.
    pub residual: T,
    pub iterations: usize,
}

/// Least-squares calibration of `(η_max, g)` from `(power_W, efficiency)`
/// pairs with the default [`FitOptions`].
pub fn fit_efficiency<T: Real>(data: &[(T, T)]) -> Result<EfficiencyFit<T>> {
    fit_efficiency_with(data, FitOptions::default())
}

/// Damped Gauss–Newton fit started from `η_max = max y`,
/// `g = (π/2)² / P(argmax y)`.
pub fn fit_efficiency_with<T: Real>(data: &[(T, T)], opts: FitOptions) -> Result<EfficiencyFit<T>> {
    validate(data)?;

    let (p_at_max, y_max) =
        data.iter().copied().fold(
            (T::zero(), T::neg_infinity()),
            |best, (p, y)| if y > best.1 { (p, y) } else { best },
        );
    let p_ref = if p_at_max > T::zero() {
        p_at_max
    } else {
        data.iter().map(|d| d.0).fold(T::zero(), T::max)
    };
    let half_pi = T::FRAC_PI_2();
    let mut a = y_max;
    let mut g = half_pi * half_pi / p_ref;

    let sse = |a: T, g: T| -> T {
        data.iter()
            .map(|&(p, y)| {
                let r = eval(a, g, p) - y;
                r * r
            })
            .sum()
    };
    let y_scale: T = data.iter().map(|d| d.1 * d.1).sum::<T>().max(T::one());
    let floor = T::epsilon() * T::epsilon() * y_scale;

    let mut s = sse(a, g);
    let mut lambda = T::c(1e-3);
    let rel_tol = T::c(opts.rel_tol);

    for iter in 1..=opts.max_iterations {
        if s <= floor {
            return finish(a, g, s, iter - 1);
        }
        // normal equations
        let (mut jaa, mut jag, mut jgg, mut ga, mut gg) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        for &(p, y) in data {
            let r = eval(a, g, p) - y;
            let (da, dg) = gradient(a, g, p);
            jaa = jaa + da * da;
            jag = jag + da * dg;
            jgg = jgg + dg * dg;
            ga = ga + da * r;
            gg = gg + dg * r;
        }
        let diag_floor = T::c(1e-12) * (jaa + jgg).max(T::min_positive_value());
        let mut accepted = false;
        while lambda < T::c(1e16) {
            let m11 = jaa + lambda * jaa.max(diag_floor);
            let m22 = jgg + lambda * jgg.max(diag_floor);
            let det = m11 * m22 - jag * jag;
            if !(det > T::zero()) {
                lambda = lambda * T::c(10.0);
                continue;
            }
            let da = -(m22 * ga - jag * gg) / det;
            let dg = -(m11 * gg - jag * ga) / det;
            let (na, ng) = (a + da, g + dg);
            if !na.is_finite() || !ng.is_finite() {
                return Err(Error::FitDiverged(format!("non-finite parameters at iteration {iter}")));
            }
            let ns = if ng > T::zero() { sse(na, ng) } else { T::infinity() };
            if ns <= s {
                let change = s - ns;
                a = na;
                g = ng;
                let prev = s;
                s = ns;
                lambda = (lambda / T::c(10.0)).max(T::c(1e-12));
                accepted = true;
                if change <= rel_tol * prev {
                    return finish(a, g, s, iter);
                }
                break;
            }
            lambda = lambda * T::c(10.0);
        }
        if !accepted {
            // no downhill step at any damping: stationary point
            return finish(a, g, s, iter);
        }
    }
    Err(Error::FitDiverged(format!(
        "no convergence within {} iterations (residual {})",
        opts.max_iterations, s
    )))
}

fn finish<T: Real>(a: T, g: T, residual: T, iterations: usize) -> Result<EfficiencyFit<T>> {
    // a tiny negative amplitude can appear on flat data
    let a = a.max(T::zero()).min(T::one());
    Ok(EfficiencyFit {
        model: EfficiencyModel::new(a, g)?,
        residual,
        iterations,
    })
}

fn validate<T: Real>(data: &[(T, T)]) -> Result<()> {
    if data.len() < 3 {
        return Err(Error::InsufficientData(data.len()));
    }
    for &(p, y) in data {
        if !(p >= T::zero()) || !p.is_finite() {
            return Err(Error::param(
                "pump_power_W",
                format!("must be finite and >= 0, got {p}"),
            ));
        }
        if !(y >= T::zero() && y <= T::one()) {
            return Err(Error::param("efficiency", format!("must be in [0, 1], got {y}")));
        }
    }
    let mut powers: Vec<T> = data.iter().map(|d| d.0).collect();
    powers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if powers.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param("pump_power_W", "powers must be distinct"));
    }
    Ok(())
}

/// Parses calibration text: one `power_W efficiency` pair per line, `#`
/// starts a comment, blank lines ignored.
pub fn parse_calibration(text: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(format!(
                "line {}: expected `power_W efficiency`, got {:?}",
                lineno + 1,
                raw
            ));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("line {}: invalid number {:?}", lineno + 1, s))
        };
        out.push((parse(fields[0])?, parse(fields[1])?));
    }
    Ok(out)
}
