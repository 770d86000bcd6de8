//! Iterative maximum-likelihood (RρR) reconstruction from single-port
//! coincidence records, and Poisson-bootstrap error bars on the metrics.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measurement::{projector_rank, CountRecord};
use crate::metrics::MetricsReport;
use crate::qfc::reduce_phase;
use crate::quantum::{hermitian_eigensystem, normalize_to_state, ComplexMatrix, TwoQubitState};
use crate::random::derive_seed;
use crate::scalar::Real;

/// Dilution below which a rejected step is taken as a stationary point.
const MIN_DILUTION: f64 = 1e-9;
/// Cap on the step ratio used to project the remaining likelihood gain.
const MAX_RATIO: f64 = 0.999;
/// Floor on predicted probabilities inside logarithms and ratios.
const PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Relative log-likelihood change that ends the iteration. The change
    /// is the projected remaining gain, extrapolated geometrically from the
    /// last two steps.
    pub convergence_tol: f64,
    /// Mixing factor in `(0, 1]` between the identity and the RρR step.
    pub dilution: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            convergence_tol: 1e-10,
            dilution: 1.0,
        }
    }
}

impl MleOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations", "must be positive"));
        }
        if !(self.convergence_tol > 0.0) || !self.convergence_tol.is_finite() {
            return Err(Error::param("convergence_tol", "must be finite and > 0"));
        }
        if !(self.dilution > 0.0 && self.dilution <= 1.0) {
            return Err(Error::param(
                "dilution",
                format!("must lie in (0, 1], got {}", self.dilution),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult<T: Real = f64> {
    pub rho: TwoQubitState<T>,
    pub log_likelihood: T,
    pub iterations_used: usize,
    /// `false` when the iteration budget ran out first.
    pub converged: bool,
}

/// Preprocessed records: weighted analyzer kets and observed frequencies.
struct Problem<T: Real> {
    kets: Vec<Vec<Complex<T>>>,
    weights: Vec<T>,
    counts: Vec<T>,
    freqs: Vec<T>,
    /// `(Σ_j w_j |m_j⟩⟨m_j|)^{-1}`.
    g_inv: ComplexMatrix<T>,
}

impl<T: Real> Problem<T> {
    fn new(records: &[CountRecord<T>]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyRecords);
        }
        // canonical order, so the result does not depend on record order
        // even through rounding
        let mut sorted: Vec<&CountRecord<T>> = records.iter().collect();
        sorted.sort_by(|a, b| {
            let key = |r: &CountRecord<T>| {
                let s = r.setting;
                [s.qwp_s, s.hwp_s, s.qwp_as, s.hwp_as, r.acquisition_weight]
            };
            key(a)
                .iter()
                .zip(key(b).iter())
                .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.count.cmp(&b.count))
        });
        let records = sorted;
        let kets: Vec<_> = records.iter().map(|r| r.setting.ket()).collect();
        let weights: Vec<T> = records.iter().map(|r| r.acquisition_weight).collect();
        if weights.iter().any(|w| !(*w > T::zero()) || !w.is_finite()) {
            return Err(Error::param("acquisition_weight", "must be finite and > 0"));
        }
        let projectors: Vec<_> = kets.iter().map(|k| ComplexMatrix::projector(k)).collect();
        let rank = projector_rank(&projectors);
        if rank < 16 {
            return Err(Error::NotInformationallyComplete(rank));
        }
        let total: u64 = records.iter().map(|r| r.count).sum();
        if total == 0 {
            return Err(Error::AllZeroCounts);
        }
        let counts: Vec<T> = records.iter().map(|r| T::c(r.count as f64)).collect();
        let n = T::c(total as f64);
        let freqs = counts.iter().map(|&c| c / n).collect();

        let mut g = ComplexMatrix::zeros(4, 4);
        for (p, &w) in projectors.iter().zip(&weights) {
            g = &g + &p.scale(w);
        }
        let g_inv = hermitian_eigensystem(&g.hermitian_part())?.reassemble(|x| T::one() / x);
        Ok(Self {
            kets,
            weights,
            counts,
            freqs,
            g_inv,
        })
    }

    /// Unnormalized predicted rates `w_j ⟨m_j|ρ|m_j⟩`.
    fn rates(&self, rho: &ComplexMatrix<T>) -> Vec<T> {
        let floor = T::c(PROB_FLOOR).max(T::min_positive_value());
        self.kets
            .iter()
            .zip(&self.weights)
            .map(|(k, &w)| (w * rho.expectation(k).re).max(floor))
            .collect()
    }

    fn log_likelihood(&self, rho: &ComplexMatrix<T>) -> T {
        let rates = self.rates(rho);
        let total: T = rates.iter().copied().sum();
        self.counts
            .iter()
            .zip(&rates)
            .filter(|(c, _)| **c > T::zero())
            .map(|(&c, &r)| c * (r / total).ln())
            .sum()
    }

    /// `G⁻¹ R` with `R = S · Σ_j f_j w_j |m_j⟩⟨m_j| / rate_j` and
    /// `S = Σ_l rate_l`, so that the operator is the identity at the optimum.
    fn step_operator(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let rates = self.rates(rho);
        let s: T = rates.iter().copied().sum();
        let mut r = ComplexMatrix::zeros(4, 4);
        for (j, k) in self.kets.iter().enumerate() {
            if self.freqs[j] > T::zero() {
                let coef = s * self.freqs[j] * self.weights[j] / rates[j];
                r = &r + &ComplexMatrix::projector(k).scale(coef);
            }
        }
        self.g_inv.matmul(&r)
    }
}

/// Trace-normalized Hermitian part of `a ρ a†`.
fn apply_step<T: Real>(rho: &ComplexMatrix<T>, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let m = rho.conjugate_by(a).hermitian_part();
    let tr = m.trace().re;
    m.scale(T::one() / tr)
}

fn mix_with_identity<T: Real>(a: &ComplexMatrix<T>, d: T) -> ComplexMatrix<T> {
    let id = ComplexMatrix::identity(4).scale(T::one() - d);
    &id + &a.scale(d)
}

/// Maximum-likelihood two-qubit state for the records.
///
/// Predicted probabilities are normalized over the whole record set, since
/// each setting records only the transmitted port. Running out of
/// iterations is reported through `converged`, not as an error.
pub fn mle_reconstruct<T: Real>(records: &[CountRecord<T>], opts: &MleOptions) -> Result<ReconstructionResult<T>> {
    mle_reconstruct_traced(records, opts).map(|(r, _)| r)
}

/// [`mle_reconstruct`] that also returns the log-likelihood of the start
/// state and of every accepted iterate.
pub fn mle_reconstruct_traced<T: Real>(
    records: &[CountRecord<T>],
    opts: &MleOptions,
) -> Result<(ReconstructionResult<T>, Vec<T>)> {
    opts.validate()?;
    let problem = Problem::new(records)?;
    let tol = T::c(opts.convergence_tol);
    let min_d = T::c(MIN_DILUTION);

    let mut rho = ComplexMatrix::identity(4).scale(T::c(0.25));
    let mut ll = problem.log_likelihood(&rho);
    let mut history = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    let mut prev_delta = T::zero();

    while iterations < opts.max_iterations {
        iterations += 1;
        let a = problem.step_operator(&rho);
        let mut d = T::c(opts.dilution);
        let accepted = loop {
            let cand = apply_step(&rho, &mix_with_identity(&a, d));
            if cand.is_finite() {
                let cand_ll = problem.log_likelihood(&cand);
                if cand_ll >= ll {
                    break Some((cand, cand_ll));
                }
            }
            d = d / T::c(2.0);
            if d < min_d {
                break None;
            }
        };
        let Some((next, next_ll)) = accepted else {
            // no ascent direction left at working precision
            converged = true;
            break;
        };
        let delta = next_ll - ll;
        rho = next;
        ll = next_ll;
        history.push(ll);
        // RρR converges linearly, so a small step can still leave a large
        // remaining gain; project it from the ratio of successive steps.
        let ratio = if prev_delta > T::zero() {
            (delta / prev_delta).min(T::c(MAX_RATIO))
        } else {
            T::zero()
        };
        let remaining = delta * (T::one() / (T::one() - ratio)).max(T::one());
        prev_delta = delta;
        if remaining <= tol * ll.abs().max(T::one()) {
            converged = true;
            break;
        }
    }

    let state = normalize_to_state(&rho)?;
    let log_likelihood = problem.log_likelihood(state.rho());
    Ok((
        ReconstructionResult {
            rho: state,
            log_likelihood,
            iterations_used: iterations,
            converged,
        },
        history,
    ))
}

/// Figures of merit that [`bootstrap_metrics`] can summarize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Concurrence,
    Eof,
    Purity,
    MaxFidelity,
    /// Maximizing rotation angle in degrees.
    ThetaStar,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Concurrence,
        Metric::Eof,
        Metric::Purity,
        Metric::MaxFidelity,
        Metric::ThetaStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Concurrence => "concurrence",
            Metric::Eof => "eof",
            Metric::Purity => "purity",
            Metric::MaxFidelity => "max_fidelity",
            Metric::ThetaStar => "theta_star_deg",
        }
    }

    pub fn of<T: Real>(self, m: &MetricsReport<T>) -> T {
        match self {
            Metric::Concurrence => m.concurrence,
            Metric::Eof => m.eof,
            Metric::Purity => m.purity,
            Metric::MaxFidelity => m.max_fidelity,
            Metric::ThetaStar => m.theta_star_deg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStat {
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator).
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSummary {
    pub stats: BTreeMap<Metric, MetricStat>,
    pub resamples: usize,
    pub failures: usize,
}

impl BootstrapSummary {
    pub fn failure_fraction(&self) -> f64 {
        self.failures as f64 / self.resamples as f64
    }
}

/// Poisson-bootstrap mean and spread of `metrics`.
///
/// Resample `i` draws `count'_j ~ Poisson(count_j)` from a generator seeded
/// with `derive_seed(seed, i)`, so results do not depend on thread count.
/// Resamples whose reconstruction fails are dropped and counted. Angles
/// are unwrapped around the estimate from the original records.
pub fn bootstrap_metrics<T: Real>(
    records: &[CountRecord<T>],
    opts: &MleOptions,
    resamples: usize,
    seed: u64,
    metrics: &[Metric],
) -> Result<BootstrapSummary> {
    if resamples < 10 {
        return Err(Error::param("resamples", format!("must be >= 10, got {resamples}")));
    }
    let point = MetricsReport::of(&mle_reconstruct(records, opts)?.rho);
    let theta_ref = point.theta_star_deg.as_f64();

    let outcomes: Vec<Option<MetricsReport<T>>> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let resampled: Vec<CountRecord<T>> = records
                .iter()
                .map(|r| CountRecord {
                    count: if r.count == 0 {
                        0
                    } else {
                        Poisson::new(r.count as f64).expect("positive rate").sample(&mut rng) as u64
                    },
                    ..*r
                })
                .collect();
            mle_reconstruct(&resampled, opts)
                .ok()
                .map(|res| MetricsReport::of(&res.rho))
        })
        .collect();

    let ok: Vec<&MetricsReport<T>> = outcomes.iter().flatten().collect();
    let failures = resamples - ok.len();
    let mut stats = BTreeMap::new();
    for &metric in metrics {
        let values: Vec<f64> = ok
            .iter()
            .map(|m| {
                let v = metric.of(*m).as_f64();
                if metric == Metric::ThetaStar {
                    theta_ref + reduce_phase((v - theta_ref).to_radians()).to_degrees()
                } else {
                    v
                }
            })
            .collect();
        stats.insert(metric, mean_std(&values));
    }
    Ok(BootstrapSummary {
        stats,
        resamples,
        failures,
    })
}

fn mean_std(v: &[f64]) -> MetricStat {
    let n = v.len();
    if n == 0 {
        return MetricStat {
            mean: f64::NAN,
            std: f64::NAN,
        };
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    MetricStat { mean, std }
}
