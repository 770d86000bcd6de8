//! Polarization analyzers (QWP → HWP → PBS, one detector per arm) and
//! Poissonian coincidence-count simulation.

use std::fmt::Write as _;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::quantum::{kron_vec, span_rank, ComplexMatrix, PolarizationKet, TwoQubitState};
use crate::scalar::Real;

/// Half-wave plate at fast-axis angle `theta`:
/// `[[cos2θ, sin2θ], [sin2θ, −cos2θ]]`.
pub fn hwp<T: Real>(theta: T) -> ComplexMatrix<T> {
    let (s, c) = (theta + theta).sin_cos();
    ComplexMatrix::from_rows(&[
        vec![Complex::new(c, T::zero()), Complex::new(s, T::zero())],
        vec![Complex::new(s, T::zero()), Complex::new(-c, T::zero())],
    ])
    .expect("2x2")
}

/// Quarter-wave plate at fast-axis angle `theta`:
/// `[[cos²θ + i sin²θ, (1−i) sinθ cosθ], [(1−i) sinθ cosθ, sin²θ + i cos²θ]]`.
pub fn qwp<T: Real>(theta: T) -> ComplexMatrix<T> {
    let (s, c) = theta.sin_cos();
    let off = Complex::new(s * c, -s * c);
    ComplexMatrix::from_rows(&[
        vec![Complex::new(c * c, s * s), off],
        vec![off, Complex::new(s * s, c * c)],
    ])
    .expect("2x2")
}

/// Polarization transmitted to the detector by a QWP at `qwp_angle`
/// followed by a HWP at `hwp_angle` and a PBS passing `H`:
/// `|m⟩ = QWP† · HWP† · |H⟩`.
pub fn analyzer_ket<T: Real>(qwp_angle: T, hwp_angle: T) -> PolarizationKet<T> {
    let w = qwp(qwp_angle).adjoint().matmul(&hwp(hwp_angle).adjoint());
    PolarizationKet::new(w[(0, 0)], w[(1, 0)]).expect("unitary image of |H> is nonzero")
}

/// Reduces an angle to `[0, π)`.
pub fn reduce_half_turn<T: Real>(x: T) -> T {
    let r = x - T::PI() * (x / T::PI()).floor();
    if r >= T::PI() {
        r - T::PI()
    } else {
        r
    }
}

/// Analyzer waveplate angles on both arms, radians in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting<T: Real = f64> {
    pub qwp_s: T,
    pub hwp_s: T,
    pub qwp_as: T,
    pub hwp_as: T,
}

impl<T: Real> MeasurementSetting<T> {
    pub fn new(qwp_s: T, hwp_s: T, qwp_as: T, hwp_as: T) -> Self {
        Self {
            qwp_s: reduce_half_turn(qwp_s),
            hwp_s: reduce_half_turn(hwp_s),
            qwp_as: reduce_half_turn(qwp_as),
            hwp_as: reduce_half_turn(hwp_as),
        }
    }

    pub fn from_bases(s: Basis, a: Basis) -> Self {
        let (qs, hs) = s.angles::<T>();
        let (qa, ha) = a.angles::<T>();
        Self::new(qs, hs, qa, ha)
    }

    /// Detected two-photon ket `|m_S⟩ ⊗ |m_AS⟩`.
    pub fn ket(&self) -> Vec<Complex<T>> {
        let s = analyzer_ket(self.qwp_s, self.hwp_s);
        let a = analyzer_ket(self.qwp_as, self.hwp_as);
        kron_vec(s.amplitudes(), a.amplitudes())
    }

    pub fn projector(&self) -> ComplexMatrix<T> {
        ComplexMatrix::projector(&self.ket())
    }
}

/// The six standard polarization states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl Basis {
    pub const ALL: [Basis; 6] = [Basis::H, Basis::V, Basis::D, Basis::A, Basis::R, Basis::L];

    /// `(qwp, hwp)` selecting this state. `R = (H + iV)/√2` in the
    /// waveplate convention of [`qwp`]. A QWP at 0 is `diag(1, i)`, so the
    /// diagonal states keep the QWP on the diagonal axis.
    pub fn angles<T: Real>(self) -> (T, T) {
        let pi = T::PI();
        let (q, h) = match self {
            Basis::H => (T::zero(), T::zero()),
            Basis::V => (T::zero(), pi / T::c(4.0)),
            Basis::D => (pi / T::c(4.0), pi / T::c(8.0)),
            Basis::A => (pi / T::c(4.0), -pi / T::c(8.0)),
            Basis::R => (pi / T::c(4.0), T::zero()),
            Basis::L => (pi / T::c(4.0), pi / T::c(4.0)),
        };
        (reduce_half_turn(q), reduce_half_turn(h))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanName {
    /// All 36 pairs of `{H, V, D, A, R, L}`.
    Standard36,
    /// The 16-setting two-qubit tomography set.
    Minimal16,
    Custom,
}

impl PlanName {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanName::Standard36 => "Standard36",
            PlanName::Minimal16 => "Minimal16",
            PlanName::Custom => "Custom",
        }
    }
}

impl std::str::FromStr for PlanName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Standard36" => Ok(PlanName::Standard36),
            "Minimal16" => Ok(PlanName::Minimal16),
            "Custom" => Ok(PlanName::Custom),
            other => Err(format!(
                "unknown settings plan {other:?} (expected Standard36 or Minimal16)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettingsPlan<T: Real = f64> {
    pub name: PlanName,
    pub settings: Vec<MeasurementSetting<T>>,
    /// Relative exposure per setting, parallel to `settings`.
    pub weights: Vec<T>,
}

const MINIMAL16: [(Basis, Basis); 16] = {
    use Basis::*;
    [
        (H, H),
        (H, V),
        (V, V),
        (V, H),
        (R, H),
        (R, V),
        (D, V),
        (D, H),
        (D, R),
        (D, D),
        (R, D),
        (H, D),
        (V, D),
        (V, L),
        (H, L),
        (R, L),
    ]
};

impl<T: Real> SettingsPlan<T> {
    pub fn custom(settings: Vec<MeasurementSetting<T>>) -> Self {
        let weights = vec![T::one(); settings.len()];
        Self {
            name: PlanName::Custom,
            settings,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    /// Dimension of the span of the setting projectors (16 when
    /// informationally complete).
    pub fn completeness_rank(&self) -> usize {
        let ops: Vec<_> = self.settings.iter().map(MeasurementSetting::projector).collect();
        projector_rank(&ops)
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.completeness_rank() == 16
    }
}

pub(crate) fn projector_rank<T: Real>(ops: &[ComplexMatrix<T>]) -> usize {
    span_rank(ops, T::tol(1e-10).as_f64())
}

pub fn standard_plan<T: Real>(name: PlanName) -> Result<SettingsPlan<T>> {
    let pairs: Vec<(Basis, Basis)> = match name {
        PlanName::Standard36 => Basis::ALL
            .iter()
            .flat_map(|&s| Basis::ALL.iter().map(move |&a| (s, a)))
            .collect(),
        PlanName::Minimal16 => MINIMAL16.to_vec(),
        PlanName::Custom => {
            return Err(Error::param("plan", "Custom plans have no standard settings"));
        }
    };
    let settings: Vec<_> = pairs
        .into_iter()
        .map(|(s, a)| MeasurementSetting::from_bases(s, a))
        .collect();
    Ok(SettingsPlan {
        name,
        weights: vec![T::one(); settings.len()],
        settings,
    })
}

/// Born-rule probability that both detectors click.
pub fn coincidence_probability<T: Real>(state: &TwoQubitState<T>, setting: &MeasurementSetting<T>) -> T {
    state.fidelity_pure(&setting.ket()).max(T::zero()).min(T::one())
}

/// Coincidences collected for one analyzer setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRecord<T: Real = f64> {
    pub setting: MeasurementSetting<T>,
    pub count: u64,
    pub acquisition_weight: T,
}

/// Options for [`simulate_counts_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    /// Uniform accidental coincidences added to every setting's mean.
    pub background_per_setting: f64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            background_per_setting: 0.0,
        }
    }
}

/// Draws `count ~ Poisson(mean · weight · p_setting)` for every setting.
pub fn simulate_counts<T: Real>(
    state: &TwoQubitState<T>,
    plan: &SettingsPlan<T>,
    mean_pairs_per_setting: f64,
    seed: u64,
) -> Result<Vec<CountRecord<T>>> {
    simulate_counts_with(state, plan, mean_pairs_per_setting, seed, SimulationOptions::default())
}

pub fn simulate_counts_with<T: Real>(
    state: &TwoQubitState<T>,
    plan: &SettingsPlan<T>,
    mean_pairs_per_setting: f64,
    seed: u64,
    opts: SimulationOptions,
) -> Result<Vec<CountRecord<T>>> {
    if !(mean_pairs_per_setting > 0.0) || !mean_pairs_per_setting.is_finite() {
        return Err(Error::param(
            "mean_pairs_per_setting",
            format!("must be finite and > 0, got {mean_pairs_per_setting}"),
        ));
    }
    if !(opts.background_per_setting >= 0.0) {
        return Err(Error::param("background_per_setting", "must be >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    plan.settings
        .iter()
        .zip(&plan.weights)
        .map(|(setting, &w)| {
            let p = coincidence_probability(state, setting).as_f64();
            let lambda = w.as_f64() * (mean_pairs_per_setting * p + opts.background_per_setting);
            let count = if lambda > 0.0 {
                Poisson::new(lambda)
                    .map_err(|e| Error::param("mean_pairs_per_setting", e.to_string()))?
                    .sample(&mut rng) as u64
            } else {
                0
            };
            Ok(CountRecord {
                setting: *setting,
                count,
                acquisition_weight: w,
            })
        })
        .collect()
}

/// Serializes records as `qwp_S hwp_S qwp_AS hwp_AS count weight`, angles
/// in degrees.
pub fn format_records<T: Real>(records: &[CountRecord<T>]) -> String {
    let mut out = String::from("# qwp_S_deg hwp_S_deg qwp_AS_deg hwp_AS_deg count weight\n");
    for r in records {
        let s = &r.setting;
        writeln!(
            out,
            "{:.9} {:.9} {:.9} {:.9} {} {}",
            s.qwp_s.to_degrees(),
            s.hwp_s.to_degrees(),
            s.qwp_as.to_degrees(),
            s.hwp_as.to_degrees(),
            r.count,
            r.acquisition_weight.as_f64()
        )
        .expect("write to String");
    }
    out
}

/// Parses the format written by [`format_records`]; `#` starts a comment.
pub fn parse_records<T: Real>(text: &str) -> std::result::Result<Vec<CountRecord<T>>, String> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(format!("line {}: expected 6 fields, got {}", lineno + 1, f.len()));
        }
        let num = |i: usize| {
            f[i].parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("line {}: invalid number {:?}", lineno + 1, f[i]))
        };
        let count = f[4]
            .parse::<u64>()
            .map_err(|_| format!("line {}: invalid count {:?}", lineno + 1, f[4]))?;
        let weight = num(5)?;
        if !(weight > 0.0) {
            return Err(format!("line {}: weight must be > 0", lineno + 1));
        }
        let deg = |i: usize| num(i).map(|d| T::c(d.to_radians()));
        out.push(CountRecord {
            setting: MeasurementSetting::new(deg(0)?, deg(1)?, deg(2)?, deg(3)?),
            count,
            acquisition_weight: T::c(weight),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_density_matrix;
    use num_traits::Zero;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, PI};

    fn close(k: &PolarizationKet<f64>, h: Complex<f64>, v: Complex<f64>) -> bool {
        // equal up to global phase
        let target = PolarizationKet::new(h, v).unwrap();
        (k.overlap(&target) - 1.0).abs() < 1e-14
    }

    #[test]
    fn aligned_plates_pass_h() {
        let k = analyzer_ket(0.0, 0.0);
        assert!(close(&k, Complex::new(1.0, 0.0), Complex::zero()));
    }

    #[test]
    fn hwp_22_5_degrees_selects_diagonal() {
        let k = analyzer_ket(FRAC_PI_4, FRAC_PI_8);
        let a = k.amplitudes();
        assert!((a[0] - a[1]).norm() < 1e-15);
        // a QWP at 0 behind it turns D into a circular state
        let c = analyzer_ket(0.0, FRAC_PI_8);
        assert!(close(&c, Complex::new(1.0, 0.0), Complex::new(0.0, -1.0)));
    }

    #[test]
    fn qwp_45_degrees_selects_circular() {
        // QWP(45°)† |H> = ((1−i)/2, (1+i)/2) = e^{−iπ/4}/√2 · (1, i)
        let k = analyzer_ket(FRAC_PI_4, 0.0);
        let a = k.amplitudes();
        assert!((a[0] - Complex::new(0.5, -0.5)).norm() < 1e-15);
        assert!((a[1] - Complex::new(0.5, 0.5)).norm() < 1e-15);
        assert!(close(&k, Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)));
    }

    #[test]
    fn basis_states() {
        let s = FRAC_1_SQRT_2;
        let expect = [
            (Basis::H, Complex::new(1.0, 0.0), Complex::zero()),
            (Basis::V, Complex::zero(), Complex::new(1.0, 0.0)),
            (Basis::D, Complex::new(s, 0.0), Complex::new(s, 0.0)),
            (Basis::A, Complex::new(s, 0.0), Complex::new(-s, 0.0)),
            (Basis::R, Complex::new(s, 0.0), Complex::new(0.0, s)),
            (Basis::L, Complex::new(s, 0.0), Complex::new(0.0, -s)),
        ];
        for (b, h, v) in expect {
            let (q, w) = b.angles::<f64>();
            assert!((0.0..PI).contains(&q) && (0.0..PI).contains(&w));
            assert!(close(&analyzer_ket(q, w), h, v), "{b:?}");
        }
    }

    #[test]
    fn analyzer_ket_is_normalized() {
        for i in 0..50 {
            for j in 0..50 {
                let k = analyzer_ket(i as f64 * 0.13, j as f64 * 0.29 - 3.0);
                assert!((k.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bell_probabilities() {
        let phi = TwoQubitState::<f64>::phi_plus();
        let hh = MeasurementSetting::from_bases(Basis::H, Basis::H);
        let hv = MeasurementSetting::from_bases(Basis::H, Basis::V);
        assert!((coincidence_probability(&phi, &hh) - 0.5).abs() < 1e-15);
        assert!(coincidence_probability(&phi, &hv) < 1e-30);
        let mm = TwoQubitState::<f64>::maximally_mixed();
        for s in standard_plan::<f64>(PlanName::Standard36).unwrap().settings {
            assert!((coincidence_probability(&mm, &s) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn port_resolved_probabilities_sum_to_one() {
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(3);
        for _ in 0..20 {
            let st = random_density_matrix::<f64, _>(&mut rng);
            for (qs, hs, qa, ha) in [(0.1, 0.7, 2.0, 0.3), (1.0, 0.0, 0.4, 2.9)] {
                let ms = analyzer_ket(qs, hs);
                let ma = analyzer_ket(qa, ha);
                let total: f64 = [ms, ms.orthogonal()]
                    .iter()
                    .flat_map(|x| [ma, ma.orthogonal()].map(|y| (*x, y)))
                    .map(|(x, y)| st.fidelity_pure(&kron_vec(x.amplitudes(), y.amplitudes())))
                    .sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn plans_are_complete() {
        let s36 = standard_plan::<f64>(PlanName::Standard36).unwrap();
        assert_eq!(s36.len(), 36);
        assert_eq!(s36.completeness_rank(), 16);
        let m16 = standard_plan::<f64>(PlanName::Minimal16).unwrap();
        assert_eq!(m16.len(), 16);
        assert_eq!(m16.completeness_rank(), 16);
        let empty = SettingsPlan::<f64>::custom(vec![]);
        assert!(!empty.is_informationally_complete());
        let zz = SettingsPlan::custom(
            [Basis::H, Basis::V]
                .iter()
                .flat_map(|&a| [Basis::H, Basis::V].map(|b| MeasurementSetting::<f64>::from_bases(a, b)))
                .collect(),
        );
        assert_eq!(zz.completeness_rank(), 4);
        assert!(standard_plan::<f64>(PlanName::Custom).is_err());
    }

    #[test]
    fn poisson_concentration() {
        let mm = TwoQubitState::<f64>::maximally_mixed();
        let plan = standard_plan(PlanName::Standard36).unwrap();
        let recs = simulate_counts(&mm, &plan, 4e6, 1).unwrap();
        for r in &recs {
            // mean 1e6, σ = 1e3
            assert!((r.count as f64 - 1e6).abs() < 5e3, "{}", r.count);
        }
    }

    #[test]
    fn sparse_regime_and_determinism() {
        let st = TwoQubitState::<f64>::phi_plus();
        let plan = standard_plan(PlanName::Standard36).unwrap();
        let a = simulate_counts(&st, &plan, 1e-4, 5).unwrap();
        assert!(a.iter().map(|r| r.count).sum::<u64>() <= 2);
        let b = simulate_counts(&st, &plan, 1e3, 77).unwrap();
        let c = simulate_counts(&st, &plan, 1e3, 77).unwrap();
        assert_eq!(b, c);
        assert!(simulate_counts(&st, &plan, 0.0, 1).is_err());
    }

    #[test]
    fn experiment_scale_total() {
        // Σ_settings p = 9 for Standard36, so mean 4600/9 per setting gives ≈ 4600 total
        let st = crate::source::werner_state(0.48f64.sqrt(), -65f64.to_radians()).unwrap();
        let plan = standard_plan(PlanName::Standard36).unwrap();
        let total_p: f64 = plan.settings.iter().map(|s| coincidence_probability(&st, s)).sum();
        assert!((total_p - 9.0).abs() < 1e-12);
        let recs = simulate_counts(&st, &plan, 4600.0 / 9.0, 2017).unwrap();
        let total = recs.iter().map(|r| r.count).sum::<u64>() as f64;
        assert!((total - 4600.0).abs() < 5.0 * 4600f64.sqrt(), "{total}");
    }

    #[test]
    fn background_adds_counts() {
        let st = TwoQubitState::<f64>::phi_plus();
        let plan = standard_plan(PlanName::Standard36).unwrap();
        let hv = simulate_counts_with(
            &st,
            &plan,
            1e3,
            1,
            SimulationOptions {
                background_per_setting: 500.0,
            },
        )
        .unwrap()[1]
            .count;
        assert!(hv > 300);
    }

    #[test]
    fn record_text_round_trip() {
        let st = TwoQubitState::<f64>::phi_plus();
        let plan = standard_plan(PlanName::Standard36).unwrap();
        let recs = simulate_counts(&st, &plan, 100.0, 3).unwrap();
        let text = format_records(&recs);
        let back: Vec<CountRecord<f64>> = parse_records(&text).unwrap();
        assert_eq!(back.len(), recs.len());
        for (a, b) in back.iter().zip(&recs) {
            assert_eq!(a.count, b.count);
            assert!((a.setting.hwp_as - b.setting.hwp_as).abs() < 1e-10);
        }
        assert_eq!(format_records(&back), text);
        assert!(parse_records::<f64>("0 0 0 0 -1 1").is_err());
        assert!(parse_records::<f64>("0 0 0 0 1").is_err());
        assert!(parse_records::<f64>("0 0 0 0 1 0").is_err());
    }
}
