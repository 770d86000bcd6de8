//! Random operators for property tests and Monte Carlo studies, plus the
//! seed-splitting rule used by every parallel sampler in the crate.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::quantum::{hermitian_eigensystem, ComplexMatrix, TwoQubitState};
use crate::scalar::Real;

/// Derives an independent 64-bit seed for stream `index` of a run seeded
/// with `seed` (SplitMix64 finalizer over a golden-ratio stride).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::c(re), T::c(im))
}

/// Complex Ginibre matrix with standard-normal entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let data = (0..n * n).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_vec(n, n, data).expect("finite gaussian entries")
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    ginibre(n, rng).hermitian_part()
}

/// Uniformly random unit vector in `C^n`.
pub fn random_ket<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Full-rank two-qubit state from the Hilbert–Schmidt ensemble, `GG†/tr`.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState<T> {
    let g = ginibre::<T, _>(4, rng);
    let m = g.matmul(&g.adjoint());
    crate::quantum::normalize_to_state(&m).expect("Ginibre product is PSD with positive trace")
}

pub fn random_pure_state<T: Real, R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState<T> {
    TwoQubitState::from_pure(&random_ket(4, rng)).expect("unit ket")
}

/// Random unitary `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let h = random_hermitian::<T, _>(n, rng);
    let es = hermitian_eigensystem(&h).expect("Hermitian by construction");
    let mut u = ComplexMatrix::zeros(n, n);
    for (k, &lam) in es.values.iter().enumerate() {
        let phase = Complex::from_polar(T::one(), lam);
        for i in 0..n {
            let vi = es.vectors[(i, k)] * phase;
            for j in 0..n {
                u[(i, j)] = u[(i, j)] + vi * es.vectors[(j, k)].conj();
            }
        }
    }
    u
}
