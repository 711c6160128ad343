//! Seeded random instances used by property checks, self-tests and the CLI.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

/// Complex Ginibre matrix (i.i.d. standard complex normal entries).
pub fn ginibre<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn hermitian<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let g = ginibre(rng, n);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// diagonal of R divided out.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let qr = ginibre(rng, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}
