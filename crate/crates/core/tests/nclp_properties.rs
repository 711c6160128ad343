use nalgebra::DMatrix;
use ncharm::{random, Complex64, TracedElement};
use proptest::prelude::*;

const TOL: f64 = 1e-10;

/// Block sizes and weights of a random finite von Neumann algebra.
fn shape() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
    prop::collection::vec((1usize..=5, 0.2f64..3.0), 1..=3).prop_map(|v| v.into_iter().unzip())
}

fn element(seed: u64, dims: &[usize], weights: &[f64]) -> TracedElement {
    let mut rng = random::rng(seed);
    TracedElement::new(dims.iter().map(|&d| random::ginibre(&mut rng, d)).collect(), weights.to_vec()).unwrap()
}

fn unitary(seed: u64, dims: &[usize], weights: &[f64]) -> TracedElement {
    let mut rng = random::rng(seed);
    TracedElement::new(dims.iter().map(|&d| random::unitary(&mut rng, d)).collect(), weights.to_vec()).unwrap()
}

/// Weighted Schatten norm from eigenvalues of `x* x`, independent of the SVD path.
fn oracle_norm(x: &TracedElement, p: f64) -> f64 {
    let mut total = 0.0;
    for (b, w) in x.blocks().iter().zip(x.weights()) {
        let gram: DMatrix<Complex64> = b.adjoint() * b;
        for ev in gram.symmetric_eigenvalues().iter() {
            total += w * ev.max(0.0).powf(p / 2.0);
        }
    }
    total.powf(1.0 / p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn norm_matches_gram_eigenvalues((dims, weights) in shape(), seed: u64, p in 1.0f64..6.0) {
        let x = element(seed, &dims, &weights);
        let (a, b) = (x.lp_norm(p).unwrap(), oracle_norm(&x, p));
        prop_assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
    }

    #[test]
    fn triangle_inequality((dims, weights) in shape(), s1: u64, s2: u64, p in 1.0f64..8.0) {
        let (x, y) = (element(s1, &dims, &weights), element(s2, &dims, &weights));
        let lhs = x.add(&y).unwrap().lp_norm(p).unwrap();
        prop_assert!(lhs <= (x.lp_norm(p).unwrap() + y.lp_norm(p).unwrap()) * (1.0 + TOL));
    }

    #[test]
    fn hoelder_inequality((dims, weights) in shape(), s1: u64, s2: u64, p in 1.01f64..8.0) {
        let (x, y) = (element(s1, &dims, &weights), element(s2, &dims, &weights));
        let q = p / (p - 1.0);
        let lhs = x.mul(&y).unwrap().lp_norm(1.0).unwrap();
        prop_assert!(lhs <= x.lp_norm(p).unwrap() * y.lp_norm(q).unwrap() * (1.0 + TOL));
        // |tau(xy)| <= ||xy||_1
        prop_assert!(x.mul(&y).unwrap().trace().norm() <= lhs * (1.0 + TOL));
    }

    #[test]
    fn unitary_invariance((dims, weights) in shape(), s: u64, su: u64, sv: u64, p in 1.0f64..8.0) {
        let x = element(s, &dims, &weights);
        let (u, v) = (unitary(su, &dims, &weights), unitary(sv, &dims, &weights));
        let (a, b) = (x.sandwich(&u, &v).unwrap().lp_norm(p).unwrap(), x.lp_norm(p).unwrap());
        prop_assert!((a - b).abs() <= TOL * b);
        let inf = x.sandwich(&u, &v).unwrap().operator_norm();
        prop_assert!((inf - x.operator_norm()).abs() <= TOL * inf);
    }

    #[test]
    fn weak_norm_below_strong((dims, weights) in shape(), s: u64, p in 1.0f64..8.0) {
        let x = element(s, &dims, &weights);
        prop_assert!(x.weak_lp_norm(p).unwrap() <= x.lp_norm(p).unwrap() * (1.0 + TOL));
    }

    #[test]
    fn rearrangement_reproduces_norms((dims, weights) in shape(), s: u64, p in 1.0f64..8.0) {
        let x = element(s, &dims, &weights);
        let mu = x.singular_numbers();
        let (a, b) = (mu.lp_norm(p), x.lp_norm(p).unwrap());
        prop_assert!((a - b).abs() <= TOL * b);
        prop_assert!((mu.support_trace() - x.total_weight()).abs() <= TOL * x.total_weight());
    }

    #[test]
    fn adjoint_and_scaling((dims, weights) in shape(), s: u64, p in 1.0f64..8.0, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let x = element(s, &dims, &weights);
        let c = Complex64::new(re, im);
        let n = x.lp_norm(p).unwrap();
        prop_assert!((x.adjoint().lp_norm(p).unwrap() - n).abs() <= TOL * n);
        prop_assert!((x.scale(c).lp_norm(p).unwrap() - c.norm() * n).abs() <= TOL * n.max(1.0));
    }

    #[test]
    fn trace_is_tracial((dims, weights) in shape(), s1: u64, s2: u64) {
        let (x, y) = (element(s1, &dims, &weights), element(s2, &dims, &weights));
        let (a, b) = (x.mul(&y).unwrap().trace(), y.mul(&x).unwrap().trace());
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
    }
}
