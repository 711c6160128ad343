//! Traced finite-dimensional algebras and their noncommutative `L^p` and weak
//! `L^{p,∞}` norms.
//!
//! A [`TracedElement`] is a block-diagonal complex matrix together with a
//! positive weight per block; the trace is `Σ_b w_b Tr(x_b)`. Every norm is
//! computed from the spectrum of `|x|`, obtained from the Hermitian
//! eigendecomposition of `x* x`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative cutoff below which eigenvalues of `|x|` count as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Tolerance (relative to the largest entry) of the self-adjointness check.
pub const SELF_ADJOINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TracedElement {
    blocks: Vec<DMatrix<Complex64>>,
    weights: Vec<f64>,
}

impl TracedElement {
    pub fn new(blocks: Vec<DMatrix<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("a traced element needs at least one block"));
        }
        if blocks.len() != weights.len() {
            return Err(Error::invalid(format!(
                "{} blocks but {} weights",
                blocks.len(),
                weights.len()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            if !b.is_square() {
                return Err(Error::invalid(format!("block {i} is {}x{}", b.nrows(), b.ncols())));
            }
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::invalid(format!("block weights must be positive and finite, got {w}")));
        }
        Ok(TracedElement { blocks, weights })
    }

    /// One block with the given weight.
    pub fn single(matrix: DMatrix<Complex64>, weight: f64) -> Result<Self> {
        Self::new(vec![matrix], vec![weight])
    }

    /// Diagonal matrix in one block.
    pub fn diagonal(values: &[f64], weight: f64) -> Result<Self> {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)));
        Self::single(DMatrix::from_diagonal(&d), weight)
    }

    /// Commutative algebra `ℓ^∞` of `values.len()` points, each point a 1x1
    /// block carrying its own measure.
    pub fn commutative(values: &[Complex64], weights: &[f64]) -> Result<Self> {
        let blocks = values.iter().map(|&v| DMatrix::from_element(1, 1, v)).collect();
        Self::new(blocks, weights.to_vec())
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    /// Identity of the same block structure.
    pub fn identity_like(&self) -> Self {
        self.map_blocks(|b| DMatrix::identity(b.nrows(), b.ncols()))
    }

    pub fn zero_like(&self) -> Self {
        self.map_blocks(|b| DMatrix::zeros(b.nrows(), b.ncols()))
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_blocks(|b| b * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a * b)
    }

    /// `u x v` blockwise; `u`, `v` share the block structure of `x`.
    pub fn sandwich(&self, u: &Self, v: &Self) -> Result<Self> {
        u.mul(self)?.mul(v)
    }

    fn map_blocks(&self, f: impl Fn(&DMatrix<Complex64>) -> DMatrix<Complex64>) -> Self {
        TracedElement {
            blocks: self.blocks.iter().map(f).collect(),
            weights: self.weights.clone(),
        }
    }

    fn zip_blocks(
        &self,
        other: &Self,
        f: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>,
    ) -> Result<Self> {
        if self.dims() != other.dims() || self.weights != other.weights {
            return Err(Error::invalid("traced elements have different block structures"));
        }
        Ok(TracedElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
            weights: self.weights.clone(),
        })
    }

    /// `τ(x) = Σ_b w_b Tr(x_b)`.
    pub fn trace(&self) -> Complex64 {
        self.blocks
            .iter()
            .zip(&self.weights)
            .map(|(b, &w)| b.trace() * w)
            .sum()
    }

    /// `τ(1)`.
    pub fn total_weight(&self) -> f64 {
        self.blocks.iter().zip(&self.weights).map(|(b, w)| b.nrows() as f64 * w).sum()
    }

    fn max_abs_entry(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    pub fn is_self_adjoint(&self) -> bool {
        let scale = self.max_abs_entry().max(1.0);
        self.blocks.iter().all(|b| {
            b.iter()
                .zip(b.adjoint().iter())
                .all(|(x, y)| (x - y).norm() <= SELF_ADJOINT_TOL * scale)
        })
    }

    /// Eigenvalues of `|x|` per block with the block weight, unsorted and
    /// without rank cutoff.
    fn modulus_spectrum(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (b, &w) in self.blocks.iter().zip(&self.weights) {
            if b.nrows() == 0 {
                continue;
            }
            let gram = b.adjoint() * b;
            let eig = SymmetricEigen::new(gram);
            out.extend(eig.eigenvalues.iter().map(|&e| (e.max(0.0).sqrt(), w)));
        }
        out
    }

    /// `‖x‖_∞`, the operator norm (largest eigenvalue of `|x|`).
    pub fn operator_norm(&self) -> f64 {
        self.modulus_spectrum().iter().fold(0.0_f64, |m, (s, _)| m.max(*s))
    }

    /// `‖x‖_p = τ(|x|^p)^{1/p}`; `p = f64::INFINITY` gives the operator norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let spec = self.modulus_spectrum();
        if p.is_infinite() {
            return Ok(spec.iter().fold(0.0_f64, |m, (s, _)| m.max(*s)));
        }
        let top = spec.iter().fold(0.0_f64, |m, (s, _)| m.max(*s));
        if top == 0.0 {
            return Ok(0.0);
        }
        // Scale by the top singular value to keep s^p in range.
        let sum: f64 = spec.iter().map(|(s, w)| w * (s / top).powf(p)).sum();
        Ok(top * sum.powf(1.0 / p))
    }

    /// Generalized singular numbers `μ_t(x) = inf{λ > 0 : τ(1_{(λ,∞)}(|x|)) < t}`.
    pub fn singular_numbers(&self) -> SingularProfile {
        let mut spec = self.modulus_spectrum();
        let top = spec.iter().fold(0.0_f64, |m, (s, _)| m.max(*s));
        spec.retain(|(s, _)| *s > RANK_CUTOFF * top && *s > 0.0);
        spec.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut breakpoints: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut cumulative = 0.0;
        for (s, w) in spec {
            cumulative += w;
            match values.last() {
                Some(&last) if (last - s).abs() <= RANK_CUTOFF * top => {
                    *breakpoints.last_mut().unwrap() = cumulative;
                }
                _ => {
                    breakpoints.push(cumulative);
                    values.push(s);
                }
            }
        }
        SingularProfile { breakpoints, values }
    }

    /// `‖x‖_{p,∞} = sup_{t>0} t^{1/p} μ_t(x)`.
    pub fn weak_lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        Ok(self.singular_numbers().weak_norm(p))
    }

    /// Spectral projection `1_{I}(x)` of a self-adjoint `x` onto an open interval.
    pub fn spectral_projection(&self, interval: OpenInterval) -> Result<Self> {
        if !self.is_self_adjoint() {
            return Err(Error::invalid("spectral projection needs a self-adjoint element"));
        }
        if !(interval.lo < interval.hi) {
            return Err(Error::invalid(format!("empty interval ({}, {})", interval.lo, interval.hi)));
        }
        Ok(self.map_blocks(|b| {
            let n = b.nrows();
            if n == 0 {
                return b.clone();
            }
            let herm = (b + b.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(herm);
            let mut p = DMatrix::zeros(n, n);
            for (k, &e) in eig.eigenvalues.iter().enumerate() {
                if interval.contains(e) {
                    let v = eig.eigenvectors.column(k);
                    p += &v * v.adjoint();
                }
            }
            p
        }))
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("exponent p must be >= 1 or infinity, got {p}")));
    }
    Ok(())
}

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        OpenInterval { lo, hi }
    }

    pub fn whole_line() -> Self {
        OpenInterval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Decreasing step function `t ↦ μ_t(x)`: equal to `values[k]` on
/// `(breakpoints[k-1], breakpoints[k]]` (with `breakpoints[-1] = 0`) and zero
/// past the last breakpoint, which is the trace of the support projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularProfile {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl SingularProfile {
    /// `μ_t`. For `t <= 0` the value at `0+` is returned.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b < t);
        self.values.get(k).copied().unwrap_or(0.0)
    }

    pub fn support_trace(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// Supremum of `t^{1/p} μ_t`, attained at the right end of a constancy interval.
    pub fn weak_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.first().copied().unwrap_or(0.0);
        }
        self.breakpoints
            .iter()
            .zip(&self.values)
            .map(|(t, v)| t.powf(1.0 / p) * v)
            .fold(0.0, f64::max)
    }

    /// `(∫ μ_t^p dt)^{1/p}`, which equals `‖x‖_p`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let mut prev = 0.0;
        let mut sum = 0.0;
        for (t, v) in self.breakpoints.iter().zip(&self.values) {
            sum += (t - prev) * v.powf(p);
            prev = *t;
        }
        sum.powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_element(seed: u64, n: usize) -> TracedElement {
        let mut rng = random::rng(seed);
        TracedElement::single(random::ginibre(&mut rng, n), 1.0).unwrap()
    }

    #[test]
    fn trace_examples() {
        let id = TracedElement::diagonal(&[1.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!(id.trace(), c(3.0));
        assert_eq!(id.zero_like().trace(), c(0.0));
        let two = TracedElement::new(
            vec![DMatrix::from_element(1, 1, c(2.0)), DMatrix::from_element(1, 1, c(5.0))],
            vec![1.0, 2.0],
        )
        .unwrap();
        assert_eq!(two.trace(), c(12.0));
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(TracedElement::new(vec![DMatrix::zeros(2, 3)], vec![1.0]).is_err());
        assert!(TracedElement::new(vec![DMatrix::zeros(2, 2)], vec![0.0]).is_err());
        assert!(TracedElement::new(vec![DMatrix::zeros(2, 2)], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn lp_norm_examples() {
        let id = TracedElement::diagonal(&[1.0; 5], 1.0).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!((id.lp_norm(p).unwrap() - 5f64.powf(1.0 / p)).abs() < 1e-14);
        }
        assert_eq!(id.lp_norm(f64::INFINITY).unwrap(), 1.0);
        let d = TracedElement::diagonal(&[3.0, 1.0], 1.0).unwrap();
        assert!((d.lp_norm(1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(d.lp_norm(0.5).is_err());
    }

    #[test]
    fn two_norm_is_trace_of_gram() {
        let x = random_element(7, 4);
        let gram = x.adjoint().mul(&x).unwrap().trace();
        assert!(gram.im.abs() < 1e-12);
        assert!((x.lp_norm(2.0).unwrap().powi(2) - gram.re).abs() < 1e-12 * gram.re.max(1.0));
    }

    #[test]
    fn singular_profile_of_diag_3_1() {
        let prof = TracedElement::diagonal(&[3.0, 1.0], 1.0).unwrap().singular_numbers();
        assert_eq!(prof.breakpoints, vec![1.0, 2.0]);
        assert_eq!(prof.values, vec![3.0, 1.0]);
        // Strict "< t": the profile is 3 on (0,1], 1 on (1,2], 0 after.
        assert_eq!(prof.value_at(0.5), 3.0);
        assert_eq!(prof.value_at(1.0), 3.0);
        assert_eq!(prof.value_at(1.0 + 1e-12), 1.0);
        assert_eq!(prof.value_at(2.0), 1.0);
        assert_eq!(prof.value_at(2.5), 0.0);
    }

    #[test]
    fn compact_operator_singular_numbers_are_sorted_eigenvalues() {
        let prof = TracedElement::diagonal(&[0.5, 4.0, 2.0, 1.0], 1.0).unwrap().singular_numbers();
        for (n, expected) in [4.0, 2.0, 1.0, 0.5].iter().enumerate() {
            assert!((prof.value_at(n as f64 + 0.5) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn commutative_model_rearrangement_is_identity_on_decreasing_steps() {
        // f = 5 on (0,0.3], 2 on (0.3,1.0], 0.7 on (1.0,3.5]
        let values = [c(5.0), c(2.0), c(0.7)];
        let lengths = [0.3, 0.7, 2.5];
        let x = TracedElement::commutative(&values, &lengths).unwrap();
        let prof = x.singular_numbers();
        let f = |t: f64| if t <= 0.3 { 5.0 } else if t <= 1.0 { 2.0 } else if t <= 3.5 { 0.7 } else { 0.0 };
        for k in 1..80 {
            let t = k as f64 * 0.05 + 0.001;
            assert!((prof.value_at(t) - f(t)).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn weak_norm_examples() {
        let d = TracedElement::diagonal(&[3.0, 1.0], 1.0).unwrap();
        assert!((d.weak_lp_norm(1.0).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(d.zero_like().weak_lp_norm(2.0).unwrap(), 0.0);
        // p = 2: max(1·3, √2·1)
        assert!((d.weak_lp_norm(2.0).unwrap() - 3.0).abs() < 1e-14);
        let e = TracedElement::diagonal(&[1.0, 0.9], 1.0).unwrap();
        assert!((e.weak_lp_norm(1.0).unwrap() - 1.8).abs() < 1e-14);
    }

    #[test]
    fn weak_norm_below_strong_norm() {
        for seed in 0..100 {
            let x = random_element(seed, 4);
            for p in [1.0, 1.5, 2.0, 3.0] {
                assert!(x.weak_lp_norm(p).unwrap() <= x.lp_norm(p).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn rank_cutoff_drops_numerical_zeros() {
        let d = TracedElement::diagonal(&[1.0, 1e-14, 0.0], 1.0).unwrap();
        let prof = d.singular_numbers();
        assert_eq!(prof.values, vec![1.0]);
        assert_eq!(prof.support_trace(), 1.0);
    }

    #[test]
    fn profile_integrates_to_lp_norm() {
        let mut rng = random::rng(11);
        let x = TracedElement::new(
            vec![random::ginibre(&mut rng, 3), random::ginibre(&mut rng, 2)],
            vec![0.25, 3.0],
        )
        .unwrap();
        let prof = x.singular_numbers();
        for p in [1.0, 2.0, 3.5] {
            assert!((prof.lp_norm(p) - x.lp_norm(p).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_examples() {
        let d = TracedElement::diagonal(&[1.0, 5.0], 1.0).unwrap();
        let p = d.spectral_projection(OpenInterval::new(0.0, 2.0)).unwrap();
        let expected = TracedElement::diagonal(&[1.0, 0.0], 1.0).unwrap();
        assert!(p.sub(&expected).unwrap().operator_norm() < 1e-14);
        let all = d.spectral_projection(OpenInterval::whole_line()).unwrap();
        assert!(all.sub(&d.identity_like()).unwrap().operator_norm() < 1e-14);
    }

    #[test]
    fn projection_of_random_hermitian() {
        let mut rng = random::rng(3);
        let h = random::hermitian(&mut rng, 5);
        let eig = SymmetricEigen::new(h.clone()).eigenvalues;
        let x = TracedElement::single(h, 1.0).unwrap();
        let iv = OpenInterval::new(-0.5, 1.0);
        let p = x.spectral_projection(iv).unwrap();
        let count = eig.iter().filter(|e| iv.contains(**e)).count() as f64;
        assert!((p.trace().re - count).abs() < 1e-10);
        // idempotent, self-adjoint, commutes with x
        let p2 = p.mul(&p).unwrap();
        assert!(p2.sub(&p).unwrap().operator_norm() < 1e-10);
        assert!(p.is_self_adjoint());
        let comm = p.mul(&x).unwrap().sub(&x.mul(&p).unwrap()).unwrap();
        assert!(comm.operator_norm() < 1e-10);
    }

    #[test]
    fn projection_rejects_non_self_adjoint() {
        let x = random_element(5, 3);
        assert!(x.spectral_projection(OpenInterval::whole_line()).is_err());
    }

    #[test]
    fn trace_property() {
        let x = random_element(9, 4);
        let a = x.mul(&x.adjoint()).unwrap().trace();
        let b = x.adjoint().mul(&x).unwrap().trace();
        assert!((a - b).norm() < 1e-12);
        assert!(a.re >= 0.0);
        assert_eq!(x.adjoint().adjoint(), x);
    }
}
