//! Exact Fourier analysis on the cyclic groups `ℤ_N` and the symmetric group
//! `S₃`.
//!
//! Conventions: normalized counting measure on the group (mass `1/|G|` per
//! point) and weight `d_π` on the dual, so that
//! `‖f‖₂² = Σ_π d_π Tr(f̂(π) f̂(π)*)` and `f(x) = Σ_π d_π Tr(π(x)* f̂(π))`
//! hold without extra constants.

mod checks;
mod opnorm;

pub use checks::{hausdorff_young_check, heat_symbol_on_cyclic, zhang_ratio, HausdorffYoungReport, ZhangReport};
pub use opnorm::{pq_operator_norm, NormEstimate, NormSearch};

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3x2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nclp::TracedElement;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteGroup {
    Cyclic(usize),
    S3,
}

/// The six permutations of `{0,1,2}`, identity first.
const S3_ELEMENTS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [0, 2, 1],
    [2, 1, 0],
    [1, 2, 0],
    [2, 0, 1],
];

impl FiniteGroup {
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cyclic group order must be positive"));
        }
        Ok(FiniteGroup::Cyclic(n))
    }

    pub fn order(&self) -> usize {
        match *self {
            FiniteGroup::Cyclic(n) => n,
            FiniteGroup::S3 => 6,
        }
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self, FiniteGroup::Cyclic(_))
    }

    /// Index of the product `g h`.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        match *self {
            FiniteGroup::Cyclic(n) => (g + h) % n,
            FiniteGroup::S3 => {
                let (s, t) = (S3_ELEMENTS[g], S3_ELEMENTS[h]);
                let prod = [s[t[0]], s[t[1]], s[t[2]]];
                S3_ELEMENTS.iter().position(|p| *p == prod).unwrap()
            }
        }
    }

    pub fn inv(&self, g: usize) -> usize {
        match *self {
            FiniteGroup::Cyclic(n) => (n - g) % n,
            FiniteGroup::S3 => {
                let s = S3_ELEMENTS[g];
                let mut inv = [0; 3];
                for (i, &si) in s.iter().enumerate() {
                    inv[si] = i;
                }
                S3_ELEMENTS.iter().position(|p| *p == inv).unwrap()
            }
        }
    }

    /// Irreducible unitary representations: characters `χ_k(g) = e^{2πikg/N}`
    /// for `ℤ_N`; trivial, sign and the 2-dimensional standard
    /// representation (real orthogonal) for `S₃`.
    pub fn irreps(&self) -> Vec<Irrep> {
        match *self {
            FiniteGroup::Cyclic(n) => (0..n)
                .map(|k| Irrep {
                    dim: 1,
                    matrices: (0..n)
                        .map(|g| {
                            let phase = 2.0 * PI * ((k * g) % n) as f64 / n as f64;
                            DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phase))
                        })
                        .collect(),
                })
                .collect(),
            FiniteGroup::S3 => s3_irreps(),
        }
    }

    pub fn dual_dims(&self) -> Vec<usize> {
        match *self {
            FiniteGroup::Cyclic(n) => vec![1; n],
            FiniteGroup::S3 => vec![1, 1, 2],
        }
    }
}

fn s3_irreps() -> Vec<Irrep> {
    let perm_matrix = |s: [usize; 3]| {
        let mut p = nalgebra::Matrix3::<f64>::zeros();
        for i in 0..3 {
            p[(s[i], i)] = 1.0;
        }
        p
    };
    let sign = |s: [usize; 3]| perm_matrix(s).determinant().round();
    // Orthonormal basis of the plane x + y + z = 0.
    let a = 1.0 / 2f64.sqrt();
    let b = 1.0 / 6f64.sqrt();
    let basis = Matrix3x2::new(a, b, -a, b, 0.0, -2.0 * b);
    let to_c = |x: f64| Complex64::new(x, 0.0);
    let trivial = Irrep {
        dim: 1,
        matrices: S3_ELEMENTS.iter().map(|_| DMatrix::from_element(1, 1, to_c(1.0))).collect(),
    };
    let sgn = Irrep {
        dim: 1,
        matrices: S3_ELEMENTS.iter().map(|&s| DMatrix::from_element(1, 1, to_c(sign(s)))).collect(),
    };
    let standard = Irrep {
        dim: 2,
        matrices: S3_ELEMENTS
            .iter()
            .map(|&s| {
                let m = basis.transpose() * perm_matrix(s) * basis;
                DMatrix::from_fn(2, 2, |i, j| to_c(m[(i, j)]))
            })
            .collect(),
    };
    vec![trivial, sgn, standard]
}

/// One irreducible representation, as its matrices at every group element.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub dim: usize,
    pub matrices: Vec<DMatrix<Complex64>>,
}

/// `f ∈ L^p(G)` for the normalized counting measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteGroupFunction {
    pub group: FiniteGroup,
    pub values: Vec<Complex64>,
}

impl FiniteGroupFunction {
    pub fn new(group: FiniteGroup, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::invalid(format!(
                "function has {} values but the group has order {}",
                values.len(),
                group.order()
            )));
        }
        Ok(FiniteGroupFunction { group, values })
    }

    pub fn constant(group: FiniteGroup, c: Complex64) -> Self {
        FiniteGroupFunction { group, values: vec![c; group.order()] }
    }

    /// Point mass of total integral one at `g` (value `|G|` there).
    pub fn delta(group: FiniteGroup, g: usize) -> Self {
        let mut values = vec![ZERO; group.order()];
        values[g] = Complex64::new(group.order() as f64, 0.0);
        FiniteGroupFunction { group, values }
    }

    pub fn random<R: rand::Rng>(group: FiniteGroup, rng: &mut R) -> Self {
        FiniteGroupFunction { group, values: crate::random::complex_vector(rng, group.order()) }
    }

    /// `(1/|G|) Σ |f|^p` to the power `1/p`; `p = ∞` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_normalized(&self.values, p)
    }

    /// `(f * g)(x) = (1/|G|) Σ_y f(y) g(y⁻¹x)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        same_group(self.group, other.group)?;
        let g = self.group;
        let n = g.order();
        let mut out = vec![ZERO; n];
        for (x, slot) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for y in 0..n {
                acc += self.values[y] * other.values[g.mul(g.inv(y), x)];
            }
            *slot = acc / n as f64;
        }
        Ok(FiniteGroupFunction { group: g, values: out })
    }

    /// Left translate `(λ_h f)(g) = f(h⁻¹ g)`.
    pub fn left_translate(&self, h: usize) -> Self {
        let g = self.group;
        let hinv = g.inv(h);
        FiniteGroupFunction {
            group: g,
            values: (0..g.order()).map(|x| self.values[g.mul(hinv, x)]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_group(self.group, other.group)?;
        Ok(FiniteGroupFunction {
            group: self.group,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }
}

pub(crate) fn lp_norm_normalized(values: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.norm()));
    }
    let n = values.len() as f64;
    let top = values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    if top == 0.0 {
        return 0.0;
    }
    let s: f64 = values.iter().map(|v| (v.norm() / top).powf(p)).sum();
    top * (s / n).powf(1.0 / p)
}

fn same_group(a: FiniteGroup, b: FiniteGroup) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("group mismatch: {a:?} vs {b:?}")));
    }
    Ok(())
}

/// `f̂(π)` for every irreducible `π`, with dual weights `d_π`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDualCoefficients {
    pub group: FiniteGroup,
    pub blocks: Vec<DMatrix<Complex64>>,
}

impl FiniteDualCoefficients {
    pub fn new(group: FiniteGroup, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let dims = group.dual_dims();
        if blocks.len() != dims.len()
            || blocks.iter().zip(&dims).any(|(b, &d)| b.nrows() != d || b.ncols() != d)
        {
            return Err(Error::invalid(format!(
                "dual coefficients must have blocks of sizes {dims:?}"
            )));
        }
        Ok(FiniteDualCoefficients { group, blocks })
    }

    pub fn zeros(group: FiniteGroup) -> Self {
        let blocks = group.dual_dims().iter().map(|&d| DMatrix::zeros(d, d)).collect();
        FiniteDualCoefficients { group, blocks }
    }

    /// Central symbol taking the scalar `values[i]` on the `i`-th irreducible.
    pub fn scalar(group: FiniteGroup, values: &[Complex64]) -> Result<Self> {
        let dims = group.dual_dims();
        if values.len() != dims.len() {
            return Err(Error::invalid(format!("need {} scalars, got {}", dims.len(), values.len())));
        }
        let blocks = dims
            .iter()
            .zip(values)
            .map(|(&d, &v)| DMatrix::identity(d, d) * v)
            .collect();
        Ok(FiniteDualCoefficients { group, blocks })
    }

    /// The dual as a traced algebra: blocks `f̂(π)` with weights `d_π`.
    pub fn to_traced(&self) -> TracedElement {
        let weights = self.group.dual_dims().iter().map(|&d| d as f64).collect();
        TracedElement::new(self.blocks.clone(), weights).expect("dual block structure is valid")
    }

    /// `Σ_π d_π Tr(f̂(π) f̂(π)*)`.
    pub fn plancherel_sum(&self) -> f64 {
        self.blocks
            .iter()
            .zip(self.group.dual_dims())
            .map(|(b, d)| d as f64 * b.norm_squared())
            .sum()
    }

    fn is_central(&self) -> bool {
        self.blocks.iter().all(|b| {
            let c = b[(0, 0)];
            let scale = b.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
            b.iter().enumerate().all(|(k, z)| {
                let (i, j) = (k % b.nrows(), k / b.nrows());
                let expected = if i == j { c } else { ZERO };
                (z - expected).norm() <= 1e-12 * scale
            })
        })
    }
}

/// `f̂(π) = (1/|G|) Σ_g f(g) π(g)`.
pub fn finite_fourier(f: &FiniteGroupFunction) -> FiniteDualCoefficients {
    let n = f.group.order() as f64;
    let blocks = f
        .group
        .irreps()
        .into_iter()
        .map(|pi| {
            let mut acc = DMatrix::zeros(pi.dim, pi.dim);
            for (v, m) in f.values.iter().zip(&pi.matrices) {
                acc += m * *v;
            }
            acc / Complex64::new(n, 0.0)
        })
        .collect();
    FiniteDualCoefficients { group: f.group, blocks }
}

/// `f(x) = Σ_π d_π Tr(π(x)* f̂(π))`.
pub fn finite_inverse(coeffs: &FiniteDualCoefficients) -> FiniteGroupFunction {
    let g = coeffs.group;
    let irreps = g.irreps();
    let values = (0..g.order())
        .map(|x| {
            irreps
                .iter()
                .zip(&coeffs.blocks)
                .map(|(pi, b)| (pi.matrices[x].adjoint() * b).trace() * pi.dim as f64)
                .sum()
        })
        .collect();
    FiniteGroupFunction { group: g, values }
}

/// `T_m f = F⁻¹(m f̂)`. On a nonabelian group the symbol must be central
/// (scalar on every irreducible).
pub fn multiplier_apply(
    symbol: &FiniteDualCoefficients,
    f: &FiniteGroupFunction,
) -> Result<FiniteGroupFunction> {
    same_group(symbol.group, f.group)?;
    if !symbol.group.is_abelian() && !symbol.is_central() {
        return Err(Error::invalid(
            "multiplier symbol on a nonabelian group must be scalar on every irreducible",
        ));
    }
    let fhat = finite_fourier(f);
    let blocks = symbol.blocks.iter().zip(&fhat.blocks).map(|(m, b)| m * b).collect();
    Ok(finite_inverse(&FiniteDualCoefficients { group: f.group, blocks }))
}

/// Matrix of `T_m` on function values (columns are images of point masses).
pub fn multiplier_matrix(symbol: &FiniteDualCoefficients) -> Result<DMatrix<Complex64>> {
    let g = symbol.group;
    let n = g.order();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![ZERO; n];
        e[j] = Complex64::new(1.0, 0.0);
        let col = multiplier_apply(symbol, &FiniteGroupFunction { group: g, values: e })?;
        for i in 0..n {
            out[(i, j)] = col.values[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn s3_is_a_group_and_irreps_are_homomorphisms() {
        let g = FiniteGroup::S3;
        for a in 0..6 {
            assert_eq!(g.mul(a, g.inv(a)), 0);
            for b in 0..6 {
                for cc in 0..6 {
                    assert_eq!(g.mul(g.mul(a, b), cc), g.mul(a, g.mul(b, cc)));
                }
            }
        }
        for pi in g.irreps() {
            for a in 0..6 {
                let u = &pi.matrices[a];
                assert!((u * u.adjoint() - DMatrix::identity(pi.dim, pi.dim)).norm() < 1e-14);
                for b in 0..6 {
                    let lhs = &pi.matrices[g.mul(a, b)];
                    assert!((lhs - u * &pi.matrices[b]).norm() < 1e-14);
                }
            }
        }
        let dims = g.dual_dims();
        assert_eq!(dims.iter().map(|d| d * d).sum::<usize>(), 6);
        assert!(!g.is_abelian());
        assert_ne!(g.mul(1, 2), g.mul(2, 1));
    }

    #[test]
    fn delta_transforms_to_ones() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let fhat = finite_fourier(&FiniteGroupFunction::delta(g, 0));
        for b in &fhat.blocks {
            assert!((b[(0, 0)] - c(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn constant_on_s3_only_hits_trivial() {
        let fhat = finite_fourier(&FiniteGroupFunction::constant(FiniteGroup::S3, c(1.0)));
        assert!((fhat.blocks[0][(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!(fhat.blocks[1].norm() < 1e-15);
        assert!(fhat.blocks[2].norm() < 1e-15);
    }

    #[test]
    fn plancherel_on_both_groups() {
        let mut rng = random::rng(1);
        for g in [FiniteGroup::S3, FiniteGroup::Cyclic(7), FiniteGroup::Cyclic(16)] {
            for _ in 0..50 {
                let f = FiniteGroupFunction::random(g, &mut rng);
                // direct sum over group elements under the normalized measure
                let direct: f64 =
                    f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / g.order() as f64;
                let dual = finite_fourier(&f).plancherel_sum();
                assert!((direct - dual).abs() < 1e-12 * direct.max(1.0));
            }
        }
    }

    #[test]
    fn inverse_examples_and_round_trip() {
        let g = FiniteGroup::S3;
        let d = FiniteGroupFunction::delta(g, 0);
        let back = finite_inverse(&finite_fourier(&d));
        assert!(back.sub(&d).unwrap().lp_norm(f64::INFINITY) < 1e-12);
        let zero = finite_inverse(&FiniteDualCoefficients::zeros(g));
        assert!(zero.values.iter().all(|v| *v == ZERO));
        let mut rng = random::rng(2);
        for _ in 0..100 {
            let f = FiniteGroupFunction::random(g, &mut rng);
            let back = finite_inverse(&finite_fourier(&f));
            assert!(back.sub(&f).unwrap().lp_norm(f64::INFINITY) < 1e-12);
        }
    }

    #[test]
    fn convolution_theorem() {
        let mut rng = random::rng(3);
        for g in [FiniteGroup::S3, FiniteGroup::Cyclic(8)] {
            let f = FiniteGroupFunction::random(g, &mut rng);
            let h = FiniteGroupFunction::random(g, &mut rng);
            let lhs = finite_fourier(&f.convolve(&h).unwrap());
            let (fa, ha) = (finite_fourier(&f), finite_fourier(&h));
            for k in 0..lhs.blocks.len() {
                assert!((&lhs.blocks[k] - &fa.blocks[k] * &ha.blocks[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn multiplier_examples() {
        let mut rng = random::rng(4);
        let g = FiniteGroup::Cyclic(8);
        let f = FiniteGroupFunction::random(g, &mut rng);
        let one = FiniteDualCoefficients::scalar(g, &[c(1.0); 8]).unwrap();
        assert!(multiplier_apply(&one, &f).unwrap().sub(&f).unwrap().lp_norm(2.0) < 1e-12);

        let mut ind = vec![c(0.0); 8];
        ind[0] = c(1.0);
        let proj = multiplier_apply(&FiniteDualCoefficients::scalar(g, &ind).unwrap(), &f).unwrap();
        let mean: Complex64 = f.values.iter().sum::<Complex64>() / 8.0;
        assert!(proj.values.iter().all(|v| (v - mean).norm() < 1e-12));

        // random symbol: pointwise dual multiplication then inverse, by hand
        let m: Vec<Complex64> = random::complex_vector(&mut rng, 8);
        let sym = FiniteDualCoefficients::scalar(g, &m).unwrap();
        let got = multiplier_apply(&sym, &f).unwrap();
        let fhat: Vec<Complex64> = (0..8)
            .map(|k| {
                (0..8)
                    .map(|x| f.values[x] * Complex64::from_polar(1.0, 2.0 * PI * (k * x) as f64 / 8.0))
                    .sum::<Complex64>()
                    / 8.0
            })
            .collect();
        for x in 0..8 {
            let expected: Complex64 = (0..8)
                .map(|k| m[k] * fhat[k] * Complex64::from_polar(1.0, -2.0 * PI * (k * x) as f64 / 8.0))
                .sum();
            assert!((got.values[x] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn multipliers_compose_and_commute_with_translations() {
        let mut rng = random::rng(5);
        for g in [FiniteGroup::S3, FiniteGroup::Cyclic(8)] {
            let k = g.dual_dims().len();
            let m1 = FiniteDualCoefficients::scalar(g, &random::complex_vector(&mut rng, k)).unwrap();
            let m2 = FiniteDualCoefficients::scalar(g, &random::complex_vector(&mut rng, k)).unwrap();
            let prod = FiniteDualCoefficients {
                group: g,
                blocks: m1.blocks.iter().zip(&m2.blocks).map(|(a, b)| a * b).collect(),
            };
            let f = FiniteGroupFunction::random(g, &mut rng);
            let lhs = multiplier_apply(&m1, &multiplier_apply(&m2, &f).unwrap()).unwrap();
            let rhs = multiplier_apply(&prod, &f).unwrap();
            assert!(lhs.sub(&rhs).unwrap().lp_norm(2.0) < 1e-12);
            for h in 0..g.order() {
                let a = multiplier_apply(&m1, &f.left_translate(h)).unwrap();
                let b = multiplier_apply(&m1, &f).unwrap().left_translate(h);
                assert!(a.sub(&b).unwrap().lp_norm(2.0) < 1e-12);
            }
        }
    }

    #[test]
    fn non_central_symbol_rejected_on_s3() {
        let mut blocks = FiniteDualCoefficients::zeros(FiniteGroup::S3).blocks;
        blocks[2][(0, 1)] = c(1.0);
        let sym = FiniteDualCoefficients::new(FiniteGroup::S3, blocks).unwrap();
        let f = FiniteGroupFunction::constant(FiniteGroup::S3, c(1.0));
        assert!(multiplier_apply(&sym, &f).is_err());
    }
}
