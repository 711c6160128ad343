//! Hausdorff-Young and `L^p → L^q` multiplier checks on finite groups.

use num_complex::Complex64;
use serde::Serialize;

use super::opnorm::{pq_operator_norm, NormEstimate, NormSearch};
use super::{finite_fourier, multiplier_matrix, FiniteDualCoefficients, FiniteGroup, FiniteGroupFunction};
use crate::error::{Error, Result};
use crate::nclp::TracedElement;

#[derive(Debug, Clone, Serialize)]
pub struct HausdorffYoungReport {
    pub p: f64,
    #[serde(serialize_with = "crate::report::nonfinite")]
    pub p_conjugate: f64,
    /// `‖f̂‖` in the dual `L^{p'}` (Schatten norms weighted by `d_π`).
    pub transform_norm: f64,
    /// `‖f‖_p` under the normalized measure.
    pub function_norm: f64,
    pub ratio: f64,
    pub holds: bool,
}

/// Both sides of `‖f̂‖_{p'} ≤ ‖f‖_p`; equality is expected at `p = 2`.
pub fn hausdorff_young_check(f: &FiniteGroupFunction, p: f64) -> Result<HausdorffYoungReport> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::invalid(format!("Hausdorff-Young needs p in [1, 2], got {p}")));
    }
    let pc = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    let transform_norm = finite_fourier(f).to_traced().lp_norm(pc)?;
    let function_norm = f.lp_norm(p);
    let ratio = if function_norm == 0.0 { 0.0 } else { transform_norm / function_norm };
    Ok(HausdorffYoungReport {
        p,
        p_conjugate: pc,
        transform_norm,
        function_norm,
        ratio,
        holds: transform_norm <= function_norm * (1.0 + 1e-12),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ZhangReport {
    pub p: f64,
    pub q: f64,
    #[serde(serialize_with = "crate::report::nonfinite")]
    pub r: f64,
    pub operator_norm: NormEstimate,
    pub weak_norm: f64,
    /// `‖T_m‖_{p→q} / ‖m‖_{r,∞}` from the certified lower bound (0 for `m = 0`).
    pub ratio: f64,
    /// Same ratio with the certified upper bound.
    pub ratio_upper: f64,
    /// `H_N^{1/r}`: Hausdorff-Young plus Hölder plus `‖m‖_r ≤ H_N^{1/r} ‖m‖_{r,∞}`.
    pub a_priori_bound: f64,
}

/// `e^{-t|k|}` on the dual of `ℤ_N`, with `|k| = min(k, N-k)`.
pub fn heat_symbol_on_cyclic(n: usize, t: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::new((-t * k.min(n - k) as f64).exp(), 0.0))
        .collect()
}

/// `‖T_m‖_{L^p→L^q}` against `‖m‖_{L^{r,∞}}` on the dual of `ℤ_N` (counting
/// measure), `1/r = 1/p - 1/q`.
pub fn zhang_ratio(m: &[Complex64], p: f64, q: f64, search: &NormSearch) -> Result<ZhangReport> {
    if !(p > 1.0 && p <= 2.0) || !(q >= 2.0 && q.is_finite()) {
        return Err(Error::invalid(format!("need p in (1, 2] and q in [2, ∞), got p={p}, q={q}")));
    }
    let inv_r = 1.0 / p - 1.0 / q;
    if inv_r <= 0.0 {
        return Err(Error::invalid("1/r = 1/p - 1/q must be positive (p = q excluded)"));
    }
    let r = 1.0 / inv_r;
    let n = m.len();
    let group = FiniteGroup::cyclic(n)?;
    let t = multiplier_matrix(&FiniteDualCoefficients::scalar(group, m)?)?;
    let operator_norm = pq_operator_norm(&t, p, q, search)?;
    let weak_norm = TracedElement::commutative(m, &vec![1.0; n])?.weak_lp_norm(r)?;
    let (ratio, ratio_upper) = if weak_norm == 0.0 {
        (0.0, 0.0)
    } else {
        (operator_norm.lower / weak_norm, operator_norm.upper / weak_norm)
    };
    let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    Ok(ZhangReport {
        p,
        q,
        r,
        operator_norm,
        weak_norm,
        ratio,
        ratio_upper,
        a_priori_bound: harmonic.powf(inv_r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn hausdorff_young_examples() {
        let mut rng = random::rng(20);
        let g = FiniteGroup::Cyclic(16);
        for _ in 0..20 {
            let f = FiniteGroupFunction::random(g, &mut rng);
            let rep = hausdorff_young_check(&f, 2.0).unwrap();
            assert!((rep.ratio - 1.0).abs() < 1e-12);
        }
        let one = FiniteGroupFunction::constant(FiniteGroup::S3, Complex64::new(1.0, 0.0));
        for p in [1.0, 1.25, 2.0] {
            let rep = hausdorff_young_check(&one, p).unwrap();
            assert!((rep.transform_norm - 1.0).abs() < 1e-12 && (rep.function_norm - 1.0).abs() < 1e-12);
        }
        assert!(hausdorff_young_check(&one, 2.5).is_err());
    }

    #[test]
    fn zhang_examples() {
        let s = NormSearch::default();
        let zero = vec![Complex64::new(0.0, 0.0); 16];
        let rep = zhang_ratio(&zero, 4.0 / 3.0, 4.0, &s).unwrap();
        assert_eq!(rep.ratio, 0.0);
        assert_eq!(rep.weak_norm, 0.0);

        let mut ind = zero.clone();
        ind[3] = Complex64::new(1.0, 0.0);
        let rep = zhang_ratio(&ind, 4.0 / 3.0, 4.0, &s).unwrap();
        assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
        // weak norm of a single unit atom is 1; T_m f = f̂(3) χ_3
        assert!((rep.weak_norm - 1.0).abs() < 1e-12);
        assert!(rep.ratio <= rep.a_priori_bound);

        let m = heat_symbol_on_cyclic(16, 0.7);
        let m2: Vec<_> = m.iter().map(|z| z * 2.0).collect();
        let a = zhang_ratio(&m, 4.0 / 3.0, 4.0, &s).unwrap();
        let b = zhang_ratio(&m2, 4.0 / 3.0, 4.0, &s).unwrap();
        assert!((b.weak_norm - 2.0 * a.weak_norm).abs() < 1e-10 * a.weak_norm);
        assert!((b.operator_norm.lower - 2.0 * a.operator_norm.lower).abs() < 1e-10 * a.operator_norm.lower);
        assert!((a.ratio - b.ratio).abs() < 1e-10);
        assert!(zhang_ratio(&m, 2.0, 2.0, &s).is_err());
    }
}
