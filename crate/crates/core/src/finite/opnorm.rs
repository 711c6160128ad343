//! `L^p → L^q` norms of linear maps on functions over a finite group with the
//! normalized counting measure.
//!
//! Exact for `p = 1`, `q = ∞` and `p = q = 2`. Otherwise a nonlinear power
//! iteration (projected gradient ascent on the unit sphere) is restarted from
//! seeded random points; every iterate is a feasible point, so the best value
//! is a certified lower bound.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random;

#[derive(Debug, Clone, Serialize)]
pub struct NormSearch {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for NormSearch {
    fn default() -> Self {
        NormSearch { restarts: 32, max_iter: 2000, tol: 1e-13, seed: 0x5eed }
    }
}

/// `lower ≤ ‖T‖ ≤ upper`; `heuristic` is the best local maximum found.
#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub heuristic: f64,
    pub upper: f64,
    pub exact: bool,
    pub method: String,
}

impl NormEstimate {
    fn exact(value: f64, method: &str) -> Self {
        NormEstimate { lower: value, heuristic: value, upper: value, exact: true, method: method.into() }
    }
}

fn conj_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Unnormalized `ℓ^p` norm.
fn lp(v: &[Complex64], p: f64) -> f64 {
    let top = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if p.is_infinite() || top == 0.0 {
        return top;
    }
    top * v.iter().map(|z| (z.norm() / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `sign(v) |v|^{r-1}`, the gradient direction of `‖v‖_r^r / r`.
fn duality_map(v: &[Complex64], r: f64) -> Vec<Complex64> {
    let top = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    v.iter()
        .map(|z| {
            let a = z.norm();
            if a == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (z / a) * (a / top).powf(r - 1.0)
            }
        })
        .collect()
}

fn apply(t: &DMatrix<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    (0..t.nrows())
        .map(|i| (0..t.ncols()).map(|j| t[(i, j)] * x[j]).sum())
        .collect()
}

fn apply_adjoint(t: &DMatrix<Complex64>, y: &[Complex64]) -> Vec<Complex64> {
    (0..t.ncols())
        .map(|j| (0..t.nrows()).map(|i| t[(i, j)].conj() * y[i]).sum())
        .collect()
}

fn col(t: &DMatrix<Complex64>, j: usize) -> Vec<Complex64> {
    t.column(j).iter().copied().collect()
}

fn row(t: &DMatrix<Complex64>, i: usize) -> Vec<Complex64> {
    t.row(i).iter().copied().collect()
}

/// `‖T‖_{ℓ^1→ℓ^q}`: largest `q`-norm of a column.
fn norm_from_l1(t: &DMatrix<Complex64>, q: f64) -> f64 {
    (0..t.ncols()).map(|j| lp(&col(t, j), q)).fold(0.0, f64::max)
}

/// `‖T‖_{ℓ^p→ℓ^∞}`: largest `p'`-norm of a row.
fn norm_to_linf(t: &DMatrix<Complex64>, p: f64) -> f64 {
    let pc = conj_exponent(p);
    (0..t.nrows()).map(|i| lp(&row(t, i), pc)).fold(0.0, f64::max)
}

fn ratio(t: &DMatrix<Complex64>, x: &[Complex64], p: f64, q: f64) -> f64 {
    let nx = lp(x, p);
    if nx == 0.0 {
        0.0
    } else {
        lp(&apply(t, x), q) / nx
    }
}

/// Nonlinear power iteration `x ← J_{p'}(T* J_q(T x))`, normalized in `ℓ^p`.
fn power_iteration(t: &DMatrix<Complex64>, mut x: Vec<Complex64>, p: f64, q: f64, opts: &NormSearch) -> f64 {
    let pc = conj_exponent(p);
    let mut best = ratio(t, &x, p, q);
    for _ in 0..opts.max_iter {
        let y = apply(t, &x);
        if lp(&y, q) == 0.0 {
            break;
        }
        let g = apply_adjoint(t, &duality_map(&y, q));
        let next = duality_map(&g, pc);
        let n = lp(&next, p);
        if n == 0.0 {
            break;
        }
        x = next.into_iter().map(|z| z / n).collect();
        let val = ratio(t, &x, p, q);
        let improved = val > best * (1.0 + opts.tol);
        best = best.max(val);
        if !improved {
            break;
        }
    }
    best
}

/// Estimate of `‖T‖_{L^p(G)→L^q(G)}` for the normalized counting measure,
/// `T` given by its matrix on function values.
pub fn pq_operator_norm(t: &DMatrix<Complex64>, p: f64, q: f64, opts: &NormSearch) -> Result<NormEstimate> {
    let valid = |e: f64| e >= 1.0 && !e.is_nan();
    if !valid(p) || !valid(q) {
        return Err(Error::invalid(format!("exponents must lie in [1, ∞], got p={p}, q={q}")));
    }
    if t.nrows() != t.ncols() || t.nrows() == 0 {
        return Err(Error::invalid("operator must be a nonempty square matrix"));
    }
    let n = t.nrows() as f64;
    // ‖f‖_{L^p} = N^{-1/p} ‖f‖_{ℓ^p}
    let scale = n.powf(1.0 / p - 1.0 / q);
    if p == 1.0 {
        return Ok(NormEstimate::exact(scale * norm_from_l1(t, q), "columns"));
    }
    if q.is_infinite() {
        return Ok(NormEstimate::exact(scale * norm_to_linf(t, p), "rows"));
    }
    if p == 2.0 && q == 2.0 {
        let s = t.singular_values().max();
        return Ok(NormEstimate::exact(s, "svd"));
    }
    // The measure is a probability, so L^p ⊂ L^1 and L^∞ ⊂ L^q contractively.
    let upper = (n.powf(1.0 - 1.0 / q) * norm_from_l1(t, q)).min(n.powf(1.0 / p) * norm_to_linf(t, p));

    let dim = t.ncols();
    let mut starts: Vec<Vec<Complex64>> = (0..opts.restarts)
        .map(|k| {
            let mut r = random::rng(opts.seed.wrapping_add(k as u64));
            random::complex_vector(&mut r, dim)
        })
        .collect();
    starts.push(vec![Complex64::new(1.0, 0.0); dim]);
    if let Some(v) = t.clone().svd(false, true).v_t {
        starts.push(v.row(0).iter().map(|z| z.conj()).collect());
    }
    let values: Vec<f64> = starts
        .into_par_iter()
        .map(|x| power_iteration(t, x, p, q, opts))
        .collect();
    let best = values.into_iter().fold(0.0, f64::max) * scale;
    Ok(NormEstimate {
        lower: best,
        heuristic: best,
        upper: upper.max(best),
        exact: false,
        method: "power-iteration".into(),
    })
}
