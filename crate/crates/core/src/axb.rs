//! The `ax+b` group `{(a, b) : a > 0}` with `(a₁,b₁)(a₂,b₂) = (a₁a₂, a₁b₂ + b₁)`.
//!
//! Functions are sampled in `(α, b) = (log a, b)`, where the left Haar measure
//! `a⁻² da db` becomes `e^{-α} dα db`. Half-line functions for `π^±` live on
//! a grid uniform in `log |t|` with the same step as the `α`-grid, so
//! dilations are index shifts and `s/t` in the kernel is always a node.
//!
//! `f̂(π^±) = π^±(f) D^±` has kernel `K(t, s) = (√|t| / |s|) F₂f(s/t, -t)`,
//! with `(F₂f)(a, ξ) = ∫ f(a, b) e^{-2πibξ} db`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{interpolate_cubic, UniformGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxbPoint {
    pub a: f64,
    pub b: f64,
}

impl AxbPoint {
    pub const IDENTITY: AxbPoint = AxbPoint { a: 1.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !b.is_finite() {
            return Err(Error::invalid(format!("ax+b needs a > 0, got a={a}, b={b}")));
        }
        Ok(AxbPoint { a, b })
    }

    pub fn random<R: Rng>(rng: &mut R, log_spread: f64, b_spread: f64) -> Self {
        AxbPoint {
            a: rng.random_range(-log_spread..=log_spread).exp(),
            b: rng.random_range(-b_spread..=b_spread),
        }
    }

    pub fn mul(&self, other: &AxbPoint) -> AxbPoint {
        AxbPoint { a: self.a * other.a, b: self.a * other.b + self.b }
    }

    pub fn inv(&self) -> AxbPoint {
        AxbPoint { a: 1.0 / self.a, b: -self.b / self.a }
    }
}

/// `Δ(a, b) = 1/a`.
pub fn modular(g: AxbPoint) -> f64 {
    1.0 / g.a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Function on the half-line of the given sign, sampled at
/// `t_i = ±e^{grid.point(i)}`; `∫ |φ|² dt = Σ |φ_i|² |t_i| h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLineFunction {
    pub sign: Sign,
    pub log_grid: UniformGrid,
    pub values: Vec<Complex64>,
}

impl HalfLineFunction {
    pub fn from_fn(sign: Sign, log_grid: UniformGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = log_grid.points().into_iter().map(|tau| f(sign.factor() * tau.exp())).collect();
        HalfLineFunction { sign, log_grid, values }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.sign.factor() * self.log_grid.point(i).exp()
    }

    pub fn norm(&self) -> f64 {
        let h = self.log_grid.step;
        (0..self.values.len())
            .map(|i| self.values[i].norm_sqr() * self.point(i).abs() * h)
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        HalfLineFunction {
            sign: self.sign,
            log_grid: self.log_grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// `D^± φ(s) = √|s| φ(s)`.
    pub fn apply_d(&self) -> Self {
        HalfLineFunction {
            sign: self.sign,
            log_grid: self.log_grid,
            values: self.values.iter().enumerate().map(|(i, v)| v * self.point(i).abs().sqrt()).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        HalfLineFunction {
            sign: self.sign,
            log_grid: self.log_grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// `π^±(a, b)φ(t) = √a e^{2πibt} φ(at)`; the dilation is a shift by `log a`
/// in the log grid (cubic interpolation off the lattice).
pub fn axb_rep(sign: Sign, g: AxbPoint, phi: &HalfLineFunction) -> Result<HalfLineFunction> {
    if phi.sign != sign {
        return Err(Error::invalid(format!("π^{sign:?} acts on functions on the {sign:?} half-line, got {:?}", phi.sign)));
    }
    let grid = phi.log_grid;
    let shift = g.a.ln();
    let values = (0..grid.len)
        .map(|i| {
            let t = phi.point(i);
            let v = interpolate_cubic(&grid, &phi.values, grid.point(i) + shift);
            Complex64::from_polar(g.a.sqrt(), 2.0 * PI * g.b * t) * v
        })
        .collect();
    Ok(HalfLineFunction { sign, log_grid: grid, values })
}

/// Samples on `[-A, A) × [-B, B)` in `(log a, b)`, row-major in `log a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxbFunction {
    pub log_a: UniformGrid,
    pub b: UniformGrid,
    pub values: Vec<Complex64>,
}

impl AxbFunction {
    pub fn new(log_a: UniformGrid, b: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != log_a.len * b.len {
            return Err(Error::invalid(format!("expected {} samples, got {}", log_a.len * b.len, values.len())));
        }
        Ok(AxbFunction { log_a, b, values })
    }

    pub fn from_fn(
        log_half_width: f64,
        n_log_a: usize,
        b_half_width: f64,
        n_b: usize,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        if n_log_a % 2 != 0 || n_log_a < 8 || n_b < 8 {
            return Err(Error::invalid("grids need at least 8 nodes and an even log-a count"));
        }
        let log_a = UniformGrid::periodic_box(log_half_width, n_log_a)?;
        let b = UniformGrid::periodic_box(b_half_width, n_b)?;
        let mut values = Vec::with_capacity(n_log_a * n_b);
        for al in log_a.points() {
            for bb in b.points() {
                values.push(f(al.exp(), bb));
            }
        }
        Self::new(log_a, b, values)
    }

    /// `χ(log a) ψ(b)` with `χ(x) = bump(x / rho_a)`, `ψ(y) = bump(y / rho_b)`,
    /// `bump(x) = exp(-1/(1-x²))` on `|x| < 1`.
    pub fn product_bump(rho_a: f64, rho_b: f64, log_half_width: f64, n_log_a: usize, b_half_width: f64, n_b: usize) -> Result<Self> {
        Self::from_fn(log_half_width, n_log_a, b_half_width, n_b, |a, b| {
            Complex64::new(bump(a.ln() / rho_a) * bump(b / rho_b), 0.0)
        })
    }

    pub fn at(&self, i_alpha: usize, i_b: usize) -> Complex64 {
        self.values[i_alpha * self.b.len + i_b]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        AxbFunction { log_a: self.log_a, b: self.b, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Left Haar quadrature `Σ f e^{-α} h_α h_b`.
    pub fn left_haar_integral(&self) -> Complex64 {
        let w = self.log_a.step * self.b.step;
        let mut acc = Complex64::default();
        for (ia, al) in self.log_a.points().into_iter().enumerate() {
            let row: Complex64 = (0..self.b.len).map(|ib| self.at(ia, ib)).sum();
            acc += row * (-al).exp();
        }
        acc * w
    }

    pub fn norm_sq(&self) -> f64 {
        let w = self.log_a.step * self.b.step;
        let mut acc = 0.0;
        for (ia, al) in self.log_a.points().into_iter().enumerate() {
            let row: f64 = (0..self.b.len).map(|ib| self.at(ia, ib).norm_sqr()).sum();
            acc += row * (-al).exp();
        }
        acc * w
    }

    pub fn check_decay(&self, eps_tail: f64) -> Result<()> {
        let top = self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        let (na, nb) = (self.log_a.len, self.b.len);
        let mut edge = 0.0_f64;
        for ia in 0..na {
            for ib in 0..nb {
                if ia == 0 || ia == na - 1 || ib == 0 || ib == nb - 1 {
                    edge = edge.max(self.at(ia, ib).norm());
                }
            }
        }
        if top > 0.0 && edge > eps_tail * top {
            return Err(Error::refused(format!("function does not decay inside its box: boundary/max = {:.3e}", edge / top)));
        }
        Ok(())
    }

    /// `(F₂f)(a_k, ξ)` for every log-a node.
    fn b_transform(&self, xi: f64) -> Vec<Complex64> {
        let h = self.b.step;
        let phase: Vec<Complex64> = self.b.points().iter().map(|&b| Complex64::from_polar(h, -2.0 * PI * b * xi)).collect();
        (0..self.log_a.len)
            .map(|ia| (0..self.b.len).map(|ib| self.at(ia, ib) * phase[ib]).sum())
            .collect()
    }
}

pub fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxbOptions {
    /// Smallest `|t|` on the half-line grid.
    pub t_min: f64,
    /// Largest `|t|` as a fraction of the `b`-Nyquist frequency.
    pub bandwidth_fraction: f64,
    pub eps_tail: f64,
}

impl Default for AxbOptions {
    fn default() -> Self {
        AxbOptions { t_min: 1e-6, bandwidth_fraction: 0.875, eps_tail: 1e-8 }
    }
}

/// Half-line grid in `log |t|` with the function's `log a` step, aligned so
/// that `log t - log s` is always a multiple of the step.
pub fn half_line_grid(f: &AxbFunction, opts: &AxbOptions) -> Result<UniformGrid> {
    if !(opts.t_min > 0.0) || !(opts.bandwidth_fraction > 0.0) {
        return Err(Error::invalid("t_min and bandwidth_fraction must be positive"));
    }
    let h = f.log_a.step;
    let t_max = opts.bandwidth_fraction * f.b.nyquist();
    if t_max <= opts.t_min {
        return Err(Error::invalid("t_max must exceed t_min"));
    }
    let hi = (t_max.ln() / h).floor();
    let lo = (opts.t_min.ln() / h).ceil();
    UniformGrid::new(lo * h, h, (hi - lo) as usize + 1)
}

/// `f̂(π^±)` sampled on `t_i, s_j` of a half-line grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineKernel {
    pub sign: Sign,
    pub log_grid: UniformGrid,
    /// `kernel[(i, j)] = K(t_i, s_j)`.
    pub kernel: DMatrix<Complex64>,
}

impl HalfLineKernel {
    fn weight(&self, i: usize) -> f64 {
        self.log_grid.point(i).exp() * self.log_grid.step
    }

    pub fn apply(&self, phi: &HalfLineFunction) -> Result<HalfLineFunction> {
        if phi.sign != self.sign || phi.log_grid != self.log_grid {
            return Err(Error::invalid("input must live on the kernel's half-line grid"));
        }
        let n = self.log_grid.len;
        let values = (0..n)
            .map(|i| (0..n).map(|j| self.kernel[(i, j)] * phi.values[j] * self.weight(j)).sum())
            .collect();
        Ok(HalfLineFunction { sign: self.sign, log_grid: self.log_grid, values })
    }

    pub fn hs_norm_sq(&self) -> f64 {
        let n = self.log_grid.len;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.kernel[(i, j)].norm_sqr() * self.weight(i) * self.weight(j);
            }
        }
        acc
    }
}

fn check_bandwidth(f: &AxbFunction, grid: &UniformGrid) -> Result<()> {
    let t_max = grid.end().exp();
    if t_max > f.b.nyquist() * (1.0 + 1e-12) {
        return Err(Error::refused(format!(
            "|s| up to {t_max:.4} exceeds the b-Nyquist frequency {:.4}",
            f.b.nyquist()
        )));
    }
    Ok(())
}

/// Kernel of `π^±(f) D^±` on the grid from [`half_line_grid`].
pub fn axb_fourier(f: &AxbFunction, sign: Sign, opts: &AxbOptions) -> Result<HalfLineKernel> {
    f.check_decay(opts.eps_tail)?;
    let grid = half_line_grid(f, opts)?;
    axb_fourier_on(f, sign, grid)
}

/// Same on an explicit half-line grid whose step equals the `log a` step.
pub fn axb_fourier_on(f: &AxbFunction, sign: Sign, grid: UniformGrid) -> Result<HalfLineKernel> {
    if (grid.step - f.log_a.step).abs() > 1e-12 * grid.step {
        return Err(Error::invalid("half-line grid step must equal the log-a step"));
    }
    check_bandwidth(f, &grid)?;
    let n = grid.len;
    let mut kernel = DMatrix::zeros(n, n);
    for i in 0..n {
        let t = sign.factor() * grid.point(i).exp();
        let column = f.b_transform(-t);
        for j in 0..n {
            let s = sign.factor() * grid.point(j).exp();
            // log(s/t) = (j - i) h
            let v = interpolate_cubic(&f.log_a, &column, grid.point(j) - grid.point(i));
            kernel[(i, j)] = v * (t.abs().sqrt() / s.abs());
        }
    }
    Ok(HalfLineKernel { sign, log_grid: grid, kernel })
}

/// `HS(f̂(π^±))²` over the full strip `{(t, at)}`:
/// `Σ_{t, α} |t| e^{-α} |F₂f(e^α, -t)|² h²`.
fn hs_strip(f: &AxbFunction, sign: Sign, grid: &UniformGrid) -> f64 {
    let h = grid.step;
    let weights: Vec<f64> = f.log_a.points().iter().map(|al| (-al).exp()).collect();
    (0..grid.len)
        .map(|i| {
            let t = sign.factor() * grid.point(i).exp();
            let col = f.b_transform(-t);
            t.abs() * col.iter().zip(&weights).map(|(v, w)| v.norm_sqr() * w).sum::<f64>()
        })
        .sum::<f64>()
        * h
        * h
}

#[derive(Debug, Clone, Serialize)]
pub struct AxbPlancherelReport {
    pub lhs: f64,
    pub rhs_plus: f64,
    pub rhs_minus: f64,
    pub rhs: f64,
    #[serde(serialize_with = "crate::report::nonfinite")]
    pub relative_error: f64,
    pub n_log_a: usize,
    pub n_b: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub note: String,
}

pub fn axb_plancherel(f: &AxbFunction, opts: &AxbOptions) -> Result<AxbPlancherelReport> {
    f.check_decay(opts.eps_tail)?;
    let grid = half_line_grid(f, opts)?;
    check_bandwidth(f, &grid)?;
    let lhs = f.norm_sq();
    let (rhs_plus, rhs_minus) = rayon::join(|| hs_strip(f, Sign::Plus, &grid), || hs_strip(f, Sign::Minus, &grid));
    let rhs = rhs_plus + rhs_minus;
    let relative_error = if lhs == 0.0 {
        if rhs == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (lhs - rhs).abs() / lhs
    };
    Ok(AxbPlancherelReport {
        lhs,
        rhs_plus,
        rhs_minus,
        rhs,
        relative_error,
        n_log_a: f.log_a.len,
        n_b: f.b.len,
        t_min: grid.point(0).exp(),
        t_max: grid.end().exp(),
        note: "one-dimensional representations carry zero Plancherel measure".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn bump_fn(n: usize) -> AxbFunction {
        AxbFunction::product_bump(1.0, 1.0, 1.25, n, 1.25, n).unwrap()
    }

    #[test]
    fn group_and_modular_function() {
        assert_eq!(modular(AxbPoint::IDENTITY), 1.0);
        assert_eq!(modular(AxbPoint::new(2.0, 7.0).unwrap()), 0.5);
        assert!(AxbPoint::new(-1.0, 0.0).is_err());
        let mut rng = random::rng(50);
        for _ in 0..100 {
            let g = AxbPoint::random(&mut rng, 2.0, 3.0);
            let h = AxbPoint::random(&mut rng, 2.0, 3.0);
            let lhs = modular(g.mul(&h));
            assert!((lhs - modular(g) * modular(h)).abs() <= 1e-15 * lhs);
            let e = g.mul(&g.inv());
            assert!((e.a - 1.0).abs() < 1e-14 && e.b.abs() < 1e-12);
        }
    }

    #[test]
    fn representation_examples() {
        let grid = UniformGrid::new(-12.0, 0.01, 1500).unwrap();
        let phi = HalfLineFunction::from_fn(Sign::Plus, grid, |t| Complex64::new(t * (-t).exp(), 0.0));
        let same = axb_rep(Sign::Plus, AxbPoint::IDENTITY, &phi).unwrap();
        assert!(same.sub(&phi).norm() < 1e-15);
        let g = AxbPoint::new(1.0, 0.3).unwrap();
        let out = axb_rep(Sign::Plus, g, &phi).unwrap();
        let exp = HalfLineFunction::from_fn(Sign::Plus, grid, |t| Complex64::from_polar(t * (-t).exp(), 2.0 * PI * 0.3 * t));
        assert!(out.sub(&exp).norm() < 1e-12);
        let mut rng = random::rng(51);
        for _ in 0..20 {
            let g = AxbPoint::random(&mut rng, 1.0, 2.0);
            let out = axb_rep(Sign::Plus, g, &phi).unwrap();
            assert!((out.norm() - phi.norm()).abs() < 1e-6);
        }
        assert!(axb_rep(Sign::Minus, g, &phi).is_err());
    }

    #[test]
    fn left_invariance_of_haar_measure() {
        let f = |a: f64, b: f64| (-(a.ln()).powi(2) * 2.0 - b * b * 3.0).exp();
        let mut rng = random::rng(52);
        let base = AxbFunction::from_fn(6.0, 256, 6.0, 256, |a, b| Complex64::new(f(a, b), 0.0)).unwrap();
        let i0 = base.left_haar_integral().re;
        for _ in 0..5 {
            let g0 = AxbPoint::random(&mut rng, 0.5, 0.5);
            let gi = g0.inv();
            let moved = AxbFunction::from_fn(6.0, 256, 6.0, 256, |a, b| {
                let p = gi.mul(&AxbPoint { a, b });
                Complex64::new(f(p.a, p.b), 0.0)
            })
            .unwrap();
            assert!((moved.left_haar_integral().re - i0).abs() < 1e-6 * i0);
        }
    }

    #[test]
    fn kernel_matches_direct_quadrature() {
        let f = bump_fn(64);
        let opts = AxbOptions { t_min: 1e-3, ..Default::default() };
        for sign in [Sign::Plus, Sign::Minus] {
            let k = axb_fourier(&f, sign, &opts).unwrap();
            let phi_at = |t: f64| Complex64::new(t.abs() * (-t.abs()).exp(), 0.0);
            let phi = HalfLineFunction::from_fn(sign, k.log_grid, phi_at);
            let got = k.apply(&phi).unwrap();
            let mut err = 0.0_f64;
            let mut scale = 0.0_f64;
            for i in (0..k.log_grid.len).step_by(7) {
                let t = got.point(i);
                let mut direct = Complex64::default();
                for (ia, al) in f.log_a.points().into_iter().enumerate() {
                    let a = al.exp();
                    let d_phi = (a * t).abs().sqrt() * phi_at(a * t);
                    for (ib, b) in f.b.points().into_iter().enumerate() {
                        direct += f.at(ia, ib) * Complex64::from_polar(a.sqrt(), 2.0 * PI * b * t) * d_phi * (-al).exp();
                    }
                }
                direct *= f.log_a.step * f.b.step;
                err = err.max((direct - got.values[i]).norm());
                scale = scale.max(direct.norm());
            }
            assert!(err <= 1e-3 * scale, "{sign:?}: {err} / {scale}");
        }
    }

    #[test]
    fn plancherel_examples() {
        let opts = AxbOptions::default();
        let z = AxbFunction::from_fn(1.25, 16, 1.25, 16, |_, _| Complex64::default()).unwrap();
        let r = axb_plancherel(&z, &opts).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let f = bump_fn(64);
        let r1 = axb_plancherel(&f, &opts).unwrap();
        assert!(r1.relative_error < 1e-2, "{r1:?}");
        let r3 = axb_plancherel(&f.scale(Complex64::new(3.0, 0.0)), &opts).unwrap();
        assert!((r3.lhs - 9.0 * r1.lhs).abs() < 1e-12 * r3.lhs && (r3.rhs - 9.0 * r1.rhs).abs() < 1e-12 * r3.rhs);
        let k = axb_fourier(&f, Sign::Plus, &opts).unwrap();
        assert!(k.hs_norm_sq() <= r1.rhs_plus * (1.0 + 1e-12));
        let lin = axb_fourier(&f.scale(Complex64::new(0.0, 2.0)), Sign::Plus, &opts).unwrap();
        assert!((lin.kernel - k.kernel * Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn d_intertwines_with_modular_factor() {
        let grid = UniformGrid::new(-10.0, 0.01, 1400).unwrap();
        let phi = HalfLineFunction::from_fn(Sign::Minus, grid, |t| Complex64::new(t * t * (-t * t).exp(), 0.0));
        let mut rng = random::rng(53);
        for _ in 0..10 {
            let g = AxbPoint::random(&mut rng, 1.0, 2.0);
            let lhs = axb_rep(Sign::Minus, g, &phi).unwrap().apply_d();
            let rhs = axb_rep(Sign::Minus, g, &phi.apply_d()).unwrap().scale(modular(g).sqrt());
            assert!(lhs.sub(&rhs).norm() <= 1e-4 * lhs.norm());
        }
    }
}
