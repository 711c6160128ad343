//! Spherical analysis on `SL₂(ℝ)` with `K = SO(2)`.
//!
//! Charts: `k(θ)` is the rotation by `θ`, `a(h) = diag(e^{h/2}, e^{-h/2})`,
//! `n(u)` the upper unipotent matrix. `a_r = a(r)` moves the base point of
//! the hyperbolic plane by distance `r`, and `ρ(h) = h/2`.

use nalgebra::{Matrix2, SMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{interpolate_cubic, UniformGrid};

/// `ρ` in the `a(h)` chart: `ρ(h) = RHO · h`.
pub const RHO: f64 = 0.5;

/// Haar normalization used by [`spherical_transform`]: `dx = C sinh r dr`
/// after integrating out `K` (polar coordinates, `C = 2π`).
pub const TRANSFORM_CONSTANT: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SL2Matrix(pub [[f64; 2]; 2]);

impl SL2Matrix {
    pub const IDENTITY: SL2Matrix = SL2Matrix([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        let x = SL2Matrix(m);
        if (x.det() - 1.0).abs() > 1e-12 * (1.0 + x.frobenius().powi(2)) {
            return Err(Error::invalid(format!("determinant {} is not 1", x.det())));
        }
        Ok(x)
    }

    pub fn det(&self) -> f64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        SL2Matrix([[c, -s], [s, c]])
    }

    pub fn a(h: f64) -> Self {
        SL2Matrix([[(h / 2.0).exp(), 0.0], [0.0, (-h / 2.0).exp()]])
    }

    pub fn n(u: f64) -> Self {
        SL2Matrix([[1.0, u], [0.0, 1.0]])
    }

    pub fn mul(&self, o: &SL2Matrix) -> SL2Matrix {
        SL2Matrix((self.to_matrix() * o.to_matrix()).transpose().data.0)
    }

    pub fn inv(&self) -> SL2Matrix {
        let m = self.0;
        SL2Matrix([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    pub fn to_matrix(&self) -> Matrix2<f64> {
        let m = self.0;
        Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    /// Gaussian matrix rescaled to determinant 1 (columns swapped if needed).
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        loop {
            let mut m: [[f64; 2]; 2] = [[rng.sample(StandardNormal), rng.sample(StandardNormal)], [rng.sample(StandardNormal), rng.sample(StandardNormal)]];
            let mut det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det.abs() < 1e-3 {
                continue;
            }
            if det < 0.0 {
                for row in m.iter_mut() {
                    row.swap(0, 1);
                }
                det = -det;
            }
            let s = det.sqrt();
            return SL2Matrix(m.map(|row| row.map(|v| v / s)));
        }
    }

    /// `exp(X)` for traceless `X`, via `X² = -det(X) I`.
    pub fn exp_sl2(x: [[f64; 2]; 2]) -> SL2Matrix {
        let delta = -(x[0][0] * x[1][1] - x[0][1] * x[1][0]);
        let (c, s) = if delta > 0.0 {
            let q = delta.sqrt();
            (q.cosh(), q.sinh() / q)
        } else if delta < 0.0 {
            let q = (-delta).sqrt();
            (q.cos(), q.sin() / q)
        } else {
            (1.0, 1.0)
        };
        SL2Matrix([[c + s * x[0][0], s * x[0][1]], [s * x[1][0], c + s * x[1][1]]])
    }

    /// `max(‖g − e‖, ‖g⁻¹ − e‖)` in operator norm.
    pub fn size(&self) -> f64 {
        let op = |m: SMatrix<f64, 2, 2>| {
            let f2 = m.iter().map(|v| v * v).sum::<f64>();
            let d = m.determinant();
            ((f2 + (f2 * f2 - 4.0 * d * d).max(0.0).sqrt()) / 2.0).sqrt()
        };
        let e = Matrix2::identity();
        op(self.to_matrix() - e).max(op(self.inv().to_matrix() - e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IwasawaTriple {
    pub theta: f64,
    pub h: f64,
    pub u: f64,
}

impl IwasawaTriple {
    pub fn reconstruct(&self) -> SL2Matrix {
        SL2Matrix::rotation(self.theta).mul(&SL2Matrix::a(self.h)).mul(&SL2Matrix::n(self.u))
    }
}

/// `x = k(θ) a(h) n(u)` from the orthogonal-triangular factorization of `x`.
pub fn iwasawa(x: &SL2Matrix) -> Result<IwasawaTriple> {
    let m = x.0;
    let r11 = m[0][0].hypot(m[1][0]);
    if !(r11 > 1e-300) || !r11.is_finite() {
        return Err(Error::invalid("first column is zero"));
    }
    let theta = m[1][0].atan2(m[0][0]);
    let (s, c) = theta.sin_cos();
    let r12 = c * m[0][1] + s * m[1][1];
    Ok(IwasawaTriple { theta, h: 2.0 * r11.ln(), u: r12 / r11 })
}

/// `H(x) = log a_x` in the `h` coordinate.
pub fn iwasawa_h(x: &SL2Matrix) -> f64 {
    let m = x.0;
    2.0 * m[0][0].hypot(m[1][0]).ln()
}

fn ln_cosh(s: f64) -> f64 {
    let a = s.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn ln_sinh_abs(s: f64) -> f64 {
    let a = s.abs();
    if a > 20.0 {
        a - std::f64::consts::LN_2 + (-(-2.0 * a).exp()).ln_1p()
    } else {
        a.sinh().ln()
    }
}

/// Trapezoid sum in the variable `s` with `tan θ = e^{-r} sinh s`, which
/// resolves the peak of width `e^{-r}` at `θ = 0`:
/// `φ_λ(a_r) = (2/π) ∫_0^∞ e^{-(½ - iλ)(r + log(1 + e^{-2r} sinh² s))} cosh(s)^{-2iλ} ds`.
/// Beyond `s = r + 18` the integrand is `A e^{-s}` up to a relative
/// `O(e^{-36})`, and that part of the sum is geometric.
fn phi_adapted(lambda: f64, r: f64, step: f64) -> Complex64 {
    let beta = Complex64::new(0.5, -lambda);
    let nodes = ((r + 18.0) / step).ceil() as usize;
    let term = |s: f64| {
        let l1 = if s == 0.0 { 0.0 } else { (2.0 * ln_sinh_abs(s) - 2.0 * r).exp().ln_1p() };
        (-(beta * (r + l1)) - Complex64::new(0.0, 2.0 * lambda * ln_cosh(s))).exp()
    };
    let mut acc = term(0.0) * 0.5;
    for k in 1..nodes {
        acc += term(k as f64 * step);
    }
    let ln2 = std::f64::consts::LN_2;
    let amp = (beta * (r + 2.0 * ln2) + Complex64::new(0.0, 2.0 * lambda * ln2)).exp();
    acc += amp * (-(nodes as f64) * step).exp() / -(-step).exp_m1();
    acc * (2.0 * step / PI)
}

/// Default step of the adapted rule: the integrand is analytic in the strip
/// `|Im s| < π/2` and grows like `e^{2|λ| |Im s|}` there; the step is small
/// enough that the doubled step used by the convergence check is converged too.
fn default_step(lambda: f64) -> f64 {
    PI / (2.0 * lambda.abs() + 24.0)
}

/// `φ_λ(a_r) = ∫_K e^{-(iλ+ρ) H(a_r⁻¹ k)} dk`, normalized Haar on `K`.
///
/// Refuses when the rule with step `h` and `2h` disagree by more than
/// `1e-12 + 1e-10 |φ|`.
pub fn spherical_phi(lambda: f64, r: f64) -> Result<Complex64> {
    if !lambda.is_finite() || !r.is_finite() {
        return Err(Error::invalid("λ and r must be finite"));
    }
    let r = r.abs();
    if r == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let h = default_step(lambda);
    let fine = phi_adapted(lambda, r, h);
    let coarse = phi_adapted(lambda, r, 2.0 * h);
    if (fine - coarse).norm() > 1e-12 + 1e-10 * fine.norm() {
        return Err(Error::refused(format!(
            "spherical quadrature not converged at λ={lambda}, r={r}; use a step below {:.3e}",
            h / 2.0
        )));
    }
    Ok(fine)
}

/// Plain trapezoid rule in `θ` with `nodes` points, checked against
/// `nodes/2`.
pub fn spherical_phi_theta(lambda: f64, r: f64, nodes: usize) -> Result<Complex64> {
    if nodes < 8 {
        return Err(Error::invalid("need at least 8 nodes"));
    }
    let beta = Complex64::new(0.5, lambda);
    let x_inv = SL2Matrix::a(-r);
    let sum = |m: usize| {
        (0..m)
            .map(|j| {
                let k = SL2Matrix::rotation(2.0 * PI * j as f64 / m as f64);
                (-(beta * iwasawa_h(&x_inv.mul(&k)))).exp()
            })
            .sum::<Complex64>()
            / m as f64
    };
    let fine = sum(nodes);
    let coarse = sum(nodes / 2);
    if (fine - coarse).norm() > 1e-10 * fine.norm().max(1e-300) {
        return Err(Error::refused(format!(
            "θ-quadrature not converged at λ={lambda}, r={r} with {nodes} nodes; try {}",
            4 * nodes
        )));
    }
    Ok(fine)
}

#[derive(Debug, Clone, Serialize)]
pub struct SphericalSample {
    pub lambda: f64,
    pub rho: f64,
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub fn spherical_sample(lambda: f64, radii: &[f64]) -> Result<SphericalSample> {
    let values = radii.par_iter().map(|&r| spherical_phi(lambda, r)).collect::<Result<Vec<_>>>()?;
    Ok(SphericalSample { lambda, rho: RHO, radii: radii.to_vec(), values })
}

/// `-f'' - coth(r) f' - ρ² f` at the interior nodes `2..n-2` of a radial
/// grid (fourth-order central differences).
pub fn radial_operator(grid: &UniformGrid, values: &[Complex64]) -> Vec<(f64, Complex64)> {
    let h = grid.step;
    (2..values.len().saturating_sub(2))
        .filter(|&i| grid.point(i) > 0.0)
        .map(|i| {
            let f = |k: usize| values[k];
            let d1 = (f(i - 2) - f(i - 1) * 8.0 + f(i + 1) * 8.0 - f(i + 2)) / (12.0 * h);
            let d2 = (-f(i - 2) + f(i - 1) * 16.0 - f(i) * 30.0 + f(i + 1) * 16.0 - f(i + 2)) / (12.0 * h * h);
            let r = grid.point(i);
            (r, -d2 - d1 / r.tanh() - f(i) * (RHO * RHO))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub lambda: f64,
    pub step: f64,
    /// `max |L φ - λ² φ| / max |λ² φ|` on the middle half of the grid
    /// (`max |φ|` as denominator when `λ = 0`).
    pub relative_residual: f64,
}

/// Applies the radial operator to `r ↦ φ_λ(a_r)` on `[r_min, r_max]`.
pub fn eigen_check(lambda: f64, r_min: f64, r_max: f64, step: f64) -> Result<EigenReport> {
    let n = ((r_max - r_min) / step).round() as usize + 1;
    let grid = UniformGrid::new(r_min, step, n)?;
    let phi = spherical_sample(lambda, &grid.points())?.values;
    let applied = radial_operator(&grid, &phi);
    let (lo, hi) = (r_min + 0.25 * (r_max - r_min), r_min + 0.75 * (r_max - r_min));
    let l2 = lambda * lambda;
    let mut num = 0.0_f64;
    let mut den = 0.0_f64;
    for (i, (r, lf)) in applied.iter().enumerate() {
        if *r < lo || *r > hi {
            continue;
        }
        let f = phi[i + 2];
        num = num.max((lf - f * l2).norm());
        den = den.max(if l2 > 0.0 { (f * l2).norm() } else { f.norm() });
    }
    Ok(EigenReport { lambda, step, relative_residual: num / den })
}

/// Radial function `r ↦ f(r)` sampled on `r_j = j h`, `j = 0..n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialFunction {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if grid.start != 0.0 || values.len() != grid.len || grid.len < 3 {
            return Err(Error::invalid("radial grid must start at 0 and match the samples"));
        }
        Ok(RadialFunction { grid, values })
    }

    pub fn from_fn(r_max: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = UniformGrid::closed(0.0, r_max, n)?;
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn radius(&self) -> f64 {
        self.grid.end()
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r > self.grid.end() {
            0.0
        } else {
            interpolate_cubic(&self.grid, &self.values, r)
        }
    }

    /// `‖f‖₂² = C ∫ |f|² sinh r dr`.
    pub fn norm_sq(&self) -> f64 {
        TRANSFORM_CONSTANT * simpson(&self.grid, |i| self.values[i].powi(2) * self.grid.point(i).sinh())
    }
}

/// Composite Simpson rule (trapezoid on a final odd interval).
fn simpson(grid: &UniformGrid, f: impl Fn(usize) -> f64) -> f64 {
    let n = grid.len;
    let h = grid.step;
    let m = if (n - 1) % 2 == 0 { n } else { n - 1 };
    let mut acc = 0.0;
    for i in 0..m {
        let w = if i == 0 || i == m - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * f(i);
    }
    let mut total = acc * h / 3.0;
    if m < n {
        total += 0.5 * h * (f(n - 2) + f(n - 1));
    }
    total
}

/// `exp(-1/(1 - (r/R)²))` on `r < R`.
pub fn radial_bump(radius: f64) -> impl Fn(f64) -> f64 + Sync + Copy {
    move |r: f64| {
        let x = r / radius;
        if x.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - x * x)).exp()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SphericalTransform {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest `|Im|` discarded (φ_λ is real for real λ).
    pub max_imag: f64,
    pub constant: f64,
}

/// `H(f)(λ) = C ∫_0^R f(r) φ_λ(a_r) sinh r dr` (Simpson on the samples).
pub fn spherical_transform(f: &RadialFunction, lambdas: &[f64]) -> Result<SphericalTransform> {
    spherical_transform_with(f, lambdas, TRANSFORM_CONSTANT)
}

pub fn spherical_transform_with(f: &RadialFunction, lambdas: &[f64], constant: f64) -> Result<SphericalTransform> {
    let radii = f.grid.points();
    let rows = lambdas
        .par_iter()
        .map(|&l| {
            let phi = spherical_sample(l, &radii)?.values;
            let re = simpson(&f.grid, |i| f.values[i] * phi[i].re * radii[i].sinh());
            let im = simpson(&f.grid, |i| f.values[i] * phi[i].im * radii[i].sinh());
            Ok((constant * re, (constant * im).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SphericalTransform {
        lambdas: lambdas.to_vec(),
        values: rows.iter().map(|p| p.0).collect(),
        max_imag: rows.iter().map(|p| p.1).fold(0.0, f64::max),
        constant,
    })
}

/// Checks that `f` is numerically zero at the end of its grid.
pub fn check_support(f: &RadialFunction, eps: f64) -> Result<()> {
    let peak = f.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let last = f.values[f.values.len() - 1].abs();
    if last > eps * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::refused(format!(
            "radial function is {last:.3e} at r = {}, beyond the grid",
            f.radius()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct ConvolutionOptions {
    pub rho_nodes: usize,
    pub theta_nodes: usize,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        ConvolutionOptions { rho_nodes: 400, theta_nodes: 512 }
    }
}

/// `(f * g)(a_r) = ∫_G f(y) g(y⁻¹ a_r) dy` for radial `f`, `g` supported in
/// `[0, R_f]`, `[0, R_g]`, on the grid `[0, R_f + R_g]` with `n` nodes, using
/// polar coordinates `y = k(θ) a_ρ` and
/// `sinh²(d/2) = sinh²((r-ρ)/2) + sinh r sinh ρ sin²(θ/2)`.
pub fn radial_convolve(
    f: impl Fn(f64) -> f64 + Sync,
    rf: f64,
    g: impl Fn(f64) -> f64 + Sync,
    rg: f64,
    n: usize,
    opts: ConvolutionOptions,
) -> Result<RadialFunction> {
    if opts.rho_nodes < 4 || opts.theta_nodes < 8 {
        return Err(Error::invalid("too few quadrature nodes"));
    }
    let grid = UniformGrid::closed(0.0, rf + rg, n)?;
    let rho_grid = UniformGrid::closed(0.0, rf, opts.rho_nodes + 1)?;
    let nt = opts.theta_nodes;
    let values = grid
        .points()
        .par_iter()
        .map(|&r| {
            let (sr, half_r) = (r.sinh(), r / 2.0);
            simpson(&rho_grid, |i| {
                let rho = rho_grid.point(i);
                let fr = f(rho);
                if fr == 0.0 {
                    return 0.0;
                }
                let base = (half_r - rho / 2.0).sinh().powi(2);
                let cross = sr * rho.sinh();
                // θ ↦ θ + π symmetric trapezoid on the circle
                let inner: f64 = (0..nt)
                    .map(|j| {
                        let th = 2.0 * PI * j as f64 / nt as f64;
                        let s2 = base + cross * (th / 2.0).sin().powi(2);
                        g(2.0 * s2.sqrt().asinh())
                    })
                    .sum::<f64>()
                    * (2.0 * PI / nt as f64);
                fr * inner * rho.sinh()
            })
        })
        .collect();
    RadialFunction::new(grid, values)
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticFit {
    pub lambda: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Coefficient of `e^{(iλ - ρ) r}`.
    pub c_plus: Complex64,
    /// Coefficient of `e^{(-iλ - ρ) r}`.
    pub c_minus: Complex64,
    /// `‖residual‖ / ‖φ e^{ρ r}‖` over the fit window.
    pub residual: f64,
    pub condition: f64,
}

/// Least-squares fit of `φ_λ(a_r) e^{ρ r} ≈ c₊ e^{iλr} + c₋ e^{-iλr}` on
/// `r ∈ [r_min, r_max]` with `samples` points.
pub fn asymptotic_fit_window(lambda: f64, r_min: f64, r_max: f64, samples: usize) -> Result<AsymptoticFit> {
    if !(r_max > r_min) || samples < 4 {
        return Err(Error::invalid("need r_max > r_min and at least 4 samples"));
    }
    let grid = UniformGrid::closed(r_min, r_max, samples)?;
    let radii = grid.points();
    let phi = spherical_sample(lambda, &radii)?.values;
    let y: Vec<Complex64> = phi.iter().zip(&radii).map(|(p, r)| p * (RHO * r).exp()).collect();
    let basis = |r: f64| [Complex64::from_polar(1.0, lambda * r), Complex64::from_polar(1.0, -lambda * r)];
    let mut gram = nalgebra::Matrix2::<Complex64>::zeros();
    let mut rhs = nalgebra::Vector2::<Complex64>::zeros();
    for (r, v) in radii.iter().zip(&y) {
        let b = basis(*r);
        for i in 0..2 {
            rhs[i] += b[i].conj() * v;
            for j in 0..2 {
                gram[(i, j)] += b[i].conj() * b[j];
            }
        }
    }
    // Gram of two unit-modulus exponentials: eigenvalues m ± |off-diagonal|
    let m = samples as f64;
    let off = gram[(0, 1)].norm();
    let condition = (m + off) / (m - off).max(f64::MIN_POSITIVE);
    if condition > 1e6 {
        return Err(Error::refused(format!(
            "asymptotic fit ill-conditioned at λ={lambda} on [{r_min}, {r_max}] (condition {condition:.3e})"
        )));
    }
    let c = gram.lu().solve(&rhs).ok_or_else(|| Error::refused("singular asymptotic fit"))?;
    let mut res = 0.0;
    let mut sig = 0.0;
    for (r, v) in radii.iter().zip(&y) {
        let b = basis(*r);
        res += (v - c[0] * b[0] - c[1] * b[1]).norm_sqr();
        sig += v.norm_sqr();
    }
    Ok(AsymptoticFit { lambda, r_min, r_max, c_plus: c[0], c_minus: c[1], residual: (res / sig).sqrt(), condition })
}

/// Smallest `|λ|` accepted by [`asymptotic_fit`].
pub const FIT_LAMBDA_MIN: f64 = 0.01;

/// Fit on `[8, 8 + max(8, π/|λ|)]`, 128 samples.
pub fn asymptotic_fit(lambda: f64) -> Result<AsymptoticFit> {
    if lambda.abs() < FIT_LAMBDA_MIN {
        return Err(Error::refused(format!("asymptotic fit needs |λ| ≥ {FIT_LAMBDA_MIN}, got {lambda}")));
    }
    let width = 8.0_f64.max(PI / lambda.abs());
    asymptotic_fit_window(lambda, 8.0, 8.0 + width, 128)
}

/// Fitted `|ĉ(λ)|^{-2}` on a grid of positive `λ`.
#[derive(Debug, Clone, Serialize)]
pub struct PlancherelDensity {
    pub lambdas: Vec<f64>,
    pub weights: Vec<f64>,
    pub density: Vec<f64>,
    /// `[0, λ_min)` is left out; the density vanishes at `λ = 0`.
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Trapezoid nodes on `[λ_min, Λ]` with the fitted density at each node.
pub fn plancherel_density(lambda_max: f64, nodes: usize) -> Result<PlancherelDensity> {
    let grid = UniformGrid::closed(FIT_LAMBDA_MIN, lambda_max, nodes)?;
    let lambdas = grid.points();
    let density = lambdas
        .par_iter()
        .map(|&l| asymptotic_fit(l).map(|f| f.c_plus.norm_sqr().recip()))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlancherelDensity { weights: grid.trapezoid_weights(), lambdas, density, lambda_min: FIT_LAMBDA_MIN, lambda_max })
}

impl PlancherelDensity {
    /// `∫_{|λ| ≥ λ_min} F(λ) |ĉ(λ)|^{-2} dλ` for even `F` given on the nodes.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        2.0 * values.iter().zip(&self.weights).zip(&self.density).map(|((v, w), d)| v * w * d).sum::<f64>()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InversionReport {
    /// `κ` with `f(e) = κ ∫ H(f)(λ) |ĉ(λ)|^{-2} dλ`, calibrated on a
    /// separate bump.
    pub kappa: f64,
    pub calibration_radius: f64,
    pub test_radius: f64,
    pub reconstructed: f64,
    pub exact: f64,
    pub relative_error: f64,
    /// `κ ∫ |H(f)|² |ĉ|^{-2} dλ` against `‖f‖₂²`.
    pub isometry_lhs: f64,
    pub isometry_rhs: f64,
    pub isometry_error: f64,
}

/// Calibrates `κ` on a bump of radius `calibration_radius` and reconstructs
/// a bump of radius `test_radius` at the origin.
pub fn inversion_check(calibration_radius: f64, test_radius: f64, density: &PlancherelDensity, radial_nodes: usize) -> Result<InversionReport> {
    let cal = RadialFunction::from_fn(calibration_radius, radial_nodes, radial_bump(calibration_radius))?;
    let test = RadialFunction::from_fn(test_radius, radial_nodes, radial_bump(test_radius))?;
    let hc = spherical_transform(&cal, &density.lambdas)?;
    let ht = spherical_transform(&test, &density.lambdas)?;
    let kappa = cal.values[0] / density.integrate(&hc.values);
    let reconstructed = kappa * density.integrate(&ht.values);
    let exact = test.values[0];
    let sq: Vec<f64> = ht.values.iter().map(|v| v * v).collect();
    let isometry_lhs = kappa * density.integrate(&sq);
    let isometry_rhs = test.norm_sq();
    Ok(InversionReport {
        kappa,
        calibration_radius,
        test_radius,
        reconstructed,
        exact,
        relative_error: (reconstructed - exact).abs() / exact.abs(),
        isometry_lhs,
        isometry_rhs,
        isometry_error: (isometry_lhs - isometry_rhs).abs() / isometry_rhs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicativityReport {
    pub lambdas: Vec<f64>,
    pub product: Vec<f64>,
    pub transform_of_convolution: Vec<f64>,
    pub max_relative_error: f64,
    /// Least-squares `C` with `H_C(f*g) = H_C(f) H_C(g)`.
    pub calibrated_constant: f64,
}

/// Compares `H(f*g)` with `H(f) H(g)` for bumps of radii `rf`, `rg`.
pub fn multiplicativity_check(rf: f64, rg: f64, lambdas: &[f64], radial_nodes: usize, opts: ConvolutionOptions) -> Result<MultiplicativityReport> {
    let (bf, bg) = (radial_bump(rf), radial_bump(rg));
    let f = RadialFunction::from_fn(rf, radial_nodes, bf)?;
    let g = RadialFunction::from_fn(rg, radial_nodes, bg)?;
    let fg = radial_convolve(bf, rf, bg, rg, 2 * radial_nodes - 1, opts)?;
    let (hf, hg, hfg) = (spherical_transform(&f, lambdas)?, spherical_transform(&g, lambdas)?, spherical_transform(&fg, lambdas)?);
    let product: Vec<f64> = hf.values.iter().zip(&hg.values).map(|(a, b)| a * b).collect();
    let scale = product.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let max_relative_error = product
        .iter()
        .zip(&hfg.values)
        .map(|(p, q)| (p - q).abs() / p.abs().max(1e-3 * scale))
        .fold(0.0, f64::max);
    // with raw integrals h: H_C = C h, so C h(f*g) = C² h(f) h(g)
    let c = TRANSFORM_CONSTANT;
    let (num, den) = product
        .iter()
        .zip(&hfg.values)
        .fold((0.0, 0.0), |(n, d), (p, q)| (n + (q / c) * (p / (c * c)), d + (p / (c * c)).powi(2)));
    Ok(MultiplicativityReport {
        lambdas: lambdas.to_vec(),
        product,
        transform_of_convolution: hfg.values,
        max_relative_error,
        calibrated_constant: num / den,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolCheckReport {
    pub order: usize,
    pub step: f64,
    pub radius: f64,
    /// `max_{|γ| ≤ order} sup |g|^{|γ|} |d^γ m(g)|` over the sample set.
    pub c_m: f64,
    pub c_m_half_radius: f64,
    pub c_m_half_step: f64,
    pub unbounded: bool,
}

fn sl2_basis() -> [[[f64; 2]; 2]; 3] {
    [[[0.5, 0.0], [0.0, -0.5]], [[0.0, 0.5], [0.5, 0.0]], [[0.0, 0.5], [-0.5, 0.0]]]
}

fn scaled(x: [[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
    x.map(|row| row.map(|v| v * t))
}

fn symbol_sup(m: &(impl Fn(&SL2Matrix) -> f64 + Sync), order: usize, step: f64, radius: f64) -> f64 {
    let basis = sl2_basis();
    let n_r = 40;
    let n_th = 6;
    let samples: Vec<SL2Matrix> = (1..=n_r)
        .flat_map(|i| {
            let r = radius * i as f64 / n_r as f64;
            (0..n_th).flat_map(move |a| {
                (0..n_th).map(move |b| {
                    SL2Matrix::rotation(PI * a as f64 / n_th as f64)
                        .mul(&SL2Matrix::a(r))
                        .mul(&SL2Matrix::rotation(PI * b as f64 / n_th as f64))
                })
            })
        })
        .collect();
    let shift = |g: &SL2Matrix, i: usize, t: f64| g.mul(&SL2Matrix::exp_sl2(scaled(basis[i], t)));
    samples
        .par_iter()
        .map(|g| {
            let size = g.size();
            let mut best = m(g).abs();
            if order >= 1 {
                for i in 0..3 {
                    let d = (m(&shift(g, i, step)) - m(&shift(g, i, -step))) / (2.0 * step);
                    best = best.max(size * d.abs());
                }
            }
            if order >= 2 {
                for i in 0..3 {
                    for j in 0..3 {
                        let at = |si: f64, sj: f64| m(&shift(&shift(g, i, si * step), j, sj * step));
                        let d = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * step * step);
                        best = best.max(size * size * d.abs());
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Left-invariant finite-difference version of
/// `|g|^{|γ|} |d^γ m(g)| ≤ C_m` on `{k a_r k' : r ≤ radius}`.
pub fn invariant_symbol_check(m: impl Fn(&SL2Matrix) -> f64 + Sync, order: usize, step: f64, radius: f64) -> Result<SymbolCheckReport> {
    if order > 2 {
        return Err(Error::invalid("derivative order must be at most 2"));
    }
    if !(step > 0.0) || !(radius > 0.0) {
        return Err(Error::invalid("step and radius must be positive"));
    }
    let c_m = symbol_sup(&m, order, step, radius);
    let c_m_half_step = symbol_sup(&m, order, step / 2.0, radius);
    if (c_m - c_m_half_step).abs() > 0.5 * c_m_half_step.max(f64::MIN_POSITIVE) {
        return Err(Error::refused(format!(
            "step {step} is too large for this symbol: {c_m:.4e} at h, {c_m_half_step:.4e} at h/2"
        )));
    }
    let c_m_half_radius = symbol_sup(&m, order, step, radius / 2.0);
    Ok(SymbolCheckReport {
        order,
        step,
        radius,
        c_m,
        c_m_half_radius,
        c_m_half_step,
        unbounded: c_m > 1.5 * c_m_half_radius,
    })
}
