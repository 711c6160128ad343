//! The Heisenberg group of upper unitriangular 3x3 matrices: group law,
//! coadjoint action, the Schrödinger representations `π_λ` on `L²(ℝ)`, the
//! operator-valued Fourier transform and the sub-Laplacian.
//!
//! Coordinates `(a, b, c)` stand for the matrix with `a`, `b` on the first
//! superdiagonal and `c` in the corner.

mod fourier;
mod function;
mod weyl;

pub use fourier::{
    h_convolve, h_fourier, h_inverse, h_plancherel, h_transform, FourierOptions, HFourierCoefficients,
    KernelOperator, LambdaGrid, OutputGrid, PlancherelReport,
};
pub use function::HFunction;
pub use weyl::{
    heat_symbol_weak_norm, trigamma, weyl_count, weyl_count_exact, weyl_exponent_fit, HeatSymbolReport, WeylCount,
    WeylFit,
};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{first_derivative, interpolate_cubic, second_derivative, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HPoint {
    pub const IDENTITY: HPoint = HPoint { a: 0.0, b: 0.0, c: 0.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        HPoint { a, b, c }
    }

    pub fn random<R: Rng>(rng: &mut R, half_width: f64) -> Self {
        let mut u = || rng.random_range(-half_width..=half_width);
        HPoint::new(u(), u(), u())
    }

    pub fn to_matrix(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::new(1.0, self.a, self.c, 0.0, 1.0, self.b, 0.0, 0.0, 1.0)
    }
}

pub fn h_mul(x: HPoint, y: HPoint) -> HPoint {
    HPoint::new(x.a + y.a, x.b + y.b, x.c + y.c + x.a * y.b)
}

pub fn h_inv(x: HPoint) -> HPoint {
    HPoint::new(-x.a, -x.b, x.a * x.b - x.c)
}

/// Linear functional `μ X* + ν Y* + λ Z*` on the Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoadjointPoint {
    pub mu: f64,
    pub nu: f64,
    pub lambda: f64,
}

/// `Ad*(a,b,c)(μ,ν,λ) = (μ + bλ, ν - aλ, λ)`.
pub fn coadjoint(g: HPoint, l: CoadjointPoint) -> CoadjointPoint {
    CoadjointPoint { mu: l.mu + g.b * l.lambda, nu: l.nu - g.a * l.lambda, lambda: l.lambda }
}

/// Images of `l` under `count` random group elements with coordinates in
/// `[-spread, spread]`.
pub fn orbit_sample(l: CoadjointPoint, count: usize, spread: f64, seed: u64) -> Vec<CoadjointPoint> {
    let mut rng = crate::random::rng(seed);
    (0..count).map(|_| coadjoint(HPoint::random(&mut rng, spread), l)).collect()
}

/// `π_{μ,ν}(a,b,c) = e^{2πi(aμ + bν)}`.
pub fn rep_flat(mu: f64, nu: f64, g: HPoint) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (g.a * mu + g.b * nu))
}

/// `π_λ(a,b,c)φ(t) = e^{2πiλ(c+bt)} φ(t+a)`, the shift by cubic interpolation.
pub fn rep_apply(lambda: f64, g: HPoint, phi: &GridFunction) -> Result<GridFunction> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("rep_apply needs λ ≠ 0; use rep_flat on the λ = 0 plane"));
    }
    let grid = phi.grid;
    Ok(GridFunction::from_fn(grid, |t| {
        Complex64::from_polar(1.0, 2.0 * PI * lambda * (g.c + g.b * t)) * interpolate_cubic(&grid, &phi.values, t + g.a)
    }))
}

/// `|λ|(φ'' - t²φ)` with five-point differences and zero boundary values.
pub fn sublaplacian_symbol(lambda: f64, phi: &GridFunction) -> Result<GridFunction> {
    check_symbol_grid(lambda, phi.grid.len)?;
    let d2 = second_derivative(&phi.values, phi.grid.step);
    let l = lambda.abs();
    Ok(GridFunction {
        grid: phi.grid,
        values: d2
            .iter()
            .zip(&phi.values)
            .enumerate()
            .map(|(i, (d, v))| {
                let t = phi.grid.point(i);
                (d - v * (t * t)) * l
            })
            .collect(),
    })
}

fn check_symbol_grid(lambda: f64, m: usize) -> Result<()> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("the sub-Laplacian symbol needs λ ≠ 0"));
    }
    if m < 32 {
        return Err(Error::invalid(format!("grid too coarse for the sub-Laplacian symbol: m = {m} < 32")));
    }
    Ok(())
}

/// The symbol as a real symmetric matrix on `m` nodes of spacing `h` starting at `t0`.
pub fn sublaplacian_matrix(lambda: f64, grid: &crate::grid::UniformGrid) -> Result<DMatrix<f64>> {
    check_symbol_grid(lambda, grid.len)?;
    let m = grid.len;
    let h2 = grid.step * grid.step;
    let l = lambda.abs();
    let stencil = [-1.0, 16.0, -30.0, 16.0, -1.0];
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for (k, w) in stencil.iter().enumerate() {
            let j = i as isize + k as isize - 2;
            if j >= 0 && (j as usize) < m {
                a[(i, j as usize)] += l * w / (12.0 * h2);
            }
        }
        let t = grid.point(i);
        a[(i, i)] -= l * t * t;
    }
    Ok(a)
}

/// The `count` eigenvalues of the discretized symbol closest to zero, in
/// decreasing order (the oscillator values are `-|λ|(2k+1)`).
pub fn sublaplacian_spectrum(lambda: f64, grid: &crate::grid::UniformGrid, count: usize) -> Result<Vec<f64>> {
    let a = sublaplacian_matrix(lambda, grid)?;
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.truncate(count);
    Ok(ev)
}

/// Normalization of the Lie algebra images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LieNormalization {
    /// `X = √|λ| d/dt`, `Y = i sgn(λ) √|λ| t`, `Z = 2πiλ`. Then `X² + Y²` is the
    /// sub-Laplacian symbol and `[X, Y] = iλ`.
    Scaled,
    /// The differential of `π_λ`: `X = d/dt`, `Y = 2πiλ t`, `Z = 2πiλ`, with
    /// `[X, Y] = Z`.
    Derived,
}

#[derive(Debug, Clone, Copy)]
pub struct LieSymbols {
    pub lambda: f64,
    pub normalization: LieNormalization,
}

pub fn lie_symbols(lambda: f64, normalization: LieNormalization) -> Result<LieSymbols> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("Lie symbols need λ ≠ 0"));
    }
    Ok(LieSymbols { lambda, normalization })
}

impl LieSymbols {
    fn x_scale(&self) -> f64 {
        match self.normalization {
            LieNormalization::Scaled => self.lambda.abs().sqrt(),
            LieNormalization::Derived => 1.0,
        }
    }

    fn y_coefficient(&self) -> Complex64 {
        match self.normalization {
            LieNormalization::Scaled => Complex64::new(0.0, self.lambda.signum() * self.lambda.abs().sqrt()),
            LieNormalization::Derived => Complex64::new(0.0, 2.0 * PI * self.lambda),
        }
    }

    pub fn apply_x(&self, phi: &GridFunction) -> GridFunction {
        let s = self.x_scale();
        GridFunction {
            grid: phi.grid,
            values: first_derivative(&phi.values, phi.grid.step).into_iter().map(|v| v * s).collect(),
        }
    }

    pub fn apply_y(&self, phi: &GridFunction) -> GridFunction {
        let c = self.y_coefficient();
        phi.map_values(|t, v| v * c * t)
    }

    pub fn apply_z(&self, phi: &GridFunction) -> GridFunction {
        phi.scale(Complex64::new(0.0, 2.0 * PI * self.lambda))
    }

    pub fn commutator_xy(&self, phi: &GridFunction) -> GridFunction {
        self.apply_x(&self.apply_y(phi)).sub(&self.apply_y(&self.apply_x(phi)))
    }

    /// `X²φ + Y²φ`, with `X²` as a direct five-point second difference.
    pub fn sum_of_squares(&self, phi: &GridFunction) -> GridFunction {
        let s2 = self.x_scale().powi(2);
        let c2 = self.y_coefficient().powi(2);
        let d2 = second_derivative(&phi.values, phi.grid.step);
        GridFunction {
            grid: phi.grid,
            values: d2
                .iter()
                .zip(&phi.values)
                .enumerate()
                .map(|(i, (d, v))| {
                    let t = phi.grid.point(i);
                    d * s2 + v * c2 * (t * t)
                })
                .collect(),
        }
    }
}
