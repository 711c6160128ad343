use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::HPoint;
use crate::error::{Error, Result};
use crate::grid::{interpolate_cubic, UniformGrid};

/// Samples of a function on `ℍ` on the box `[-R, R)³` with `n` nodes per axis
/// (see [`UniformGrid::periodic_box`]); Haar measure is `da db dc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HFunction {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl HFunction {
    pub fn new(half_width: f64, n: usize, values: Vec<Complex64>) -> Result<Self> {
        if n < 8 {
            return Err(Error::invalid(format!("need at least 8 points per axis, got {n}")));
        }
        if values.len() != n * n * n {
            return Err(Error::invalid(format!("expected {} samples, got {}", n * n * n, values.len())));
        }
        Ok(HFunction { grid: UniformGrid::periodic_box(half_width, n)?, values })
    }

    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64, f64, f64) -> Complex64) -> Result<Self> {
        let grid = UniformGrid::periodic_box(half_width, n)?;
        let pts = grid.points();
        let mut values = Vec::with_capacity(n * n * n);
        for &a in &pts {
            for &b in &pts {
                for &c in &pts {
                    values.push(f(a, b, c));
                }
            }
        }
        Self::new(half_width, n, values)
    }

    /// `e^{-π(a²+b²+c²)/σ²}`.
    pub fn gaussian(sigma: f64, half_width: f64, n: usize) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::invalid("gaussian width must be positive"));
        }
        let s2 = sigma * sigma;
        Self::from_fn(half_width, n, |a, b, c| Complex64::new((-PI * (a * a + b * b + c * c) / s2).exp(), 0.0))
    }

    /// Smooth radial bump `exp(-1/(1-ρ²))`, `ρ = |x|/radius`, zero for `ρ ≥ 1`.
    pub fn bump(radius: f64, half_width: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid("bump radius must be positive"));
        }
        Self::from_fn(half_width, n, |a, b, c| {
            let rho2 = (a * a + b * b + c * c) / (radius * radius);
            let v = if rho2 < 1.0 { (-1.0 / (1.0 - rho2)).exp() } else { 0.0 };
            Complex64::new(v, 0.0)
        })
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.len
    }

    pub fn half_width(&self) -> f64 {
        -self.grid.start
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, ia: usize, ib: usize, ic: usize) -> Complex64 {
        let n = self.grid.len;
        self.values[(ia * n + ib) * n + ic]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        HFunction { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }

    /// `Σ |f|² h³`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step.powi(3)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest modulus on the outermost layer of nodes.
    pub fn boundary_max(&self) -> f64 {
        let n = self.grid.len;
        let mut m = 0.0_f64;
        for ia in 0..n {
            for ib in 0..n {
                for ic in 0..n {
                    let edge = [ia, ib, ic].iter().any(|&i| i == 0 || i == n - 1);
                    if edge {
                        m = m.max(self.at(ia, ib, ic).norm());
                    }
                }
            }
        }
        m
    }

    /// Refuses functions that do not decay to `eps_tail` (relative to the
    /// maximum) on the boundary shell.
    pub fn check_decay(&self, eps_tail: f64) -> Result<()> {
        let top = self.max_abs();
        let edge = self.boundary_max();
        if top > 0.0 && edge > eps_tail * top {
            return Err(Error::refused(format!(
                "function does not decay inside its box: boundary/max = {:.3e} > {eps_tail:.1e}",
                edge / top
            )));
        }
        Ok(())
    }

    /// Tricubic interpolation at an arbitrary point (zero outside the box).
    pub fn sample(&self, x: HPoint) -> Complex64 {
        let g = &self.grid;
        let n = g.len;
        let fa = g.locate(x.a);
        if fa < -1.0 || fa > n as f64 {
            return Complex64::default();
        }
        let span = |f: f64| ((f.floor() as isize - 1).max(0) as usize)..=((f.floor() as isize + 2).clamp(0, n as isize - 1) as usize);
        let mut plane = vec![Complex64::default(); n];
        for ia in span(fa) {
            let mut line = vec![Complex64::default(); n];
            for ib in span(g.locate(x.b).clamp(-2.0, n as f64 + 1.0)) {
                let start = (ia * n + ib) * n;
                line[ib] = interpolate_cubic(g, &self.values[start..start + n], x.c);
            }
            plane[ia] = interpolate_cubic(g, &line, x.b);
        }
        interpolate_cubic(g, &plane, x.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_norm_and_decay() {
        let k = HFunction::gaussian(1.0, 4.0, 64).unwrap();
        assert!((k.norm_sq() - 2f64.powf(-1.5)).abs() < 1e-13);
        assert!(k.check_decay(1e-8).is_ok());
        let wide = HFunction::gaussian(3.0, 4.0, 16).unwrap();
        assert!(wide.check_decay(1e-8).unwrap_err().is_refusal());
        assert!(HFunction::gaussian(1.0, 4.0, 4).is_err());
    }

    #[test]
    fn sampling_reproduces_nodes_and_smooth_values() {
        let k = HFunction::gaussian(1.0, 4.0, 64).unwrap();
        assert!((k.sample(HPoint::IDENTITY) - 1.0).norm() < 1e-14);
        let x = HPoint::new(0.31, -0.52, 0.17);
        let exact = (-PI * (x.a * x.a + x.b * x.b + x.c * x.c)).exp();
        assert!((k.sample(x).re - exact).abs() < 2e-3);
        assert_eq!(k.sample(HPoint::new(9.0, 0.0, 0.0)), Complex64::default());
    }
}
