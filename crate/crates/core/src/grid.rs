//! Uniform one-dimensional grids, quadrature weights and cubic shift
//! interpolation shared by the continuous-group modules.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `start + i * step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || !start.is_finite() || len == 0 {
            return Err(Error::invalid(format!(
                "bad grid: start={start}, step={step}, len={len}"
            )));
        }
        Ok(UniformGrid { start, step, len })
    }

    /// `n` nodes `-R + k (2R/n)`. The right end point is omitted, which makes
    /// the equal-weight rule coincide with the trapezoid rule for functions
    /// that vanish at the box boundary. For even `n` the origin is a node.
    pub fn periodic_box(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::invalid("box half-width must be positive"));
        }
        Self::new(-half_width, 2.0 * half_width / n as f64, n)
    }

    /// Symmetric grid `k * step`, `k = -half..=half`.
    pub fn centered(step: f64, half: usize) -> Result<Self> {
        Self::new(-(half as f64) * step, step, 2 * half + 1)
    }

    /// `n` nodes spanning `[a, b]` including both end points.
    pub fn closed(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(Error::invalid(format!("closed grid needs n>=2 and b>a, got [{a},{b}], n={n}")));
        }
        Self::new(a, (b - a) / (n - 1) as f64, n)
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    pub fn end(&self) -> f64 {
        self.point(self.len - 1)
    }

    /// Nyquist frequency `1 / (2 step)` for the `e^{-2 pi i x xi}` convention.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.step
    }

    /// Fractional index of `x`.
    #[inline]
    pub fn locate(&self, x: f64) -> f64 {
        (x - self.start) / self.step
    }

    /// Index of `x` if it sits on a node (within `1e-9` of a step).
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let f = self.locate(x);
        let r = f.round();
        if (f - r).abs() < 1e-9 && r >= 0.0 && (r as usize) < self.len {
            Some(r as usize)
        } else {
            None
        }
    }

    /// Whether every node of `other` lies on this grid's lattice (possibly
    /// outside its range).
    pub fn shares_lattice(&self, other: &UniformGrid) -> bool {
        let ratio = other.step / self.step;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return false;
        }
        let off = self.locate(other.start);
        (off - off.round()).abs() < 1e-9
    }

    /// Equal weights `step` (see [`UniformGrid::periodic_box`]).
    pub fn equal_weights(&self) -> Vec<f64> {
        vec![self.step; self.len]
    }

    /// Composite trapezoid weights including both end points.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.step; self.len];
        if self.len > 1 {
            w[0] *= 0.5;
            w[self.len - 1] *= 0.5;
        }
        w
    }
}

/// Catmull-Rom weights for the four nodes around fractional offset `s` in `[0, 1)`.
#[inline]
fn catmull_rom_weights(s: f64) -> [f64; 4] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        0.5 * (-s3 + 2.0 * s2 - s),
        0.5 * (3.0 * s3 - 5.0 * s2 + 2.0),
        0.5 * (-3.0 * s3 + 4.0 * s2 + s),
        0.5 * (s3 - s2),
    ]
}

/// Cubic (Catmull-Rom) interpolation of grid samples at `x`. Samples beyond
/// the grid are taken as zero (Dirichlet truncation).
pub fn interpolate_cubic<T>(grid: &UniformGrid, values: &[T], x: f64) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    debug_assert_eq!(values.len(), grid.len);
    let f = grid.locate(x);
    if !f.is_finite() || f < -1.0 || f > grid.len as f64 {
        return T::default();
    }
    let r = f.round();
    let (i, s) = if (f - r).abs() < 1e-9 { (r, 0.0) } else { (f.floor(), f - f.floor()) };
    let i = i as isize;
    let at = |k: isize| -> T {
        if k >= 0 && (k as usize) < values.len() {
            values[k as usize]
        } else {
            T::default()
        }
    };
    if s == 0.0 {
        return at(i);
    }
    let w = catmull_rom_weights(s);
    at(i - 1) * w[0] + at(i) * w[1] + at(i + 1) * w[2] + at(i + 2) * w[3]
}

/// Bicubic interpolation of row-major samples `values[i * ny.len + j]` on
/// `nx × ny`, zero outside.
pub fn interpolate_cubic_2d(nx: &UniformGrid, ny: &UniformGrid, values: &[Complex64], x: f64, y: f64) -> Complex64 {
    let f = nx.locate(x);
    if !f.is_finite() || f < -1.0 || f > nx.len as f64 {
        return Complex64::default();
    }
    let lo = (f.floor() as isize - 1).max(0) as usize;
    let hi = ((f.floor() as isize + 2).max(0) as usize).min(nx.len - 1);
    let mut column = vec![Complex64::default(); nx.len];
    for i in lo..=hi {
        column[i] = interpolate_cubic(ny, &values[i * ny.len..(i + 1) * ny.len], y);
    }
    interpolate_cubic(nx, &column, x)
}

/// Complex samples on a [`UniformGrid`] with the equal-weight rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::invalid(format!(
                "{} samples on a grid of {} nodes",
                values.len(),
                grid.len
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> Complex64) -> Self {
        GridFunction { grid, values: grid.points().into_iter().map(f).collect() }
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        GridFunction { grid, values: vec![Complex64::default(); grid.len] }
    }

    /// `e^{-π t²}`.
    pub fn gaussian(grid: UniformGrid) -> Self {
        Self::from_fn(grid, |t| Complex64::new((-std::f64::consts::PI * t * t).exp(), 0.0))
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step).sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.step
    }

    pub fn map_values(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().enumerate().map(|(i, v)| f(self.grid.point(i), *v)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_values(|_, v| v * c)
    }

    /// Norm restricted to nodes at least `margin` nodes from either end.
    pub fn interior_norm(&self, margin: usize) -> f64 {
        let n = self.values.len();
        if n <= 2 * margin {
            return 0.0;
        }
        (self.values[margin..n - margin].iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step).sqrt()
    }
}

/// `sum w_i |v_i|^2`.
pub fn weighted_norm_sq(values: &[Complex64], weights: &[f64]) -> f64 {
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| v.norm_sqr() * w)
        .sum()
}

/// Five-point central first derivative with zero samples outside the grid.
pub fn first_derivative(values: &[Complex64], step: f64) -> Vec<Complex64> {
    let n = values.len();
    let at = |k: isize| {
        if k >= 0 && (k as usize) < n {
            values[k as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    (0..n as isize)
        .map(|i| (at(i - 2) - at(i - 1) * 8.0 + at(i + 1) * 8.0 - at(i + 2)) / (12.0 * step))
        .collect()
}

/// Five-point central second derivative with zero samples outside the grid.
pub fn second_derivative(values: &[Complex64], step: f64) -> Vec<Complex64> {
    let n = values.len();
    let at = |k: isize| {
        if k >= 0 && (k as usize) < n {
            values[k as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    (0..n as isize)
        .map(|i| {
            (-at(i - 2) + at(i - 1) * 16.0 - at(i) * 30.0 + at(i + 1) * 16.0 - at(i + 2))
                / (12.0 * step * step)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_box_contains_origin() {
        let g = UniformGrid::periodic_box(4.0, 64).unwrap();
        assert_eq!(g.node_index(0.0), Some(32));
        assert!((g.step - 0.125).abs() < 1e-15);
        assert!((g.end() - (4.0 - 0.125)).abs() < 1e-12);
    }

    #[test]
    fn cubic_reproduces_quadratics() {
        let g = UniformGrid::closed(-2.0, 2.0, 41).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 1.0 + 2.0 * x - 0.5 * x * x).collect();
        for &x in &[-1.23, 0.011, 0.5, 1.77] {
            let got = interpolate_cubic(&g, &v, x);
            assert!((got - (1.0 + 2.0 * x - 0.5 * x * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_is_exact_on_nodes_and_zero_outside() {
        let g = UniformGrid::closed(0.0, 1.0, 11).unwrap();
        let v: Vec<f64> = (0..11).map(|i| (i * i) as f64).collect();
        assert!((interpolate_cubic(&g, &v, 0.3) - 9.0).abs() < 1e-12);
        assert_eq!(interpolate_cubic(&g, &v, 5.0), 0.0);
    }

    #[test]
    fn lattice_sharing() {
        let a = UniformGrid::periodic_box(4.0, 64).unwrap();
        let b = UniformGrid::centered(0.125, 10).unwrap();
        let c = UniformGrid::centered(0.1, 10).unwrap();
        assert!(a.shares_lattice(&b));
        assert!(!a.shares_lattice(&c));
    }

    #[test]
    fn five_point_derivatives_of_quartic_are_exact_inside() {
        let g = UniformGrid::closed(-1.0, 1.0, 21).unwrap();
        let v: Vec<Complex64> = g.points().iter().map(|x| Complex64::new(x.powi(4), 0.0)).collect();
        let d1 = first_derivative(&v, g.step);
        let d2 = second_derivative(&v, g.step);
        for i in 2..19 {
            let x = g.point(i);
            assert!((d1[i].re - 4.0 * x.powi(3)).abs() < 1e-10);
            assert!((d2[i].re - 12.0 * x * x).abs() < 1e-9);
        }
    }
}
