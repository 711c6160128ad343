//! Operator-valued Fourier transform `π_λ(k) = ∫ k(g) π_λ(g) dg`.
//!
//! `π_λ(k)` is the integral operator with kernel
//! `K(t, x) = ∫∫ k(x - t, b, c) e^{2πiλ(c + bt)} db dc`, i.e. the partial
//! Fourier transform of `k` in `(b, c)` at frequencies `(-λt, -λ)`. Both
//! transforms are direct sums on the sampling box; the output rows `t` sit on
//! the box lattice, which makes `x - t` a node and no interpolation is needed.
//!
//! The `λ`-integrals carry the density `|λ|`. At `λ = 0` the integrands of
//! both the Plancherel formula and the inversion formula have finite limits
//! (`∫∫ |∫ k dc|² da db` and `∫ k(a, b, c) dc` respectively); a `λ = 0` node
//! uses these limits instead of dropping out.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HFunction, HPoint};
use crate::error::{Error, Result};
use crate::grid::{interpolate_cubic, interpolate_cubic_2d, UniformGrid};

/// Symmetric `λ`-grid on `[-Λ, Λ]` with trapezoid weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub half_width: f64,
    pub nodes: usize,
}

impl LambdaGrid {
    pub fn new(half_width: f64, nodes: usize) -> Result<Self> {
        if !(half_width > 0.0) || nodes < 2 {
            return Err(Error::invalid(format!("bad λ-grid: Λ={half_width}, nodes={nodes}")));
        }
        Ok(LambdaGrid { half_width, nodes })
    }

    pub fn grid(&self) -> UniformGrid {
        UniformGrid::closed(-self.half_width, self.half_width, self.nodes).expect("validated")
    }

    pub fn points(&self) -> Vec<f64> {
        let g = self.grid();
        let mut p = g.points();
        if self.nodes % 2 == 1 {
            p[self.nodes / 2] = 0.0;
        }
        p
    }

    pub fn weights(&self) -> Vec<f64> {
        self.grid().trapezoid_weights()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OutputGrid {
    /// Rows on the box lattice out to `|t| ≤ β/|λ|` with `β` the given
    /// fraction of the `b`-Nyquist frequency; columns cover every `x` with
    /// `x - t` in the box.
    Auto,
    /// The same grid for rows and columns; off-lattice nodes use cubic
    /// interpolation in the first variable.
    Explicit(UniformGrid),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierOptions {
    pub output: OutputGrid,
    pub bandwidth_fraction: f64,
    /// Relative boundary size above which the input is refused.
    pub eps_tail: f64,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions { output: OutputGrid::Auto, bandwidth_fraction: 0.875, eps_tail: 1e-8 }
    }
}

/// Integral operator `(Kφ)(t) = ∫ K(t, x) φ(x) dx` sampled on `rows × cols`,
/// applied with equal weights `cols.step`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelOperator {
    pub rows: UniformGrid,
    pub cols: UniformGrid,
    pub kernel: DMatrix<Complex64>,
}

impl KernelOperator {
    pub fn apply(&self, phi: &crate::grid::GridFunction) -> Result<crate::grid::GridFunction> {
        if phi.grid != self.cols {
            return Err(Error::invalid("input function must live on the kernel's column grid"));
        }
        let v = nalgebra::DVector::from_column_slice(&phi.values);
        let out = &self.kernel * v * Complex64::new(self.cols.step, 0.0);
        Ok(crate::grid::GridFunction { grid: self.rows, values: out.iter().copied().collect() })
    }

    /// `Σ |K|² h_rows h_cols`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.kernel.norm_squared() * self.rows.step * self.cols.step
    }

    /// Kernel of `self ∘ other`.
    pub fn compose(&self, other: &KernelOperator) -> Result<KernelOperator> {
        if self.cols != other.rows {
            return Err(Error::invalid("composition needs matching intermediate grids"));
        }
        Ok(KernelOperator {
            rows: self.rows,
            cols: other.cols,
            kernel: &self.kernel * &other.kernel * Complex64::new(self.cols.step, 0.0),
        })
    }

    pub fn scale(&self, s: Complex64) -> KernelOperator {
        KernelOperator { rows: self.rows, cols: self.cols, kernel: &self.kernel * s }
    }
}

/// `G(a, b) = Σ_c k(a, b, c) e^{2πiλc} h`, row-major `n × n`.
fn c_transform(k: &HFunction, lambda: f64) -> DMatrix<Complex64> {
    let g = k.grid();
    let n = g.len;
    let h = g.step;
    let phase: Vec<Complex64> = g.points().iter().map(|&c| Complex64::from_polar(h, 2.0 * PI * lambda * c)).collect();
    let vals = k.values();
    DMatrix::from_fn(n, n, |ia, ib| {
        let start = (ia * n + ib) * n;
        vals[start..start + n].iter().zip(&phase).map(|(v, p)| v * p).sum()
    })
}

/// `F(a, t_i) = Σ_b G(a, b) e^{2πiλbt_i} h`, an `n × m` matrix.
fn b_transform(gmat: &DMatrix<Complex64>, grid: &UniformGrid, lambda: f64, ts: &[f64]) -> DMatrix<Complex64> {
    let h = grid.step;
    let bs = grid.points();
    let phase = DMatrix::from_fn(bs.len(), ts.len(), |j, i| Complex64::from_polar(h, 2.0 * PI * lambda * bs[j] * ts[i]));
    gmat * phase
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("h_fourier needs λ ≠ 0"));
    }
    Ok(())
}

fn auto_rows(grid: &UniformGrid, lambda: f64, fraction: f64) -> Result<UniformGrid> {
    let beta = fraction * grid.nyquist();
    let half = (beta / (lambda.abs() * grid.step)).floor() as usize;
    UniformGrid::centered(grid.step, half)
}

fn check_nyquist(grid: &UniformGrid, lambda: f64, rows: &UniformGrid) -> Result<()> {
    let tmax = rows.start.abs().max(rows.end().abs());
    let ny = grid.nyquist();
    if lambda.abs() * tmax > ny * (1.0 + 1e-12) {
        return Err(Error::refused(format!(
            "|λ|·T = {:.4} exceeds the b-Nyquist frequency {ny:.4} of the sampling grid (h = {}); \
             shrink the output grid or refine the box",
            lambda.abs() * tmax,
            grid.step
        )));
    }
    Ok(())
}

/// Kernel of `π_λ(k)`.
pub fn h_fourier(k: &HFunction, lambda: f64, opts: &FourierOptions) -> Result<KernelOperator> {
    check_lambda(lambda)?;
    k.check_decay(opts.eps_tail)?;
    let grid = k.grid();
    let (rows, cols) = match &opts.output {
        OutputGrid::Auto => {
            let rows = auto_rows(&grid, lambda, opts.bandwidth_fraction)?;
            let extra = grid.len / 2 + 1;
            let half = (rows.len - 1) / 2 + extra;
            (rows, UniformGrid::centered(grid.step, half)?)
        }
        OutputGrid::Explicit(g) => (*g, *g),
    };
    check_nyquist(&grid, lambda, &rows)?;
    let ts = rows.points();
    let f = b_transform(&c_transform(k, lambda), &grid, lambda, &ts);
    let xs = cols.points();
    let n = grid.len;
    let mut kernel = DMatrix::zeros(rows.len, cols.len);
    let mut column = vec![Complex64::default(); n];
    for (i, &t) in ts.iter().enumerate() {
        for (ia, slot) in column.iter_mut().enumerate() {
            *slot = f[(ia, i)];
        }
        for (j, &x) in xs.iter().enumerate() {
            kernel[(i, j)] = interpolate_cubic(&grid, &column, x - t);
        }
    }
    Ok(KernelOperator { rows, cols, kernel })
}

/// `HS(π_λ(k))²` computed on the full strip `{(t, t + a)}`, without forming
/// the kernel.
fn hs_norm_sq_strip(k: &HFunction, lambda: f64, fraction: f64) -> Result<f64> {
    let grid = k.grid();
    let rows = auto_rows(&grid, lambda, fraction)?;
    check_nyquist(&grid, lambda, &rows)?;
    let f = b_transform(&c_transform(k, lambda), &grid, lambda, &rows.points());
    Ok(f.norm_squared() * grid.step * grid.step)
}

/// `∫ k(a, b, c) dc` on the `(a, b)` box, row-major.
fn flat_limit(k: &HFunction) -> Vec<Complex64> {
    let m = c_transform(k, 0.0);
    let n = m.nrows();
    (0..n * n).map(|idx| m[(idx / n, idx % n)]).collect()
}

/// `π_λ(k)` at every node of a `λ`-grid.
#[derive(Debug, Clone)]
pub struct HFourierCoefficients {
    pub box_grid: UniformGrid,
    pub lambdas: Vec<f64>,
    pub weights: Vec<f64>,
    /// `None` at `λ = 0`.
    pub kernels: Vec<Option<KernelOperator>>,
    /// `∫ k dc` on the `(a, b)` box, used at a `λ = 0` node.
    pub flat: Vec<Complex64>,
    pub warnings: Vec<String>,
}

fn c_nyquist_warning(grid: &UniformGrid, lg: &LambdaGrid) -> Vec<String> {
    if lg.half_width > grid.nyquist() {
        vec![format!(
            "Λ = {} exceeds the c-Nyquist frequency {} of the box; values for |λ| > {} are aliased",
            lg.half_width,
            grid.nyquist(),
            grid.nyquist()
        )]
    } else {
        Vec::new()
    }
}

pub fn h_transform(k: &HFunction, lg: &LambdaGrid, opts: &FourierOptions) -> Result<HFourierCoefficients> {
    k.check_decay(opts.eps_tail)?;
    let lambdas = lg.points();
    let kernels: Vec<Option<KernelOperator>> = lambdas
        .par_iter()
        .map(|&l| if l == 0.0 { Ok(None) } else { h_fourier(k, l, opts).map(Some) })
        .collect::<Result<_>>()?;
    Ok(HFourierCoefficients {
        box_grid: k.grid(),
        lambdas,
        weights: lg.weights(),
        kernels,
        flat: flat_limit(k),
        warnings: c_nyquist_warning(&k.grid(), lg),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PlancherelReport {
    /// `‖k‖₂²` by the box rule.
    pub lhs: f64,
    /// `Σ_λ w_λ |λ| HS(π_λ(k))²`.
    pub rhs: f64,
    #[serde(serialize_with = "crate::report::nonfinite")]
    pub relative_error: f64,
    pub n: usize,
    pub half_width: f64,
    pub lambda_half_width: f64,
    pub lambda_nodes: usize,
    pub bandwidth_fraction: f64,
    pub zero_node: String,
    pub warnings: Vec<String>,
}

pub fn h_plancherel(k: &HFunction, lg: &LambdaGrid, opts: &FourierOptions) -> Result<PlancherelReport> {
    k.check_decay(opts.eps_tail)?;
    let grid = k.grid();
    let lhs = k.norm_sq();
    let lambdas = lg.points();
    let weights = lg.weights();
    let terms: Vec<f64> = lambdas
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&l, &w)| {
            if l == 0.0 {
                let flat = flat_limit(k);
                Ok(w * flat.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.step * grid.step)
            } else {
                Ok(w * l.abs() * hs_norm_sq_strip(k, l, opts.bandwidth_fraction)?)
            }
        })
        .collect::<Result<_>>()?;
    let rhs: f64 = terms.iter().sum();
    let relative_error = if lhs == 0.0 {
        if rhs == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (lhs - rhs).abs() / lhs
    };
    Ok(PlancherelReport {
        lhs,
        rhs,
        relative_error,
        n: grid.len,
        half_width: -grid.start,
        lambda_half_width: lg.half_width,
        lambda_nodes: lg.nodes,
        bandwidth_fraction: opts.bandwidth_fraction,
        zero_node: if lg.nodes % 2 == 1 { "limit of |λ|·HS² as λ→0".into() } else { "absent".into() },
        warnings: c_nyquist_warning(&grid, lg),
    })
}

/// `f(x) = ∫ Tr(π_λ(x)* π_λ(f)) |λ| dλ`, with
/// `Tr(π_λ(x)* A) = ∫ e^{-2πiλ(c + bu)} K(u, u + a) du`.
pub fn h_inverse(coeffs: &HFourierCoefficients, x: HPoint) -> Complex64 {
    let mut acc = Complex64::default();
    for ((&l, &w), kern) in coeffs.lambdas.iter().zip(&coeffs.weights).zip(&coeffs.kernels) {
        let term = match kern {
            None => interpolate_cubic_2d(&coeffs.box_grid, &coeffs.box_grid, &coeffs.flat, x.a, x.b),
            Some(op) => {
                let mut tr = Complex64::default();
                let mut row = vec![Complex64::default(); op.cols.len];
                for (i, u) in op.rows.points().into_iter().enumerate() {
                    for (j, slot) in row.iter_mut().enumerate() {
                        *slot = op.kernel[(i, j)];
                    }
                    let kv = interpolate_cubic(&op.cols, &row, u + x.a);
                    tr += Complex64::from_polar(1.0, -2.0 * PI * l * (x.c + x.b * u)) * kv;
                }
                tr * op.rows.step * l.abs()
            }
        };
        acc += term * w;
    }
    acc
}

/// `(f * g)(x) = ∫ f(y) g(y⁻¹x) dy` on the common box, through a discrete
/// Fourier transform in `c` with the exact shear phase `e^{-2πiγ a'(b - b')}`.
pub fn h_convolve(f: &HFunction, g: &HFunction) -> Result<HFunction> {
    if f.grid() != g.grid() {
        return Err(Error::invalid("convolution needs both functions on the same box"));
    }
    let grid = f.grid();
    let n = grid.len;
    if n % 2 != 0 {
        return Err(Error::invalid("convolution needs an even number of points per axis"));
    }
    let h = grid.step;
    let pts = grid.points();
    let gammas: Vec<f64> = (0..n).map(|j| (j as f64 - (n / 2) as f64) / (n as f64 * h)).collect();
    let forward = |k: &HFunction| -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); n * n * n];
        for ia in 0..n {
            for ib in 0..n {
                for (jg, &gam) in gammas.iter().enumerate() {
                    out[(ia * n + ib) * n + jg] = pts
                        .iter()
                        .enumerate()
                        .map(|(ic, &c)| k.at(ia, ib, ic) * Complex64::from_polar(h, -2.0 * PI * gam * c))
                        .sum();
                }
            }
        }
        out
    };
    let (fh, gh) = (forward(f), forward(g));
    let at = |v: &[Complex64], ia: usize, ib: usize, j: usize| v[(ia * n + ib) * n + j];
    let half = (n / 2) as isize;
    let prod: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|jg| {
            let gam = gammas[jg];
            let mut plane = vec![Complex64::default(); n * n];
            for ia in 0..n {
                for ib in 0..n {
                    let mut acc = Complex64::default();
                    for iap in 0..n {
                        let da = ia as isize - iap as isize + half;
                        if da < 0 || da >= n as isize {
                            continue;
                        }
                        for ibp in 0..n {
                            let db = ib as isize - ibp as isize + half;
                            if db < 0 || db >= n as isize {
                                continue;
                            }
                            let shear = pts[iap] * (pts[ib] - pts[ibp]);
                            acc += at(&fh, iap, ibp, jg)
                                * at(&gh, da as usize, db as usize, jg)
                                * Complex64::from_polar(1.0, -2.0 * PI * gam * shear);
                        }
                    }
                    plane[ia * n + ib] = acc * (h * h);
                }
            }
            plane
        })
        .collect();
    let dgamma = 1.0 / (n as f64 * h);
    let mut values = vec![Complex64::default(); n * n * n];
    for ia in 0..n {
        for ib in 0..n {
            for (ic, &c) in pts.iter().enumerate() {
                values[(ia * n + ib) * n + ic] = gammas
                    .iter()
                    .enumerate()
                    .map(|(jg, &gam)| prod[jg][ia * n + ib] * Complex64::from_polar(dgamma, 2.0 * PI * gam * c))
                    .sum();
            }
        }
    }
    HFunction::new(-grid.start, n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridFunction;
    use crate::random;

    fn gaussian() -> HFunction {
        HFunction::gaussian(1.0, 4.0, 64).unwrap()
    }

    #[test]
    fn zero_and_linearity() {
        let z = HFunction::from_fn(4.0, 16, |_, _, _| Complex64::default()).unwrap();
        let k0 = h_fourier(&z, 1.0, &FourierOptions::default()).unwrap();
        assert_eq!(k0.hs_norm_sq(), 0.0);
        let k = HFunction::gaussian(1.0, 4.0, 32).unwrap();
        let alpha = Complex64::new(0.3, -2.0);
        let a = h_fourier(&k.scale(alpha), 0.7, &FourierOptions::default()).unwrap();
        let b = h_fourier(&k, 0.7, &FourierOptions::default()).unwrap().scale(alpha);
        assert!((a.kernel - b.kernel).norm() < 1e-13);
    }

    #[test]
    fn kernel_matches_direct_quadrature() {
        let k = HFunction::gaussian(1.0, 4.0, 48).unwrap();
        let lambda = 1.0;
        let op = h_fourier(&k, lambda, &FourierOptions::default()).unwrap();
        let phi_at = |x: f64| Complex64::new((-PI * (x - 0.3) * (x - 0.3)).exp(), 0.0);
        let phi = GridFunction::from_fn(op.cols, phi_at);
        let got = op.apply(&phi).unwrap();
        let g = k.grid();
        let pts = g.points();
        let h3 = g.step.powi(3);
        let mut err = 0.0_f64;
        let mut scale = 0.0_f64;
        for (i, t) in op.rows.points().into_iter().enumerate().step_by(3) {
            let mut direct = Complex64::default();
            for (ia, &a) in pts.iter().enumerate() {
                let p = phi_at(t + a);
                for (ib, &b) in pts.iter().enumerate() {
                    for (ic, &c) in pts.iter().enumerate() {
                        direct += k.at(ia, ib, ic) * Complex64::from_polar(1.0, 2.0 * PI * lambda * (c + b * t)) * p;
                    }
                }
            }
            direct *= h3;
            err = err.max((direct - got.values[i]).norm());
            scale = scale.max(direct.norm());
        }
        assert!(err <= 1e-4 * scale.max(1e-300), "{err} vs {scale}");
    }

    #[test]
    fn plancherel_examples() {
        let lg = LambdaGrid::new(6.0, 129).unwrap();
        let opts = FourierOptions::default();
        let z = HFunction::from_fn(4.0, 16, |_, _, _| Complex64::default()).unwrap();
        let r0 = h_plancherel(&z, &lg, &opts).unwrap();
        assert_eq!((r0.lhs, r0.rhs, r0.relative_error), (0.0, 0.0, 0.0));

        let k = gaussian();
        let r = h_plancherel(&k, &lg, &opts).unwrap();
        assert!(r.relative_error <= 1e-3, "{r:?}");
        assert!((r.lhs - 2f64.powf(-1.5)).abs() < 1e-12);
        let r2 = h_plancherel(&k.scale(Complex64::new(2.0, 0.0)), &lg, &opts).unwrap();
        assert!((r2.lhs - 4.0 * r.lhs).abs() < 1e-12 && (r2.rhs - 4.0 * r.rhs).abs() < 1e-12);
    }

    #[test]
    fn strip_and_kernel_norms_agree_with_closed_form() {
        // |λ| HS(π_λ(k))² = e^{-2πλ²}/2 for the unit Gaussian
        let k = gaussian();
        for lambda in [0.3, 1.0, -2.0] {
            let strip = hs_norm_sq_strip(&k, lambda, 0.875).unwrap();
            let op = h_fourier(&k, lambda, &FourierOptions::default()).unwrap();
            let exact = (-2.0 * PI * lambda * lambda).exp() / 2.0 / lambda.abs();
            assert!((strip - exact).abs() < 1e-10 * exact);
            assert!((op.hs_norm_sq() - exact).abs() < 1e-10 * exact);
        }
    }

    #[test]
    fn nyquist_refusal() {
        let k = HFunction::gaussian(1.0, 4.0, 32).unwrap();
        let wide = OutputGrid::Explicit(UniformGrid::centered(0.25, 40).unwrap());
        let err = h_fourier(&k, 1.0, &FourierOptions { output: wide, ..Default::default() }).unwrap_err();
        assert!(err.is_refusal());
    }

    #[test]
    fn inversion_round_trip() {
        let k = gaussian();
        let coeffs = h_transform(&k, &LambdaGrid::new(6.0, 129).unwrap(), &FourierOptions::default()).unwrap();
        let v0 = h_inverse(&coeffs, HPoint::IDENTITY);
        assert!((v0 - 1.0).norm() < 1e-3, "{v0}");
        let mut rng = random::rng(40);
        for _ in 0..5 {
            let x = HPoint::random(&mut rng, 1.5);
            let exact = (-PI * (x.a * x.a + x.b * x.b + x.c * x.c)).exp();
            assert!((h_inverse(&coeffs, x) - exact).norm() < 1e-3);
        }
    }

    #[test]
    fn convolution_is_intertwined() {
        let f = HFunction::gaussian(1.0, 3.0, 32).unwrap();
        let g = HFunction::from_fn(3.0, 32, |a, b, c| {
            Complex64::new((-PI * (1.5 * a * a + b * b + c * c)).exp() * (1.0 + 0.5 * a), 0.0)
        })
        .unwrap();
        let fg = h_convolve(&f, &g).unwrap();
        let lambda = 0.5;
        let opts = FourierOptions {
            output: OutputGrid::Explicit(UniformGrid::centered(3.0 / 16.0, 26).unwrap()),
            eps_tail: 1e-4,
            ..Default::default()
        };
        let kf = h_fourier(&f, lambda, &opts).unwrap();
        let kg = h_fourier(&g, lambda, &opts).unwrap();
        let kfg = h_fourier(&fg, lambda, &opts).unwrap();
        let prod = kf.compose(&kg).unwrap();
        let rel = (&kfg.kernel - &prod.kernel).norm() / prod.kernel.norm();
        assert!(rel < 1e-3, "{rel}");
    }
}
