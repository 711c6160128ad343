use std::f64::consts::PI;

use ncharm::axb::{axb_fourier, axb_plancherel, axb_rep, bump, modular, AxbFunction, AxbOptions, AxbPoint, HalfLineFunction, Sign};
use ncharm::grid::UniformGrid;
use ncharm::report::{number, Report};
use ncharm::{io, random, Complex64};
use serde_json::json;

use super::{check, rel, Check, Command, Gates, Status};
use crate::config::{key, Ctx};
use crate::CliError;

pub const PLANCHEREL: Command = Command {
    group: "axb",
    name: "plancherel",
    about: "||f||^2 against the two-term Plancherel sum and the D-intertwining identity",
    keys: &[
        key("family", "bump", "bump|file"),
        key("rho_a", "1", "bump radius in log a"),
        key("rho_b", "1", "bump radius in b"),
        key("log_box", "1.25", "log a grid half-width"),
        key("b_box", "1.25", "b grid half-width"),
        key("n_log_a", "64", "log a nodes (even)"),
        key("n_b", "64", "b nodes"),
        key("t_min", "1e-6", "smallest |t| on the half-line grid"),
        key("bandwidth", "0.875", "largest |t| as a fraction of the b-Nyquist frequency"),
        key("eps_tail", "1e-8", "largest relative boundary value accepted"),
        key("tol", "1e-2", "Plancherel tolerance"),
        key("intertwining_tol", "1e-4", "tolerance of the D-intertwining residual"),
    ],
    run: plancherel,
    selftest: plancherel_selftest,
};

pub const FOURIER: Command = Command {
    group: "axb",
    name: "fourier",
    about: "kernel of pi(f) D on one half-line",
    keys: &[
        key("family", "bump", "bump|file"),
        key("rho_a", "1", "bump radius in log a"),
        key("rho_b", "1", "bump radius in b"),
        key("log_box", "1.25", "log a grid half-width"),
        key("b_box", "1.25", "b grid half-width"),
        key("n_log_a", "64", "log a nodes (even)"),
        key("n_b", "64", "b nodes"),
        key("t_min", "1e-6", "smallest |t| on the half-line grid"),
        key("bandwidth", "0.875", "largest |t| as a fraction of the b-Nyquist frequency"),
        key("eps_tail", "1e-8", "largest relative boundary value accepted"),
        key("sign", "plus", "plus|minus half-line"),
        key("diagonal_samples", "9", "kernel diagonal entries reported"),
    ],
    run: fourier,
    selftest: fourier_selftest,
};

fn function(ctx: &Ctx) -> Result<AxbFunction, CliError> {
    Ok(match ctx.choice("family", &["bump", "file"])? {
        "bump" => AxbFunction::product_bump(
            ctx.positive("rho_a")?,
            ctx.positive("rho_b")?,
            ctx.positive("log_box")?,
            ctx.usize("n_log_a")?,
            ctx.positive("b_box")?,
            ctx.usize("n_b")?,
        )?,
        _ => io::read_axb(ctx.input()?)?,
    })
}

fn options(ctx: &Ctx) -> Result<AxbOptions, CliError> {
    Ok(AxbOptions {
        t_min: ctx.positive("t_min")?,
        bandwidth_fraction: ctx.positive("bandwidth")?,
        eps_tail: ctx.positive("eps_tail")?,
    })
}

/// Worst relative residual of `D π(g) = Δ(g)^{1/2} π(g) D` over random `g`.
fn intertwining_residual(ctx: &Ctx) -> Result<f64, CliError> {
    let grid = UniformGrid::new(-10.0, 0.01, 1400)?;
    let mut rng = ctx.rng()?;
    let mut worst = 0.0_f64;
    for sign in [Sign::Plus, Sign::Minus] {
        let phi = HalfLineFunction::from_fn(sign, grid, |t| Complex64::new(t * t * (-t * t).exp(), 0.0));
        for _ in 0..10 {
            let g = AxbPoint::random(&mut rng, 1.0, 2.0);
            let lhs = axb_rep(sign, g, &phi)?.apply_d();
            let rhs = axb_rep(sign, g, &phi.apply_d())?.scale(modular(g).sqrt());
            worst = worst.max(lhs.sub(&rhs).norm() / lhs.norm());
        }
    }
    Ok(worst)
}

fn plancherel(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let f = function(ctx)?;
    let tol = ctx.positive("tol")?;
    let itol = ctx.positive("intertwining_tol")?;
    let rep = axb_plancherel(&f, &options(ctx)?)?;
    report.add("lhs", rep.lhs, "left Haar integral of |f|^2")?;
    report.add("rhs_plus", rep.rhs_plus, "HS norm of pi+(f) D+ on the log t grid")?;
    report.add("rhs_minus", rep.rhs_minus, "HS norm of pi-(f) D- on the log t grid")?;
    report.add("rhs", rep.rhs, "rhs_plus + rhs_minus")?;
    report.add("relative_error", number(rep.relative_error), "|lhs - rhs| / lhs")?;
    report.add(
        "grid",
        json!({ "n_log_a": rep.n_log_a, "n_b": rep.n_b, "t_min": rep.t_min, "t_max": rep.t_max }),
        "resolved configuration",
    )?;
    report.diagnostics.push(rep.note.clone());
    let residual = intertwining_residual(ctx)?;
    report.add("intertwining_residual", residual, "||D pi(g) phi - Delta(g)^(1/2) pi(g) D phi|| / ||D pi(g) phi|| over 20 random g")?;
    let mut gates = Gates::default();
    gates.check(rep.relative_error <= tol, || format!("relative error {:.3e} exceeds {tol:.1e}", rep.relative_error));
    gates.check(residual <= itol, || format!("intertwining residual {residual:.3e} exceeds {itol:.1e}"));
    Ok(gates.status())
}

fn fourier(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let f = function(ctx)?;
    let sign = match ctx.choice("sign", &["plus", "minus"])? {
        "plus" => Sign::Plus,
        _ => Sign::Minus,
    };
    let k = axb_fourier(&f, sign, &options(ctx)?)?;
    let n = k.log_grid.len;
    let samples = ctx.usize("diagonal_samples")?.min(n).max(1);
    let diagonal: Vec<_> = (0..samples)
        .map(|s| {
            let i = if samples == 1 { n / 2 } else { s * (n - 1) / (samples - 1) };
            let z = k.kernel[(i, i)];
            json!({ "t": k.log_grid.point(i).exp(), "re": z.re, "im": z.im })
        })
        .collect();
    let max_abs = k.kernel.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    report.add("hs_norm_sq", k.hs_norm_sq(), "weighted sum of |K(t,s)|^2 |t| |s| on the log grid")?;
    report.add("nodes", n, "half-line grid size")?;
    report.add("t_range", [k.log_grid.point(0).exp(), k.log_grid.end().exp()], "half-line grid")?;
    report.add("kernel_max_abs", max_abs, "max |K(t,s)|")?;
    report.add("diagonal", diagonal, "K(t,t) at evenly spaced nodes")?;
    Ok(Status::Ok)
}

fn plancherel_selftest() -> Result<Vec<Check>, CliError> {
    let mut rng = random::rng(3);
    let mut exact = true;
    for _ in 0..100 {
        let (g, h) = (AxbPoint::random(&mut rng, 2.0, 2.0), AxbPoint::random(&mut rng, 2.0, 2.0));
        exact &= rel(modular(g.mul(&h)), modular(g) * modular(h)) <= 4.0 * f64::EPSILON;
    }
    let opts = AxbOptions::default();
    let f = AxbFunction::product_bump(1.0, 1.0, 1.25, 16, 1.25, 16)?;
    let zero = axb_plancherel(&f.scale(Complex64::new(0.0, 0.0)), &opts)?;
    let one = axb_plancherel(&f, &opts)?;
    let three = axb_plancherel(&f.scale(Complex64::new(3.0, 0.0)), &opts)?;
    Ok(vec![
        check("Delta(e) = 1", modular(AxbPoint::IDENTITY) == 1.0, ""),
        check("Delta(gh) = Delta(g) Delta(h) on 100 pairs", exact, ""),
        check("f = 0 gives 0 = 0", zero.lhs == 0.0 && zero.rhs == 0.0, json!([zero.lhs, zero.rhs])),
        check(
            "f -> 3f multiplies both sides by 9",
            rel(three.lhs, 9.0 * one.lhs) < 1e-12 && rel(three.rhs, 9.0 * one.rhs) < 1e-12,
            json!([one.lhs, one.rhs, three.lhs, three.rhs]),
        ),
    ])
}

fn fourier_selftest() -> Result<Vec<Check>, CliError> {
    let grid = UniformGrid::new(-4.0, 0.05, 120)?;
    let phi = HalfLineFunction::from_fn(Sign::Plus, grid, |t| Complex64::new(t * (-t).exp(), 0.0));
    let same = axb_rep(Sign::Plus, AxbPoint::IDENTITY, &phi)?;
    let b = 0.7;
    let shifted = axb_rep(Sign::Plus, AxbPoint::new(1.0, b)?, &phi)?;
    let want = HalfLineFunction {
        sign: Sign::Plus,
        log_grid: grid,
        values: (0..grid.len).map(|i| phi.values[i] * Complex64::from_polar(1.0, 2.0 * PI * b * phi.point(i))).collect(),
    };
    let modulation = shifted.sub(&want).norm();
    let opts = AxbOptions::default();
    let f = AxbFunction::product_bump(1.0, 1.0, 1.25, 16, 1.25, 16)?;
    let g = AxbFunction::from_fn(1.25, 16, 1.25, 16, |a, b| {
        Complex64::new(bump(a.ln()) * bump(b), bump(a.ln() / 0.8) * bump(b / 0.9))
    })?;
    let zero = axb_fourier(&f.scale(Complex64::new(0.0, 0.0)), Sign::Minus, &opts)?;
    let c = Complex64::new(0.5, -2.0);
    let mut sum = f.scale(c);
    for (v, w) in sum.values.iter_mut().zip(&g.values) {
        *v += w;
    }
    let kf = axb_fourier(&f, Sign::Plus, &opts)?;
    let kg = axb_fourier(&g, Sign::Plus, &opts)?;
    let ks = axb_fourier(&sum, Sign::Plus, &opts)?;
    let lin = (&ks.kernel - (&kf.kernel * c + &kg.kernel)).norm() / ks.kernel.norm();
    Ok(vec![
        check("pi(e) phi = phi", same == phi, ""),
        check("pi(1, b) multiplies by exp(2 pi i b t)", modulation <= 1e-12 * phi.norm(), modulation),
        check("f = 0 gives the zero kernel", zero.kernel.iter().all(|z| z.norm() == 0.0), ""),
        check("the transform is linear in f", lin < 1e-12, lin),
    ])
}
