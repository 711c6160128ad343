use std::f64::consts::{E, PI};

use ncharm::report::Report;
use ncharm::spherical::{
    asymptotic_fit_window, check_support, eigen_check, inversion_check, invariant_symbol_check, iwasawa,
    multiplicativity_check, plancherel_density, radial_bump, spherical_phi, spherical_phi_theta, spherical_transform,
    ConvolutionOptions, RadialFunction, SL2Matrix, RHO,
};
use ncharm::{io, Complex64};
use serde_json::json;

use super::{check, rel, Check, Command, Gates, Status};
use crate::config::{key, Ctx};
use crate::CliError;

pub const PHI: Command = Command {
    group: "spherical",
    name: "phi",
    about: "spherical functions on SL(2,R) and their eigen-relation",
    keys: &[
        key("lambda", "1", "spectral parameter"),
        key("radii", "0,0.5,1,1.5", "radii r of a_r"),
        key("oracle_nodes", "4096", "nodes of the independent angular integral"),
        key("eigen_r_min", "0.5", "start of the eigen-relation window"),
        key("eigen_r_max", "4.5", "end of the eigen-relation window"),
        key("eigen_step", "0.05", "finite-difference step"),
        key("tol", "1e-4", "eigen-relation tolerance"),
    ],
    run: phi,
    selftest: phi_selftest,
};

pub const TRANSFORM: Command = Command {
    group: "spherical",
    name: "transform",
    about: "spherical transform of a radial function and its multiplicativity on bump pairs",
    keys: &[
        key("family", "bump", "bump|file"),
        key("radius", "1", "bump radius"),
        key("nodes", "201", "radial nodes"),
        key("lambdas", "0,0.4,1,2,3.5", "spectral parameters"),
        key("eps_tail", "1e-8", "largest relative end value accepted"),
        key("pair_radius", "0.8", "second bump for H(f*g) = H(f)H(g); 0 skips the check"),
        key("rho_nodes", "400", "radial nodes of the convolution integral"),
        key("theta_nodes", "512", "angular nodes of the convolution integral"),
        key("tol", "1e-3", "multiplicativity tolerance"),
    ],
    run: transform,
    selftest: transform_selftest,
};

pub const ASYMPTOTICS: Command = Command {
    group: "spherical",
    name: "asymptotics",
    about: "large-radius fit of phi_lambda and inversion with the fitted density",
    keys: &[
        key("lambda", "1", "spectral parameter"),
        key("r_min", "8", "start of the fit window"),
        key("r_max", "0", "end of the fit window; 0 picks r_min + max(8, pi/lambda)"),
        key("samples", "128", "fit samples"),
        key("tol", "1e-3", "fit residual tolerance"),
        key("inversion", "off", "on|off"),
        key("lambda_max", "30", "inversion cutoff"),
        key("lambda_nodes", "301", "inversion nodes"),
        key("calibration_radius", "1.5", "bump used to calibrate the constant"),
        key("test_radius", "1", "bump reconstructed at the origin"),
        key("radial_nodes", "201", "radial nodes of the bumps"),
        key("inversion_tol", "0.05", "relative tolerance at the origin"),
    ],
    run: asymptotics,
    selftest: asymptotics_selftest,
};

pub const SYMBOLCHECK: Command = Command {
    group: "spherical",
    name: "symbolcheck",
    about: "left-invariant finite-difference estimate of a symbol's Mikhlin constant",
    keys: &[
        key("symbol", "decay", "decay|constant|size"),
        key("value", "1", "the constant for symbol=constant"),
        key("order", "2", "derivative order (at most 2)"),
        key("step", "0.01", "finite-difference step"),
        key("radius", "6", "largest r sampled"),
    ],
    run: symbolcheck,
    selftest: symbolcheck_selftest,
};

fn phi(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let lambda = ctx.f64("lambda")?;
    let nodes = ctx.usize("oracle_nodes")?;
    let tol = ctx.positive("tol")?;
    let mut gates = Gates::default();
    let mut rows = Vec::new();
    for r in ctx.list("radii")? {
        let v = spherical_phi(lambda, r)?;
        let oracle = match spherical_phi_theta(lambda, r, nodes) {
            Ok(o) => json!({ "re": o.re, "im": o.im, "difference": (v - o).norm() }),
            Err(e) if e.is_refusal() => {
                report.diagnostics.push(format!("angular oracle at r = {r}: {e}"));
                serde_json::Value::Null
            }
            Err(e) => return Err(e.into()),
        };
        if r == 0.0 {
            gates.check(v == Complex64::new(1.0, 0.0), || format!("phi(e) = {v}, not 1"));
        }
        rows.push(json!({ "r": r, "re": v.re, "im": v.im, "angular_oracle": oracle }));
    }
    report.add("values", rows, "substituted integral with step doubling; oracle by the angular integral")?;
    report.add("rho", RHO, "half the sum of positive roots")?;
    let eig = eigen_check(lambda, ctx.f64("eigen_r_min")?, ctx.f64("eigen_r_max")?, ctx.positive("eigen_step")?)?;
    gates.check(eig.relative_residual <= tol, || format!("eigen residual {:.3e} exceeds {tol:.1e}", eig.relative_residual));
    report.add("eigen", &eig, "fourth-order differences of the radial Laplacian against lambda^2 phi")?;
    Ok(gates.status())
}

fn transform(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let nodes = ctx.usize("nodes")?;
    let f = match ctx.choice("family", &["bump", "file"])? {
        "bump" => {
            let r = ctx.positive("radius")?;
            RadialFunction::from_fn(r, nodes, radial_bump(r))?
        }
        _ => io::read_radial(ctx.input()?)?,
    };
    check_support(&f, ctx.positive("eps_tail")?)?;
    let lambdas = ctx.list("lambdas")?;
    let h = spherical_transform(&f, &lambdas)?;
    if h.max_imag > 1e-10 * h.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())) {
        report.diagnostics.push(format!("discarded imaginary part up to {:.3e}", h.max_imag));
    }
    report.add("transform", &h, "Simpson rule of C f(r) phi_lambda(a_r) sinh r")?;
    let pair = ctx.f64("pair_radius")?;
    if pair > 0.0 {
        let opts = ConvolutionOptions { rho_nodes: ctx.usize("rho_nodes")?, theta_nodes: ctx.usize("theta_nodes")? };
        let tol = ctx.positive("tol")?;
        let m = multiplicativity_check(ctx.positive("radius")?, pair, &lambdas, nodes, opts)?;
        report.add("multiplicativity", &m, "polar-coordinate convolution of two bumps, then the transform")?;
        let mut gates = Gates::default();
        gates.check(m.max_relative_error <= tol, || format!("H(f*g) differs from H(f)H(g) by {:.3e}", m.max_relative_error));
        return Ok(gates.status());
    }
    Ok(Status::Ok)
}

fn asymptotics(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let lambda = ctx.f64("lambda")?;
    let r_min = ctx.positive("r_min")?;
    let r_max = match ctx.f64("r_max")? {
        x if x > 0.0 => x,
        _ => r_min + (PI / lambda.abs()).max(8.0),
    };
    let tol = ctx.positive("tol")?;
    let fit = asymptotic_fit_window(lambda, r_min, r_max, ctx.usize("samples")?)?;
    let mut gates = Gates::default();
    gates.check(fit.residual <= tol, || format!("fit residual {:.3e} exceeds {tol:.1e}", fit.residual));
    let density = fit.c_plus.norm_sqr().recip();
    let closed = PI * lambda * (PI * lambda).tanh();
    report.add("fit", &fit, "least squares on exp(rho r) phi = c+ exp(i lambda r) + c- exp(-i lambda r)")?;
    report.add("density", density, "|c+|^-2 from the fit")?;
    report.add("density_closed_form", closed, "pi lambda tanh(pi lambda)")?;
    if ctx.choice("inversion", &["on", "off"])? == "on" {
        let d = plancherel_density(ctx.positive("lambda_max")?, ctx.usize("lambda_nodes")?)?;
        let inv = inversion_check(
            ctx.positive("calibration_radius")?,
            ctx.positive("test_radius")?,
            &d,
            ctx.usize("radial_nodes")?,
        )?;
        let itol = ctx.positive("inversion_tol")?;
        gates.check(inv.relative_error <= itol, || format!("reconstruction at the origin off by {:.3e}", inv.relative_error));
        report.add("inversion", &inv, "kappa times the integral of H(f) |c|^-2 with kappa from a second bump")?;
    }
    Ok(gates.status())
}

fn symbolcheck(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let c = ctx.f64("value")?;
    let (order, step, radius) = (ctx.usize("order")?, ctx.positive("step")?, ctx.positive("radius")?);
    let rep = match ctx.choice("symbol", &["decay", "constant", "size"])? {
        "decay" => invariant_symbol_check(|g: &SL2Matrix| 1.0 / (1.0 + g.size().powi(2)), order, step, radius)?,
        "constant" => invariant_symbol_check(|_: &SL2Matrix| c, order, step, radius)?,
        _ => invariant_symbol_check(|g: &SL2Matrix| g.size(), order, step, radius)?,
    };
    report.add("mikhlin", &rep, "left-invariant differences on k a_r k' with r up to the radius")?;
    Ok(Status::Ok)
}

fn phi_selftest() -> Result<Vec<Check>, CliError> {
    let mut ok = true;
    for l in [0.0, 0.3, 1.0, 7.5, 40.0] {
        ok &= spherical_phi(l, 0.0)? == Complex64::new(1.0, 0.0);
    }
    let id = iwasawa(&SL2Matrix::IDENTITY)?;
    let diag = iwasawa(&SL2Matrix::new([[E, 0.0], [0.0, 1.0 / E]])?)?;
    Ok(vec![
        check("phi_lambda(e) = 1", ok, ""),
        check("Iwasawa of e is (0, 0, 0)", id.theta.abs() < 1e-15 && id.h.abs() < 1e-15 && id.u.abs() < 1e-15, &id),
        check("diag(e, 1/e) has h = 2", (diag.h - 2.0).abs() < 1e-14, diag.h),
    ])
}

fn transform_selftest() -> Result<Vec<Check>, CliError> {
    let zero = RadialFunction::from_fn(1.0, 51, |_| 0.0)?;
    let h = spherical_transform(&zero, &[0.0, 1.0, 2.0])?;
    let f = RadialFunction::from_fn(1.0, 51, radial_bump(1.0))?;
    let g = RadialFunction::from_fn(1.0, 51, |r| 2.0 * radial_bump(1.0)(r))?;
    let (a, b) = (spherical_transform(&f, &[0.5])?, spherical_transform(&g, &[0.5])?);
    Ok(vec![
        check("f = 0 transforms to 0", h.values.iter().all(|v| *v == 0.0), ""),
        check("the transform is linear", rel(b.values[0], 2.0 * a.values[0]) < 1e-14, json!([a.values[0], b.values[0]])),
    ])
}

fn asymptotics_selftest() -> Result<Vec<Check>, CliError> {
    let near = asymptotic_fit_window(1.0, 2.0, 10.0, 128)?;
    let far = asymptotic_fit_window(1.0, 8.0, 16.0, 128)?;
    Ok(vec![check("the fit improves further out", far.residual < near.residual, json!([near.residual, far.residual]))])
}

fn symbolcheck_selftest() -> Result<Vec<Check>, CliError> {
    let c = invariant_symbol_check(|_| -3.0, 2, 0.01, 3.0)?;
    Ok(vec![check("constant symbol c gives C_m = |c|", (c.c_m - 3.0).abs() < 1e-12 && !c.unbounded, c.c_m)])
}
