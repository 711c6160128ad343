use std::f64::consts::PI;

use ncharm::grid::{GridFunction, UniformGrid};
use ncharm::heisenberg::{
    coadjoint, h_inv, h_inverse, h_mul, h_plancherel, h_transform, heat_symbol_weak_norm, orbit_sample, rep_flat,
    sublaplacian_spectrum, sublaplacian_symbol, weyl_count, weyl_count_exact, weyl_exponent_fit, CoadjointPoint,
    FourierOptions, HFunction, HPoint, LambdaGrid, OutputGrid,
};
use ncharm::report::{number, Report};
use ncharm::{io, random, Complex64};
use serde_json::json;

use super::{check, rel, Check, Command, Gates, Status};
use crate::config::{key, Ctx, Key};
use crate::CliError;

const FAMILY_KEYS: [Key; 10] = [
    key("family", "gaussian", "gaussian|bump|file"),
    key("sigma", "1", "gaussian width"),
    key("radius", "1.5", "bump radius"),
    key("box", "4", "half-width R of the sampling box [-R, R)^3"),
    key("n", "64", "nodes per axis"),
    key("lambda_max", "6", "half-width of the lambda grid"),
    key("lambda_nodes", "129", "lambda nodes"),
    key("bandwidth", "0.875", "fraction of the b-Nyquist frequency kept"),
    key("eps_tail", "1e-8", "largest relative boundary value accepted"),
    key("tol", "1e-3", "pass threshold"),
];

const fn with<const N: usize, const M: usize>(extra: [Key; M]) -> [Key; N] {
    let mut out = [key("", "", ""); N];
    let mut i = 0;
    while i < 10 {
        out[i] = FAMILY_KEYS[i];
        i += 1;
    }
    let mut j = 0;
    while j < M {
        out[10 + j] = extra[j];
        j += 1;
    }
    out
}

const PLANCHEREL_KEYS: [Key; 10] = with::<10, 0>([]);
const INVERT_KEYS: [Key; 12] =
    with::<12, 2>([key("points", "20", "interior test points"), key("spread", "1.5", "points lie in [-s, s]^3")]);

pub const PLANCHEREL: Command = Command {
    group: "heisenberg",
    name: "plancherel",
    about: "||k||^2 against the lambda-integral of Hilbert-Schmidt norms",
    keys: &PLANCHEREL_KEYS,
    run: plancherel,
    selftest: plancherel_selftest,
};

pub const INVERT: Command = Command {
    group: "heisenberg",
    name: "invert",
    about: "reconstruct k from its operator-valued transform",
    keys: &INVERT_KEYS,
    run: invert,
    selftest: invert_selftest,
};

pub const WEYL: Command = Command {
    group: "heisenberg",
    name: "weyl",
    about: "sub-Laplacian spectrum and the Weyl counting function",
    keys: &[
        key("lambda_max", "6", "half-width of the lambda grid"),
        key("lambda_nodes", "129", "lambda nodes"),
        key("u", "10,100,1000", "counting levels"),
        key("u_min", "10", "start of the exponent fit"),
        key("u_max", "10000", "end of the exponent fit"),
        key("fit_points", "31", "log-spaced fit points"),
        key("tol", "1e-6", "relative tolerance against the exact count"),
        key("s", "1", "heat symbol (1+u)^-s"),
        key("r", "2", "weak-norm exponent for the heat symbol"),
        key("spectrum_lambda", "1", "lambda for the oscillator spectrum"),
        key("spectrum_count", "10", "eigenvalues compared"),
        key("spectrum_half_width", "12", "finite-difference domain [-L, L]"),
        key("spectrum_nodes", "512", "finite-difference nodes"),
        key("spectrum_tol", "1e-4", "relative tolerance for eigenvalues"),
    ],
    run: weyl,
    selftest: weyl_selftest,
};

pub const ORBIT: Command = Command {
    group: "heisenberg",
    name: "orbit",
    about: "sample a coadjoint orbit",
    keys: &[
        key("mu", "1", "X* coordinate"),
        key("nu", "0", "Y* coordinate"),
        key("lambda", "1", "Z* coordinate"),
        key("count", "16", "orbit points"),
        key("spread", "2", "group elements drawn from [-s, s]^3"),
        key("tol", "1e-12", "tolerance for the action checks"),
    ],
    run: orbit,
    selftest: orbit_selftest,
};

fn function(ctx: &Ctx) -> Result<(HFunction, Box<dyn Fn(HPoint) -> f64>), CliError> {
    let (r, n) = (ctx.positive("box")?, ctx.usize("n")?);
    Ok(match ctx.choice("family", &["gaussian", "bump", "file"])? {
        "gaussian" => {
            let s = ctx.positive("sigma")?;
            let exact = move |x: HPoint| (-PI * (x.a * x.a + x.b * x.b + x.c * x.c) / (s * s)).exp();
            (HFunction::gaussian(s, r, n)?, Box::new(exact))
        }
        "bump" => {
            let rad = ctx.positive("radius")?;
            let exact = move |x: HPoint| {
                let q = (x.a * x.a + x.b * x.b + x.c * x.c) / (rad * rad);
                if q < 1.0 {
                    (-1.0 / (1.0 - q)).exp()
                } else {
                    0.0
                }
            };
            (HFunction::bump(rad, r, n)?, Box::new(exact))
        }
        _ => {
            let k = io::read_heisenberg(ctx.input()?)?;
            let sampled = k.clone();
            (k, Box::new(move |x| sampled.sample(x).re))
        }
    })
}

fn grids(ctx: &Ctx) -> Result<(LambdaGrid, FourierOptions), CliError> {
    let lg = LambdaGrid::new(ctx.positive("lambda_max")?, ctx.usize("lambda_nodes")?)?;
    let opts = FourierOptions {
        output: OutputGrid::Auto,
        bandwidth_fraction: ctx.positive("bandwidth")?,
        eps_tail: ctx.positive("eps_tail")?,
    };
    Ok((lg, opts))
}

fn plancherel(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let (k, _) = function(ctx)?;
    let (lg, opts) = grids(ctx)?;
    let tol = ctx.positive("tol")?;
    let rep = h_plancherel(&k, &lg, &opts)?;
    report.add("lhs", rep.lhs, "box rule for the squared L2 norm")?;
    report.add("rhs", rep.rhs, "trapezoid in lambda of |lambda| HS(pi_lambda(k))^2")?;
    report.add("relative_error", number(rep.relative_error), "|lhs - rhs| / lhs")?;
    report.add(
        "grid",
        json!({
            "n": rep.n,
            "half_width": rep.half_width,
            "lambda_half_width": rep.lambda_half_width,
            "lambda_nodes": rep.lambda_nodes,
            "bandwidth_fraction": rep.bandwidth_fraction,
            "zero_node": rep.zero_node,
        }),
        "resolved configuration",
    )?;
    report.diagnostics.extend(rep.warnings);
    let mut gates = Gates::default();
    gates.check(rep.relative_error <= tol, || format!("relative error {:.3e} exceeds {tol:.1e}", rep.relative_error));
    Ok(gates.status())
}

fn invert(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let (k, exact) = function(ctx)?;
    let (lg, opts) = grids(ctx)?;
    let tol = ctx.positive("tol")?;
    let spread = ctx.positive("spread")?;
    let coeffs = h_transform(&k, &lg, &opts)?;
    let mut rng = ctx.rng()?;
    let mut rows = Vec::new();
    let mut max_error = 0.0_f64;
    for _ in 0..ctx.usize("points")? {
        let x = HPoint::random(&mut rng, spread);
        let got = h_inverse(&coeffs, x);
        let want = exact(x);
        let err = (got - Complex64::new(want, 0.0)).norm();
        max_error = max_error.max(err);
        rows.push(json!({ "point": [x.a, x.b, x.c], "reconstructed": [got.re, got.im], "exact": want, "error": err }));
    }
    report.add("points", rows, "inverse formula summed over the lambda grid; exact from the closed form")?;
    report.add("max_error", max_error, "max |reconstructed - exact|")?;
    report.diagnostics.extend(coeffs.warnings);
    let mut gates = Gates::default();
    gates.check(max_error <= tol, || format!("max reconstruction error {max_error:.3e} exceeds {tol:.1e}"));
    Ok(gates.status())
}

fn weyl(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let lg = LambdaGrid::new(ctx.positive("lambda_max")?, ctx.usize("lambda_nodes")?)?;
    let tol = ctx.positive("tol")?;
    let mut gates = Gates::default();
    let mut rows = Vec::new();
    let mut prev = 0.0;
    let mut levels = ctx.list("u")?;
    levels.sort_by(f64::total_cmp);
    for u in levels {
        let got = weyl_count(u, &lg).value;
        let exact = weyl_count_exact(u);
        let err = rel(got, exact);
        gates.check(err <= tol, || format!("N({u}) off by {err:.3e}"));
        gates.check(got >= prev, || format!("N is not monotone at u = {u}"));
        prev = got;
        rows.push(json!({ "u": u, "quadrature": got, "exact": exact, "relative_error": err }));
    }
    report.add("counts", rows, "trigamma closed form per lambda cell; exact pi^2 u^2 / 8")?;
    let (u_min, u_max) = (ctx.positive("u_min")?, ctx.positive("u_max")?);
    if !(u_max > u_min) {
        return Err(CliError::Config("u_max must exceed u_min".into()));
    }
    let points = ctx.usize("fit_points")?;
    if points < 2 {
        return Err(CliError::Config("fit_points must be at least 2".into()));
    }
    let fit = weyl_exponent_fit(&lg, u_min, u_max, points);
    report.add("exponent_fit", &fit, "least-squares slope of log N against log u")?;
    if (fit.exponent - fit.claimed_exponent).abs() > 0.05 {
        report.diagnostics.push(format!(
            "fitted growth exponent {:.4} differs from the claimed {}",
            fit.exponent, fit.claimed_exponent
        ));
    }
    let heat = heat_symbol_weak_norm(ctx.f64("s")?, ctx.positive("r")?, u_max, &lg);
    report.add("heat_symbol", &heat, "sup of N(u)^(1/r) (1+u)^(-s) on a log grid")?;

    let lambda = ctx.f64("spectrum_lambda")?;
    let half = ctx.positive("spectrum_half_width")?;
    let grid = UniformGrid::closed(-half, half, ctx.usize("spectrum_nodes")?)?;
    let count = ctx.usize("spectrum_count")?;
    let stol = ctx.positive("spectrum_tol")?;
    let ev = sublaplacian_spectrum(lambda, &grid, count)?;
    let mut spec = Vec::new();
    for (k, e) in ev.iter().enumerate() {
        let exact = -(2.0 * k as f64 + 1.0) * lambda.abs();
        let err = rel(*e, exact);
        gates.check(err <= stol, || format!("eigenvalue {k} off by {err:.3e}"));
        spec.push(json!({ "k": k, "computed": e, "exact": exact, "relative_error": err }));
    }
    report.add("spectrum", spec, "finite differences against the oscillator values -(2k+1)|lambda|")?;
    Ok(gates.status())
}

fn orbit(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let l = CoadjointPoint { mu: ctx.f64("mu")?, nu: ctx.f64("nu")?, lambda: ctx.f64("lambda")? };
    let spread = ctx.positive("spread")?;
    let tol = ctx.positive("tol")?;
    let pts = orbit_sample(l, ctx.usize("count")?, spread, ctx.seed()?);
    let mut gates = Gates::default();
    let preserved = pts.iter().all(|p| p.lambda == l.lambda);
    gates.check(preserved, || "lambda changed along the orbit".into());
    if l.lambda == 0.0 {
        gates.check(pts.iter().all(|p| *p == l), || "points of the lambda = 0 plane must be fixed".into());
    }
    let mut rng = ctx.rng()?;
    let mut action_error = 0.0_f64;
    for _ in 0..100 {
        let (g, h) = (HPoint::random(&mut rng, spread), HPoint::random(&mut rng, spread));
        let lhs = coadjoint(h_mul(g, h), l);
        let rhs = coadjoint(g, coadjoint(h, l));
        action_error = action_error.max((lhs.mu - rhs.mu).abs().max((lhs.nu - rhs.nu).abs()));
    }
    gates.check(action_error <= tol, || format!("Ad*(gh) differs from Ad*(g)Ad*(h) by {action_error:.3e}"));
    let kind = if l.lambda != 0.0 { "plane lambda = const" } else { "single point" };
    report.add("points", &pts, "Ad*(a,b,c)(mu,nu,lambda) = (mu + b lambda, nu - a lambda, lambda)")?;
    report.add("orbit_type", kind, "lambda != 0 gives a plane, lambda = 0 a point")?;
    report.add("action_error", action_error, "homomorphism check on 100 random pairs")?;
    report.add("lambda_preserved", preserved, "Z* coordinate is invariant")?;
    Ok(gates.status())
}

fn small() -> Result<(LambdaGrid, FourierOptions), CliError> {
    Ok((LambdaGrid::new(6.0, 33)?, FourierOptions::default()))
}

fn plancherel_selftest() -> Result<Vec<Check>, CliError> {
    let (lg, opts) = small()?;
    let zero = HFunction::from_fn(4.0, 16, |_, _, _| Complex64::new(0.0, 0.0))?;
    let z = h_plancherel(&zero, &lg, &opts)?;
    let k = HFunction::gaussian(1.0, 4.0, 16)?;
    let one = h_plancherel(&k, &lg, &opts)?;
    let two = h_plancherel(&k.scale(Complex64::new(2.0, 0.0)), &lg, &opts)?;
    Ok(vec![
        check("k = 0 gives 0 = 0", z.lhs == 0.0 && z.rhs == 0.0, json!([z.lhs, z.rhs])),
        check(
            "k -> 2k multiplies both sides by 4",
            rel(two.lhs, 4.0 * one.lhs) < 1e-12 && rel(two.rhs, 4.0 * one.rhs) < 1e-12,
            json!([one.lhs, one.rhs, two.lhs, two.rhs]),
        ),
    ])
}

fn invert_selftest() -> Result<Vec<Check>, CliError> {
    let (lg, opts) = small()?;
    let mut rng = random::rng(1);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let x = HPoint::random(&mut rng, 3.0);
        let e = h_mul(x, h_inv(x));
        worst = worst.max(e.a.abs().max(e.b.abs()).max(e.c.abs()));
    }
    let x = HPoint::new(0.3, -1.2, 2.0);
    let zero = HFunction::from_fn(4.0, 16, |_, _, _| Complex64::new(0.0, 0.0))?;
    let rec = h_inverse(&h_transform(&zero, &lg, &opts)?, HPoint::new(0.5, 0.5, 0.5));
    Ok(vec![
        check("x * e = x", h_mul(x, HPoint::IDENTITY) == x, json!([x.a, x.b, x.c])),
        check(
            "(1,0,0)(0,1,0) = (1,1,1) and (0,1,0)(1,0,0) = (1,1,0)",
            h_mul(HPoint::new(1.0, 0.0, 0.0), HPoint::new(0.0, 1.0, 0.0)) == HPoint::new(1.0, 1.0, 1.0)
                && h_mul(HPoint::new(0.0, 1.0, 0.0), HPoint::new(1.0, 0.0, 0.0)) == HPoint::new(1.0, 1.0, 0.0),
            "",
        ),
        check("x * x^-1 = e on 100 random x", worst < 1e-12, worst),
        check("zero coefficients invert to 0", rec.norm() == 0.0, rec.norm()),
    ])
}

fn weyl_selftest() -> Result<Vec<Check>, CliError> {
    let lg = LambdaGrid::new(6.0, 129)?;
    let tiny = weyl_count(1e-9, &lg).value;
    let steep = heat_symbol_weak_norm(10.0, 1.0, 1e4, &lg);
    let flat = heat_symbol_weak_norm(0.0, 1.0, 1e4, &lg);
    let grid = UniformGrid::closed(-8.0, 8.0, 257)?;
    let phi = GridFunction::gaussian(grid);
    let a = sublaplacian_symbol(1.0, &phi)?;
    let b = sublaplacian_symbol(2.0, &phi)?;
    let homog = b.sub(&a.scale(Complex64::new(2.0, 0.0))).norm();
    Ok(vec![
        check("N(u) -> 0 as u -> 0+", tiny < 1e-16, tiny),
        check("s = 10, r = 1 is finite", steep.finite, steep.sup),
        check("s = 0 is divergent", !flat.finite, flat.tail_slope),
        check("symbol at lambda = 2 is twice the symbol at lambda = 1", homog <= 1e-12 * a.norm(), homog),
    ])
}

fn orbit_selftest() -> Result<Vec<Check>, CliError> {
    let moved = coadjoint(HPoint::new(1.0, 0.0, 0.0), CoadjointPoint { mu: 0.0, nu: 0.0, lambda: 1.0 });
    let one = rep_flat(1.0, 0.0, HPoint::new(1.0, 1.0, 5.0));
    let mut rng = random::rng(2);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let (g, h) = (HPoint::random(&mut rng, 3.0), HPoint::random(&mut rng, 3.0));
        let (mu, nu) = (0.7, -1.3);
        worst = worst.max((rep_flat(mu, nu, h_mul(g, h)) - rep_flat(mu, nu, g) * rep_flat(mu, nu, h)).norm());
    }
    Ok(vec![
        check(
            "Ad*(1,0,0)(0,0,1) = (0,-1,1)",
            moved == CoadjointPoint { mu: 0.0, nu: -1.0, lambda: 1.0 },
            json!([moved.mu, moved.nu, moved.lambda]),
        ),
        check("flat character at the identity is 1", rep_flat(0.4, 2.0, HPoint::IDENTITY) == Complex64::new(1.0, 0.0), ""),
        check("flat character at (1,1,5), (1,0) is 1", (one - 1.0).norm() < 1e-12, json!([one.re, one.im])),
        check("flat characters are multiplicative", worst < 1e-12, worst),
    ])
}
