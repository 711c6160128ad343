use nalgebra::DMatrix;
use ncharm::finite::{
    finite_fourier, finite_inverse, hausdorff_young_check, heat_symbol_on_cyclic, multiplier_apply, multiplier_matrix,
    pq_operator_norm, zhang_ratio, FiniteDualCoefficients, FiniteGroup, FiniteGroupFunction, NormSearch,
};
use ncharm::report::Report;
use ncharm::{io, random, Complex64};
use serde_json::json;

use super::{check, rel, Check, Command, Gates, Status};
use crate::config::{key, Ctx};
use crate::CliError;

pub const PLANCHEREL: Command = Command {
    group: "finite",
    name: "plancherel",
    about: "Plancherel identity and Fourier inversion on S3 or Z_N",
    keys: &[
        key("group", "s3", "s3|cyclic"),
        key("n", "16", "order of the cyclic group"),
        key("family", "random", "random|file"),
        key("samples", "1000", "random functions"),
        key("tol", "1e-12", "relative tolerance"),
    ],
    run: plancherel,
    selftest: plancherel_selftest,
};

pub const HY: Command = Command {
    group: "finite",
    name: "hy",
    about: "Hausdorff-Young inequality ||f^||_p' <= ||f||_p",
    keys: &[
        key("group", "s3", "s3|cyclic"),
        key("n", "16", "order of the cyclic group"),
        key("p", "1,1.3333333333333333,2", "exponents in [1, 2]"),
        key("samples", "100", "random functions"),
        key("tol", "1e-12", "tolerance for equality at p = 2"),
    ],
    run: hy,
    selftest: hy_selftest,
};

pub const ZHANG: Command = Command {
    group: "finite",
    name: "zhang",
    about: "||T_m||_(p->q) / ||m||_(r,inf) for the heat family on Z_N",
    keys: &[
        key("n", "16", "order of the cyclic group"),
        key("p", "1.3333333333333333", "source exponent in (1, 2]"),
        key("q", "4", "target exponent in [2, inf)"),
        key("t_min", "0.1", "smallest t"),
        key("t_max", "5", "largest t"),
        key("t_points", "21", "evenly spaced t values"),
        key("restarts", "32", "norm search restarts"),
        key("max_iter", "2000", "iterations per restart"),
    ],
    run: zhang,
    selftest: zhang_selftest,
};

pub const MULTNORM: Command = Command {
    group: "finite",
    name: "multnorm",
    about: "L^p -> L^q norm of a Fourier multiplier on Z_N",
    keys: &[
        key("n", "16", "order of the cyclic group"),
        key("symbol", "heat", "heat|one|indicator"),
        key("t", "1", "heat time"),
        key("p", "1.3333333333333333", "source exponent"),
        key("q", "4", "target exponent"),
        key("restarts", "32", "norm search restarts"),
        key("max_iter", "2000", "iterations per restart"),
    ],
    run: multnorm,
    selftest: multnorm_selftest,
};

fn group(ctx: &Ctx) -> Result<FiniteGroup, CliError> {
    Ok(match ctx.choice("group", &["s3", "cyclic"])? {
        "s3" => FiniteGroup::S3,
        _ => FiniteGroup::cyclic(ctx.usize("n")?)?,
    })
}

fn search(ctx: &Ctx) -> Result<NormSearch, CliError> {
    Ok(NormSearch { restarts: ctx.usize("restarts")?, max_iter: ctx.usize("max_iter")?, seed: ctx.seed()?, ..NormSearch::default() })
}

fn max_diff(a: &FiniteGroupFunction, b: &FiniteGroupFunction) -> f64 {
    a.values.iter().zip(&b.values).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

fn plancherel(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let g = group(ctx)?;
    let tol = ctx.positive("tol")?;
    let functions = match ctx.choice("family", &["random", "file"])? {
        "random" => {
            let mut rng = ctx.rng()?;
            (0..ctx.usize("samples")?).map(|_| FiniteGroupFunction::random(g, &mut rng)).collect()
        }
        _ => vec![io::read_finite(ctx.input()?, g)?],
    };
    let (mut worst_plancherel, mut worst_inverse) = (0.0_f64, 0.0_f64);
    for f in &functions {
        let fhat = finite_fourier(f);
        worst_plancherel = worst_plancherel.max(rel(fhat.plancherel_sum(), f.lp_norm(2.0).powi(2)));
        let scale = f.lp_norm(f64::INFINITY).max(f64::MIN_POSITIVE);
        worst_inverse = worst_inverse.max(max_diff(&finite_inverse(&fhat), f) / scale);
    }
    report.add("functions", functions.len(), "sample size")?;
    report.add("dual_dims", g.dual_dims(), "irreducible dimensions")?;
    report.add("plancherel_error", worst_plancherel, "max relative gap between sum d_pi ||f^(pi)||_HS^2 and ||f||_2^2")?;
    report.add("inversion_error", worst_inverse, "max |F^-1 F f - f| / max |f|")?;
    let mut gates = Gates::default();
    gates.check(worst_plancherel <= tol, || format!("Plancherel error {worst_plancherel:.3e} exceeds {tol:.1e}"));
    gates.check(worst_inverse <= tol, || format!("inversion error {worst_inverse:.3e} exceeds {tol:.1e}"));
    Ok(gates.status())
}

fn hy(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let g = group(ctx)?;
    let tol = ctx.positive("tol")?;
    let mut rng = ctx.rng()?;
    let functions: Vec<_> = (0..ctx.usize("samples")?).map(|_| FiniteGroupFunction::random(g, &mut rng)).collect();
    let mut gates = Gates::default();
    let mut rows = Vec::new();
    for p in ctx.list("p")? {
        let mut worst = 0.0_f64;
        let mut holds = true;
        for f in &functions {
            let r = hausdorff_young_check(f, p)?;
            worst = worst.max(r.ratio);
            holds &= r.holds;
        }
        gates.check(holds, || format!("Hausdorff-Young fails at p = {p}"));
        if p == 2.0 {
            gates.check((worst - 1.0).abs() <= tol, || format!("no equality at p = 2: ratio {worst}"));
        }
        rows.push(json!({ "p": p, "max_ratio": worst, "holds": holds }));
    }
    report.add("exponents", rows, "Schatten norms of f^ weighted by d_pi against normalized Lp norms")?;
    Ok(gates.status())
}

fn zhang(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let n = ctx.usize("n")?;
    let (p, q) = (ctx.f64("p")?, ctx.f64("q")?);
    let (t0, t1) = (ctx.positive("t_min")?, ctx.positive("t_max")?);
    let points = ctx.usize("t_points")?;
    if points < 2 || !(t1 > t0) {
        return Err(CliError::Config("need t_points >= 2 and t_max > t_min".into()));
    }
    let search = search(ctx)?;
    let mut rows = Vec::new();
    let mut gates = Gates::default();
    let (mut lo, mut hi, mut hi_upper, mut bound) = (f64::INFINITY, 0.0_f64, 0.0_f64, 0.0);
    for i in 0..points {
        let t = t0 + (t1 - t0) * i as f64 / (points - 1) as f64;
        let rep = zhang_ratio(&heat_symbol_on_cyclic(n, t), p, q, &search)?;
        lo = lo.min(rep.ratio);
        hi = hi.max(rep.ratio);
        hi_upper = hi_upper.max(rep.ratio_upper);
        bound = rep.a_priori_bound;
        gates.check(rep.ratio <= bound * (1.0 + 1e-12), || format!("ratio {:.6} exceeds the a priori bound {bound:.6} at t = {t}", rep.ratio));
        rows.push(json!({
            "t": t,
            "operator_norm_lower": rep.operator_norm.lower,
            "operator_norm_upper": rep.operator_norm.upper,
            "weak_norm": rep.weak_norm,
            "ratio": rep.ratio,
            "ratio_upper": rep.ratio_upper,
        }));
    }
    report.add("family", rows, "multi-start power iteration for the operator norm; weak norm from the decreasing rearrangement")?;
    report.add("max_ratio", hi, "largest certified lower ratio")?;
    report.add("min_ratio", lo, "smallest certified lower ratio")?;
    report.add("max_ratio_upper", hi_upper, "largest upper ratio")?;
    report.add("a_priori_bound", bound, "H_N^(1/r) from Hausdorff-Young, Hoelder and the harmonic sum")?;
    Ok(gates.status())
}

fn multnorm(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let n = ctx.usize("n")?;
    let m = match ctx.choice("symbol", &["heat", "one", "indicator"])? {
        "heat" => heat_symbol_on_cyclic(n, ctx.positive("t")?),
        "one" => vec![Complex64::new(1.0, 0.0); n],
        _ => (0..n).map(|k| Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
    };
    let g = FiniteGroup::cyclic(n)?;
    let t = multiplier_matrix(&FiniteDualCoefficients::scalar(g, &m)?)?;
    let est = pq_operator_norm(&t, ctx.f64("p")?, ctx.f64("q")?, &search(ctx)?)?;
    report.add("symbol", m.iter().map(|z| z.re).collect::<Vec<_>>(), "symbol values on the dual")?;
    report.add("norm", &est, "exact formula or certified bracket from the norm search")?;
    Ok(Status::Ok)
}

fn plancherel_selftest() -> Result<Vec<Check>, CliError> {
    let z4 = FiniteGroup::cyclic(4)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let delta = FiniteGroupFunction::new(z4, vec![Complex64::new(4.0, 0.0), zero, zero, zero])?;
    let dhat = finite_fourier(&delta);
    let ones = finite_fourier(&FiniteGroupFunction::constant(FiniteGroup::S3, one));
    let s3_ok = ones.blocks[0][(0, 0)] == one && ones.blocks[1..].iter().all(|b| b.iter().all(|z| z.norm() < 1e-15));
    let de = FiniteGroupFunction::delta(FiniteGroup::S3, 0);
    let back = finite_inverse(&finite_fourier(&de));
    let zero_back = finite_inverse(&FiniteDualCoefficients::zeros(FiniteGroup::S3));
    Ok(vec![
        check("Z_4 delta transforms to the constant 1", dhat.blocks.iter().all(|b| (b[(0, 0)] - one).norm() < 1e-15), ""),
        check("S_3 constant 1 transforms to the trivial character", s3_ok, ""),
        check("coefficients of delta_e invert to delta_e", max_diff(&back, &de) < 1e-14, max_diff(&back, &de)),
        check("zero coefficients invert to 0", zero_back.values.iter().all(|z| *z == zero), ""),
    ])
}

fn hy_selftest() -> Result<Vec<Check>, CliError> {
    let mut ok = true;
    for p in [1.0, 1.5, 2.0] {
        let r = hausdorff_young_check(&FiniteGroupFunction::constant(FiniteGroup::S3, Complex64::new(1.0, 0.0)), p)?;
        ok &= (r.transform_norm - 1.0).abs() < 1e-14 && (r.function_norm - 1.0).abs() < 1e-14;
    }
    Ok(vec![check("f = 1 gives 1 on both sides", ok, "")])
}

fn zhang_selftest() -> Result<Vec<Check>, CliError> {
    let s = NormSearch::default();
    let zero = zhang_ratio(&[Complex64::new(0.0, 0.0); 8], 1.5, 3.0, &s)?;
    let m = heat_symbol_on_cyclic(8, 0.5);
    let m2: Vec<_> = m.iter().map(|z| z * 2.0).collect();
    let (a, b) = (zhang_ratio(&m, 1.5, 3.0, &s)?, zhang_ratio(&m2, 1.5, 3.0, &s)?);
    Ok(vec![
        check("m = 0 gives ratio 0", zero.operator_norm.upper == 0.0 && zero.weak_norm == 0.0 && zero.ratio == 0.0, ""),
        check(
            "m -> 2m doubles both norms and keeps the ratio",
            rel(b.weak_norm, 2.0 * a.weak_norm) < 1e-10 && rel(b.ratio, a.ratio) < 1e-10,
            json!([a.ratio, b.ratio]),
        ),
    ])
}

fn multnorm_selftest() -> Result<Vec<Check>, CliError> {
    let g = FiniteGroup::cyclic(6)?;
    let mut rng = random::rng(5);
    let f = FiniteGroupFunction::random(g, &mut rng);
    let one = FiniteDualCoefficients::scalar(g, &[Complex64::new(1.0, 0.0); 6])?;
    let mut ind = vec![Complex64::new(0.0, 0.0); 6];
    ind[0] = Complex64::new(1.0, 0.0);
    let proj = multiplier_apply(&FiniteDualCoefficients::scalar(g, &ind)?, &f)?;
    let mean = f.values.iter().sum::<Complex64>() / 6.0;
    let proj_ok = proj.values.iter().all(|z| (z - mean).norm() < 1e-14);
    let s = NormSearch::default();
    let id = pq_operator_norm(&DMatrix::identity(4, 4), 1.5, 1.5, &s)?;
    let mut d = DMatrix::identity(2, 2);
    d[(0, 0)] = Complex64::new(3.0, 0.0);
    let diag = pq_operator_norm(&d, 2.0, 2.0, &s)?;
    Ok(vec![
        check("m = 1 is the identity", max_diff(&multiplier_apply(&one, &f)?, &f) < 1e-14, ""),
        check("indicator of the trivial character projects onto constants", proj_ok, ""),
        check("identity map has norm 1 for p = q", (id.lower - 1.0).abs() < 1e-12 && id.upper >= id.lower, json!([id.lower, id.upper])),
        check("diag(3, 1) has 2 -> 2 norm 3", (diag.lower - 3.0).abs() < 1e-12 && diag.exact, diag.lower),
    ])
}
