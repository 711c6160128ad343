use ncharm::freegrp::{
    ball_count, ball_enumerate, distribution_heat, heat_symbol, hm_condition, hm_lift, truncated_convolver,
    truncated_multiplier, vacuum_expectation, weak_norm_counting, word_mul, BallFunction, ReducedWord, DEFAULT_CAP,
};
use ncharm::report::{number, Report};
use ncharm::{random, Complex64};
use serde_json::json;

use super::{check, rel, Check, Command, Gates, Status};
use crate::config::{key, Ctx};
use crate::CliError;

const CAP: &str = "10000000";

pub const WEAKNORM: Command = Command {
    group: "free",
    name: "weaknorm",
    about: "weak L^r norm of the heat symbol exp(-t|g|) on F_n",
    keys: &[
        key("n", "2", "number of free generators"),
        key("t", "1.7918", "heat time"),
        key("r", "1", "Lorentz exponent (inf allowed)"),
    ],
    run: weaknorm,
    selftest: weaknorm_selftest,
};

pub const DISTRIBUTION: Command = Command {
    group: "free",
    name: "distribution",
    about: "distribution function of the heat symbol by enumeration",
    keys: &[
        key("n", "2", "number of free generators"),
        key("t", "1", "heat time"),
        key("alpha", "0.2231", "level"),
        key("cap", CAP, "largest ball enumerated"),
        key("check_depth", "8", "balls up to this radius are compared with the closed form"),
    ],
    run: distribution,
    selftest: distribution_selftest,
};

pub const MULTIPLIER: Command = Command {
    group: "free",
    name: "multiplier",
    about: "heat multiplier on a random finitely supported function and its convolution operator",
    keys: &[
        key("n", "2", "number of free generators"),
        key("t", "1", "heat time"),
        key("support", "1", "radius carrying the random coefficients"),
        key("radius", "3", "truncation radius of the convolution operator"),
        key("cap", CAP, "largest ball enumerated"),
        key("p", "1,2,4,inf", "noncommutative Lp exponents reported"),
        key("tol", "1e-12", "tolerance for the trace identity"),
    ],
    run: multiplier,
    selftest: multiplier_selftest,
};

pub const HMLIFT: Command = Command {
    group: "free",
    name: "hmlift",
    about: "lift a Euclidean symbol through exponent sequences and estimate its Mikhlin constant",
    keys: &[
        key("word", "1^2.2^-1", "reduced word, e.g. 1^2.2^-1 or e"),
        key("d", "2", "dimension of the exponent vector"),
        key("symbol", "smooth", "smooth|constant|linear|cos"),
        key("value", "1", "the constant for symbol=constant"),
        key("step", "0.1", "finite-difference grid step"),
        key("extent", "6", "grid half-width"),
    ],
    run: hmlift,
    selftest: hmlift_selftest,
};

fn weaknorm(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let rep = weak_norm_counting(ctx.u32("n")?, ctx.positive("t")?, ctx.positive("r")?)?;
    report.add("finite", rep.finite, "geometric ratio of the level-set sum sup_k exp(-tk) B_k^(1/r)")?;
    report.add("value", number(rep.sup), "sup_k exp(-tk) B_k^(1/r) with B_k the ball size")?;
    report.add("details", &rep, "level-set sum")?;
    if rep.finite != rep.claimed_finite {
        report.diagnostics.push(format!(
            "finiteness flips at t = log(2n-1)/r = {:.6}, not at log(2n)/r = {:.6}",
            rep.threshold_exact, rep.threshold_claimed
        ));
    }
    Ok(Status::Ok)
}

fn distribution(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let n = ctx.u32("n")?;
    let cap = ctx.u64("cap")?;
    let rep = distribution_heat(n, ctx.positive("t")?, ctx.positive("alpha")?, cap)?;
    report.add("count", rep.count.to_string(), "enumeration of the level set |g| < |log alpha|/t")?;
    report.add("details", &rep, "enumeration")?;
    let mut gates = Gates::default();
    if let Some(c) = rep.certified_bound {
        gates.check(rep.count as f64 <= c * (1.0 + 1e-12), || format!("count {} exceeds the ball bound {c:.6e}", rep.count));
    }
    if rep.bound_holds() == Some(false) {
        report.diagnostics.push(format!(
            "count {} exceeds (2n)^(|log alpha|/t) = {:.6e}",
            rep.count,
            rep.bound.unwrap_or(f64::NAN)
        ));
    }
    let depth = ctx.u32("check_depth")?;
    let mut rows = Vec::new();
    for l in 0..=depth {
        let closed = ball_count(n, l);
        let enumerated = ball_enumerate(n, l, cap)?.len() as u128;
        gates.check(closed == Some(enumerated), || format!("ball of radius {l} has {enumerated} words, closed form {closed:?}"));
        rows.push(json!({ "radius": l, "enumerated": enumerated.to_string(), "closed_form": closed.map(|c| c.to_string()) }));
    }
    report.add("ball_counts", rows, "enumeration against 1 + 2n((2n-1)^L - 1)/(2n-2)")?;
    Ok(gates.status())
}

fn random_ball(n: u32, support: u32, radius: u32, cap: u64, seed: u64) -> Result<BallFunction, CliError> {
    let mut rng = random::rng(seed);
    let mut f = BallFunction::zeros(n, radius, cap)?;
    let lens: Vec<u64> = f.words().iter().map(|w| w.len()).collect();
    for (c, len) in f.coeffs.iter_mut().zip(lens) {
        if len <= support as u64 {
            *c = random::complex_normal(&mut rng);
        }
    }
    Ok(f)
}

fn multiplier(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let (n, t) = (ctx.u32("n")?, ctx.positive("t")?);
    let (support, radius) = (ctx.u32("support")?, ctx.u32("radius")?);
    if support > radius {
        return Err(CliError::Config("support must not exceed radius".into()));
    }
    let cap = ctx.u64("cap")?;
    let tol = ctx.positive("tol")?;
    let f = random_ball(n, support, radius, cap, ctx.seed()?)?;
    let tf = truncated_multiplier(|g| heat_symbol(t, g), &f);
    let (nf, ntf) = (f.l2_norm_sq().sqrt(), tf.l2_norm_sq().sqrt());
    let lf = truncated_convolver(&tf, radius, cap)?;
    let vac = vacuum_expectation(&lf.adjoint().mul(&lf)?);
    let mut norms = Vec::new();
    for p in ctx.list("p")? {
        norms.push(json!({ "p": p.to_string(), "norm": lf.lp_norm(p)?, "weak_norm": lf.weak_lp_norm(p)? }));
    }
    report.add("input_l2", nf, "sum of |f(g)|^2")?;
    report.add("output_l2", ntf, "sum of |m(g) f(g)|^2")?;
    report.add("vacuum_trace", vac.re, "<L* L delta_e, delta_e> for L the compressed convolution by T_m f")?;
    report.add("lp_norms", norms, "Schatten norms of the compressed convolution under Tr / |ball|")?;
    report.add("ball_size", f.words().len(), "closed-form ball count")?;
    let mut gates = Gates::default();
    gates.check(ntf <= nf * (1.0 + 1e-12), || format!("||T_m f|| = {ntf:.6e} exceeds ||f|| = {nf:.6e} with |m| <= 1"));
    let err = rel(vac.re, ntf * ntf);
    gates.check(err <= tol && vac.im.abs() <= tol * ntf * ntf, || format!("trace identity off by {err:.3e}"));
    Ok(gates.status())
}

fn symbol(ctx: &Ctx) -> Result<Box<dyn Fn(&[f64]) -> f64 + Sync>, CliError> {
    let c = ctx.f64("value")?;
    Ok(match ctx.choice("symbol", &["smooth", "constant", "linear", "cos"])? {
        "smooth" => Box::new(|x: &[f64]| 1.0 / (1.0 + x.iter().map(|v| v * v).sum::<f64>())),
        "constant" => Box::new(move |_: &[f64]| c),
        "linear" => Box::new(|x: &[f64]| x[0]),
        _ => Box::new(|x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt().cos()),
    })
}

fn hmlift(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let word: ReducedWord = ctx.str("word")?.parse()?;
    let d = ctx.usize("d")?;
    let m = symbol(ctx)?;
    let lifted = hm_lift(&m, &word, d);
    let hm = hm_condition(&m, d, ctx.positive("step")?, ctx.positive("extent")?)?;
    if word.syllables().len() > d {
        report.diagnostics.push(format!("{} syllables truncated to d = {d}", word.syllables().len()));
    }
    report.add("word", word.to_string(), "parsed reduced word")?;
    report.add("exponents", word.exponents(), "syllable exponents in order")?;
    report.add("lifted_value", lifted, "m evaluated at the zero-padded exponent vector")?;
    report.add("mikhlin", &hm, "finite differences on h Z^d within [-E, E]^d")?;
    Ok(Status::Ok)
}

fn weaknorm_selftest() -> Result<Vec<Check>, CliError> {
    let limit = weak_norm_counting(2, 1.0, f64::INFINITY)?;
    let line = weak_norm_counting(1, 0.3, 1.0)?;
    Ok(vec![
        check("r = inf gives sup |m_t| = 1", limit.finite && (limit.sup - 1.0).abs() < 1e-15, limit.sup),
        check("F_1 has linear growth, so every t > 0 is finite", line.finite, line.sup),
    ])
}

fn distribution_selftest() -> Result<Vec<Check>, CliError> {
    let ball = ball_enumerate(3, 0, DEFAULT_CAP)?;
    let g: ReducedWord = "1^1.2^-2".parse()?;
    let a = ReducedWord::generator(1);
    let b = ReducedWord::generator(2);
    let ab = word_mul(&a, &b);
    let binva = word_mul(&b.inverse(), &a);
    Ok(vec![
        check("L = 0 gives {e}", ball.len() == 1 && ball[0].is_identity(), ball.len()),
        check("m_t(e) = 1", heat_symbol(0.7, &ReducedWord::identity()) == 1.0, ""),
        check("|g| = 1, t = 1 gives exp(-1)", heat_symbol(1.0, &a) == (-1.0f64).exp(), heat_symbol(1.0, &a)),
        check("m_t(g^-1) = m_t(g)", heat_symbol(0.4, &g) == heat_symbol(0.4, &g.inverse()), ""),
        check("a a^-1 = e", word_mul(&a, &a.inverse()).is_identity(), ""),
        check("(ab)(b^-1 a) = a^2", word_mul(&ab, &binva) == ReducedWord::from_syllables(&[(1, 2)])?, ""),
    ])
}

fn multiplier_selftest() -> Result<Vec<Check>, CliError> {
    let f = random_ball(2, 2, 2, DEFAULT_CAP, 4)?;
    let same = truncated_multiplier(|_| 1.0, &f);
    let e = ReducedWord::identity();
    let at_e = truncated_multiplier(|g| if g.is_identity() { 1.0 } else { 0.0 }, &f);
    let only_e = at_e.words().iter().all(|w| w.is_identity() || at_e.get(w) == Complex64::new(0.0, 0.0));
    let delta_e = truncated_convolver(&BallFunction::delta(2, 2, &e)?, 2, DEFAULT_CAP)?;
    let a = ReducedWord::generator(1);
    let delta_a = truncated_convolver(&BallFunction::delta(2, 1, &a)?, 2, DEFAULT_CAP)?;
    let m = &delta_a.blocks()[0];
    let partial_perm = m.iter().all(|z| *z == Complex64::new(0.0, 0.0) || *z == Complex64::new(1.0, 0.0))
        && m.column_iter().all(|c| c.iter().filter(|z| z.re == 1.0).count() <= 1)
        && (0..m.nrows()).all(|i| m[(i, i)] == Complex64::new(0.0, 0.0));
    Ok(vec![
        check("m = 1 leaves f unchanged", same.coeffs == f.coeffs, ""),
        check("m = indicator of e gives f(e) delta_e", only_e && at_e.get(&e) == f.get(&e), ""),
        check(
            "f = delta_e gives the identity with vacuum value 1",
            delta_e.blocks()[0] == delta_e.identity_like().blocks()[0] && vacuum_expectation(&delta_e) == Complex64::new(1.0, 0.0),
            "",
        ),
        check(
            "f = delta_a is a partial permutation with zero diagonal and vacuum value 0",
            partial_perm && vacuum_expectation(&delta_a) == Complex64::new(0.0, 0.0),
            "",
        ),
    ])
}

fn hmlift_selftest() -> Result<Vec<Check>, CliError> {
    let m = |x: &[f64]| 2.0 + x[0];
    let at_e = hm_lift(m, &ReducedWord::identity(), 3);
    let c = hm_condition(|_| -2.5, 2, 0.1, 4.0)?;
    let lin = hm_condition(|x| x[0], 2, 0.1, 4.0)?;
    Ok(vec![
        check("g = e gives m(0)", at_e == 2.0, at_e),
        check("constant symbol c gives C_m = |c|", (c.c_m - 2.5).abs() < 1e-9 && !c.unbounded, c.c_m),
        check("m(xi) = xi_1 is flagged unbounded", lin.unbounded, lin.c_m),
    ])
}
