use nalgebra::DMatrix;
use ncharm::random::{self, SeededRng};
use ncharm::report::Report;
use ncharm::{Complex64, OpenInterval, TracedElement};
use rand::Rng;
use serde_json::json;

use super::{check, Check, Command, Gates, Status};
use crate::config::{key, Ctx};
use crate::CliError;

pub const NORMS: Command = Command {
    group: "nclp",
    name: "norms",
    about: "noncommutative Lp norms and their inequalities on random block matrices",
    keys: &[
        key("dim", "4", "size of each block"),
        key("blocks", "2", "number of blocks"),
        key("p", "1,1.5,2,3,inf", "exponents"),
        key("instances", "100", "random instances per property"),
        key("tol", "1e-10", "relative tolerance"),
    ],
    run: norms,
    selftest: norms_selftest,
};

pub const SINGULAR: Command = Command {
    group: "nclp",
    name: "singular",
    about: "generalized singular numbers of a random block matrix",
    keys: &[
        key("dim", "4", "size of each block"),
        key("blocks", "2", "number of blocks"),
        key("p", "1,2,inf", "exponents compared against the rearrangement"),
        key("tol", "1e-10", "relative tolerance"),
    ],
    run: singular,
    selftest: singular_selftest,
};

fn element(rng: &mut SeededRng, dim: usize, weights: &[f64]) -> Result<TracedElement, CliError> {
    let blocks = weights.iter().map(|_| random::ginibre(rng, dim)).collect();
    Ok(TracedElement::new(blocks, weights.to_vec())?)
}

fn unitary(rng: &mut SeededRng, dim: usize, weights: &[f64]) -> Result<TracedElement, CliError> {
    let blocks = weights.iter().map(|_| random::unitary(rng, dim)).collect();
    Ok(TracedElement::new(blocks, weights.to_vec())?)
}

fn shape(ctx: &Ctx, rng: &mut SeededRng) -> Result<(usize, Vec<f64>), CliError> {
    let dim = ctx.usize("dim")?;
    let blocks = ctx.usize("blocks")?;
    if dim == 0 || blocks == 0 {
        return Err(CliError::Config("dim and blocks must be positive".into()));
    }
    Ok((dim, (0..blocks).map(|_| rng.random_range(0.5..2.0)).collect()))
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn norms(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let mut rng = ctx.rng()?;
    let (dim, weights) = shape(ctx, &mut rng)?;
    let ps = ctx.list("p")?;
    let tol = ctx.positive("tol")?;
    // Largest relative excess of lhs over rhs, per property.
    let (mut triangle, mut holder, mut unitary_gap, mut weak) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let excess = |lhs: f64, rhs: f64| (lhs - rhs) / rhs.max(f64::MIN_POSITIVE);
    let mut first = Vec::new();
    for i in 0..ctx.usize("instances")? {
        let x = element(&mut rng, dim, &weights)?;
        let y = element(&mut rng, dim, &weights)?;
        let (u, v) = (unitary(&mut rng, dim, &weights)?, unitary(&mut rng, dim, &weights)?);
        let uxv = x.sandwich(&u, &v)?;
        let sum = x.add(&y)?;
        let prod = x.mul(&y)?;
        for &p in &ps {
            let (nx, ny) = (x.lp_norm(p)?, y.lp_norm(p)?);
            triangle = triangle.max(excess(sum.lp_norm(p)?, nx + ny));
            holder = holder.max(excess(prod.lp_norm(1.0)?, nx * y.lp_norm(conjugate(p))?));
            unitary_gap = unitary_gap.max((uxv.lp_norm(p)? - nx).abs() / nx);
            let w = x.weak_lp_norm(p)?;
            weak = weak.max(excess(w, nx));
            if i == 0 {
                first.push(json!({ "p": p.to_string(), "norm": nx, "weak_norm": w }));
            }
        }
    }
    report.add("first_instance", first, "singular values of each block weighted by the trace")?;
    report.add("triangle_excess", triangle.max(0.0), "max (||x+y|| - ||x|| - ||y||) / rhs")?;
    report.add("holder_excess", holder.max(0.0), "max (||xy||_1 - ||x||_p ||y||_p') / rhs")?;
    report.add("unitary_gap", unitary_gap, "max | ||u x v||_p - ||x||_p | / ||x||_p")?;
    report.add("weak_excess", weak.max(0.0), "max (||x||_(p,inf) - ||x||_p) / ||x||_p")?;
    let mut gates = Gates::default();
    for (name, v) in [("triangle", triangle), ("Hoelder", holder), ("unitary invariance", unitary_gap), ("weak <= strong", weak)] {
        gates.check(v <= tol, || format!("{name} violated by {v:.3e}"));
    }
    Ok(gates.status())
}

fn singular(ctx: &Ctx, report: &mut Report) -> Result<Status, CliError> {
    let mut rng = ctx.rng()?;
    let (dim, weights) = shape(ctx, &mut rng)?;
    let tol = ctx.positive("tol")?;
    let x = element(&mut rng, dim, &weights)?;
    let profile = x.singular_numbers();
    let mut gates = Gates::default();
    let mut rows = Vec::new();
    for p in ctx.list("p")? {
        let direct = x.lp_norm(p)?;
        let from_profile = if p.is_infinite() { profile.values.first().copied().unwrap_or(0.0) } else { profile.lp_norm(p) };
        let err = (direct - from_profile).abs() / direct.max(f64::MIN_POSITIVE);
        gates.check(err <= tol, || format!("p = {p}: rearrangement gives {from_profile}, direct {direct}"));
        rows.push(json!({ "p": p.to_string(), "norm": direct, "from_rearrangement": from_profile }));
    }
    report.add("weights", &weights, "block weights of the trace")?;
    report.add("profile", &profile, "decreasing rearrangement t -> mu_t(x)")?;
    report.add("norms", rows, "direct Schatten sums against the integral of mu_t^p")?;
    report.add("support_trace", profile.support_trace(), "trace of the support projection")?;
    Ok(gates.status())
}

fn diag(values: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0))))
}

fn norms_selftest() -> Result<Vec<Check>, CliError> {
    let id3 = TracedElement::single(DMatrix::identity(3, 3), 1.0)?;
    let two = TracedElement::new(vec![diag(&[2.0]), diag(&[5.0])], vec![1.0, 2.0])?;
    let zero = id3.zero_like();
    let mut powers = true;
    for p in [1.0, 1.5, 2.0, 4.0] {
        powers &= (id3.lp_norm(p)? - 3f64.powf(1.0 / p)).abs() < 1e-14;
    }
    let d31 = TracedElement::single(diag(&[3.0, 1.0]), 1.0)?;
    Ok(vec![
        check("trace of the 3x3 identity is 3", id3.trace() == Complex64::new(3.0, 0.0), ""),
        check("trace of 0 is 0", zero.trace() == Complex64::new(0.0, 0.0), ""),
        check("diag(2), diag(5) with weights 1, 2 has trace 12", two.trace() == Complex64::new(12.0, 0.0), ""),
        check("||1_n||_p = n^(1/p)", powers, ""),
        check("||diag(3, 1)||_1 = 4", (d31.lp_norm(1.0)? - 4.0).abs() < 1e-14, d31.lp_norm(1.0)?),
        check("||0||_p = 0", zero.lp_norm(2.0)? == 0.0 && zero.weak_lp_norm(2.0)? == 0.0, ""),
    ])
}

fn singular_selftest() -> Result<Vec<Check>, CliError> {
    let x = TracedElement::single(diag(&[1.0, 5.0]), 1.0)?;
    let p = x.spectral_projection(OpenInterval::new(0.0, 2.0))?;
    let all = x.spectral_projection(OpenInterval::whole_line())?;
    Ok(vec![
        check("1_(0,2)(diag(1,5)) = diag(1,0)", p.blocks()[0] == diag(&[1.0, 0.0]), ""),
        check("1_R(x) = 1", all.blocks()[0] == DMatrix::identity(2, 2), ""),
    ])
}
