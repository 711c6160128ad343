//! Acceptance criteria 1 to 11, one PASS/FAIL line each.
//!
//! Parts listed in `KNOWN_FAILURES` are claims that the computation refutes;
//! they are still run and printed as FAIL, but do not fail the test.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use ncharm::axb::{axb_plancherel, axb_rep, modular, AxbFunction, AxbOptions, AxbPoint, HalfLineFunction, Sign};
use ncharm::finite::{
    finite_fourier, finite_inverse, hausdorff_young_check, heat_symbol_on_cyclic, zhang_ratio, FiniteGroup,
    FiniteGroupFunction, NormSearch,
};
use ncharm::freegrp::{ball_count, distribution_heat, weak_norm_counting, DEFAULT_CAP};
use ncharm::grid::UniformGrid;
use ncharm::heisenberg::{
    h_inverse, h_plancherel, h_transform, sublaplacian_spectrum, weyl_count, weyl_count_exact, weyl_exponent_fit,
    FourierOptions, HFunction, HPoint, LambdaGrid,
};
use ncharm::report::Report;
use ncharm::spherical::{
    asymptotic_fit, eigen_check, inversion_check, multiplicativity_check, plancherel_density, spherical_phi,
    ConvolutionOptions,
};
use ncharm::{random, Complex64, TracedElement};
use rand::Rng;

const KNOWN_FAILURES: &[(u32, &str)] = &[(8, "level-set bound (2n)^(|log a|/t)"), (8, "flag flips at log(2n)/r")];

struct Part {
    name: String,
    pass: bool,
    detail: String,
}

fn part(name: &str, pass: bool, detail: impl Into<String>) -> Part {
    Part { name: name.into(), pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn criterion_1() -> Vec<Part> {
    let opts = FourierOptions::default();
    let run = |n: usize, nodes: usize| {
        let k = HFunction::gaussian(1.0, 4.0, n).unwrap();
        h_plancherel(&k, &LambdaGrid::new(6.0, nodes).unwrap(), &opts).unwrap()
    };
    let start = Instant::now();
    let base = single_threaded(|| run(64, 129));
    let secs = start.elapsed().as_secs_f64();
    let fine = run(128, 257);
    // the unit Gaussian has ||k||^2 = 2^{-3/2}
    let exact = 2f64.powf(-1.5);
    vec![
        part("relative error <= 1e-3", base.relative_error <= 1e-3, format!("{:.3e}", base.relative_error)),
        part("lhs matches 2^(-3/2)", rel(base.lhs, exact) <= 1e-10, format!("{:.3e}", rel(base.lhs, exact))),
        part("single-threaded runtime <= 60 s", secs <= 60.0, format!("{secs:.2} s")),
        part(
            "error decreases under refinement",
            fine.relative_error < base.relative_error,
            format!("{:.3e} -> {:.3e}", base.relative_error, fine.relative_error),
        ),
    ]
}

fn criterion_2() -> Vec<Part> {
    let k = HFunction::gaussian(1.0, 4.0, 64).unwrap();
    let coeffs = h_transform(&k, &LambdaGrid::new(6.0, 129).unwrap(), &FourierOptions::default()).unwrap();
    let mut rng = random::rng(2);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let x = HPoint::random(&mut rng, 1.5);
        let exact = (-PI * (x.a * x.a + x.b * x.b + x.c * x.c)).exp();
        worst = worst.max((h_inverse(&coeffs, x) - Complex64::new(exact, 0.0)).norm());
    }
    vec![part("max error at 20 interior points <= 1e-3", worst <= 1e-3, format!("{worst:.3e}"))]
}

fn criterion_3() -> Vec<Part> {
    let grid = UniformGrid::closed(-12.0, 12.0, 512).unwrap();
    let ev = sublaplacian_spectrum(1.0, &grid, 10).unwrap();
    let worst = ev.iter().enumerate().map(|(k, e)| rel(*e, -(2.0 * k as f64 + 1.0))).fold(0.0, f64::max);
    vec![part("first 10 eigenvalues within 1e-4 of -(2k+1)", ev.len() == 10 && worst <= 1e-4, format!("{worst:.3e}"))]
}

fn criterion_4() -> Vec<Part> {
    let lg = LambdaGrid::new(6.0, 129).unwrap();
    let worst = [10.0, 100.0, 1000.0].iter().map(|&u| rel(weyl_count(u, &lg).value, weyl_count_exact(u))).fold(0.0, f64::max);
    let mut prev = 0.0;
    let mut monotone = true;
    for i in 0..600 {
        let v = weyl_count(0.01 * 1.02f64.powi(i), &lg).value;
        monotone &= v >= prev;
        prev = v;
    }
    let fit = weyl_exponent_fit(&lg, 10.0, 1e4, 31);
    let spread = fit.per_decade.iter().map(|s| (s - fit.exponent).abs()).fold(0.0, f64::max);
    vec![
        part("agrees with exact summation to 1e-6", worst <= 1e-6, format!("{worst:.3e}")),
        part("monotone in u", monotone, ""),
        part(
            "fitted exponent stable to 0.05 across decades",
            spread <= 0.05,
            format!("exponent {:.4} (claimed {}), per decade {:?}", fit.exponent, fit.claimed_exponent, fit.per_decade),
        ),
    ]
}

fn criterion_5() -> Vec<Part> {
    let opts = AxbOptions::default();
    let base = axb_plancherel(&AxbFunction::product_bump(1.0, 1.0, 1.25, 64, 1.25, 64).unwrap(), &opts).unwrap();
    let fine = axb_plancherel(&AxbFunction::product_bump(1.0, 1.0, 1.25, 128, 1.25, 128).unwrap(), &opts).unwrap();
    let grid = UniformGrid::new(-10.0, 0.01, 1400).unwrap();
    let mut rng = random::rng(5);
    let mut worst = 0.0_f64;
    for sign in [Sign::Plus, Sign::Minus] {
        let phi = HalfLineFunction::from_fn(sign, grid, |t| Complex64::new(t * t * (-t * t).exp(), 0.0));
        for _ in 0..10 {
            let g = AxbPoint::random(&mut rng, 1.0, 2.0);
            let lhs = axb_rep(sign, g, &phi).unwrap().apply_d();
            let rhs = axb_rep(sign, g, &phi.apply_d()).unwrap().scale(modular(g).sqrt());
            worst = worst.max(lhs.sub(&rhs).norm() / lhs.norm());
        }
    }
    vec![
        part("default grid <= 1e-2", base.relative_error <= 1e-2, format!("{:.3e}", base.relative_error)),
        part("refined grid <= 3e-3", fine.relative_error <= 3e-3, format!("{:.3e}", fine.relative_error)),
        part("D-intertwining residual <= 1e-4", worst <= 1e-4, format!("{worst:.3e}")),
    ]
}

fn criterion_6() -> Vec<Part> {
    let mut rng = random::rng(6);
    let (mut plancherel, mut inverse, mut hy_fail, mut hy2) = (0.0_f64, 0.0_f64, 0usize, 0.0_f64);
    for g in [FiniteGroup::S3, FiniteGroup::Cyclic(12)] {
        for _ in 0..1000 {
            let f = FiniteGroupFunction::random(g, &mut rng);
            let fhat = finite_fourier(&f);
            // independent side: the normalized sum of squares
            let norm2 = f.values.iter().map(|z| z.norm_sqr()).sum::<f64>() / g.order() as f64;
            plancherel = plancherel.max(rel(fhat.plancherel_sum(), norm2));
            let back = finite_inverse(&fhat);
            let top = f.values.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            inverse = inverse.max(back.values.iter().zip(&f.values).fold(0.0_f64, |m, (a, b)| m.max((a - b).norm())) / top);
            for p in [1.0, 4.0 / 3.0, 2.0] {
                let r = hausdorff_young_check(&f, p).unwrap();
                hy_fail += usize::from(!r.holds);
                if p == 2.0 {
                    hy2 = hy2.max((r.ratio - 1.0).abs());
                }
            }
        }
    }
    vec![
        part("Plancherel to 1e-12", plancherel <= 1e-12, format!("{plancherel:.3e}")),
        part("Fourier round trip to 1e-12", inverse <= 1e-12, format!("{inverse:.3e}")),
        part("Hausdorff-Young for p in {1, 4/3, 2}", hy_fail == 0, format!("{hy_fail} violations")),
        part("equality at p = 2 to 1e-12", hy2 <= 1e-12, format!("{hy2:.3e}")),
    ]
}

fn criterion_7() -> Vec<Part> {
    let search = NormSearch::default();
    let mut ratios = Vec::new();
    let mut bound = 0.0;
    for i in 0..21 {
        let t = 0.1 + 4.9 * i as f64 / 20.0;
        let rep = zhang_ratio(&heat_symbol_on_cyclic(16, t), 4.0 / 3.0, 4.0, &search).unwrap();
        bound = rep.a_priori_bound;
        ratios.push(rep.ratio);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    vec![part(
        "ratio bounded by one constant over t in [0.1, 5]",
        max.is_finite() && max <= bound,
        format!("ratios in [{min:.4}, {max:.4}], constant {bound:.4}"),
    )]
}

fn criterion_8() -> Vec<Part> {
    let mut exact = true;
    let mut checked = 0;
    for n in 1..=3u32 {
        for t in [0.5, 1.0, 2.0] {
            for l in 0..=8u32 {
                // the level set |g| < l + 1/2 is the ball of radius l
                let alpha = (-t * (l as f64 + 0.5)).exp();
                let rep = distribution_heat(n, t, alpha, DEFAULT_CAP).unwrap();
                exact &= Some(rep.count) == ball_count(n, l);
                checked += 1;
            }
        }
    }
    let mut violations = Vec::new();
    let mut tested = 0;
    for n in 1..=3u32 {
        for t in [0.5, 1.0, 2.0] {
            for level in (1..=32).map(|j| j as f64 * 0.25).chain((1..=8).map(|k| k as f64 + 0.01)) {
                let rep = distribution_heat(n, t, (-t * level).exp(), DEFAULT_CAP).unwrap();
                tested += 1;
                if rep.bound_holds() != Some(true) {
                    violations.push(format!("n={n} t={t} level={level}: {} > {:.3}", rep.count, rep.bound.unwrap()));
                }
            }
        }
    }
    let mut flips = Vec::new();
    for n in [2u32, 3] {
        for r in [1.0, 2.0] {
            let claimed = (2.0 * n as f64).ln() / r;
            for i in 0..21 {
                let t = claimed * (0.5 + i as f64 / 20.0);
                let rep = weak_norm_counting(n, t, r).unwrap();
                if rep.finite != (t > claimed) {
                    flips.push(format!("n={n} r={r} t={t:.4}"));
                }
            }
        }
    }
    vec![
        part("enumeration equals closed-form ball counts", exact, format!("{checked} cases")),
        part(
            "level-set bound (2n)^(|log a|/t)",
            violations.is_empty(),
            format!("{} of {tested} points violate it, e.g. {}", violations.len(), violations.first().cloned().unwrap_or_default()),
        ),
        part(
            "flag flips at log(2n)/r",
            flips.is_empty(),
            format!("{} of 84 scan points disagree (flip is at log(2n-1)/r), e.g. {}", flips.len(), flips.first().cloned().unwrap_or_default()),
        ),
    ]
}

fn criterion_9() -> Vec<Part> {
    let at_e = [0.0, 0.5, 1.0, 3.0, 25.0].iter().all(|&l| spherical_phi(l, 0.0).unwrap() == Complex64::new(1.0, 0.0));
    let eig = [0.5, 1.0, 2.0].iter().map(|&l| eigen_check(l, 0.5, 4.5, 0.05).unwrap().relative_residual).fold(0.0, f64::max);
    let lambdas = [0.0, 0.4, 1.0, 2.0, 3.5];
    let mult = [(1.0, 0.8), (0.6, 0.5)]
        .iter()
        .map(|&(a, b)| multiplicativity_check(a, b, &lambdas, 201, ConvolutionOptions::default()).unwrap().max_relative_error)
        .fold(0.0, f64::max);
    let fit = [0.3, 1.0, 2.5].iter().map(|&l| asymptotic_fit(l).unwrap().residual).fold(0.0, f64::max);
    let density = plancherel_density(30.0, 301).unwrap();
    let inv = inversion_check(1.5, 1.0, &density, 201).unwrap();
    vec![
        part("phi_lambda(e) = 1 exactly", at_e, ""),
        part("eigen-relation residual <= 1e-4", eig <= 1e-4, format!("{eig:.3e}")),
        part("H(f*g) = H(f)H(g) to 1e-3", mult <= 1e-3, format!("{mult:.3e}")),
        part("asymptotic fit residual <= 1e-3 at r >= 8", fit <= 1e-3, format!("{fit:.3e}")),
        part("inversion at the origin within 5%", inv.relative_error <= 0.05, format!("{:.3e}", inv.relative_error)),
    ]
}

fn random_element<R: Rng>(rng: &mut R, dims: &[usize], weights: &[f64]) -> TracedElement {
    TracedElement::new(dims.iter().map(|&d| random::ginibre(rng, d)).collect(), weights.to_vec()).unwrap()
}

fn criterion_10() -> Vec<Part> {
    let mut rng = random::rng(10);
    let tol = 1e-10;
    let (mut tri, mut hol, mut uni, mut weak) = (0, 0, 0, 0);
    for _ in 0..100 {
        let blocks = rng.random_range(1..=3);
        let dims: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=5)).collect();
        let weights: Vec<f64> = (0..blocks).map(|_| rng.random_range(0.2..3.0)).collect();
        let x = random_element(&mut rng, &dims, &weights);
        let y = random_element(&mut rng, &dims, &weights);
        let u = TracedElement::new(dims.iter().map(|&d| random::unitary(&mut rng, d)).collect(), weights.clone()).unwrap();
        let v = TracedElement::new(dims.iter().map(|&d| random::unitary(&mut rng, d)).collect(), weights.clone()).unwrap();
        let p = rng.random_range(1.0..6.0);
        let q = p / (p - 1.0);
        let n = |z: &TracedElement, p: f64| z.lp_norm(p).unwrap();
        tri += usize::from(n(&x.add(&y).unwrap(), p) > (n(&x, p) + n(&y, p)) * (1.0 + tol));
        hol += usize::from(n(&x.mul(&y).unwrap(), 1.0) > n(&x, p) * n(&y, q) * (1.0 + tol));
        uni += usize::from((n(&x.sandwich(&u, &v).unwrap(), p) - n(&x, p)).abs() > tol * n(&x, p));
        weak += usize::from(x.weak_lp_norm(p).unwrap() > n(&x, p) * (1.0 + tol));
    }
    vec![
        part("triangle inequality", tri == 0, format!("{tri} of 100 fail")),
        part("Hoelder inequality", hol == 0, format!("{hol} of 100 fail")),
        part("unitary invariance", uni == 0, format!("{uni} of 100 fail")),
        part("weak norm <= strong norm", weak == 0, format!("{weak} of 100 fail")),
    ]
}

/// A small report computed from nothing but its config.
fn report_from(config: &BTreeMap<String, String>) -> String {
    let get = |k: &str| config[k].parse::<f64>().unwrap();
    let mut rng = random::rng(get("seed") as u64);
    let dims = vec![get("dim") as usize; 2];
    let x = random_element(&mut rng, &dims, &[1.0, 0.5]);
    let f = FiniteGroupFunction::random(FiniteGroup::S3, &mut rng);
    let k = HFunction::gaussian(get("sigma"), 4.0, 32).unwrap();
    let h = h_plancherel(&k, &LambdaGrid::new(6.0, 65).unwrap(), &FourierOptions::default()).unwrap();
    let z = zhang_ratio(&heat_symbol_on_cyclic(8, get("t")), 1.5, 3.0, &NormSearch { restarts: 4, ..NormSearch::default() }).unwrap();
    let mut r = Report::new(vec!["acceptance".into()], config.clone());
    r.add("schatten_3", x.lp_norm(3.0).unwrap(), "singular values").unwrap();
    r.add("singular_profile", x.singular_numbers(), "rearrangement").unwrap();
    r.add("plancherel_sum", finite_fourier(&f).plancherel_sum(), "irreducible blocks").unwrap();
    r.add("heisenberg", &h, "lambda quadrature").unwrap();
    r.add("zhang", &z, "norm search").unwrap();
    r.to_json().unwrap()
}

fn criterion_11() -> Vec<Part> {
    let config: BTreeMap<String, String> =
        [("seed", "1234"), ("dim", "4"), ("sigma", "0.8"), ("t", "0.7")].iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let a = report_from(&config);
    let b = report_from(&config);
    let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
    let echoed: BTreeMap<String, String> = serde_json::from_value(parsed["config"].clone()).unwrap();
    let c = report_from(&echoed);
    let other = report_from(&BTreeMap::from_iter(config.iter().map(|(k, v)| (k.clone(), if k == "seed" { "1235".into() } else { v.clone() }))));
    vec![
        part("same config gives identical bytes", a == b, format!("{} bytes", a.len())),
        part("the echoed config reproduces the report", a == c, ""),
        part("a different seed changes the report", a != other, ""),
    ]
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Vec<Part>); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in criteria {
        let start = Instant::now();
        let parts = run();
        let pass = parts.iter().all(|p| p.pass);
        let summary: Vec<String> = parts
            .iter()
            .map(|p| {
                let mark = if p.pass { "ok" } else { "FAILED" };
                if p.detail.is_empty() {
                    format!("{} [{mark}]", p.name)
                } else {
                    format!("{} [{mark}: {}]", p.name, p.detail)
                }
            })
            .collect();
        // written past the test harness capture so the lines show in plain `cargo test` output
        writeln!(
            std::io::stdout(),
            "criterion {id}: {} ({:.1} s) {}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            summary.join("; ")
        )
        .unwrap();
        for p in parts.iter().filter(|p| !p.pass) {
            if !KNOWN_FAILURES.contains(&(id, p.name.as_str())) {
                unexpected.push(format!("criterion {id}: {}", p.name));
            }
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
