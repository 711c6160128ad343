//! Free groups `F_n`: reduced words, balls, the heat symbols
//! `m_t(g) = e^{-t|g|}` with their distribution functions and weak norms,
//! truncated left convolution operators and the lift of symbols on `ℝ^d` to
//! words.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nclp::TracedElement;

/// Default cap on enumerated words.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Reduced word as syllables `g_i^k` (generator index from 1, `k ≠ 0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct ReducedWord {
    syllables: Vec<(u32, i64)>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord::default()
    }

    pub fn generator(i: u32) -> Self {
        ReducedWord { syllables: vec![(i, 1)] }
    }

    /// Freely reduces an arbitrary syllable sequence.
    pub fn from_syllables(syllables: &[(u32, i64)]) -> Result<Self> {
        let mut w = ReducedWord::identity();
        for &(g, k) in syllables {
            if g == 0 {
                return Err(Error::invalid("generator indices start at 1"));
            }
            if k != 0 {
                w = word_mul(&w, &ReducedWord { syllables: vec![(g, k)] });
            }
        }
        Ok(w)
    }

    pub fn syllables(&self) -> &[(u32, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// `|g| = Σ |k|`.
    pub fn len(&self) -> u64 {
        self.syllables.iter().map(|s| s.1.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn inverse(&self) -> Self {
        ReducedWord { syllables: self.syllables.iter().rev().map(|&(g, k)| (g, -k)).collect() }
    }

    pub fn exponents(&self) -> Vec<i64> {
        self.syllables.iter().map(|s| s.1).collect()
    }

    pub fn max_generator(&self) -> u32 {
        self.syllables.iter().map(|s| s.0).max().unwrap_or(0)
    }

    pub fn random<R: Rng>(rng: &mut R, n: u32, max_len: usize) -> Self {
        let len = rng.random_range(0..=max_len);
        let letters: Vec<(u32, i64)> = (0..len)
            .map(|_| (rng.random_range(1..=n), if rng.random::<bool>() { 1 } else { -1 }))
            .collect();
        Self::from_syllables(&letters).expect("generators start at 1")
    }

    fn push_letter(&mut self, g: u32, e: i64) {
        match self.syllables.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += e;
                if last.1 == 0 {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push((g, e)),
        }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.syllables.iter().map(|(g, k)| format!("{g}^{k}")).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for ReducedWord {
    type Err = Error;

    /// Parses `"1^2.3^-1"`; `"e"` or `""` is the identity, `"2"` means `g_2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(ReducedWord::identity());
        }
        let mut syl = Vec::new();
        for part in s.split('.') {
            let (g, k) = match part.split_once('^') {
                Some((g, k)) => (g, k),
                None => (part, "1"),
            };
            let g: u32 = g.trim().parse().map_err(|_| Error::invalid(format!("bad generator in '{part}'")))?;
            let k: i64 = k.trim().parse().map_err(|_| Error::invalid(format!("bad exponent in '{part}'")))?;
            syl.push((g, k));
        }
        ReducedWord::from_syllables(&syl)
    }
}

/// Concatenation followed by free cancellation.
pub fn word_mul(x: &ReducedWord, y: &ReducedWord) -> ReducedWord {
    let mut out = x.clone();
    let mut rest = y.syllables.iter();
    for &(g, k) in rest.by_ref() {
        match out.syllables.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += k;
                if last.1 == 0 {
                    out.syllables.pop();
                    continue;
                }
                break;
            }
            _ => {
                out.syllables.push((g, k));
                break;
            }
        }
    }
    out.syllables.extend(rest.copied());
    out
}

/// `|{g : |g| ≤ L}|` in `F_n`; `None` on overflow.
pub fn ball_count(n: u32, radius: u32) -> Option<u128> {
    if n == 0 {
        return Some(1);
    }
    let q = 2 * n as u128 - 1;
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * n as u128;
    for k in 1..=radius {
        if k > 1 {
            sphere = sphere.checked_mul(q)?;
        }
        total = total.checked_add(sphere)?;
    }
    Some(total)
}

/// `|{g : |g| = k}| = 2n(2n-1)^{k-1}`.
pub fn sphere_count(n: u32, k: u32) -> Option<u128> {
    if k == 0 {
        return Some(1);
    }
    (2 * n as u128).checked_mul((2 * n as u128 - 1).checked_pow(k - 1)?)
}

/// All reduced words of length at most `radius`, shortest first.
pub fn ball_enumerate(n: u32, radius: u32, cap: u64) -> Result<Vec<ReducedWord>> {
    if n == 0 {
        return Err(Error::invalid("need at least one generator"));
    }
    let count = ball_count(n, radius);
    if count.is_none_or(|c| c > cap as u128) {
        return Err(Error::refused(format!(
            "ball of radius {radius} in F_{n} has {} words, above the cap {cap}",
            count.map_or("more than 2^128".to_string(), |c| c.to_string())
        )));
    }
    let letters: Vec<(u32, i64)> = (1..=n).flat_map(|g| [(g, 1), (g, -1)]).collect();
    let mut by_length: Vec<Vec<ReducedWord>> = vec![vec![ReducedWord::identity()]];
    for _ in 0..radius {
        let prev = by_length.last().unwrap();
        let next: Vec<ReducedWord> = prev
            .par_iter()
            .flat_map_iter(|w| {
                let last = w.syllables.last().copied();
                letters.iter().filter_map(move |&(g, e)| {
                    // skip the letter that would cancel
                    if let Some((lg, lk)) = last {
                        if lg == g && lk.signum() == -e {
                            return None;
                        }
                    }
                    let mut x = w.clone();
                    x.push_letter(g, e);
                    Some(x)
                })
            })
            .collect();
        by_length.push(next);
    }
    Ok(by_length.into_iter().flatten().collect())
}

/// `m_t(g) = e^{-t|g|}`.
pub fn heat_symbol(t: f64, g: &ReducedWord) -> f64 {
    (-t * g.len() as f64).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct DistributionReport {
    pub alpha: f64,
    /// `|{g : |m(g)| > α}|`, or a lower bound when not exact.
    pub count: u128,
    pub exact: bool,
    /// Enumeration depth used.
    pub depth: u32,
    /// `(2n)^{|log α|/t}` for heat symbols.
    pub bound: Option<f64>,
    /// `n/(n-1) (2n-1)^{|log α|/t}` (`2|log α|/t + 1` for `n = 1`).
    pub certified_bound: Option<f64>,
}

impl DistributionReport {
    /// Whether `count ≤ (2n)^{|log α|/t}`; this fails just above integer
    /// levels, where the count is `2n + 1 > 2n` at level 1.
    pub fn bound_holds(&self) -> Option<bool> {
        self.bound.map(|b| self.count as f64 <= b * (1.0 + 1e-12))
    }
}

/// Upper bound for `|{g : |g| < level}|` valid for every level.
pub fn certified_level_bound(n: u32, level: f64) -> f64 {
    if level <= 0.0 {
        0.0
    } else if n == 1 {
        2.0 * level + 1.0
    } else {
        n as f64 / (n as f64 - 1.0) * (2.0 * n as f64 - 1.0).powf(level)
    }
}

/// `λ_{m_t}(α)` in `F_n`, by enumeration of the level set `|g| < |log α|/t`.
pub fn distribution_heat(n: u32, t: f64, alpha: f64, cap: u64) -> Result<DistributionReport> {
    if !(t > 0.0) || !(alpha > 0.0) {
        return Err(Error::invalid("need t > 0 and α > 0"));
    }
    if alpha >= 1.0 {
        return Ok(DistributionReport { alpha, count: 0, exact: true, depth: 0, bound: Some(1.0), certified_bound: Some(0.0) });
    }
    let level = -alpha.ln() / t;
    let bound = (2.0 * n as f64).powf(level);
    let certified = certified_level_bound(n, level);
    // largest integer strictly below the level
    let mut depth = level.ceil() as u32;
    depth = depth.saturating_sub(1);
    if heat_symbol(t, &ReducedWord { syllables: vec![(1, depth as i64 + 1)] }) > alpha {
        depth += 1;
    }
    let words = ball_enumerate(n, depth, cap).map_err(|e| match e {
        Error::Refused(msg) => Error::refused(format!("{msg}; the count is at most {certified:.6e} (claimed bound (2n)^(|log α|/t) = {bound:.6e})")),
        other => other,
    })?;
    let count = words.iter().filter(|g| heat_symbol(t, g) > alpha).count() as u128;
    Ok(DistributionReport { alpha, count, exact: true, depth, bound: Some(bound), certified_bound: Some(certified) })
}

/// `|{g : |g| ≤ depth, |m(g)| > α}|`, a lower bound for `λ_m(α)`.
pub fn distribution(m: impl Fn(&ReducedWord) -> f64 + Sync, alpha: f64, n: u32, depth: u32, cap: u64) -> Result<DistributionReport> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("need α > 0"));
    }
    let words = ball_enumerate(n, depth, cap)?;
    let count = words.par_iter().filter(|g| m(g).abs() > alpha).count() as u128;
    Ok(DistributionReport { alpha, count, exact: false, depth, bound: None, certified_bound: None })
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakNormReport {
    pub n: u32,
    pub t: f64,
    #[serde(serialize_with = "crate::report::nonfinite")]
    pub r: f64,
    /// `sup_k e^{-tk} B_k^{1/r}`, infinite when divergent.
    #[serde(serialize_with = "crate::report::nonfinite")]
    pub sup: f64,
    pub argmax_level: u64,
    pub finite: bool,
    /// `e^{-t} (2n-1)^{1/r}`, the asymptotic term ratio.
    pub term_ratio: f64,
    /// `log(2n-1)/r`: below it the terms grow geometrically.
    pub threshold_exact: f64,
    /// `log(2n)/r`.
    pub threshold_claimed: f64,
    pub claimed_finite: bool,
}

/// `log B_k` for the ball of radius `k` in `F_n`, stable for large `k`.
fn log_ball(n: u32, k: u64) -> f64 {
    if n == 1 {
        return (2.0 * k as f64 + 1.0).ln();
    }
    let q = (2 * n - 1) as f64;
    let nf = n as f64;
    // B_k = (n q^k - 1)/(n - 1)
    k as f64 * q.ln() + ((nf - q.powf(-(k as f64))) / (nf - 1.0)).ln()
}

/// `‖m_t‖_{L^{r,∞}} = sup_{α>0} α λ_{m_t}(α)^{1/r} = sup_k e^{-tk} B_k^{1/r}`.
pub fn weak_norm_counting(n: u32, t: f64, r: f64) -> Result<WeakNormReport> {
    if n == 0 || !(t > 0.0) || !(r > 0.0) {
        return Err(Error::invalid("need n ≥ 1, t > 0, r > 0"));
    }
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    let q = (2 * n - 1) as f64;
    let log_ratio = -t + inv_r * q.ln();
    let term_ratio = log_ratio.exp();
    let threshold_exact = q.ln() * inv_r;
    let threshold_claimed = (2.0 * n as f64).ln() * inv_r;
    let log_term = |k: u64| -t * k as f64 + inv_r * log_ball(n, k);
    // terms are bounded by (n/(n-1))^{1/r} ρ^k (polynomial factor for n = 1)
    let log_envelope = |k: u64| {
        if n == 1 {
            -t * k as f64 + inv_r * (2.0 * k as f64 + 1.0).ln()
        } else {
            inv_r * (n as f64 / (n as f64 - 1.0)).ln() + log_ratio * k as f64
        }
    };
    let mut best = log_term(0);
    let mut argmax = 0;
    let finite = log_ratio <= 0.0 || n == 1;
    if finite {
        let mut k = 1u64;
        while k < 10_000_000 {
            let v = log_term(k);
            if v > best {
                best = v;
                argmax = k;
            }
            if log_envelope(k) <= best && (n > 1 || (k as f64) > 1.0 / t) {
                break;
            }
            k += 1;
        }
        if log_ratio == 0.0 && n > 1 {
            // terms increase to (n/(n-1))^{1/r} without attaining it
            best = inv_r * (n as f64 / (n as f64 - 1.0)).ln();
            argmax = u64::MAX;
        }
    }
    Ok(WeakNormReport {
        n,
        t,
        r,
        sup: if finite { best.exp() } else { f64::INFINITY },
        argmax_level: argmax,
        finite,
        term_ratio,
        threshold_exact,
        threshold_claimed,
        claimed_finite: t >= threshold_claimed,
    })
}

/// Finitely supported function on the ball of radius `radius` in `F_n`.
#[derive(Debug, Clone)]
pub struct BallFunction {
    pub n: u32,
    pub radius: u32,
    words: Vec<ReducedWord>,
    index: HashMap<ReducedWord, usize>,
    pub coeffs: Vec<Complex64>,
}

impl BallFunction {
    pub fn zeros(n: u32, radius: u32, cap: u64) -> Result<Self> {
        let words = ball_enumerate(n, radius, cap)?;
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let coeffs = vec![Complex64::default(); words.len()];
        Ok(BallFunction { n, radius, words, index, coeffs })
    }

    pub fn from_fn(n: u32, radius: u32, cap: u64, f: impl Fn(&ReducedWord) -> Complex64) -> Result<Self> {
        let mut b = Self::zeros(n, radius, cap)?;
        b.coeffs = b.words.iter().map(f).collect();
        Ok(b)
    }

    pub fn delta(n: u32, radius: u32, g: &ReducedWord) -> Result<Self> {
        if g.len() > radius as u64 || g.max_generator() > n {
            return Err(Error::invalid(format!("{g} is not in the ball of radius {radius} of F_{n}")));
        }
        Self::from_fn(n, radius, DEFAULT_CAP, |w| Complex64::new(if w == g { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn words(&self) -> &[ReducedWord] {
        &self.words
    }

    pub fn get(&self, g: &ReducedWord) -> Complex64 {
        self.index.get(g).map_or(Complex64::default(), |&i| self.coeffs[i])
    }

    /// `Σ |f(g)|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest length carrying a nonzero coefficient.
    pub fn support_radius(&self) -> u32 {
        self.words
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(w, _)| w.len() as u32)
            .max()
            .unwrap_or(0)
    }
}

/// `(mf)(g) = m(g) f(g)` on the ball.
pub fn truncated_multiplier(m: impl Fn(&ReducedWord) -> f64, f: &BallFunction) -> BallFunction {
    let mut out = f.clone();
    for (c, w) in out.coeffs.iter_mut().zip(&f.words) {
        *c *= m(w);
    }
    out
}

/// Left convolution by `f` compressed to `span{δ_h : |h| ≤ L}`, with the
/// normalized trace `Tr / |ball|`. The identity is basis vector 0.
pub fn truncated_convolver(f: &BallFunction, radius: u32, cap: u64) -> Result<TracedElement> {
    if f.support_radius() > radius {
        return Err(Error::invalid("support of f must lie within the truncation radius"));
    }
    let basis = ball_enumerate(f.n, radius, cap)?;
    let index: HashMap<&ReducedWord, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let dim = basis.len();
    let support: Vec<(&ReducedWord, Complex64)> =
        f.words.iter().zip(&f.coeffs).filter(|(_, c)| c.norm() > 0.0).map(|(w, c)| (w, *c)).collect();
    let mut m = DMatrix::zeros(dim, dim);
    for (j, h) in basis.iter().enumerate() {
        for (g, c) in &support {
            if let Some(&i) = index.get(&word_mul(g, h)) {
                m[(i, j)] += *c;
            }
        }
    }
    TracedElement::single(m, 1.0 / dim as f64)
}

/// `⟨x δ_e, δ_e⟩` for an element built by [`truncated_convolver`].
pub fn vacuum_expectation(x: &TracedElement) -> Complex64 {
    x.blocks()[0][(0, 0)]
}

/// `m̃(g) = m(k₁, …, k_d)` from the exponent sequence of `g`, padded with
/// zeros when `g` has fewer than `d` syllables and cut to the first `d`
/// exponents otherwise.
pub fn hm_lift(m: impl Fn(&[f64]) -> f64, g: &ReducedWord, d: usize) -> f64 {
    let mut xi = vec![0.0; d];
    for (slot, k) in xi.iter_mut().zip(g.exponents()) {
        *slot = k as f64;
    }
    m(&xi)
}

#[derive(Debug, Clone, Serialize)]
pub struct HmReport {
    pub d: usize,
    pub max_order: usize,
    pub step: f64,
    pub extent: f64,
    /// `max_{|α|} sup_{|ξ| > h} |ξ|^{|α|} |∂^α m(ξ)|` on the grid.
    pub c_m: f64,
    /// Same on the half-extent grid.
    pub c_m_half_extent: f64,
    pub unbounded: bool,
}

fn multi_indices(d: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let used: usize = p.iter().sum();
                (0..=max_order - used).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

/// Central-difference stencil `(offset, weight)` for `d^k/dx^k`, built from
/// `k mod 2` first differences and `k / 2` second differences.
fn stencil_1d(k: usize, h: f64) -> Vec<(i64, f64)> {
    let mut s: Vec<(i64, f64)> = vec![(0, 1.0)];
    let conv = |s: &[(i64, f64)], t: &[(i64, f64)]| {
        let mut acc: HashMap<i64, f64> = HashMap::new();
        for &(a, x) in s {
            for &(b, y) in t {
                *acc.entry(a + b).or_default() += x * y;
            }
        }
        let mut v: Vec<(i64, f64)> = acc.into_iter().filter(|p| p.1 != 0.0).collect();
        v.sort_by_key(|p| p.0);
        v
    };
    for _ in 0..k / 2 {
        s = conv(&s, &[(-1, 1.0 / (h * h)), (0, -2.0 / (h * h)), (1, 1.0 / (h * h))]);
    }
    if k % 2 == 1 {
        s = conv(&s, &[(-1, -0.5 / h), (1, 0.5 / h)]);
    }
    s
}

fn hm_sup(m: &(impl Fn(&[f64]) -> f64 + Sync), d: usize, max_order: usize, h: f64, half: i64) -> f64 {
    let alphas = multi_indices(d, max_order);
    let total = (2 * half + 1).pow(d as u32) as usize;
    (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut node = vec![0i64; d];
            let mut rem = idx;
            for slot in node.iter_mut() {
                *slot = (rem % (2 * half as usize + 1)) as i64 - half;
                rem /= 2 * half as usize + 1;
            }
            let xi: Vec<f64> = node.iter().map(|&i| i as f64 * h).collect();
            let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r <= h * (1.0 + 1e-12) {
                return 0.0;
            }
            let mut best = 0.0_f64;
            for alpha in &alphas {
                let order: usize = alpha.iter().sum();
                let stencils: Vec<Vec<(i64, f64)>> = alpha.iter().map(|&k| stencil_1d(k, h)).collect();
                let mut value = 0.0;
                let mut cursor = vec![0usize; d];
                'outer: loop {
                    let mut w = 1.0;
                    let mut p = xi.clone();
                    for j in 0..d {
                        let (off, wt) = stencils[j][cursor[j]];
                        w *= wt;
                        p[j] += off as f64 * h;
                    }
                    value += w * m(&p);
                    for j in 0..d {
                        cursor[j] += 1;
                        if cursor[j] < stencils[j].len() {
                            continue 'outer;
                        }
                        cursor[j] = 0;
                    }
                    break;
                }
                best = best.max(r.powi(order as i32) * value.abs());
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Finite-difference estimate of the Hörmander-Mikhlin constant of `m` on
/// the grid `h ℤ^d ∩ [-E, E]^d`, derivatives up to order `⌊d/2⌋ + 1`.
pub fn hm_condition(m: impl Fn(&[f64]) -> f64 + Sync, d: usize, step: f64, extent: f64) -> Result<HmReport> {
    if d == 0 || !(step > 0.0) || !(extent > step) {
        return Err(Error::invalid("need d ≥ 1 and extent > step > 0"));
    }
    let max_order = d / 2 + 1;
    let half = (extent / step).round() as i64;
    if half < 4 * (max_order as i64 + 1) {
        return Err(Error::refused(format!(
            "grid too coarse: {half} steps per half-axis for derivatives of order {max_order}"
        )));
    }
    let c_m = hm_sup(&m, d, max_order, step, half);
    let c_half = hm_sup(&m, d, max_order, step, half / 2);
    Ok(HmReport {
        d,
        max_order,
        step,
        extent: half as f64 * step,
        c_m,
        c_m_half_extent: c_half,
        unbounded: c_m > 1.5 * c_half,
    })
}
