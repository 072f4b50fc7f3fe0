//! Numerical checks of the auxiliary lemmas and the convolution identities.
//!
//! Exact identities are checked to a fixed residual. Asymptotic statements
//! cannot be checked that way at desk-scale `y`, so for them the error is
//! scaled by the size of the claimed error term and the report records
//! whether that scaled error stays bounded across decades of `y`, together
//! with the fitted constant.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::arith::{
    dirichlet_convolve, euler_factor, euler_factor_plus, gcd, ordered_tuple_sum, prime_logs,
    von_mangoldt,
};
use super::sieve::ArithmeticTables;
use super::sums::ComplexKahan;
use crate::config::MollifierParams;
use crate::polynomial::{binomial, factorial, falling_factorial, Polynomial};
use crate::quadrature::GaussLegendre;
use crate::scalar::KahanSum;

/// Residual threshold for identities that hold exactly in real arithmetic.
pub const EXACT_TOL: f64 = 1e-10;
/// Residual threshold for identities between nested and single integrals.
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Bound on `|sum_{p <= y} log p / p - log y|`.
pub const MERTENS_BOUND: f64 = 2.0;
/// Bound on the fitted constant in `sum_{p | j} log p / p <= C log log j`.
pub const PRIME_DIVISOR_BOUND: f64 = 2.0;
/// An asymptotic check passes when the scaled error at the largest `y` is at
/// most this multiple of the scaled error at the smallest `y`.
pub const BOUNDED_GROWTH: f64 = 1.5;

const NESTED_NODES: usize = 16;
const SINGLE_NODES: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L9,
    #[serde(rename = "conv116")]
    Conv116,
}

impl LemmaId {
    pub const ALL: [LemmaId; 8] = [
        LemmaId::L3,
        LemmaId::L4,
        LemmaId::L5,
        LemmaId::L6,
        LemmaId::L7,
        LemmaId::L8,
        LemmaId::L9,
        LemmaId::Conv116,
    ];
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LemmaId::L3 => "L3",
            LemmaId::L4 => "L4",
            LemmaId::L5 => "L5",
            LemmaId::L6 => "L6",
            LemmaId::L7 => "L7",
            LemmaId::L8 => "L8",
            LemmaId::L9 => "L9",
            LemmaId::Conv116 => "conv116",
        };
        f.write_str(s)
    }
}

impl FromStr for LemmaId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown lemma `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaParams {
    pub seed: u64,
    /// Range for random `j` (L5, L8) and largest decade (L3, L6).
    pub y: u64,
    /// `[lo, hi]` for the Mertens sup.
    pub mertens_range: (u64, u64),
    /// Range of `j` for the convolution identities.
    pub conv_limit: u64,
    /// Random `j` for L8.
    pub samples_l8: usize,
    /// Random instances for L7 and L9.
    pub samples_quad: usize,
    /// Random `j` for L5.
    pub samples_l5: usize,
}

impl Default for LemmaParams {
    fn default() -> Self {
        Self {
            seed: 0,
            y: 1_000_000,
            mertens_range: (1_000, 10_000_000),
            conv_limit: 100_000,
            samples_l8: 100,
            samples_quad: 50,
            samples_l5: 200,
        }
    }
}

impl LemmaParams {
    /// Sieve limit needed to run every lemma in `ids`.
    pub fn sieve_limit(&self, ids: &[LemmaId]) -> u64 {
        ids.iter()
            .map(|id| match id {
                LemmaId::L3 | LemmaId::L5 | LemmaId::L6 | LemmaId::L8 => self.y,
                LemmaId::L4 => self.mertens_range.1,
                LemmaId::Conv116 => self.conv_limit,
                LemmaId::L7 | LemmaId::L9 => 2,
            })
            .max()
            .unwrap_or(2)
    }
}

/// One measured quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub label: String,
    pub residual: f64,
    /// Residual divided by the size of the claimed error term, when the
    /// statement is asymptotic.
    pub scaled: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub id: LemmaId,
    pub pass: bool,
    pub max_residual: f64,
    pub threshold: f64,
    pub fitted_constant: Option<f64>,
    pub rows: Vec<LemmaRow>,
    pub note: String,
}

impl LemmaReport {
    fn exact(id: LemmaId, threshold: f64, rows: Vec<LemmaRow>, note: impl Into<String>) -> Self {
        let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        let finite = rows.iter().all(|r| r.residual.is_finite());
        Self {
            id,
            pass: finite && !rows.is_empty() && max_residual < threshold,
            max_residual,
            threshold,
            fitted_constant: None,
            rows,
            note: note.into(),
        }
    }

    fn failed(id: LemmaId, note: impl Into<String>) -> Self {
        Self {
            id,
            pass: false,
            max_residual: f64::NAN,
            threshold: f64::NAN,
            fitted_constant: None,
            rows: Vec::new(),
            note: note.into(),
        }
    }
}

/// Runs one check. Failures are reported, never raised.
pub fn verify_lemma(id: LemmaId, params: &LemmaParams, tables: &ArithmeticTables) -> LemmaReport {
    let need = params.sieve_limit(&[id]);
    if need > tables.limit() {
        return LemmaReport::failed(
            id,
            format!("needs a sieve up to {need}, tables reach {}", tables.limit()),
        );
    }
    match id {
        LemmaId::L3 => lemma3(params, tables),
        LemmaId::L4 => lemma4(params, tables),
        LemmaId::L5 => lemma5(params, tables),
        LemmaId::L6 => lemma6(params, tables),
        LemmaId::L7 => lemma7(params),
        LemmaId::L8 => lemma8(params, tables),
        LemmaId::L9 => lemma9(params),
        LemmaId::Conv116 => conv116(params, tables),
    }
}

/// Powers of ten from `10^4` up to `y`, or just `y` when it is smaller.
pub fn decades(y: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 10_000u64;
    while d <= y {
        out.push(d);
        d *= 10;
    }
    if out.is_empty() {
        out.push(y);
    }
    out
}

/// Per-decade maxima of a scaled error and the derived verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecadeTrend {
    pub ys: Vec<u64>,
    pub scaled: Vec<f64>,
    /// Largest scaled error seen: the fitted constant.
    pub fitted_constant: f64,
    /// Last decade within [`BOUNDED_GROWTH`] times the first.
    pub bounded: bool,
    /// Every decade at most the previous one.
    pub non_increasing: bool,
}

impl DecadeTrend {
    pub fn new(ys: Vec<u64>, scaled: Vec<f64>) -> Self {
        let finite = !scaled.is_empty() && scaled.iter().all(|s| s.is_finite());
        let fitted_constant = scaled.iter().copied().fold(0.0, f64::max);
        let first = scaled.first().copied().unwrap_or(f64::NAN);
        let last = scaled.last().copied().unwrap_or(f64::NAN);
        let bounded = finite && last <= BOUNDED_GROWTH * first;
        let non_increasing = finite && scaled.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        Self {
            ys,
            scaled,
            fitted_constant,
            bounded,
            non_increasing,
        }
    }
}

fn trend_report(
    id: LemmaId,
    rows: Vec<LemmaRow>,
    trend: DecadeTrend,
    note: impl Into<String>,
) -> LemmaReport {
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    LemmaReport {
        id,
        pass: trend.bounded,
        max_residual,
        threshold: BOUNDED_GROWTH,
        fitted_constant: Some(trend.fitted_constant),
        rows,
        note: note.into(),
    }
}

fn loglog(x: f64) -> f64 {
    x.ln().ln()
}

/// `S = sum_{n <= y/j, (n,j)=1} mu(n) n^-(1+alpha) P(log(y/nj) / log y)`.
pub fn lemma3_sum(
    p: &Polynomial<f64>,
    j: u64,
    y: u64,
    alpha: Complex64,
    tables: &ArithmeticTables,
) -> Complex64 {
    let log_y = (y as f64).ln();
    let s = 1.0 + alpha;
    (1..=y / j)
        .filter(|&n| tables.mobius(n) != 0 && gcd(n, j) == 1)
        .map(|n| {
            let ln = (n as f64).ln();
            let x = ((y as f64).ln() - ln - (j as f64).ln()) / log_y;
            tables.mobius(n) as f64 * (-s * ln).exp() * p.eval(x)
        })
        .collect::<ComplexKahan>()
        .value()
}

/// `(alpha P(v) + P'(v) / log y) / F(j, 1 + alpha)` with `v = log(y/j) / log y`.
pub fn lemma3_main(
    p: &Polynomial<f64>,
    j: u64,
    y: u64,
    alpha: Complex64,
    tables: &ArithmeticTables,
) -> Complex64 {
    let log_y = (y as f64).ln();
    let v = (log_y - (j as f64).ln()) / log_y;
    let f = euler_factor(&tables.prime_divisors(j), 1.0 + alpha);
    (alpha * p.eval(v) + p.derivative().eval(v) / log_y) / f
}

fn lemma3(params: &LemmaParams, tables: &ArithmeticTables) -> LemmaReport {
    let p = MollifierParams::theorem1().build::<f64>().p1;
    let js: Vec<u64> = (1..=30).filter(|&j| tables.is_squarefree(j)).collect();
    let ys = decades(params.y);
    let mut rows = Vec::new();
    let mut scaled = Vec::new();
    for &y in &ys {
        let log_y = (y as f64).ln();
        let delta = 1.0 / loglog(y as f64);
        let mut worst: f64 = 0.0;
        for alpha in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.5) / log_y] {
            for &j in &js {
                let r = (lemma3_sum(&p, j, y, alpha, tables) - lemma3_main(&p, j, y, alpha, tables)).norm();
                let f1 = euler_factor_plus(&tables.prime_divisors(j), 1.0 - 2.0 * delta);
                let s = r * log_y * log_y / (loglog(y as f64).powi(2) * f1);
                worst = worst.max(s);
                rows.push(LemmaRow {
                    label: format!("y={y} j={j} alpha={alpha}"),
                    residual: r,
                    scaled: Some(s),
                });
            }
        }
        scaled.push(worst);
    }
    let trend = DecadeTrend::new(ys, scaled);
    trend_report(
        LemmaId::L3,
        rows,
        trend,
        "error scaled by (loglog y)^2 F_1(j, 1-2delta) / log^2 y",
    )
}

fn lemma4(params: &LemmaParams, tables: &ArithmeticTables) -> LemmaReport {
    let (lo, hi) = params.mertens_range;
    let primes = tables.primes();
    let mut sum = KahanSum::new();
    let mut worst: f64 = 0.0;
    let mut worst_at = lo;
    let mut check = |s: f64, y: f64, at: u64| {
        let d = (s - y.ln()).abs();
        if d > worst {
            worst = d;
            worst_at = at;
        }
    };
    let mut idx = 0;
    while idx < primes.len() && (primes[idx] as u64) <= lo {
        let p = primes[idx] as f64;
        sum.add(p.ln() / p);
        idx += 1;
    }
    check(sum.value(), lo as f64, lo);
    while idx < primes.len() && (primes[idx] as u64) <= hi {
        let p = primes[idx] as u64;
        // just below p the sum still excludes p
        check(sum.value(), p as f64 - 1e-9, p - 1);
        sum.add((p as f64).ln() / p as f64);
        check(sum.value(), p as f64, p);
        idx += 1;
    }
    check(sum.value(), hi as f64, hi);
    let rows = vec![LemmaRow {
        label: format!("sup over [{lo}, {hi}] attained near y={worst_at}"),
        residual: worst,
        scaled: None,
    }];
    let mut report = LemmaReport::exact(
        LemmaId::L4,
        MERTENS_BOUND,
        rows,
        "max |sum_{p<=y} log p/p - log y|",
    );
    report.pass = worst <= MERTENS_BOUND;
    report.fitted_constant = Some(worst);
    report
}

fn lemma5(params: &LemmaParams, tables: &ArithmeticTables) -> LemmaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let lo = 16u64.min(params.y);
    let mut js: Vec<u64> = Vec::new();
    // primorials are the extremal case
    let mut prim = 1u64;
    for &p in tables.primes() {
        prim *= p as u64;
        if prim > params.y {
            break;
        }
        if prim >= lo {
            js.push(prim);
        }
    }
    while js.len() < params.samples_l5 + 8 && params.y > lo {
        let j = rng.gen_range(lo..=params.y);
        if tables.is_squarefree(j) {
            js.push(j);
        }
    }
    let mut rows = Vec::new();
    let mut fitted: f64 = 0.0;
    for j in js {
        let s: f64 = tables
            .prime_divisors(j)
            .iter()
            .map(|&p| (p as f64).ln() / p as f64)
            .sum();
        let c = s / loglog(j as f64);
        fitted = fitted.max(c);
        rows.push(LemmaRow {
            label: format!("j={j} sum={s:.6}"),
            residual: c,
            scaled: None,
        });
    }
    LemmaReport {
        id: LemmaId::L5,
        pass: !rows.is_empty() && fitted <= PRIME_DIVISOR_BOUND,
        max_residual: fitted,
        threshold: PRIME_DIVISOR_BOUND,
        fitted_constant: Some(fitted),
        rows,
        note: "fitted C in sum_{p|j} log p/p <= C loglog j over random squarefree j >= 16 and primorials".into(),
    }
}

/// `J(x) = sum_{n <= x, (n,N)=1} mu^2(n)/n prod_{p|n} (1 + 1/p)`.
fn lemma6_sum(x: u64, n_mod: u64, tables: &ArithmeticTables) -> f64 {
    let mut acc = KahanSum::new();
    for n in 1..=x {
        if !tables.is_squarefree(n) || gcd(n, n_mod) != 1 {
            continue;
        }
        let prod: f64 = tables
            .prime_divisors(n)
            .iter()
            .map(|&p| 1.0 + 1.0 / p as f64)
            .product();
        acc.add(prod / n as f64);
    }
    acc.value()
}

/// `prod_{p|N} (1 - 1/p) prod_{(p,N)=1} (1 - 1/p^2)(1 + f(p)/(p+1))` with
/// `f(p) = 1/p`; the tail beyond the sieve is below `1/limit`.
fn lemma6_constant(n_mod: u64, tables: &ArithmeticTables) -> f64 {
    let mut log_prod = KahanSum::new();
    for &p in tables.primes() {
        let p = p as f64;
        if n_mod % (p as u64) == 0 {
            log_prod.add((1.0 - 1.0 / p).ln());
        } else {
            log_prod.add((1.0 - 1.0 / (p * p)).ln() + (1.0 + 1.0 / (p * (p + 1.0))).ln());
        }
    }
    log_prod.value().exp()
}

fn lemma6(params: &LemmaParams, tables: &ArithmeticTables) -> LemmaReport {
    let ys = decades(params.y);
    let moduli = [1u64, 2, 6, 30, 210];
    let constants: Vec<f64> = moduli.iter().map(|&n| lemma6_constant(n, tables)).collect();
    let mut rows = Vec::new();
    let mut scaled = Vec::new();
    for &x in &ys {
        let mut worst: f64 = 0.0;
        for (&n_mod, &c) in moduli.iter().zip(&constants) {
            let r = (lemma6_sum(x, n_mod, tables) - c * (x as f64).ln()).abs();
            let s = r / loglog(n_mod as f64 + 1.0).max(1.0);
            worst = worst.max(s);
            rows.push(LemmaRow {
                label: format!("x={x} N={n_mod}"),
                residual: r,
                scaled: Some(s),
            });
        }
        scaled.push(worst);
    }
    let trend = DecadeTrend::new(ys, scaled);
    trend_report(
        LemmaId::L6,
        rows,
        trend,
        "f(p)=1/p; error scaled by max(1, loglog(N+1))",
    )
}

/// A random real polynomial of degree at most 3 with coefficients in `[-1, 1]`.
fn random_poly(rng: &mut ChaCha8Rng) -> Polynomial<f64> {
    let deg = rng.gen_range(0..=3);
    Polynomial::new((0..=deg).map(|_| rng.gen_range(-1.0..=1.0)).collect())
}

/// Nested integral over `0 <= u_1 + ... + u_n <= span` in log coordinates,
/// with level weight `weight(level, u)` and innermost integrand `g(sum)`.
fn nested(
    levels: usize,
    span: f64,
    s: f64,
    weight: &dyn Fn(usize, f64) -> Complex64,
    g: &dyn Fn(f64) -> Complex64,
    rule: &GaussLegendre,
    level: usize,
) -> Complex64 {
    let room = span - s;
    if room <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    rule.mapped(0.0, room)
        .map(|(u, w)| {
            let inner = if level + 1 == levels {
                g(s + u)
            } else {
                nested(levels, span, s + u, weight, g, rule, level + 1)
            };
            w * weight(level, u) * inner
        })
        .collect::<ComplexKahan>()
        .value()
}

/// Both sides of the `m`-fold iterated integral identity with weights
/// `x^-(1+alpha)` on `[1, D]`.
pub fn lemma7_sides(m: usize, d: f64, alpha: Complex64, f: &Polynomial<f64>) -> (Complex64, Complex64) {
    let span = d.ln();
    let rule = GaussLegendre::cached(NESTED_NODES);
    let weight = |_: usize, u: f64| (-alpha * u).exp();
    let g = |s: f64| Complex64::new(f.eval(s.exp()), 0.0);
    let lhs = nested(m, span, 0.0, &weight, &g, &rule, 0);
    let single = GaussLegendre::cached(SINGLE_NODES);
    let fact = factorial(m as u64 - 1) as f64;
    let rhs = single
        .mapped(0.0, span)
        .map(|(u, w)| w * f.eval(u.exp()) * u.powi(m as i32 - 1) / fact * (-alpha * u).exp())
        .collect::<ComplexKahan>()
        .value();
    (lhs, rhs)
}

fn lemma7(params: &LemmaParams) -> LemmaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let rows = (0..params.samples_quad)
        .map(|_| {
            let m = rng.gen_range(1..=4);
            let d = rng.gen_range(1.0..=10.0);
            let r = rng.gen_range(0.0..=0.1);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let alpha = Complex64::from_polar(r, phi);
            let f = random_poly(&mut rng);
            let (lhs, rhs) = lemma7_sides(m, d, alpha, &f);
            LemmaRow {
                label: format!("m={m} D={d:.4} alpha={alpha:.4}"),
                residual: (lhs - rhs).norm() / rhs.norm().max(1.0),
                scaled: None,
            }
        })
        .collect();
    LemmaReport::exact(
        LemmaId::L7,
        QUADRATURE_TOL,
        rows,
        "nested vs single quadrature, residual relative to max(1, |rhs|)",
    )
}

/// Both sides of the identity with `k1` levels weighted by `log x / x` and
/// `k2` levels weighted by `1 / x`.
pub fn lemma9_sides(k1: usize, k2: usize, d: f64, f: &Polynomial<f64>) -> (f64, f64) {
    let span = d.ln();
    let rule = GaussLegendre::cached(NESTED_NODES);
    let weight = |level: usize, u: f64| Complex64::new(if level < k1 { u } else { 1.0 }, 0.0);
    let g = |s: f64| Complex64::new(f.eval(s.exp()), 0.0);
    let lhs = nested(k1 + k2, span, 0.0, &weight, &g, &rule, 0).re;
    let power = 2 * k1 + k2 - 1;
    let fact = factorial(power as u64) as f64;
    let single = GaussLegendre::cached(SINGLE_NODES);
    let rhs = single.integrate(0.0, span, |u| f.eval(u.exp()) * u.powi(power as i32) / fact);
    (lhs, rhs)
}

fn lemma9(params: &LemmaParams) -> LemmaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let rows = (0..params.samples_quad)
        .map(|_| {
            let k1 = rng.gen_range(0..=2);
            let k2 = rng.gen_range(1..=3);
            let d = rng.gen_range(1.0..=10.0);
            let f = random_poly(&mut rng);
            let (lhs, rhs) = lemma9_sides(k1, k2, d, &f);
            LemmaRow {
                label: format!("k1={k1} k2={k2} D={d:.4}"),
                residual: (lhs - rhs).abs() / rhs.abs().max(1.0),
                scaled: None,
            }
        })
        .collect();
    LemmaReport::exact(
        LemmaId::L9,
        QUADRATURE_TOL,
        rows,
        "nested vs single quadrature, residual relative to max(1, |rhs|)",
    )
}

/// How prime tuples in the divisor sums are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleConvention {
    /// Ordered tuples of pairwise distinct primes.
    Ordered,
    /// Sets of distinct primes.
    Unordered,
}

/// `sum` over ordered distinct `r`-tuples of `prod_{i<k} log^2 p_i prod_{i>=k} log p_i`.
fn squared_tuple_sum(logs: &[f64], k: usize, r: usize) -> f64 {
    fn rec(logs: &[f64], used: &mut Vec<bool>, k: usize, r: usize, depth: usize, acc: f64) -> f64 {
        if depth == r {
            return acc;
        }
        let mut total = 0.0;
        for i in 0..logs.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let w = if depth < k { logs[i] * logs[i] } else { logs[i] };
            total += rec(logs, used, k, r, depth + 1, acc * w);
            used[i] = false;
        }
        total
    }
    if r > logs.len() {
        return 0.0;
    }
    rec(logs, &mut vec![false; logs.len()], k, r, 0, 1.0)
}

/// Both sides of the product identity for prime-tuple sums over `j`.
pub fn lemma8_sides(logs: &[f64], m1: usize, m2: usize, convention: TupleConvention) -> (f64, f64) {
    let (s1, s2) = match convention {
        TupleConvention::Ordered => (ordered_tuple_sum(logs, m1), ordered_tuple_sum(logs, m2)),
        TupleConvention::Unordered => (
            super::arith::unordered_tuple_sum(logs, m1),
            super::arith::unordered_tuple_sum(logs, m2),
        ),
    };
    let mut rhs = KahanSum::new();
    for k in 0..=m1.min(m2) {
        let r = m1 + m2 - k;
        let mut t = squared_tuple_sum(logs, k, r);
        if convention == TupleConvention::Unordered {
            t /= (factorial(k as u64) * factorial((r - k) as u64)) as f64;
        }
        let c = (falling_factorial(m1 as u64, k as u64) * binomial(m2 as u64, k as u64)) as f64;
        rhs.add(c * t);
    }
    (s1 * s2, rhs.value())
}

fn lemma8(params: &LemmaParams, tables: &ArithmeticTables) -> LemmaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut rows = Vec::new();
    while rows.len() < params.samples_l8 {
        let j = rng.gen_range(1..=params.y);
        if !tables.is_squarefree(j) {
            continue;
        }
        let m1 = rng.gen_range(1..=3);
        let m2 = rng.gen_range(1..=3);
        let logs = prime_logs(tables, j);
        let (lhs, rhs) = lemma8_sides(&logs, m1, m2, TupleConvention::Ordered);
        rows.push(LemmaRow {
            label: format!("j={j} m1={m1} m2={m2}"),
            residual: (lhs - rhs).abs() / rhs.abs().max(1.0),
            scaled: None,
        });
    }
    LemmaReport::exact(
        LemmaId::L8,
        EXACT_TOL,
        rows,
        "ordered tuples of distinct primes; residual relative to max(1, |rhs|)",
    )
}

fn conv116(params: &LemmaParams, tables: &ArithmeticTables) -> LemmaReport {
    let n = params.conv_limit;
    let mu: Vec<f64> = (0..=n)
        .map(|k| if k == 0 { 0.0 } else { tables.mobius(k) as f64 })
        .collect();
    let lam = von_mangoldt(tables, n);
    let mut conv = dirichlet_convolve(&mu, &lam);
    let mut worst = [0.0f64; 3];
    let mut at = [0u64; 3];
    for order in 1..=3 {
        for j in 1..=n {
            let m = tables.mobius(j);
            if m == 0 {
                continue;
            }
            let logs = prime_logs(tables, j);
            let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
            let rhs = sign * m as f64 * ordered_tuple_sum(&logs, order);
            let r = (conv[j as usize] - rhs).abs() / rhs.abs().max(1.0);
            if r > worst[order - 1] {
                worst[order - 1] = r;
                at[order - 1] = j;
            }
        }
        if order < 3 {
            conv = dirichlet_convolve(&conv, &lam);
        }
    }
    let rows = (0..3)
        .map(|k| LemmaRow {
            label: format!(
                "mu{} over squarefree j <= {n}, worst at j={}",
                "*Lambda".repeat(k + 1),
                at[k]
            ),
            residual: worst[k],
            scaled: None,
        })
        .collect();
    LemmaReport::exact(
        LemmaId::Conv116,
        EXACT_TOL,
        rows,
        "direct divisor-sum convolutions; residual relative to max(1, |rhs|)",
    )
}
