//! Brute-force finite sums and their asymptotic main terms.

use num_complex::Complex64;
use rayon::prelude::*;

use super::arith::{euler_factor, gcd, ordered_tuple_sum};
use super::mollifier::FiniteMollifier;
use super::sieve::ArithmeticTables;
use crate::config::{FirstKernelRule, MollifierConfig};
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::kernel::Kernel;
use crate::polynomial::{binomial, factorial};
use crate::quadrature::GaussLegendre;
use crate::scalar::KahanSum;

/// Default cap on `y` for the quadratic gcd double sum.
pub const DIRECT_SUM_GUARD: u64 = 500;
/// Default cap on `y` for the `O(y log y)` sums.
pub const LINEAR_SUM_GUARD: u64 = 1_000_000;

/// Nodes for the `x`-integrals inside `G_m`.
const G_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumOrder {
    Forward,
    Reverse,
}

/// Compensated sum of complex terms.
#[derive(Debug, Clone, Default)]
pub struct ComplexKahan {
    re: KahanSum<f64>,
    im: KahanSum<f64>,
}

impl ComplexKahan {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexKahan {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// `n^-s` for real `n > 0`.
fn npow(n: u64, s: Complex64) -> Complex64 {
    (-s * (n as f64).ln()).exp()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn guard(what: &'static str, y: u64, limit: u64, force: bool) -> Result<()> {
    if y > limit && !force {
        return Err(Error::CostGuard { what, y, limit });
    }
    Ok(())
}

/// `E_alpha(j) = sum_{j | h <= y} a_h / h^(1+alpha)`, summed directly.
pub fn e_alpha_brute(j: u64, alpha: Complex64, m: &FiniteMollifier) -> Result<Complex64> {
    e_alpha_brute_ordered(j, alpha, m, SumOrder::Forward)
}

/// [`e_alpha_brute`] with an explicit accumulation order.
pub fn e_alpha_brute_ordered(
    j: u64,
    alpha: Complex64,
    m: &FiniteMollifier,
    order: SumOrder,
) -> Result<Complex64> {
    if j == 0 || j > m.y {
        return Err(Error::Domain(format!("j = {j} outside 1..={}", m.y)));
    }
    let s = one() + alpha;
    let term = |k: u64| {
        let h = j * k;
        let a = m.coeff(h);
        if a == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            a * npow(h, s)
        }
    };
    let kmax = m.y / j;
    let acc: ComplexKahan = match order {
        SumOrder::Forward => (1..=kmax).map(term).collect(),
        SumOrder::Reverse => (1..=kmax).rev().map(term).collect(),
    };
    Ok(acc.value())
}

/// `sum_{h,k <= y} a_h a_k (h,k)^(1+alpha+beta) / (h^(1+alpha) k^(1+beta))`
/// by the gcd grouping `sum_j j^(1+alpha+beta) F(j, 1+alpha+beta) E_alpha(j) E_beta(j)`.
pub fn sigma_brute(
    alpha: Complex64,
    beta: Complex64,
    m: &FiniteMollifier,
    tables: &ArithmeticTables,
    force: bool,
) -> Result<Complex64> {
    guard("regrouped sigma", m.y, LINEAR_SUM_GUARD, force)?;
    let y = m.y as usize;
    let weights = |s: Complex64| -> Vec<Complex64> {
        (0..=y)
            .into_par_iter()
            .map(|h| {
                let a = m.coeffs[h];
                if h == 0 || a == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    a * npow(h as u64, s)
                }
            })
            .collect()
    };
    let ba = weights(one() + alpha);
    let bb = if beta == alpha { ba.clone() } else { weights(one() + beta) };
    let w = one() + alpha + beta;
    let terms: Vec<Complex64> = (1..=y)
        .into_par_iter()
        .map(|j| {
            if !tables.is_squarefree(j as u64) {
                return Complex64::new(0.0, 0.0);
            }
            let mut ea = ComplexKahan::default();
            let mut eb = ComplexKahan::default();
            let mut h = j;
            while h <= y {
                ea.add(ba[h]);
                eb.add(bb[h]);
                h += j;
            }
            let f = euler_factor(&tables.prime_divisors(j as u64), w);
            npow(j as u64, -w) * f * ea.value() * eb.value()
        })
        .collect();
    Ok(terms.into_iter().collect::<ComplexKahan>().value())
}

/// The same double sum evaluated term by term with explicit gcds.
pub fn sigma_direct(
    alpha: Complex64,
    beta: Complex64,
    m: &FiniteMollifier,
    force: bool,
) -> Result<Complex64> {
    guard("direct sigma", m.y, DIRECT_SUM_GUARD, force)?;
    let y = m.y;
    let w = one() + alpha + beta;
    let rows: Vec<Complex64> = (1..=y)
        .into_par_iter()
        .map(|h| {
            let ah = m.coeff(h);
            if ah == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut row = ComplexKahan::default();
            for k in 1..=y {
                let ak = m.coeff(k);
                if ak == 0.0 {
                    continue;
                }
                let g = gcd(h, k);
                row.add(ah * ak * npow(h, one() + alpha) * npow(k, one() + beta) * npow(g, -w));
            }
            row.value()
        })
        .collect();
    Ok(rows.into_iter().collect::<ComplexKahan>().value())
}

/// Mollifier lengths tied to a notional height `T`: `log T = log y / theta`
/// and `y1 = floor(T^theta1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lengths {
    pub y: u64,
    pub y1: u64,
    pub log_t: f64,
}

impl Lengths {
    pub fn from_y(y: u64, cfg: &MollifierConfig<f64>) -> Self {
        let log_t = (y as f64).ln() / cfg.theta;
        let y1 = ((cfg.theta1 * log_t).exp() * (1.0 + 1e-12)).floor() as u64;
        Self {
            y,
            y1: y1.clamp(1, y),
            log_t,
        }
    }
}

/// `int_0^L P((L - u) / log y1) u^q e^(-alpha u) du` with `L = log(y1 / j)`.
fn x_integral(
    p: &crate::polynomial::Polynomial<f64>,
    q: usize,
    span: f64,
    log_y1: f64,
    alpha: Complex64,
) -> Complex64 {
    if span <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let rule = GaussLegendre::cached(G_NODES);
    rule.mapped(0.0, span)
        .map(|(u, w)| w * p.eval((span - u) / log_y1) * u.powi(q as i32) * (-alpha * u).exp())
        .collect::<ComplexKahan>()
        .value()
}

/// `G_0(alpha, j), ..., G_I(alpha, j)` of the asymptotic formula for `E_alpha(j)`.
pub fn g_functions(
    alpha: Complex64,
    j: u64,
    y: u64,
    y1: u64,
    cfg: &MollifierConfig<f64>,
) -> Result<Vec<Complex64>> {
    let i_max = cfg.i_max;
    let log_y = (y as f64).ln();
    let log_y1 = (y1 as f64).ln();
    let lj = (j as f64).ln();
    let v = (log_y - lj) / log_y;
    let mut g = vec![Complex64::new(0.0, 0.0); i_max + 1];
    g[0] = alpha * cfg.p1.eval(v) + cfg.p1.derivative().eval(v) / log_y;
    if j > y1 || y1 < 2 {
        return Ok(g);
    }
    let w = (log_y1 - lj) / log_y1;
    let span = log_y1 - lj;
    let head = |p: &crate::polynomial::Polynomial<f64>, m: usize| {
        (alpha * p.eval(w) + p.derivative().eval(w) / log_y1) / log_y1.powi(m as i32)
    };
    for l in 2..=i_max {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign / (factorial(l as u64 - 2) as f64 * log_y1.powi(l as i32));
        g[0] += c * x_integral(cfg.p_l(l)?, l - 2, span, log_y1, alpha);
    }
    for m in 1..=i_max {
        let mut gm = Complex64::new(0.0, 0.0);
        if m >= 2 {
            gm += head(cfg.p_l(m)?, m);
        } else if i_max == 2 && cfg.first_kernel_rule == FirstKernelRule::PenultimateFamily {
            gm += head(&cfg.p1, 1);
        }
        if m < i_max {
            let c = binomial(m as u64 + 1, m as u64) as f64;
            gm -= c * cfg.p_l(m + 1)?.eval(w) / log_y1.powi(m as i32 + 1);
        }
        for l in (m + 2)..=i_max {
            let sign = if (l - m) % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign * binomial(l as u64, m as u64) as f64
                / (factorial((l - m - 2) as u64) as f64 * log_y1.powi(l as i32));
            gm += c * x_integral(cfg.p_l(l)?, l - m - 2, span, log_y1, alpha);
        }
        g[m] = gm;
    }
    Ok(g)
}

/// Main term of `E_alpha(j)`:
/// `mu(j) / (j^(1+alpha) F(j, 1+alpha)) sum_m G_m(alpha, j) S_m(j)`.
pub fn e_alpha_asymptotic(
    j: u64,
    alpha: Complex64,
    y: u64,
    y1: u64,
    cfg: &MollifierConfig<f64>,
    tables: &ArithmeticTables,
) -> Result<Complex64> {
    let mu = tables.mobius(j);
    if mu == 0 {
        return Err(Error::Domain(format!("{j} is not squarefree")));
    }
    let primes = tables.prime_divisors(j);
    let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let g = g_functions(alpha, j, y, y1, cfg)?;
    let braces: ComplexKahan = g
        .iter()
        .enumerate()
        .map(|(m, gm)| gm * ordered_tuple_sum(&logs, m))
        .collect();
    let s = one() + alpha;
    Ok(mu as f64 * npow(j, s) / euler_factor(&primes, s) * braces.value())
}

/// Main term of `Sigma(alpha, beta)` at real scaled shifts `a = alpha log T`,
/// `b = beta log T`:
/// `(int_0^1 F(a,b,t) dt + int_1^{theta/theta1} F*(a,b,t) dt) / (theta1 log T)`.
pub fn sigma_main_term(a: f64, b: f64, cfg: &MollifierConfig<f64>, log_t: f64) -> Result<f64> {
    let kernel = Kernel::new(cfg);
    let ja = Jet2::constant(0, (a, b), a);
    let jb = Jet2::constant(0, (a, b), b);
    let rule = GaussLegendre::cached(cfg.quad.nodes_t);
    let mut acc = KahanSum::new();
    for (t, w) in rule.mapped(0.0, 1.0) {
        acc.add(w * kernel.cal_f(&ja, &jb, t)?.value());
    }
    let end = cfg.outer_end();
    if end > 1.0 {
        for (t, w) in rule.mapped(1.0, end) {
            acc.add(w * kernel.cal_f_star(&ja, &jb, t)?.value());
        }
    }
    Ok(acc.value() / (cfg.theta1 * log_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MollifierParams;
    use crate::oracle::mollifier::mollifier_coeffs;
    use crate::oracle::sieve::sieve;
    use approx::assert_abs_diff_eq;

    fn setup(y: u64) -> (ArithmeticTables, MollifierConfig<f64>, FiniteMollifier) {
        let t = sieve(y).unwrap();
        let cfg = MollifierParams::theorem1().build::<f64>();
        let len = Lengths::from_y(y, &cfg);
        let m = mollifier_coeffs(&t, y, len.y1, &cfg).unwrap();
        (t, cfg, m)
    }

    #[test]
    fn sigma_at_y_two_is_one() {
        let t = sieve(2).unwrap();
        let cfg = MollifierParams::theorem1().build::<f64>();
        let m = mollifier_coeffs(&t, 2, 2, &cfg).unwrap();
        let z = Complex64::new(0.0, 0.0);
        assert_abs_diff_eq!(sigma_brute(z, z, &m, &t, false).unwrap().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sigma_direct(z, z, &m, false).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn single_term_e_alpha() {
        let (_t, _cfg, m) = setup(1000);
        // 997 is prime and 2 * 997 > 1000
        let alpha = Complex64::new(0.01, 0.02);
        let e = e_alpha_brute(997, alpha, &m).unwrap();
        let expect = m.coeff(997) * npow(997, one() + alpha);
        assert!((e - expect).norm() < 1e-18);
    }

    #[test]
    fn grouping_identity_small() {
        let (t, _cfg, m) = setup(200);
        let a = Complex64::new(0.05, -0.1);
        let b = Complex64::new(-0.02, 0.07);
        let g = sigma_brute(a, b, &m, &t, false).unwrap();
        let d = sigma_direct(a, b, &m, false).unwrap();
        assert!((g - d).norm() < 1e-11 * d.norm().max(1.0));
    }

    #[test]
    fn guards() {
        let (t, _cfg, m) = setup(600);
        let z = Complex64::new(0.0, 0.0);
        assert!(matches!(sigma_direct(z, z, &m, false), Err(Error::CostGuard { .. })));
        assert!(sigma_brute(z, z, &m, &t, false).is_ok());
    }

    #[test]
    fn g_functions_match_kernel_for_real_alpha() {
        let cfg = MollifierParams::theorem1().build::<f64>();
        let len = Lengths::from_y(100_000, &cfg);
        let log_y1 = (len.y1 as f64).ln();
        let alpha = 0.3 / len.log_t;
        let a = alpha * len.log_t;
        let kernel = Kernel::new(&cfg);
        let ja = Jet2::constant(0, (a, a), a);
        for j in [1u64, 6, 30, 101] {
            let t = (j as f64).ln() / log_y1;
            let g = g_functions(Complex64::new(alpha, 0.0), j, len.y, len.y1, &cfg).unwrap();
            let v = kernel.all_v(&ja, t).unwrap();
            for m in 0..=cfg.i_max {
                let scaled = g[m].re * log_y1.powi(m as i32 + 1);
                // the kernel uses theta1 log T = log y1 exactly only up to the floor in y1
                let rel = (scaled - v[m].value()).abs() / v[m].value().abs().max(1.0);
                assert!(rel < 1e-3, "j={j} m={m}: {scaled} vs {}", v[m].value());
            }
        }
    }
}
