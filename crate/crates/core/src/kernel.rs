//! Main-term kernel of the mollified mean value.
//!
//! All quantities are jets in `(a, b)`, so the differential operator
//! `Q(-d/da) Q(-d/db)` can be applied exactly afterwards. The shift variables
//! are scaled: `a = alpha log T`, `b = beta log T`, and `t` is the
//! log-scale of the gcd variable relative to `log y_1`.
//!
//! The inner `mu`-integrals
//! `int_0^{1-t} P_l(1-t-mu) mu^q exp(-a theta1 mu) dmu`
//! are evaluated by Gauss–Legendre on jets. One set of exponential jets per
//! `(a, t)` is shared by every `(l, q)` pair.

use std::sync::Arc;

use crate::config::{FirstKernelRule, MollifierConfig};
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::polynomial::{binomial, factorial, falling_factorial, Polynomial};
use crate::quadrature::GaussLegendre;
use crate::scalar::Scalar;

/// Precomputed pieces of a configuration used by every kernel evaluation.
#[derive(Debug, Clone)]
pub struct Kernel<'c, T> {
    cfg: &'c MollifierConfig<T>,
    dp1: Polynomial<T>,
    dp: Vec<Polynomial<T>>,
    mu_rule: Arc<GaussLegendre>,
    /// `w[m1][m2] = sum_k P(m1, k) C(m2, k) / (m1 + m2)!`
    weights: Vec<Vec<T>>,
}

/// Inner integrals for one `(a, t)` pair with the exponential jets cached.
pub struct InnerIntegrals<'k, 'c, T> {
    kernel: &'k Kernel<'c, T>,
    t: T,
    mus: Vec<(T, T)>,
    exps: Vec<Jet2<T>>,
    shape: Jet2<T>,
}

impl<'c, T: Scalar> Kernel<'c, T> {
    pub fn new(cfg: &'c MollifierConfig<T>) -> Self {
        let i_max = cfg.i_max;
        let weights = (0..=i_max as u64)
            .map(|m1| {
                (0..=i_max as u64)
                    .map(|m2| {
                        let w: u64 = (0..=m1.min(m2))
                            .map(|k| falling_factorial(m1, k) * binomial(m2, k))
                            .sum();
                        T::of_u64(w) / T::of_u64(factorial(m1 + m2))
                    })
                    .collect()
            })
            .collect();
        Self {
            cfg,
            dp1: cfg.p1.derivative(),
            dp: cfg.p.iter().map(Polynomial::derivative).collect(),
            mu_rule: GaussLegendre::cached(cfg.quad.nodes_mu),
            weights,
        }
    }

    pub fn config(&self) -> &MollifierConfig<T> {
        self.cfg
    }

    /// Exponential jets `exp(-a theta1 mu_k)` at the mapped nodes of `[0, 1-t]`.
    pub fn inner(&self, a: &Jet2<T>, t: T) -> InnerIntegrals<'_, 'c, T> {
        let len = T::one() - t;
        let mus: Vec<(T, T)> = if len > T::zero() {
            self.mu_rule.mapped(T::zero(), len).collect()
        } else {
            Vec::new()
        };
        let scaled = a.scale(-self.cfg.theta1);
        let exps = mus.iter().map(|&(mu, _)| scaled.scale(mu).exp()).collect();
        InnerIntegrals {
            kernel: self,
            t,
            mus,
            exps,
            shape: a.lift(T::zero()),
        }
    }

    /// `int_0^{1-t} P_l(1-t-mu) mu^q exp(-a theta1 mu) dmu`.
    pub fn inner_integral(&self, l: usize, q: usize, a: &Jet2<T>, t: T) -> Result<Jet2<T>> {
        self.inner(a, t).integral(l, q)
    }

    fn v0_head(&self, a: &Jet2<T>, t: T) -> Jet2<T> {
        let ratio = self.cfg.theta1 / self.cfg.theta;
        let u = T::one() - ratio * t;
        a.scale(self.cfg.theta1 * self.cfg.p1.eval(u))
            .add_scalar(ratio * self.dp1.eval(u))
    }

    /// `V_0(a, t)` for `0 <= t <= 1`.
    pub fn v0(&self, a: &Jet2<T>, t: T) -> Result<Jet2<T>> {
        let inner = self.inner(a, t);
        self.v0_with(a, &inner)
    }

    fn v0_with(&self, a: &Jet2<T>, inner: &InnerIntegrals<'_, 'c, T>) -> Result<Jet2<T>> {
        let mut out = self.v0_head(a, inner.t);
        for l in 2..=self.cfg.i_max {
            let sign = if l % 2 == 0 { T::one() } else { -T::one() };
            let c = sign / T::of_u64(factorial(l as u64 - 2));
            out.axpy(c, &inner.integral(l, l - 2)?);
        }
        Ok(out)
    }

    /// `V_0^*(a, t)` for `1 <= t <= theta / theta1`.
    pub fn v0_star(&self, a: &Jet2<T>, t: T) -> Jet2<T> {
        self.v0_head(a, t)
    }

    /// `V_m(a, t)` for `1 <= m <= I`.
    pub fn v_m(&self, m: usize, a: &Jet2<T>, t: T) -> Result<Jet2<T>> {
        let inner = self.inner(a, t);
        self.v_m_with(m, a, &inner)
    }

    fn v_m_with(&self, m: usize, a: &Jet2<T>, inner: &InnerIntegrals<'_, 'c, T>) -> Result<Jet2<T>> {
        let i_max = self.cfg.i_max;
        if m == 0 || m > i_max {
            return Err(Error::IndexOutOfRange {
                what: "m",
                index: m,
                lo: 1,
                hi: i_max,
            });
        }
        let t = inner.t;
        let s = T::one() - t;
        let theta1 = self.cfg.theta1;
        let mut out = a.lift(T::zero());

        if m >= 2 {
            let pm = self.cfg.p_l(m)?;
            out = a.scale(theta1 * pm.eval(s)).add_scalar(self.dp[m - 2].eval(s));
        } else if i_max == 2 && self.cfg.first_kernel_rule == FirstKernelRule::PenultimateFamily {
            out = a
                .scale(theta1 * self.cfg.p1.eval(s))
                .add_scalar(self.dp1.eval(s));
        }
        if m < i_max {
            let next = self.cfg.p_l(m + 1)?;
            let c = T::of_u64(binomial(m as u64 + 1, m as u64));
            out = out.add_scalar(-c * next.eval(s));
        }
        for l in (m + 2)..=i_max {
            let sign = if (l - m) % 2 == 0 { T::one() } else { -T::one() };
            let c = sign * T::of_u64(binomial(l as u64, m as u64))
                / T::of_u64(factorial((l - m - 2) as u64));
            out.axpy(c, &inner.integral(l, l - m - 2)?);
        }
        Ok(out)
    }

    /// `[V_0, V_1, ..., V_I]` at one `(a, t)`.
    pub fn all_v(&self, a: &Jet2<T>, t: T) -> Result<Vec<Jet2<T>>> {
        let inner = self.inner(a, t);
        let mut out = Vec::with_capacity(self.cfg.i_max + 1);
        out.push(self.v0_with(a, &inner)?);
        for m in 1..=self.cfg.i_max {
            out.push(self.v_m_with(m, a, &inner)?);
        }
        Ok(out)
    }

    /// `sum_{m1, m2} sum_k P(m1,k) C(m2,k) V_m1(a) V_m2(b) t^(m1+m2) / (m1+m2)!`.
    pub fn cal_f(&self, a: &Jet2<T>, b: &Jet2<T>, t: T) -> Result<Jet2<T>> {
        let va = self.all_v(a, t)?;
        let vb = self.all_v(b, t)?;
        let mut out = a.lift(T::zero());
        for (m1, x) in va.iter().enumerate() {
            let mut inner = a.lift(T::zero());
            for (m2, y) in vb.iter().enumerate() {
                let c = self.weights[m1][m2] * t.powi((m1 + m2) as i32);
                if !c.is_zero() {
                    inner.axpy(c, y);
                }
            }
            if inner.is_zero() {
                continue;
            }
            out = out.try_add(&x.try_mul(&inner)?)?;
        }
        Ok(out)
    }

    /// `V_0^*(a, t) V_0^*(b, t)`.
    pub fn cal_f_star(&self, a: &Jet2<T>, b: &Jet2<T>, t: T) -> Result<Jet2<T>> {
        self.v0_star(a, t).try_mul(&self.v0_star(b, t))
    }
}

impl<T: Scalar> InnerIntegrals<'_, '_, T> {
    /// `int_0^{1-t} P_l(1-t-mu) mu^q exp(-a theta1 mu) dmu`.
    pub fn integral(&self, l: usize, q: usize) -> Result<Jet2<T>> {
        let p = self.kernel.cfg.p_l(l)?;
        let mut out = self.shape.clone();
        let s = T::one() - self.t;
        for (&(mu, w), e) in self.mus.iter().zip(&self.exps) {
            let c = w * p.eval(s - mu) * mu.powi(q as i32);
            out.axpy(c, e);
        }
        Ok(out)
    }
}

pub fn inner_integral<T: Scalar>(
    l: usize,
    q: usize,
    a: &Jet2<T>,
    t: T,
    cfg: &MollifierConfig<T>,
) -> Result<Jet2<T>> {
    Kernel::new(cfg).inner_integral(l, q, a, t)
}

pub fn v0<T: Scalar>(cfg: &MollifierConfig<T>, a: &Jet2<T>, t: T) -> Result<Jet2<T>> {
    Kernel::new(cfg).v0(a, t)
}

pub fn v0_star<T: Scalar>(cfg: &MollifierConfig<T>, a: &Jet2<T>, t: T) -> Jet2<T> {
    Kernel::new(cfg).v0_star(a, t)
}

pub fn v_m<T: Scalar>(m: usize, cfg: &MollifierConfig<T>, a: &Jet2<T>, t: T) -> Result<Jet2<T>> {
    Kernel::new(cfg).v_m(m, a, t)
}

pub fn cal_f<T: Scalar>(cfg: &MollifierConfig<T>, a: &Jet2<T>, b: &Jet2<T>, t: T) -> Result<Jet2<T>> {
    Kernel::new(cfg).cal_f(a, b, t)
}

pub fn cal_f_star<T: Scalar>(
    cfg: &MollifierConfig<T>,
    a: &Jet2<T>,
    b: &Jet2<T>,
    t: T,
) -> Result<Jet2<T>> {
    Kernel::new(cfg).cal_f_star(a, b, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Mode, MollifierParams, QuadratureSettings};
    use approx::assert_abs_diff_eq;

    fn simple(i_max: usize, p: Vec<Polynomial<f64>>) -> MollifierConfig<f64> {
        MollifierConfig {
            theta: 4.0 / 7.0,
            theta1: 0.5,
            r: 1.3025,
            i_max,
            p1: Polynomial::identity(),
            p,
            q: Polynomial::constant(1.0),
            mode: Mode::Unconditional,
            quad: QuadratureSettings::default(),
            first_kernel_rule: FirstKernelRule::default(),
        }
    }

    fn zero_jet() -> Jet2<f64> {
        Jet2::constant(2, (0.0, 0.0), 0.0)
    }

    #[test]
    fn inner_integral_examples() {
        let cfg = simple(2, vec![Polynomial::identity()]);
        let a = zero_jet();
        assert_eq!(inner_integral(2, 0, &a, 1.0, &cfg).unwrap(), zero_jet());
        assert_abs_diff_eq!(inner_integral(2, 0, &a, 0.0, &cfg).unwrap().value(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            inner_integral(2, 1, &a, 0.0, &cfg).unwrap().value(),
            1.0 / 6.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            inner_integral(3, 0, &a, 0.0, &cfg),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn v0_examples() {
        let cfg = simple(2, vec![Polynomial::zero()]);
        let r = 1.3025;
        let a = Jet2::constant(2, (-r, -r), -r);
        let v = v0(&cfg, &a, 0.0).unwrap();
        let expect = -r * 0.5 * 1.0 + (0.5 / (4.0 / 7.0)) * 1.0;
        assert_abs_diff_eq!(v.value(), expect, epsilon = 1e-15);

        let mut cfg = simple(2, vec![Polynomial::new(vec![0.0, 0.3, 1.0])]);
        cfg.theta = 0.5;
        let a = Jet2::var_a(2, -r, -r);
        let v = v0(&cfg, &a, 1.0).unwrap();
        // P_1 = x, theta = theta1: a theta1 P_1(0) + P_1'(0) = 1
        assert_abs_diff_eq!(v.value(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.coeff(1, 0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn v0_star_examples() {
        let cfg = simple(2, vec![Polynomial::zero()]);
        let a = Jet2::var_a(2, -1.0, -1.0);
        let t_end = cfg.theta / cfg.theta1;
        let v = v0_star(&cfg, &a, t_end);
        assert_abs_diff_eq!(v.value(), cfg.theta1 / cfg.theta, epsilon = 1e-15);
        assert_abs_diff_eq!(v.coeff(1, 0), 0.0, epsilon = 1e-15);
        let t = 1.05;
        let v = v0_star(&cfg, &a, t);
        let ratio = cfg.theta1 / cfg.theta;
        assert_abs_diff_eq!(v.value(), -cfg.theta1 * (1.0 - ratio * t) + ratio, epsilon = 1e-15);
    }

    #[test]
    fn v0_meets_v0_star_at_one() {
        let cfg = MollifierParams::theorem1().build::<f64>();
        let a = Jet2::var_a(5, -1.3025, -1.3025);
        let v = v0(&cfg, &a, 1.0).unwrap();
        let w = v0_star(&cfg, &a, 1.0);
        assert!(v.max_abs_diff(&w) < 1e-15);
    }

    #[test]
    fn v_m_examples() {
        let cfg = simple(2, vec![Polynomial::identity()]);
        let a = Jet2::var_a(2, -1.0, -1.0);
        let t = 0.25;
        let v = v_m(2, &cfg, &a, t).unwrap();
        assert_abs_diff_eq!(v.value(), -1.0 * 0.5 * 0.75 + 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.coeff(1, 0), 0.5 * 0.75, epsilon = 1e-15);
        assert!(v_m(3, &cfg, &a, t).is_err());
        assert!(v_m(0, &cfg, &a, t).is_err());

        // m = I - 1 at t = 1: P_{I-1}'(0) - I P_I(0) = P_{I-1}'(0)
        let cfg = simple(
            3,
            vec![Polynomial::new(vec![0.0, 0.7, 2.0]), Polynomial::identity()],
        );
        let v = v_m(2, &cfg, &a, 1.0).unwrap();
        assert_abs_diff_eq!(v.value(), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn v1_against_direct_quadrature() {
        let params = MollifierParams::theorem1();
        let cfg = params.build::<f64>();
        let r = 1.3025;
        let a = Jet2::constant(0, (-r, -r), -r);
        let v = v_m(1, &cfg, &a, 0.0).unwrap();
        // -2 P_2(1) + 3 int_0^1 P_3(1-mu) exp(R theta1 mu) dmu, by Simpson on a fine grid
        let p3 = |x: f64| 0.7516 * x;
        let n = 20_000;
        let h = 1.0 / n as f64;
        let f = |mu: f64| p3(1.0 - mu) * (r * 0.5 * mu).exp();
        let mut s = f(0.0) + f(1.0);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(k as f64 * h);
        }
        let integral = s * h / 3.0;
        let expect = -2.0 * (0.0849 + 1.9824) + 3.0 * integral;
        assert_abs_diff_eq!(v.value(), expect, epsilon = 1e-12);
    }

    #[test]
    fn first_kernel_rule_only_matters_for_i_two() {
        let mut cfg = simple(2, vec![Polynomial::new(vec![0.0, 0.4])]);
        let a = Jet2::var_a(2, -1.0, -1.0);
        let base = v_m(1, &cfg, &a, 0.3).unwrap();
        assert_abs_diff_eq!(base.value(), -2.0 * 0.4 * 0.7, epsilon = 1e-15);
        cfg.first_kernel_rule = FirstKernelRule::PenultimateFamily;
        let alt = v_m(1, &cfg, &a, 0.3).unwrap();
        assert_abs_diff_eq!(alt.value(), -0.5 * 0.7 + 1.0 - 2.0 * 0.4 * 0.7, epsilon = 1e-15);

        let params = MollifierParams::theorem1();
        let mut cfg3 = params.build::<f64>();
        let a5 = Jet2::var_a(5, -1.3, -1.3);
        let v = v_m(1, &cfg3, &a5, 0.3).unwrap();
        cfg3.first_kernel_rule = FirstKernelRule::PenultimateFamily;
        assert_eq!(v, v_m(1, &cfg3, &a5, 0.3).unwrap());
    }

    #[test]
    fn cal_f_at_zero_is_v0_product() {
        let cfg = MollifierParams::theorem1().build::<f64>();
        let a = Jet2::var_a(5, -1.3025, -1.3025);
        let b = Jet2::var_b(5, -1.3025, -1.3025);
        let f = cal_f(&cfg, &a, &b, 0.0).unwrap();
        let g = &v0(&cfg, &a, 0.0).unwrap() * &v0(&cfg, &b, 0.0).unwrap();
        assert!(f.max_abs_diff(&g) < 1e-14);
    }

    #[test]
    fn cal_f_degenerates_without_prime_groups() {
        let cfg = simple(2, vec![Polynomial::zero()]);
        let a = Jet2::var_a(3, -1.1, -1.1);
        let b = Jet2::var_b(3, -1.1, -1.1);
        for t in [0.0, 0.3, 0.9] {
            let f = cal_f(&cfg, &a, &b, t).unwrap();
            let g = &v0(&cfg, &a, t).unwrap() * &v0(&cfg, &b, t).unwrap();
            assert!(f.max_abs_diff(&g) < 1e-14);
        }
    }

    #[test]
    fn cal_f_star_examples() {
        let cfg = simple(2, vec![Polynomial::zero()]);
        let a = Jet2::var_a(2, -1.0, -1.0);
        let b = Jet2::var_b(2, -1.0, -1.0);
        let t_end = cfg.theta / cfg.theta1;
        let f = cal_f_star(&cfg, &a, &b, t_end).unwrap();
        let ratio: f64 = cfg.theta1 / cfg.theta;
        assert_abs_diff_eq!(f.value(), ratio * ratio, epsilon = 1e-15);
        let sq = cal_f_star(&cfg, &a, &a, 1.1).unwrap();
        assert!(sq.value() >= 0.0);
        let ab = cal_f_star(&cfg, &a, &b, 1.1).unwrap();
        let ba = cal_f_star(&cfg, &b, &a, 1.1).unwrap();
        assert!(ab.max_abs_diff(&ba) < 1e-15);
    }
}
