//! Dense real polynomials and the constrained bases used for the mollifier
//! polynomials `P_1`, `P_l` and the differential-operator polynomial `Q`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::config::MollifierConfig;
use crate::scalar::Scalar;

/// Residual tolerance for the coefficient-level constraint checks.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Polynomial in the monomial basis; `coeffs[k]` multiplies `x^k`.
///
/// Trailing zero coefficients are trimmed on construction, so the zero
/// polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn identity() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::of_u64(k as u64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn integral(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(T::zero());
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / T::of_u64(k as u64 + 1)),
        );
        Self::new(out)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `p(1 - x)` expanded in the monomial basis with exact integer binomials.
    pub fn reflect(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![T::zero(); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            // (1 - x)^k = sum_i C(k, i) (-1)^i x^i
            for (i, slot) in out.iter_mut().enumerate().take(k + 1) {
                let b = T::of_u64(binomial(k as u64, i as u64));
                let term = c * b;
                if i % 2 == 0 {
                    *slot += term;
                } else {
                    *slot -= term;
                }
            }
        }
        Self::new(out)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |m, &c| if c.abs() > m { c.abs() } else { m })
    }

    pub fn cast<U: Scalar>(&self) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(|&c| U::of(c.to_f64_lossy())).collect())
    }

    /// `x + sum_k c_k x (1 - x)^k`, k = 1..=m.
    ///
    /// Every member of this family has `P(0) = 0` and `P(1) = 1`.
    pub fn p1_from_basis(c: &[T]) -> Self {
        let mut out = vec![T::zero(); c.len() + 2];
        out[1] = T::one();
        for (idx, &ck) in c.iter().enumerate() {
            let k = idx as u64 + 1;
            for i in 0..=k {
                let term = ck * T::of_u64(binomial(k, i));
                let slot = &mut out[i as usize + 1];
                if i % 2 == 0 {
                    *slot += term;
                } else {
                    *slot -= term;
                }
            }
        }
        Self::new(out)
    }

    /// `1 + sum_k c_k B_k(x)` with `B_k(x) = int_0^x u^k (1 - u)^k du`, k = 0..m-1.
    ///
    /// Every member has `Q(0) = 1` and `Q'(x) = Q'(1 - x)`.
    pub fn q_from_basis(c: &[T]) -> Self {
        let mut out = vec![T::zero(); 2 * c.len() + 1];
        out[0] = T::one();
        for (k, &ck) in c.iter().enumerate() {
            let k = k as u64;
            // B_k(x) = sum_i C(k, i) (-1)^i x^(k+i+1) / (k+i+1)
            for i in 0..=k {
                let pow = k + i + 1;
                let term = ck * T::of_u64(binomial(k, i)) / T::of_u64(pow);
                let slot = &mut out[pow as usize];
                if i % 2 == 0 {
                    *slot += term;
                } else {
                    *slot -= term;
                }
            }
        }
        Self::new(out)
    }

    /// Polynomial from its non-constant coefficients: `sum_k c_k x^(k+1)`.
    pub fn vanishing_at_zero(c: &[T]) -> Self {
        let mut out = Vec::with_capacity(c.len() + 1);
        out.push(T::zero());
        out.extend_from_slice(c);
        Self::new(out)
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        self.scale(-T::one())
    }
}

/// Exact binomial coefficient; valid while the result fits in `u64`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exact factorial; valid for `n <= 20`.
pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Falling factorial `m! / (m - k)!`.
pub fn falling_factorial(m: u64, k: u64) -> u64 {
    if k > m {
        return 0;
    }
    ((m - k + 1)..=m).product()
}

/// One failed identity: the constraint name and how far off it is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub violations: Vec<Violation>,
}

impl ConstraintReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, constraint: impl Into<String>, magnitude: f64) {
        self.violations.push(Violation {
            constraint: constraint.into(),
            magnitude,
        });
    }

    fn check_zero(&mut self, constraint: &str, residual: f64, tol: f64) {
        if !(residual.abs() <= tol) {
            self.push(constraint, residual.abs());
        }
    }
}

impl std::fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "all constraints hold");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{} (off by {:e})", v.constraint, v.magnitude))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Constraint tolerance in working precision: `1e-12` for `f64`, a few
/// hundred ulps for `f32`.
pub fn constraint_tol<T: Scalar>() -> f64 {
    CONSTRAINT_TOL.max(256.0 * T::epsilon().to_f64_lossy())
}

/// Checks every structural requirement on a mollifier configuration.
///
/// Violations are returned as data; this never fails.
pub fn check_constraints<T: Scalar>(cfg: &MollifierConfig<T>) -> ConstraintReport {
    let mut report = ConstraintReport::default();
    let f = |x: T| x.to_f64_lossy();
    let tol = constraint_tol::<T>();

    let p1_scale = 1.0 + f(cfg.p1.max_abs_coeff());
    report.check_zero("P_1(0)=0", f(cfg.p1.eval(T::zero())), tol);
    report.check_zero("P_1(1)=1", f(cfg.p1.eval(T::one()) - T::one()), tol * p1_scale);
    for (idx, p) in cfg.p.iter().enumerate() {
        let name = format!("P_l(0)=0 (l={})", idx + 2);
        report.check_zero(&name, f(p.eval(T::zero())), tol);
    }
    report.check_zero("Q(0)=1", f(cfg.q.eval(T::zero()) - T::one()), tol);
    let dq = cfg.q.derivative();
    let asym = &dq - &dq.reflect();
    let dq_scale = 1.0 + f(dq.max_abs_coeff());
    report.check_zero("Q' symmetry", f(asym.max_abs_coeff()), tol * dq_scale);

    let theta = f(cfg.theta);
    let theta1 = f(cfg.theta1);
    if !(theta1 > 0.0) {
        report.push("theta1>0", theta1.abs());
    }
    if !(theta1 <= theta) {
        report.push("theta1<=theta", theta1 - theta);
    }
    if !(f(cfg.r) > 0.0) {
        report.push("R>0", f(cfg.r).abs());
    }
    if cfg.i_max < 2 {
        report.push("I>=2", (2 - cfg.i_max as i64) as f64);
    }
    if cfg.p.len() + 2 != cfg.i_max.max(2) + 1 {
        report.push(
            "P_l count = I-1",
            (cfg.p.len() as f64 - (cfg.i_max as f64 - 1.0)).abs(),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn theorem1_q() -> Polynomial<f64> {
        Polynomial::q_from_basis(&[-0.6684, -1.0798, -5.0447])
    }

    #[test]
    fn eval_identity() {
        assert_eq!(Polynomial::<f64>::identity().eval(0.5), 0.5);
    }

    #[test]
    fn theorem1_q_values() {
        let q = theorem1_q();
        assert_eq!(q.eval(0.0), 1.0);
        let direct = 1.0 - 0.6684 - 1.0798 / 6.0 - 5.0447 / 30.0;
        assert_abs_diff_eq!(q.eval(1.0), direct, epsilon = 1e-14);
        assert_abs_diff_eq!(q.eval(1.0), -0.01653, epsilon = 1e-4);
    }

    #[test]
    fn theorem1_q_matches_printed_expansion() {
        let x: f64 = 0.37;
        let printed = 1.0 - 0.6684 * x - 1.0798 * (x * x / 2.0 - x.powi(3) / 3.0)
            - 5.0447 * (x.powi(3) / 3.0 - x.powi(4) / 2.0 + x.powi(5) / 5.0);
        assert_abs_diff_eq!(theorem1_q().eval(x), printed, epsilon = 1e-14);
        assert_eq!(theorem1_q().degree(), 5);
    }

    #[test]
    fn derivative_basics() {
        let x2 = Polynomial::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(x2.derivative(), Polynomial::new(vec![0.0, 2.0]));
        assert!(Polynomial::constant(1.0).derivative().is_zero());
        let dq = theorem1_q().derivative();
        assert_abs_diff_eq!(dq.eval(0.3), dq.eval(0.7), epsilon = 1e-12);
    }

    #[test]
    fn p1_basis_examples() {
        assert_eq!(Polynomial::<f64>::p1_from_basis(&[]), Polynomial::identity());
        let p = Polynomial::p1_from_basis(&[1.0]);
        assert_eq!(p, Polynomial::new(vec![0.0, 2.0, -1.0]));
        assert_eq!(p.eval(0.5), 0.75);
        let p1 = Polynomial::p1_from_basis(&[0.2950, -2.2345, 1.882]);
        assert_eq!(p1.eval(1.0), 1.0);
        assert_eq!(p1.eval(0.0), 0.0);
        let x: f64 = 0.41;
        let printed = x + 0.2950 * x * (1.0 - x) - 2.2345 * x * (1.0 - x).powi(2)
            + 1.882 * x * (1.0 - x).powi(3);
        assert_abs_diff_eq!(p1.eval(x), printed, epsilon = 1e-14);
    }

    #[test]
    fn q_basis_examples() {
        assert_eq!(Polynomial::<f64>::q_from_basis(&[]), Polynomial::constant(1.0));
        let q = Polynomial::q_from_basis(&[-0.7721, -0.1901, -3.9627]);
        let x: f64 = 0.8;
        let printed = 1.0 - 0.7721 * x - 0.1901 * (x * x / 2.0 - x.powi(3) / 3.0)
            - 3.9627 * (x.powi(3) / 3.0 - x.powi(4) / 2.0 + x.powi(5) / 5.0);
        assert_abs_diff_eq!(q.eval(x), printed, epsilon = 1e-14);
    }

    #[test]
    fn reflect_and_arithmetic() {
        // (1 + 2x + 3x^2)(1 - x) reflect: 1 + 2(1-x) + 3(1-x)^2 = 6 - 8x + 3x^2
        let p = Polynomial::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.reflect(), Polynomial::new(vec![6.0, -8.0, 3.0]));
        let q = Polynomial::new(vec![1.0, -1.0]);
        assert_eq!(&p * &q, Polynomial::new(vec![1.0, 1.0, 1.0, -3.0]));
        assert!((&p - &p).is_zero());
        assert_eq!(p.integral().derivative(), p);
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(factorial(5), 120);
        assert_eq!(falling_factorial(5, 2), 20);
        assert_eq!(falling_factorial(3, 0), 1);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }

    #[test]
    fn generic_over_f32() {
        let q = Polynomial::<f32>::q_from_basis(&[-0.6684, -1.0798, -5.0447]);
        assert!((q.eval(1.0) + 0.01653).abs() < 1e-4);
    }
}
