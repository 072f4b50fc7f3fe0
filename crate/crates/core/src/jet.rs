//! Bivariate truncated Taylor series ("jets") in the displacements `(da, db)`
//! around an expansion point `(a0, b0)`.
//!
//! The grid is truncated per variable: a jet of order `n` carries every
//! coefficient `c[i][j]` with `i <= n` and `j <= n`, so the mixed derivative
//! `d^n/da^n d^n/db^n` is available. `c[i][j]` is the Taylor coefficient,
//! i.e. the partial derivative divided by `i! j!`.
//!
//! Products are computed as truncated Cauchy products with compensated
//! accumulation. `exp` and `recip` use the standard power-series recurrences,
//! which are exact on the truncated grid.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::polynomial::{factorial, Polynomial};
use crate::scalar::{KahanSum, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet2<T> {
    order: usize,
    center: (T, T),
    coeffs: Vec<T>,
}

impl<T: Scalar> Jet2<T> {
    fn zeros(order: usize, center: (T, T)) -> Self {
        Self {
            order,
            center,
            coeffs: vec![T::zero(); (order + 1) * (order + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.order + 1) + j
    }

    pub fn constant(order: usize, center: (T, T), value: T) -> Self {
        let mut out = Self::zeros(order, center);
        out.coeffs[0] = value;
        out
    }

    /// The coordinate function `a` expanded at `(a0, b0)`.
    pub fn var_a(order: usize, a0: T, b0: T) -> Self {
        let mut out = Self::constant(order, (a0, b0), a0);
        if order >= 1 {
            let k = out.idx(1, 0);
            out.coeffs[k] = T::one();
        }
        out
    }

    /// The coordinate function `b` expanded at `(a0, b0)`.
    pub fn var_b(order: usize, a0: T, b0: T) -> Self {
        let mut out = Self::constant(order, (a0, b0), b0);
        if order >= 1 {
            let k = out.idx(0, 1);
            out.coeffs[k] = T::one();
        }
        out
    }

    /// Builds a jet from a Taylor-coefficient function `(i, j) -> c[i][j]`.
    pub fn from_fn(order: usize, center: (T, T), mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut out = Self::zeros(order, center);
        for i in 0..=order {
            for j in 0..=order {
                let k = out.idx(i, j);
                out.coeffs[k] = f(i, j);
            }
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn center(&self) -> (T, T) {
        self.center
    }

    /// Taylor coefficient `c[i][j]`; zero outside the grid.
    pub fn coeff(&self, i: usize, j: usize) -> T {
        if i > self.order || j > self.order {
            T::zero()
        } else {
            self.coeffs[self.idx(i, j)]
        }
    }

    /// Value at the expansion point.
    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// `d^(i+j) f / da^i db^j` at the expansion point.
    pub fn partial(&self, i: usize, j: usize) -> T {
        self.coeff(i, j) * T::of_u64(factorial(i as u64)) * T::of_u64(factorial(j as u64))
    }

    /// Constant jet of the same shape.
    pub fn lift(&self, value: T) -> Self {
        Self::constant(self.order, self.center, value)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        if self.center != other.center {
            return Err(Error::CenterMismatch {
                left: (self.center.0.to_f64_lossy(), self.center.1.to_f64_lossy()),
                right: (other.center.0.to_f64_lossy(), other.center.1.to_f64_lossy()),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |x, y| x + y))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |x, y| x - y))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Self {
            order: self.order,
            center: self.center,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.order;
        let mut out = Self::zeros(n, self.center);
        for i in 0..=n {
            for j in 0..=n {
                let mut acc = KahanSum::new();
                for i1 in 0..=i {
                    for j1 in 0..=j {
                        let x = self.coeffs[self.idx(i1, j1)];
                        if x.is_zero() {
                            continue;
                        }
                        acc.add(x * other.coeffs[self.idx(i - i1, j - j1)]);
                    }
                }
                let k = out.idx(i, j);
                out.coeffs[k] = acc.value();
            }
        }
        out
    }

    pub fn scale(&self, r: T) -> Self {
        Self {
            order: self.order,
            center: self.center,
            coeffs: self.coeffs.iter().map(|&c| c * r).collect(),
        }
    }

    /// Adds a real constant to the value slot.
    pub fn add_scalar(&self, r: T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += r;
        out
    }

    /// In-place `self += r * other`; shapes must already agree.
    pub fn axpy(&mut self, r: T, other: &Self) {
        debug_assert_eq!(self.order, other.order);
        for (s, &o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += r * o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when only the value and the two linear slots can be nonzero.
    fn is_affine(&self) -> bool {
        let n = self.order;
        (0..=n).all(|i| {
            (0..=n).all(|j| i + j <= 1 || self.coeffs[self.idx(i, j)].is_zero())
        })
    }

    /// `exp` of the jet.
    pub fn exp(&self) -> Self {
        let n = self.order;
        let mut out = Self::zeros(n, self.center);
        out.coeffs[0] = self.coeffs[0].exp();
        if n > 0 && self.is_affine() {
            // exp(c + u da + v db) = e^c (u^i / i!) (v^j / j!)
            let e0 = out.coeffs[0];
            let (u, v) = (self.coeff(1, 0), self.coeff(0, 1));
            let mut pa = vec![T::one(); n + 1];
            let mut pb = vec![T::one(); n + 1];
            for k in 1..=n {
                let kf = T::of_u64(k as u64);
                pa[k] = pa[k - 1] * u / kf;
                pb[k] = pb[k - 1] * v / kf;
            }
            for i in 0..=n {
                for j in 0..=n {
                    let slot = out.idx(i, j);
                    out.coeffs[slot] = e0 * pa[i] * pb[j];
                }
            }
            return out;
        }
        // E = exp(f) satisfies dE/db = E df/db along i = 0 and dE/da = E df/da otherwise.
        for j in 1..=n {
            let mut acc = KahanSum::new();
            for l in 1..=j {
                acc.add(T::of_u64(l as u64) * self.coeff(0, l) * out.coeff(0, j - l));
            }
            let k = out.idx(0, j);
            out.coeffs[k] = acc.value() / T::of_u64(j as u64);
        }
        for i in 1..=n {
            for j in 0..=n {
                let mut acc = KahanSum::new();
                for k in 1..=i {
                    for l in 0..=j {
                        let fk = self.coeff(k, l);
                        if fk.is_zero() {
                            continue;
                        }
                        acc.add(T::of_u64(k as u64) * fk * out.coeff(i - k, j - l));
                    }
                }
                let slot = out.idx(i, j);
                out.coeffs[slot] = acc.value() / T::of_u64(i as u64);
            }
        }
        out
    }

    /// `1 / x` by the convolution recurrence `sum_{k,l} x[k][l] r[i-k][j-l] = delta`.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if !(c0.abs() > T::of(1e-300)) {
            return Err(Error::Singular(c0.to_f64_lossy()));
        }
        let n = self.order;
        let mut out = Self::zeros(n, self.center);
        let inv = T::one() / c0;
        for i in 0..=n {
            for j in 0..=n {
                let mut acc = KahanSum::new();
                if i == 0 && j == 0 {
                    acc.add(T::one());
                }
                for k in 0..=i {
                    for l in 0..=j {
                        if k == 0 && l == 0 {
                            continue;
                        }
                        let x = self.coeff(k, l);
                        if x.is_zero() {
                            continue;
                        }
                        acc.add(-x * out.coeff(i - k, j - l));
                    }
                }
                let slot = out.idx(i, j);
                out.coeffs[slot] = acc.value() * inv;
            }
        }
        Ok(out)
    }

    /// Substitutes the jet into a polynomial: `p(self)`.
    pub fn compose_poly(&self, p: &Polynomial<T>) -> Self {
        p.coeffs()
            .iter()
            .rev()
            .fold(self.lift(T::zero()), |acc, &c| (&acc * self).add_scalar(c))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
    }
}

/// Applies `q1(-d/da) q2(-d/db)` to the jet and reads the result at the
/// expansion point.
pub fn apply_operator<T: Scalar>(q1: &Polynomial<T>, q2: &Polynomial<T>, f: &Jet2<T>) -> Result<T> {
    let need = q1.degree().max(q2.degree());
    if f.order() < need {
        return Err(Error::InsufficientOrder {
            have: f.order(),
            need,
        });
    }
    let mut acc = KahanSum::new();
    for (i, &qi) in q1.coeffs().iter().enumerate() {
        if qi.is_zero() {
            continue;
        }
        for (j, &qj) in q2.coeffs().iter().enumerate() {
            if qj.is_zero() {
                continue;
            }
            let term = qi * qj * f.partial(i, j);
            if (i + j) % 2 == 0 {
                acc.add(term);
            } else {
                acc.add(-term);
            }
        }
    }
    Ok(acc.value())
}

// Operator impls panic on shape mismatch; use the `try_*` methods when the
// operands come from different sources.
impl<T: Scalar> Add for &Jet2<T> {
    type Output = Jet2<T>;

    fn add(self, rhs: Self) -> Jet2<T> {
        self.try_add(rhs).expect("jet shapes agree")
    }
}

impl<T: Scalar> Sub for &Jet2<T> {
    type Output = Jet2<T>;

    fn sub(self, rhs: Self) -> Jet2<T> {
        self.try_sub(rhs).expect("jet shapes agree")
    }
}

impl<T: Scalar> Mul for &Jet2<T> {
    type Output = Jet2<T>;

    fn mul(self, rhs: Self) -> Jet2<T> {
        self.try_mul(rhs).expect("jet shapes agree")
    }
}

impl<T: Scalar> Neg for &Jet2<T> {
    type Output = Jet2<T>;

    fn neg(self) -> Jet2<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Jet2<T>;

    fn neg(self) -> Jet2<T> {
        self.scale(-T::one())
    }
}
