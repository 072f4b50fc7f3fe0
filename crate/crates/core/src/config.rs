//! Mollifier configuration: mollifier lengths, shift `R`, the polynomial
//! family, and quadrature settings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{check_constraints, ConstraintReport, Polynomial};
use crate::scalar::Scalar;

/// Upper limit on `theta` without extra hypotheses.
pub const THETA_MAX: f64 = 4.0 / 7.0;
/// Upper limit on `theta1` without extra hypotheses.
pub const THETA1_MAX: f64 = 0.5;
/// Largest `I` for which the integer combinatorics stay exact in 64 bits.
pub const I_MAX_SUPPORTED: usize = 12;


#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `theta <= 4/7`, `theta1 <= 1/2`.
    #[default]
    Unconditional,
    /// `theta = theta1 <= 1`.
    Theta1Conjecture,
}

/// Which formula supplies `V_1` when `I = 2`, where the `m = 1` and
/// `m = I - 1` families overlap. Irrelevant for `I >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstKernelRule {
    /// `V_1 = -2 P_2(1-t) + sum_{l>=3} ...`: no `a theta1 P_1 + P_1'` part.
    #[default]
    FirstPrimeGroup,
    /// Treat `m = 1` as `m = I - 1` and add `a theta1 P_1(1-t) + P_1'(1-t)`.
    PenultimateFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub nodes_t: usize,
    pub nodes_mu: usize,
    pub refine: bool,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            nodes_t: 64,
            nodes_mu: 48,
            refine: true,
        }
    }
}

impl QuadratureSettings {
    pub fn doubled(self) -> Self {
        Self {
            nodes_t: self.nodes_t * 2,
            nodes_mu: self.nodes_mu * 2,
            refine: self.refine,
        }
    }
}

/// Everything a bound computation needs, with the polynomials expanded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierConfig<T> {
    pub theta: T,
    pub theta1: T,
    pub r: T,
    /// Number of prime-group pieces `I`.
    pub i_max: usize,
    pub p1: Polynomial<T>,
    /// `P_2, ..., P_I`.
    pub p: Vec<Polynomial<T>>,
    pub q: Polynomial<T>,
    pub mode: Mode,
    pub quad: QuadratureSettings,
    #[serde(default)]
    pub first_kernel_rule: FirstKernelRule,
}

impl<T: Scalar> MollifierConfig<T> {
    /// `P_l` for `2 <= l <= I`.
    pub fn p_l(&self, l: usize) -> Result<&Polynomial<T>> {
        if l < 2 || l > self.i_max {
            return Err(Error::IndexOutOfRange {
                what: "l",
                index: l,
                lo: 2,
                hi: self.i_max,
            });
        }
        self.p.get(l - 2).ok_or(Error::IndexOutOfRange {
            what: "l",
            index: l,
            lo: 2,
            hi: self.p.len() + 1,
        })
    }

    /// `theta / theta1`, the upper end of the outer t-range.
    pub fn outer_end(&self) -> T {
        self.theta / self.theta1
    }

    /// Structural and mode constraints combined.
    pub fn constraint_report(&self) -> ConstraintReport {
        let mut report = check_constraints(self);
        let slack = crate::polynomial::constraint_tol::<T>();
        let theta = self.theta.to_f64_lossy();
        let theta1 = self.theta1.to_f64_lossy();
        let mut extra = |name: &str, excess: f64| {
            if excess > slack {
                report.violations.push(crate::polynomial::Violation {
                    constraint: name.to_string(),
                    magnitude: excess,
                });
            }
        };
        match self.mode {
            Mode::Unconditional => {
                extra("theta<=4/7", theta - THETA_MAX);
                extra("theta1<=1/2", theta1 - THETA1_MAX);
            }
            Mode::Theta1Conjecture => {
                extra("theta=theta1", (theta - theta1).abs());
                extra("theta<=1", theta - 1.0);
            }
        }
        extra("I<=12", self.i_max as f64 - I_MAX_SUPPORTED as f64);
        extra("nodes>=4", 4.0 - self.quad.nodes_t.min(self.quad.nodes_mu) as f64);
        report
    }

    pub fn validate(&self) -> Result<()> {
        let report = self.constraint_report();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::Constraint(report))
        }
    }

    pub fn with_quad(&self, quad: QuadratureSettings) -> Self {
        Self {
            quad,
            ..self.clone()
        }
    }

    pub fn cast<U: Scalar>(&self) -> MollifierConfig<U> {
        MollifierConfig {
            theta: U::of(self.theta.to_f64_lossy()),
            theta1: U::of(self.theta1.to_f64_lossy()),
            r: U::of(self.r.to_f64_lossy()),
            i_max: self.i_max,
            p1: self.p1.cast(),
            p: self.p.iter().map(Polynomial::cast).collect(),
            q: self.q.cast(),
            mode: self.mode,
            quad: self.quad,
            first_kernel_rule: self.first_kernel_rule,
        }
    }
}

/// Basis-coefficient description of a mollifier.
///
/// This is the form configuration files and the optimizer work in: any
/// coefficient values produce polynomials satisfying the structural
/// constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierParams {
    pub theta: f64,
    pub theta1: f64,
    pub r: f64,
    pub i_max: usize,
    /// `c_k` in `P_1(x) = x + sum_k c_k x (1-x)^k`.
    pub p1_basis: Vec<f64>,
    /// Non-constant coefficients of `P_2, ..., P_I`, lowest power first.
    pub p_polys: Vec<Vec<f64>>,
    /// `c_k` in `Q(x) = 1 + sum_k c_k int_0^x u^k (1-u)^k du`.
    pub q_basis: Vec<f64>,
    pub mode: Mode,
    pub quad: QuadratureSettings,
    #[serde(default)]
    pub first_kernel_rule: FirstKernelRule,
}

impl MollifierParams {
    /// `theta = 4/7`, `theta1 = 1/2`, `R = 1.3025`, `I = 3`.
    pub fn theorem1() -> Self {
        Self {
            theta: THETA_MAX,
            theta1: THETA1_MAX,
            r: 1.3025,
            i_max: 3,
            p1_basis: vec![0.2950, -2.2345, 1.882],
            p_polys: vec![vec![0.0849, 1.9824], vec![0.7516]],
            q_basis: vec![-0.6684, -1.0798, -5.0447],
            mode: Mode::Unconditional,
            quad: QuadratureSettings::default(),
            first_kernel_rule: FirstKernelRule::default(),
        }
    }

    /// `theta = theta1 = 1`, `R = 0.7721`, `I = 3`.
    pub fn corollary1() -> Self {
        Self {
            theta: 1.0,
            theta1: 1.0,
            r: 0.7721,
            i_max: 3,
            p1_basis: vec![0.1560, -1.4045, -0.0662],
            p_polys: vec![vec![2.0409, 0.2661], vec![-0.0734]],
            q_basis: vec![-0.7721, -0.1901, -3.9627],
            mode: Mode::Theta1Conjecture,
            quad: QuadratureSettings::default(),
            first_kernel_rule: FirstKernelRule::default(),
        }
    }

    pub fn build<T: Scalar>(&self) -> MollifierConfig<T> {
        let cast = |v: &[f64]| v.iter().map(|&x| T::of(x)).collect::<Vec<T>>();
        MollifierConfig {
            theta: T::of(self.theta),
            theta1: T::of(self.theta1),
            r: T::of(self.r),
            i_max: self.i_max,
            p1: Polynomial::p1_from_basis(&cast(&self.p1_basis)),
            p: self
                .p_polys
                .iter()
                .map(|c| Polynomial::vanishing_at_zero(&cast(c)))
                .collect(),
            q: Polynomial::q_from_basis(&cast(&self.q_basis)),
            mode: self.mode,
            quad: self.quad,
            first_kernel_rule: self.first_kernel_rule,
        }
    }

    /// Builds and validates.
    pub fn config<T: Scalar>(&self) -> Result<MollifierConfig<T>> {
        let cfg = self.build::<T>();
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        assert!(MollifierParams::theorem1().config::<f64>().is_ok());
        assert!(MollifierParams::corollary1().config::<f64>().is_ok());
        assert!(MollifierParams::theorem1().config::<f32>().is_ok());
    }

    #[test]
    fn mode_limits_enforced() {
        let mut p = MollifierParams::theorem1();
        p.theta = 0.6;
        let err = p.config::<f64>().unwrap_err();
        assert!(matches!(err, Error::Constraint(_)));

        let mut p = MollifierParams::corollary1();
        p.theta1 = 0.9;
        assert!(p.config::<f64>().is_err());
    }

    #[test]
    fn p_l_range() {
        let cfg = MollifierParams::theorem1().build::<f64>();
        assert!(cfg.p_l(2).is_ok());
        assert!(cfg.p_l(3).is_ok());
        assert!(cfg.p_l(1).is_err());
        assert!(cfg.p_l(4).is_err());
    }

    #[test]
    fn raw_polynomial_violations() {
        let mut cfg = MollifierParams::theorem1().build::<f64>();
        cfg.p[0] = Polynomial::new(vec![1.0, 1.0]);
        cfg.q = Polynomial::new(vec![1.0, 0.0, -1.0]);
        let report = cfg.constraint_report();
        let names: Vec<&str> = report
            .violations
            .iter()
            .map(|v| v.constraint.as_str())
            .collect();
        assert!(names.contains(&"P_l(0)=0 (l=2)"));
        assert!(names.contains(&"Q' symmetry"));
        let pl = &report.violations[0];
        assert_eq!(pl.magnitude, 1.0);
    }
}
