//! The mean-value integral and the resulting lower bound
//! `kappa = 1 - log(M) / R`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::MollifierConfig;
use crate::error::{Error, Result};
use crate::jet::{apply_operator, Jet2};
use crate::kernel::Kernel;
use crate::quadrature::GaussLegendre;
use crate::scalar::{kahan_sum, Scalar};

/// Convergence threshold on `M` between successive node doublings,
/// relative to `max(1, |M|)`.
pub const REFINE_TOL: f64 = 1e-8;
/// Number of node doublings tried before giving up.
pub const MAX_DOUBLINGS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `0 <= t <= 1`, kernel `F`.
    Inner,
    /// `1 <= t <= theta / theta1`, kernel `F*`.
    Outer,
}

/// One quadrature level of a bound computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub nodes_t: usize,
    pub nodes_mu: usize,
    pub mean_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadDiagnostics {
    pub levels: Vec<RefinementLevel>,
    /// `|M_last - M_previous|`, zero when refinement is off.
    pub delta: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult<T> {
    pub kappa: T,
    pub mean_value: T,
    pub integral_region1: T,
    pub integral_region2: T,
    pub config_echo: MollifierConfig<T>,
    pub diagnostics: QuadDiagnostics,
}

fn jet_order<T: Scalar>(cfg: &MollifierConfig<T>) -> usize {
    cfg.q.degree()
}

/// Evaluates the operator-applied integrand at one `t`.
pub fn bound_integrand<T: Scalar>(cfg: &MollifierConfig<T>, t: T, region: Region) -> Result<T> {
    integrand(&Kernel::new(cfg), t, region, false)
}

/// Same as [`bound_integrand`] with the first kernel evaluated as `F(a, b, t)`
/// instead of `F(b, a, t)`.
pub fn bound_integrand_swapped<T: Scalar>(
    cfg: &MollifierConfig<T>,
    t: T,
    region: Region,
) -> Result<T> {
    integrand(&Kernel::new(cfg), t, region, true)
}

/// The jet `(F(b,a,t) - e^{-a-b} F(-a,-b,t)) / (theta1 (a+b))` at
/// `a = b = -R` before the operator is applied.
pub fn integrand_jet<T: Scalar>(
    kernel: &Kernel<'_, T>,
    t: T,
    region: Region,
    swapped: bool,
) -> Result<Jet2<T>> {
    let cfg = kernel.config();
    integrand_jet_at(kernel, t, region, swapped, (-cfg.r, -cfg.r), jet_order(cfg))
}

/// [`integrand_jet`] expanded at an arbitrary `(a0, b0)` to the given order.
pub fn integrand_jet_at<T: Scalar>(
    kernel: &Kernel<'_, T>,
    t: T,
    region: Region,
    swapped: bool,
    (a0, b0): (T, T),
    order: usize,
) -> Result<Jet2<T>> {
    let cfg = kernel.config();
    let a = Jet2::var_a(order, a0, b0);
    let b = Jet2::var_b(order, a0, b0);
    let eval = |x: &Jet2<T>, y: &Jet2<T>| match region {
        Region::Inner => kernel.cal_f(x, y, t),
        Region::Outer => kernel.cal_f_star(x, y, t),
    };
    let direct = if swapped { eval(&a, &b)? } else { eval(&b, &a)? };
    let na = -&a;
    let nb = -&b;
    let sum = a.try_add(&b)?;
    let reflected = (-&sum).exp().try_mul(&eval(&na, &nb)?)?;
    let denom = sum.scale(cfg.theta1);
    if denom.value().abs() <= T::of(1e-300) {
        return Err(Error::Singular(denom.value().to_f64_lossy()));
    }
    direct.try_sub(&reflected)?.try_mul(&denom.recip()?)
}

fn integrand<T: Scalar>(kernel: &Kernel<'_, T>, t: T, region: Region, swapped: bool) -> Result<T> {
    let cfg = kernel.config();
    let f = integrand_jet(kernel, t, region, swapped)?;
    apply_operator(&cfg.q, &cfg.q, &f)
}

fn region_integral<T: Scalar>(
    kernel: &Kernel<'_, T>,
    lo: T,
    hi: T,
    region: Region,
    swapped: bool,
) -> Result<T> {
    if hi <= lo {
        return Ok(T::zero());
    }
    let rule = GaussLegendre::cached(kernel.config().quad.nodes_t);
    let nodes: Vec<(T, T)> = rule.mapped(lo, hi).collect();
    let values: Vec<T> = nodes
        .par_iter()
        .map(|&(t, w)| integrand(kernel, t, region, swapped).map(|v| w * v))
        .collect::<Result<_>>()?;
    Ok(kahan_sum(values))
}

/// Both region integrals at the configuration's own node counts.
fn integrals_once<T: Scalar>(cfg: &MollifierConfig<T>, swapped: bool) -> Result<(T, T)> {
    let kernel = Kernel::new(cfg);
    let one = T::one();
    let r1 = region_integral(&kernel, T::zero(), one, Region::Inner, swapped)?;
    let r2 = region_integral(&kernel, one, cfg.outer_end(), Region::Outer, swapped)?;
    Ok((r1, r2))
}

fn finish<T: Scalar>(
    cfg: &MollifierConfig<T>,
    r1: T,
    r2: T,
    diagnostics: QuadDiagnostics,
) -> Result<BoundResult<T>> {
    let mean_value = r1 + r2;
    if !(mean_value > T::zero()) {
        return Err(Error::NonPositiveMean(mean_value.to_f64_lossy()));
    }
    Ok(BoundResult {
        kappa: T::one() - mean_value.ln() / cfg.r,
        mean_value,
        integral_region1: r1,
        integral_region2: r2,
        config_echo: cfg.clone(),
        diagnostics,
    })
}

fn compute_generic<T: Scalar>(cfg: &MollifierConfig<T>, swapped: bool) -> Result<BoundResult<T>> {
    // R = 0 is also a constraint violation, but the singular denominator
    // is the more useful diagnostic.
    if cfg.r.is_zero() {
        return Err(Error::Singular(0.0));
    }
    cfg.validate()?;
    // f32 cannot resolve 1e-8; scale the threshold with the working epsilon.
    let tol = REFINE_TOL.max(100.0 * T::epsilon().to_f64_lossy());
    let mut current = cfg.clone();
    let (mut r1, mut r2) = integrals_once(&current, swapped)?;
    let mut levels = vec![RefinementLevel {
        nodes_t: current.quad.nodes_t,
        nodes_mu: current.quad.nodes_mu,
        mean_value: (r1 + r2).to_f64_lossy(),
    }];
    if !cfg.quad.refine {
        let diagnostics = QuadDiagnostics {
            levels,
            delta: 0.0,
            converged: true,
        };
        return finish(cfg, r1, r2, diagnostics);
    }
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        current = current.with_quad(current.quad.doubled());
        let (n1, n2) = integrals_once(&current, swapped)?;
        let m_new = (n1 + n2).to_f64_lossy();
        let m_old = levels.last().map(|l| l.mean_value).unwrap_or(0.0);
        delta = (m_new - m_old).abs();
        levels.push(RefinementLevel {
            nodes_t: current.quad.nodes_t,
            nodes_mu: current.quad.nodes_mu,
            mean_value: m_new,
        });
        r1 = n1;
        r2 = n2;
        if delta <= tol * m_new.abs().max(1.0) {
            let diagnostics = QuadDiagnostics {
                levels,
                delta,
                converged: true,
            };
            return finish(cfg, r1, r2, diagnostics);
        }
    }
    Err(Error::Quadrature { delta })
}

/// Integrates both regions, refining by node doubling until `M` settles.
pub fn compute_bound<T: Scalar>(cfg: &MollifierConfig<T>) -> Result<BoundResult<T>> {
    compute_generic(cfg, false)
}

/// [`compute_bound`] with the swapped first kernel; used for symmetry checks.
pub fn compute_bound_swapped<T: Scalar>(cfg: &MollifierConfig<T>) -> Result<BoundResult<T>> {
    compute_generic(cfg, true)
}

/// `kappa` on an evenly spaced grid of `R` values, other parameters fixed.
///
/// With `steps == 1` the table holds the single point `r_min`.
pub fn scan_r<T: Scalar>(
    cfg: &MollifierConfig<T>,
    r_min: T,
    r_max: T,
    steps: usize,
) -> Result<Vec<(T, T)>> {
    let bad_range = if steps == 1 {
        !(r_min > T::zero()) || r_max < r_min
    } else {
        !(r_min > T::zero() && r_min < r_max)
    };
    if steps == 0 || bad_range {
        return Err(Error::Domain(format!(
            "scan needs 0 < r_min < r_max and steps >= 1, got [{}, {}] with {steps} steps",
            r_min.to_f64_lossy(),
            r_max.to_f64_lossy()
        )));
    }
    let grid: Vec<T> = if steps == 1 {
        vec![r_min]
    } else {
        let h = (r_max - r_min) / T::of_u64(steps as u64 - 1);
        (0..steps).map(|k| r_min + h * T::of_u64(k as u64)).collect()
    };
    grid.into_iter()
        .map(|r| {
            let mut c = cfg.clone();
            c.r = r;
            compute_bound(&c).map(|res| (r, res.kappa))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FirstKernelRule, Mode, MollifierParams, QuadratureSettings};
    use crate::polynomial::Polynomial;
    use approx::assert_abs_diff_eq;

    #[test]
    fn theorem1_reproduces() {
        let cfg = MollifierParams::theorem1().config::<f64>().unwrap();
        let res = compute_bound(&cfg).unwrap();
        assert_abs_diff_eq!(res.kappa, 0.4128, epsilon = 5e-4);
        assert_abs_diff_eq!(res.mean_value, 2.149, epsilon = 0.01);
        assert_eq!(res.kappa, 1.0 - res.mean_value.ln() / cfg.r);
        assert_eq!(res.mean_value, res.integral_region1 + res.integral_region2);
        assert!(res.diagnostics.converged);
    }

    #[test]
    fn theta_equal_gives_empty_outer_region() {
        let cfg = MollifierParams::corollary1().config::<f64>().unwrap();
        let res = compute_bound(&cfg).unwrap();
        assert_eq!(res.integral_region2, 0.0);
    }

    #[test]
    fn outer_integrand_hand_value() {
        let cfg = MollifierConfig {
            theta: 4.0 / 7.0,
            theta1: 0.5,
            r: 1.3,
            i_max: 2,
            p1: Polynomial::identity(),
            p: vec![Polynomial::zero()],
            q: Polynomial::constant(1.0),
            mode: Mode::Unconditional,
            quad: QuadratureSettings::default(),
            first_kernel_rule: FirstKernelRule::default(),
        };
        let t = 1.1;
        let ratio = cfg.theta1 / cfg.theta;
        let v = |a: f64| a * cfg.theta1 * (1.0 - ratio * t) + ratio;
        let r = cfg.r;
        let expect = (v(-r) * v(-r) - (2.0 * r).exp() * v(r) * v(r)) / (cfg.theta1 * (-2.0 * r));
        let got = bound_integrand(&cfg, t, Region::Outer).unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-13);
    }

    #[test]
    fn zero_r_is_singular() {
        let mut cfg = MollifierParams::theorem1().build::<f64>();
        cfg.r = 0.0;
        let err = bound_integrand(&cfg, 0.5, Region::Inner).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn scan_single_step_matches_bound() {
        let cfg = MollifierParams::theorem1().config::<f64>().unwrap();
        let table = scan_r(&cfg, 1.3025, 1.3025, 1).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[0].1, compute_bound(&cfg).unwrap().kappa);
        assert!(scan_r(&cfg, 1.6, 1.0, 5).is_err());
    }

    #[test]
    fn f32_bound_is_close() {
        // single precision loses about four digits to cancellation in the
        // reflected kernel term, so refinement cannot settle
        let mut cfg = MollifierParams::theorem1().config::<f32>().unwrap();
        cfg.quad.refine = false;
        let res = compute_bound(&cfg).unwrap();
        assert!((res.kappa - 0.4128).abs() < 2e-3, "kappa {}", res.kappa);
    }
}
