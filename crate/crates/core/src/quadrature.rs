//! Gauss–Legendre rules.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::scalar::{KahanSum, Scalar};

/// Nodes and weights on `[-1, 1]`, computed in `f64` by Newton iteration on
/// the Legendre recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            // Tricomi initial guess for the i-th root from the right
            let k = i as f64 + 1.0;
            let mut x = ((k - 0.25) / (nf + 0.5) * std::f64::consts::PI).cos()
                * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared cached rule of size `n`.
    pub fn cached(n: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(x, w)` pairs mapped onto `[lo, hi]`.
    pub fn mapped<T: Scalar>(&self, lo: T, hi: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (hi - lo) / T::of(2.0);
        let mid = (hi + lo) / T::of(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * T::of(x), half * T::of(w)))
    }

    /// Integrates a real function over `[lo, hi]`.
    pub fn integrate<T: Scalar>(&self, lo: T, hi: T, mut f: impl FnMut(T) -> T) -> T {
        let mut acc = KahanSum::new();
        for (x, w) in self.mapped(lo, hi) {
            acc.add(w * f(x));
        }
        acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 48, 64, 128, 256] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights().iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_2n_minus_1() {
        let g = GaussLegendre::new(6);
        for k in 0..12 {
            let exact = 1.0 / (k as f64 + 1.0);
            let got = g.integrate(0.0, 1.0, |x: f64| x.powi(k));
            assert_abs_diff_eq!(got, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn smooth_integrand() {
        let g = GaussLegendre::cached(20);
        let got = g.integrate(0.0, 2.0, |x: f64| x.exp());
        assert_abs_diff_eq!(got, 2f64.exp() - 1.0, epsilon = 1e-13);
        let got32 = g.integrate(0.0f32, 1.0, |x| x * x);
        assert!((got32 - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let g = GaussLegendre::new(9);
        for w in g.nodes().windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..9 {
            assert_abs_diff_eq!(g.nodes()[i], -g.nodes()[8 - i], epsilon = 1e-15);
        }
    }
}
