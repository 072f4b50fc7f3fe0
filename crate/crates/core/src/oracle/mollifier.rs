//! Finite mollifier coefficients `a_j` for integer lengths `y1 <= y`.

use super::arith::{ordered_tuple_sum, prime_logs};
use super::sieve::ArithmeticTables;
use crate::config::MollifierConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMollifier {
    pub y: u64,
    pub y1: u64,
    /// `coeffs[j]` for `0 <= j <= y`; slot 0 is unused and zero.
    pub coeffs: Vec<f64>,
}

impl FiniteMollifier {
    pub fn coeff(&self, j: u64) -> f64 {
        self.coeffs[j as usize]
    }

    /// A copy with every coefficient multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }
}

/// `a_j = mu(j) (P_1(log(y/j) / log y) + [j <= y1] sum_l S_l(j) / log^l y1
/// P_l(log(y1/j) / log y1))`, where `S_l` is the ordered distinct-prime tuple
/// sum of logs.
pub fn mollifier_coeffs(
    tables: &ArithmeticTables,
    y: u64,
    y1: u64,
    cfg: &MollifierConfig<f64>,
) -> Result<FiniteMollifier> {
    if y > tables.limit() {
        return Err(Error::Domain(format!(
            "mollifier length {y} exceeds sieve limit {}",
            tables.limit()
        )));
    }
    if y < 2 || y1 < 1 || y1 > y {
        return Err(Error::Domain(format!("need 1 <= y1 <= y and y >= 2, got y={y}, y1={y1}")));
    }
    let log_y = (y as f64).ln();
    let log_y1 = (y1 as f64).ln();
    let mut coeffs = vec![0.0; y as usize + 1];
    for j in 1..=y {
        let mu = tables.mobius(j);
        if mu == 0 {
            continue;
        }
        let lj = (j as f64).ln();
        let mut a = cfg.p1.eval((log_y - lj) / log_y);
        // y1 = 1 leaves only j = 1, where every tuple sum vanishes
        if j <= y1 && y1 > 1 {
            let logs = prime_logs(tables, j);
            let w = (log_y1 - lj) / log_y1;
            for l in 2..=cfg.i_max {
                if logs.len() < l {
                    break;
                }
                let s = ordered_tuple_sum(&logs, l) / log_y1.powi(l as i32);
                a += s * cfg.p_l(l)?.eval(w);
            }
        }
        coeffs[j as usize] = mu as f64 * a;
    }
    Ok(FiniteMollifier { y, y1, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MollifierParams;
    use crate::oracle::sieve::sieve;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basic_coefficients() {
        let t = sieve(1000).unwrap();
        let cfg = MollifierParams::theorem1().build::<f64>();
        let m = mollifier_coeffs(&t, 1000, 300, &cfg).unwrap();
        assert_eq!(m.coeff(1), 1.0);
        assert_eq!(m.coeff(4), 0.0);
        // prime p <= y1: no tuple sum of length >= 2
        let p = 97.0f64;
        let expect = -cfg.p1.eval((1000f64.ln() - p.ln()) / 1000f64.ln());
        assert_abs_diff_eq!(m.coeff(97), expect, epsilon = 1e-15);
        // squarefree j = y
        let m = mollifier_coeffs(&t, 998, 300, &cfg).unwrap();
        assert_abs_diff_eq!(m.coeff(998), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tuple_terms_enter_below_y1() {
        let t = sieve(1000).unwrap();
        let cfg = MollifierParams::theorem1().build::<f64>();
        let m = mollifier_coeffs(&t, 1000, 300, &cfg).unwrap();
        let (ly, ly1) = (1000f64.ln(), 300f64.ln());
        let j = 30.0f64;
        let logs = [2f64.ln(), 3f64.ln(), 5f64.ln()];
        let w = (ly1 - j.ln()) / ly1;
        let s2 = 2.0 * (logs[0] * logs[1] + logs[0] * logs[2] + logs[1] * logs[2]);
        let s3 = 6.0 * logs[0] * logs[1] * logs[2];
        let expect = -(cfg.p1.eval((ly - j.ln()) / ly)
            + s2 / ly1.powi(2) * cfg.p[0].eval(w)
            + s3 / ly1.powi(3) * cfg.p[1].eval(w));
        assert_abs_diff_eq!(m.coeff(30), expect, epsilon = 1e-14);
        // above y1 only P_1 remains
        let j = 330.0f64;
        // 330 = 2 3 5 11, so mu = +1
        assert_abs_diff_eq!(m.coeff(330), cfg.p1.eval((ly - j.ln()) / ly), epsilon = 1e-15);
    }
}
