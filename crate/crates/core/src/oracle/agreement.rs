//! Brute-force sums against their asymptotic main terms across decades of `y`.
//!
//! Normalizations:
//! - `E_alpha(j)`: `|brute - main| j log^2 y / (log log y)^3`
//! - `Sigma`: `|brute - main| log^2 y / (log log y)^5`

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lemmas::DecadeTrend;
use super::mollifier::mollifier_coeffs;
use super::sieve::ArithmeticTables;
use super::sums::{e_alpha_asymptotic, e_alpha_brute, sigma_brute, sigma_main_term, Lengths};
use crate::config::MollifierConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub y: u64,
    pub y1: u64,
    /// Squarefree `j` for `E_alpha`, absent for `Sigma`.
    pub j: Option<u64>,
    pub brute: Complex64,
    pub main: Complex64,
    pub abs_error: f64,
    pub scaled_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub rows: Vec<AgreementRow>,
    /// Per-`y` maximum of the scaled error.
    pub trend: DecadeTrend,
}

fn loglog(y: u64) -> f64 {
    (y as f64).ln().ln()
}

fn check_tables(y: u64, tables: &ArithmeticTables) -> Result<()> {
    if y > tables.limit() {
        return Err(Error::Domain(format!(
            "y = {y} exceeds sieve limit {}",
            tables.limit()
        )));
    }
    Ok(())
}

/// `|E_alpha(j) - main| j log^2 y / (log log y)^3`.
pub fn e_alpha_scale(j: u64, y: u64) -> f64 {
    let l = (y as f64).ln();
    j as f64 * l * l / loglog(y).powi(3).abs()
}

/// `|Sigma - main| log^2 y / (log log y)^5`.
pub fn sigma_scale(y: u64) -> f64 {
    let l = (y as f64).ln();
    l * l / loglog(y).powi(5).abs()
}

/// One row of the `E_alpha` comparison.
pub fn e_alpha_row(
    j: u64,
    alpha: Complex64,
    y: u64,
    cfg: &MollifierConfig<f64>,
    tables: &ArithmeticTables,
) -> Result<AgreementRow> {
    check_tables(y, tables)?;
    let len = Lengths::from_y(y, cfg);
    let m = mollifier_coeffs(tables, y, len.y1, cfg)?;
    let brute = e_alpha_brute(j, alpha, &m)?;
    let main = e_alpha_asymptotic(j, alpha, y, len.y1, cfg, tables)?;
    let abs_error = (brute - main).norm();
    Ok(AgreementRow {
        y,
        y1: len.y1,
        j: Some(j),
        brute,
        main,
        abs_error,
        scaled_error: abs_error * e_alpha_scale(j, y),
    })
}

/// `E_alpha(j)` for every squarefree `j` in `js` at each `y` in `ys`.
pub fn e_alpha_agreement(
    cfg: &MollifierConfig<f64>,
    ys: &[u64],
    js: &[u64],
    alpha: Complex64,
    tables: &ArithmeticTables,
) -> Result<AgreementReport> {
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for &y in ys {
        check_tables(y, tables)?;
        let len = Lengths::from_y(y, cfg);
        let m = mollifier_coeffs(tables, y, len.y1, cfg)?;
        let mut worst: f64 = 0.0;
        for &j in js.iter().filter(|&&j| j <= y && tables.is_squarefree(j)) {
            let brute = e_alpha_brute(j, alpha, &m)?;
            let main = e_alpha_asymptotic(j, alpha, y, len.y1, cfg, tables)?;
            let abs_error = (brute - main).norm();
            let scaled_error = abs_error * e_alpha_scale(j, y);
            worst = worst.max(scaled_error);
            rows.push(AgreementRow {
                y,
                y1: len.y1,
                j: Some(j),
                brute,
                main,
                abs_error,
                scaled_error,
            });
        }
        maxima.push(worst);
    }
    Ok(AgreementReport {
        rows,
        trend: DecadeTrend::new(ys.to_vec(), maxima),
    })
}

/// One row of the `Sigma` comparison at `alpha = a / log T`, `beta = b / log T`.
pub fn sigma_row(
    a: f64,
    b: f64,
    y: u64,
    cfg: &MollifierConfig<f64>,
    tables: &ArithmeticTables,
    force: bool,
) -> Result<AgreementRow> {
    check_tables(y, tables)?;
    let len = Lengths::from_y(y, cfg);
    let m = mollifier_coeffs(tables, y, len.y1, cfg)?;
    let alpha = Complex64::new(a / len.log_t, 0.0);
    let beta = Complex64::new(b / len.log_t, 0.0);
    let brute = sigma_brute(alpha, beta, &m, tables, force)?;
    let main = Complex64::new(sigma_main_term(a, b, cfg, len.log_t)?, 0.0);
    let abs_error = (brute - main).norm();
    Ok(AgreementRow {
        y,
        y1: len.y1,
        j: None,
        brute,
        main,
        abs_error,
        scaled_error: abs_error * sigma_scale(y),
    })
}

/// `Sigma(0, 0)` at each `y` in `ys`.
pub fn sigma_agreement(
    cfg: &MollifierConfig<f64>,
    ys: &[u64],
    tables: &ArithmeticTables,
    force: bool,
) -> Result<AgreementReport> {
    let rows = ys
        .iter()
        .map(|&y| sigma_row(0.0, 0.0, y, cfg, tables, force))
        .collect::<Result<Vec<_>>>()?;
    let maxima = rows.iter().map(|r| r.scaled_error).collect();
    Ok(AgreementReport {
        rows,
        trend: DecadeTrend::new(ys.to_vec(), maxima),
    })
}
