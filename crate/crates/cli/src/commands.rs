//! The subcommands, independent of argument parsing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use critline::bound::QuadDiagnostics;
use critline::oracle::agreement::{e_alpha_row, sigma_row, AgreementRow};
use critline::oracle::lemmas::{verify_lemma, LemmaId, LemmaParams, LemmaReport};
use critline::oracle::sieve;
use critline::oracle::sums::{sigma_direct, Lengths, LINEAR_SUM_GUARD};
use critline::oracle::mollifier_coeffs;
use critline::{compute_bound, optimize, perturbed, scan_r, Bound, Error};
use num_complex::Complex64;
use serde::Serialize;

use crate::config_file::RunConfigFile;
use crate::error::{CliError, CliResult};
use crate::report::{fmt12, RunReport};

/// Everything a command produces. Nothing is written until the command has
/// finished.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    /// Human-readable summary for stdout.
    pub summary: String,
    /// Comma-separated table, if the command emits one.
    pub csv: Option<String>,
    /// Extra file to write, such as the optimizer's best configuration.
    pub sidecar: Option<(PathBuf, String)>,
    /// Set when the command ran but a check failed.
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(report: RunReport, summary: String) -> Self {
        Self {
            report,
            summary,
            csv: None,
            sidecar: None,
            failure: None,
        }
    }
}

/// Bound quantities without the config echo, which the report carries once.
#[derive(Debug, Clone, Serialize)]
pub struct BoundSummary {
    pub kappa: f64,
    pub mean_value: f64,
    pub integral_region1: f64,
    pub integral_region2: f64,
    pub diagnostics: QuadDiagnostics,
}

impl From<&Bound> for BoundSummary {
    fn from(b: &Bound) -> Self {
        Self {
            kappa: b.kappa,
            mean_value: b.mean_value,
            integral_region1: b.integral_region1,
            integral_region2: b.integral_region2,
            diagnostics: b.diagnostics.clone(),
        }
    }
}

fn bound_lines(out: &mut String, b: &BoundSummary) {
    let _ = writeln!(out, "kappa             {}", fmt12(b.kappa));
    let _ = writeln!(out, "mean_value        {}", fmt12(b.mean_value));
    let _ = writeln!(out, "integral_region1  {}", fmt12(b.integral_region1));
    let _ = writeln!(out, "integral_region2  {}", fmt12(b.integral_region2));
    let levels: Vec<String> = b
        .diagnostics
        .levels
        .iter()
        .map(|l| format!("{}x{}", l.nodes_t, l.nodes_mu))
        .collect();
    let _ = writeln!(
        out,
        "quadrature        {} (change {:.3e})",
        levels.join(" -> "),
        b.diagnostics.delta
    );
}

pub fn cmd_bound(config: &RunConfigFile) -> CliResult<Outcome> {
    let params = config.params()?;
    let res = compute_bound(&params.build::<f64>())?;
    let summary = BoundSummary::from(&res);
    let mut text = String::new();
    bound_lines(&mut text, &summary);
    let report = RunReport::new("bound", Some(config.clone()), &summary, ());
    Ok(Outcome::ok(report, text))
}

#[derive(Debug, Clone, Serialize)]
struct OptimizeResults {
    #[serde(flatten)]
    best: BoundSummary,
    start_kappa: f64,
    improved: bool,
    sidecar: String,
}

/// Runs the optimizer from the config, optionally after adding `perturb` to
/// every free coefficient, and prepares the best config as a sidecar file.
pub fn cmd_optimize(
    config: &RunConfigFile,
    perturb: Option<f64>,
    sidecar: &Path,
) -> CliResult<Outcome> {
    let settings = config.optimize.settings()?;
    let mut start = config.params()?;
    let mut echo = config.clone();
    if let Some(delta) = perturb {
        start = perturbed(&start, settings.mask, delta);
        echo = config.with_params(&start);
    }
    let start_kappa = compute_bound(&start.build::<f64>())?.kappa;
    let (best, res) = optimize(&start, &settings)?;
    let best_file = echo.with_params(&best);
    let results = OptimizeResults {
        best: BoundSummary::from(&res),
        start_kappa,
        improved: best != start,
        sidecar: sidecar.display().to_string(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "start kappa       {}", fmt12(start_kappa));
    bound_lines(&mut text, &results.best);
    let _ = writeln!(text, "best config       {}", results.sidecar);
    let report = RunReport::new("optimize", Some(echo), &results, ());
    let mut out = Outcome::ok(report, text);
    out.sidecar = Some((sidecar.to_path_buf(), best_file.to_toml()));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct ScanRow {
    #[serde(rename = "R")]
    r: f64,
    kappa: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ScanResults {
    param: String,
    rows: Vec<ScanRow>,
    argmax: f64,
    max_kappa: f64,
}

pub fn cmd_scan(
    config: &RunConfigFile,
    param: &str,
    min: f64,
    max: f64,
    steps: usize,
) -> CliResult<Outcome> {
    if param != "R" {
        return Err(CliError::parse(format!("--param: only R can be scanned, got `{param}`")));
    }
    if steps == 0 {
        return Err(CliError::parse("--steps: must be at least 1"));
    }
    if !(min.is_finite() && max.is_finite()) || min > max || (steps > 1 && min == max) {
        return Err(CliError::parse(format!(
            "--min/--max: need min < max, got [{min}, {max}]"
        )));
    }
    let cfg = config.params()?.build::<f64>();
    let rows: Vec<ScanRow> = scan_r(&cfg, min, max, steps)?
        .into_iter()
        .map(|(r, kappa)| ScanRow { r, kappa })
        .collect();
    let best = rows
        .iter()
        .max_by(|a, b| a.kappa.total_cmp(&b.kappa))
        .expect("at least one row");
    let results = ScanResults {
        param: param.into(),
        argmax: best.r,
        max_kappa: best.kappa,
        rows: rows.clone(),
    };
    let mut csv = String::from("R,kappa\n");
    for row in &rows {
        let _ = writeln!(csv, "{},{}", fmt12(row.r), fmt12(row.kappa));
    }
    let text = format!(
        "scanned R over [{}, {}] in {steps} steps\nargmax R          {}\nmax kappa         {}\n",
        fmt12(min),
        fmt12(max),
        fmt12(results.argmax),
        fmt12(results.max_kappa)
    );
    let report = RunReport::new("scan", Some(config.clone()), &results, ());
    let mut out = Outcome::ok(report, text);
    out.csv = Some(csv);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct VerifyResults {
    lemmas: Vec<LemmaId>,
    y: u64,
    seed: u64,
    sieve_limit: u64,
    all_pass: bool,
}

pub fn cmd_verify(lemmas: &[LemmaId], y: u64, seed: u64) -> CliResult<Outcome> {
    if y < 2 {
        return Err(CliError::parse("--y: must be at least 2"));
    }
    let params = LemmaParams {
        seed,
        y,
        ..LemmaParams::default()
    };
    let limit = params.sieve_limit(lemmas);
    let tables = sieve(limit)?;
    let reports: Vec<LemmaReport> = lemmas
        .iter()
        .map(|&id| verify_lemma(id, &params, &tables))
        .collect();
    let all_pass = reports.iter().all(|r| r.pass);
    let mut text = String::new();
    for r in &reports {
        let fitted = r
            .fitted_constant
            .map(|c| format!(" fitted {}", fmt12(c)))
            .unwrap_or_default();
        let _ = writeln!(
            text,
            "{:<8} {}  max residual {:.3e} (threshold {:.1e}){fitted}",
            r.id.to_string(),
            if r.pass { "pass" } else { "FAIL" },
            r.max_residual,
            r.threshold
        );
    }
    let results = VerifyResults {
        lemmas: lemmas.to_vec(),
        y,
        seed,
        sieve_limit: limit,
        all_pass,
    };
    let report = RunReport::new("verify", None, &results, &reports);
    let mut out = Outcome::ok(report, text);
    if !all_pass {
        let failed: Vec<String> = reports
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.id.to_string())
            .collect();
        out.failure = Some(CliError::Failed(format!("failed: {}", failed.join(", "))));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleWhat {
    EAlpha,
    Sigma,
}

impl std::str::FromStr for OracleWhat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "e_alpha" => Ok(OracleWhat::EAlpha),
            "sigma" => Ok(OracleWhat::Sigma),
            other => Err(format!("unknown oracle `{other}`, expected e_alpha or sigma")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleArgs {
    pub what: OracleWhat,
    pub y: Option<u64>,
    pub j: u64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub force: bool,
    /// Include the quadratic direct gcd sum for `sigma`.
    pub direct: bool,
}

#[derive(Debug, Clone, Serialize)]
struct OracleResults {
    what: &'static str,
    y: u64,
    y1: u64,
    log_t: f64,
    normalization: &'static str,
    row: AgreementRow,
    /// `sigma` only: the direct gcd double sum.
    #[serde(skip_serializing_if = "Option::is_none")]
    direct: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt12(z.re)
    } else {
        format!("{}{:+}i", fmt12(z.re), fmt12(z.im))
    }
}

pub fn cmd_oracle(config: &RunConfigFile, args: &OracleArgs) -> CliResult<Outcome> {
    let y = args.y.unwrap_or(config.oracle.y);
    let force = args.force || config.oracle.y_limit_override;
    if y < 2 {
        return Err(CliError::parse("--y: must be at least 2"));
    }
    if y > LINEAR_SUM_GUARD && !force {
        return Err(Error::CostGuard {
            what: "oracle sums",
            y,
            limit: LINEAR_SUM_GUARD,
        }
        .into());
    }
    let cfg = config.params()?.config::<f64>()?;
    let len = Lengths::from_y(y, &cfg);
    let results = match args.what {
        OracleWhat::EAlpha => {
            let tables = sieve(y)?;
            if args.j == 0 || args.j > y || !tables.is_squarefree(args.j) {
                return Err(CliError::parse(format!(
                    "--j: need a squarefree j in 1..={y}, got {}",
                    args.j
                )));
            }
            OracleResults {
                what: "e_alpha",
                y,
                y1: len.y1,
                log_t: len.log_t,
                normalization: "j log^2 y / (log log y)^3",
                row: e_alpha_row(args.j, args.alpha, y, &cfg, &tables)?,
                direct: None,
                ratio: None,
            }
        }
        OracleWhat::Sigma => {
            if args.alpha.im != 0.0 || args.beta.im != 0.0 {
                return Err(CliError::parse(
                    "--alpha/--beta: the sigma main term takes real shifts",
                ));
            }
            let tables = sieve(y)?;
            let direct = if args.direct {
                let m = mollifier_coeffs(&tables, y, len.y1, &cfg)?;
                Some(sigma_direct(args.alpha, args.beta, &m, force)?)
            } else {
                None
            };
            let row = sigma_row(
                args.alpha.re * len.log_t,
                args.beta.re * len.log_t,
                y,
                &cfg,
                &tables,
                force,
            )?;
            OracleResults {
                what: "sigma",
                y,
                y1: len.y1,
                log_t: len.log_t,
                normalization: "log^2 y / (log log y)^5",
                ratio: Some(row.brute.re / row.main.re),
                row,
                direct,
            }
        }
    };
    let mut text = String::new();
    let _ = writeln!(text, "{} at y = {}, y1 = {}", results.what, y, results.y1);
    if let Some(j) = results.row.j {
        let _ = writeln!(text, "j                 {j}");
    }
    let _ = writeln!(text, "brute             {}", fmt_c(results.row.brute));
    if let Some(d) = results.direct {
        let _ = writeln!(text, "direct            {}", fmt_c(d));
    }
    let _ = writeln!(text, "main term         {}", fmt_c(results.row.main));
    let _ = writeln!(text, "abs error         {}", fmt12(results.row.abs_error));
    let _ = writeln!(
        text,
        "scaled error      {} (times {})",
        fmt12(results.row.scaled_error),
        results.normalization
    );
    let report = RunReport::new("oracle", Some(config.clone()), &results, ());
    Ok(Outcome::ok(report, text))
}
