//! The run configuration file.
//!
//! TOML with a required `[mollifier]` section and optional `[quadrature]`,
//! `[oracle]` and `[optimize]` sections. Real numbers may be written as
//! fractions in strings (`theta = "4/7"`); the text is kept as written so a
//! report's config echo reproduces the run exactly.

use std::path::Path;

use critline::{
    FirstKernelRule, Mode, MollifierParams, OptimizeSettings, ParamMask, QuadratureSettings,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const THEOREM1: &str = include_str!("../configs/theorem1.toml");
pub const COROLLARY1: &str = include_str!("../configs/corollary1.toml");

/// A real number as written: a float or a string such as `"4/7"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    pub fn value(&self, field: &str) -> CliResult<f64> {
        let bad = || CliError::parse(format!("{field}: cannot read {self:?} as a real number"));
        let v = match self {
            Num::Float(v) => *v,
            Num::Text(s) => match s.split_once('/') {
                Some((n, d)) => {
                    let n: f64 = n.trim().parse().map_err(|_| bad())?;
                    let d: f64 = d.trim().parse().map_err(|_| bad())?;
                    if d == 0.0 {
                        return Err(bad());
                    }
                    n / d
                }
                None => s.trim().parse().map_err(|_| bad())?,
            },
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Float(v)
    }
}

fn values(list: &[Num], field: &str) -> CliResult<Vec<f64>> {
    list.iter()
        .enumerate()
        .map(|(k, n)| n.value(&format!("{field}[{k}]")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierSection {
    pub theta: Num,
    pub theta1: Num,
    #[serde(rename = "R")]
    pub r: Num,
    #[serde(rename = "I")]
    pub i: usize,
    pub p1_basis: Vec<Num>,
    /// `P_2, ..., P_I` without their (zero) constant terms.
    pub p_polys: Vec<Vec<Num>>,
    pub q_basis: Vec<Num>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_kernel_rule: Option<FirstKernelRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub nodes_t: usize,
    pub nodes_mu: usize,
    pub refine: bool,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSettings::default();
        Self {
            nodes_t: q.nodes_t,
            nodes_mu: q.nodes_mu,
            refine: q.refine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub y: u64,
    /// Lift the cost guards.
    #[serde(default)]
    pub y_limit_override: bool,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            y: 100_000,
            y_limit_override: false,
        }
    }
}

/// Names accepted in `optimize.mask`.
pub const MASK_GROUPS: [&str; 4] = ["R", "p1_basis", "p_polys", "q_basis"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Coefficient groups the optimizer may move.
    pub mask: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplex_scale: Option<f64>,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        let s = OptimizeSettings::default();
        Self {
            max_iters: s.max_iters,
            restarts: s.restarts,
            seed: s.seed,
            mask: MASK_GROUPS.iter().map(|s| s.to_string()).collect(),
            simplex_scale: None,
        }
    }
}

impl OptimizeSection {
    pub fn mask(&self) -> CliResult<ParamMask> {
        let mut mask = ParamMask::FROZEN;
        for name in &self.mask {
            match name.as_str() {
                "R" => mask.r = true,
                "p1_basis" => mask.p1_basis = true,
                "p_polys" => mask.p_polys = true,
                "q_basis" => mask.q_basis = true,
                other => {
                    return Err(CliError::parse(format!(
                        "optimize.mask: unknown group `{other}`, expected one of {MASK_GROUPS:?}"
                    )))
                }
            }
        }
        Ok(mask)
    }

    pub fn settings(&self) -> CliResult<OptimizeSettings> {
        let defaults = OptimizeSettings::default();
        Ok(OptimizeSettings {
            max_iters: self.max_iters,
            restarts: self.restarts,
            simplex_scale: self.simplex_scale.unwrap_or(defaults.simplex_scale),
            seed: self.seed,
            mask: self.mask()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub mollifier: MollifierSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub optimize: OptimizeSection,
}

impl RunConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::parse(e.to_string()))
    }

    /// Reads a file, or one of the bundled names `theorem1` / `corollary1`
    /// when no such file exists.
    pub fn load(spec: &str) -> CliResult<Self> {
        let path = Path::new(spec);
        if !path.exists() {
            match spec {
                "theorem1" => return Self::parse(THEOREM1),
                "corollary1" => return Self::parse(COROLLARY1),
                _ => {}
            }
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("{spec}: {e}")))?;
        Self::parse(&text).map_err(|e| CliError::parse(format!("{spec}: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Basis parameters, checked for shape. Numerical constraints are left to
    /// the core.
    pub fn params(&self) -> CliResult<MollifierParams> {
        let m = &self.mollifier;
        if m.i == 0 {
            return Err(CliError::parse("mollifier.I: must be at least 1"));
        }
        if m.p_polys.len() != m.i - 1 {
            return Err(CliError::parse(format!(
                "mollifier.p_polys: expected {} polynomials for I = {}, found {}",
                m.i - 1,
                m.i,
                m.p_polys.len()
            )));
        }
        let q = &self.quadrature;
        Ok(MollifierParams {
            theta: m.theta.value("mollifier.theta")?,
            theta1: m.theta1.value("mollifier.theta1")?,
            r: m.r.value("mollifier.R")?,
            i_max: m.i,
            p1_basis: values(&m.p1_basis, "mollifier.p1_basis")?,
            p_polys: m
                .p_polys
                .iter()
                .enumerate()
                .map(|(k, p)| values(p, &format!("mollifier.p_polys[{k}]")))
                .collect::<CliResult<_>>()?,
            q_basis: values(&m.q_basis, "mollifier.q_basis")?,
            mode: m.mode,
            quad: QuadratureSettings {
                nodes_t: q.nodes_t,
                nodes_mu: q.nodes_mu,
                refine: q.refine,
            },
            first_kernel_rule: m.first_kernel_rule.unwrap_or_default(),
        })
    }

    /// Replaces the mollifier and quadrature sections with `params`, keeping
    /// the rest.
    pub fn with_params(&self, params: &MollifierParams) -> Self {
        let nums = |v: &[f64]| v.iter().map(|&x| Num::Float(x)).collect::<Vec<_>>();
        let mut out = self.clone();
        let m = &mut out.mollifier;
        // keep fractions as written when the value is unchanged
        let old = self.params().ok();
        if old.as_ref().map(|p| p.theta) != Some(params.theta) {
            m.theta = params.theta.into();
        }
        if old.as_ref().map(|p| p.theta1) != Some(params.theta1) {
            m.theta1 = params.theta1.into();
        }
        m.r = params.r.into();
        m.i = params.i_max;
        m.p1_basis = nums(&params.p1_basis);
        m.p_polys = params.p_polys.iter().map(|p| nums(p)).collect();
        m.q_basis = nums(&params.q_basis);
        m.mode = params.mode;
        out.quadrature = QuadratureSection {
            nodes_t: params.quad.nodes_t,
            nodes_mu: params.quad.nodes_mu,
            refine: params.quad.refine,
        };
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_match_presets() {
        let t = RunConfigFile::parse(THEOREM1).unwrap().params().unwrap();
        assert_eq!(t, MollifierParams::theorem1());
        let c = RunConfigFile::parse(COROLLARY1).unwrap().params().unwrap();
        assert_eq!(c, MollifierParams::corollary1());
    }

    #[test]
    fn fractions_and_integers() {
        assert_eq!(Num::Text("4/7".into()).value("x").unwrap(), 4.0 / 7.0);
        assert_eq!(Num::Text(" 0.25 ".into()).value("x").unwrap(), 0.25);
        assert!(Num::Text("1/0".into()).value("x").is_err());
        assert!(Num::Text("abc".into()).value("x").is_err());
        let text = THEOREM1.replace("R = 1.3025", "R = 1");
        let cfg = RunConfigFile::parse(&text).unwrap();
        assert_eq!(cfg.params().unwrap().r, 1.0);
    }

    #[test]
    fn unknown_field_is_addressed() {
        let text = THEOREM1.replace("nodes_t", "nodes_tt");
        let err = RunConfigFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("nodes_tt"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn toml_roundtrip() {
        let cfg = RunConfigFile::parse(THEOREM1).unwrap();
        assert_eq!(RunConfigFile::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn mask_names() {
        let mut s = OptimizeSection::default();
        assert_eq!(s.mask().unwrap(), ParamMask::ALL);
        s.mask = vec![];
        assert_eq!(s.mask().unwrap(), ParamMask::FROZEN);
        s.mask = vec!["r".into()];
        assert!(s.mask().is_err());
    }
}
