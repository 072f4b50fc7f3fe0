//! Lower bounds for the proportion of zeta zeros on the critical line by the
//! mollifier method, plus brute-force arithmetic oracles for the asymptotic
//! formulas behind them.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the bottom fix it to `f64`, which is what the tolerances in the
//! tests assume.

pub mod bound;
pub mod config;
pub mod error;
pub mod jet;
pub mod kernel;
pub mod optimize;
pub mod oracle;
pub mod polynomial;
pub mod quadrature;
pub mod scalar;

pub use bound::{compute_bound, scan_r, BoundResult, Region};
pub use config::{FirstKernelRule, Mode, MollifierConfig, MollifierParams, QuadratureSettings};
pub use error::{Error, ErrorClass, Result};
pub use jet::{apply_operator, Jet2};
pub use kernel::Kernel;
pub use optimize::{optimize, perturbed, OptimizeSettings, ParamMask};
pub use polynomial::{check_constraints, ConstraintReport, Polynomial};
pub use scalar::Scalar;

pub type Poly = Polynomial<f64>;
pub type Jet = Jet2<f64>;
pub type Config = MollifierConfig<f64>;
pub type Bound = BoundResult<f64>;
