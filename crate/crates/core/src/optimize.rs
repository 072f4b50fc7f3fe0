//! Derivative-free search over mollifier coefficients.
//!
//! The search runs in the basis coordinates of [`MollifierParams`], so every
//! candidate satisfies the structural constraints by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{compute_bound, BoundResult};
use crate::config::MollifierParams;
use crate::error::Result;

/// Which coefficient groups the optimizer may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamMask {
    pub r: bool,
    pub p1_basis: bool,
    pub p_polys: bool,
    pub q_basis: bool,
}

impl ParamMask {
    pub const ALL: Self = Self {
        r: true,
        p1_basis: true,
        p_polys: true,
        q_basis: true,
    };
    pub const FROZEN: Self = Self {
        r: false,
        p1_basis: false,
        p_polys: false,
        q_basis: false,
    };
}

impl Default for ParamMask {
    fn default() -> Self {
        Self::ALL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSettings {
    /// Iteration cap for each Nelder–Mead run.
    pub max_iters: usize,
    /// Extra runs started from the best point so far.
    pub restarts: usize,
    /// Initial simplex edge, relative to `1 + |x_i|`.
    pub simplex_scale: f64,
    pub seed: u64,
    pub mask: ParamMask,
}

impl Default for OptimizeSettings {
    fn default() -> Self {
        Self {
            max_iters: 400,
            restarts: 3,
            simplex_scale: 0.05,
            seed: 0,
            mask: ParamMask::ALL,
        }
    }
}

/// Free coordinates of `params` in a fixed order: `R`, `P_1` basis, `P_l`
/// coefficients (by `l`, then by power), `Q` basis.
pub fn flatten(params: &MollifierParams, mask: ParamMask) -> Vec<f64> {
    let mut x = Vec::new();
    if mask.r {
        x.push(params.r);
    }
    if mask.p1_basis {
        x.extend_from_slice(&params.p1_basis);
    }
    if mask.p_polys {
        for p in &params.p_polys {
            x.extend_from_slice(p);
        }
    }
    if mask.q_basis {
        x.extend_from_slice(&params.q_basis);
    }
    x
}

/// Inverse of [`flatten`]: overwrites the free coordinates of `base`.
pub fn unflatten(base: &MollifierParams, mask: ParamMask, x: &[f64]) -> MollifierParams {
    let mut out = base.clone();
    let mut it = x.iter().copied();
    let mut fill = |dst: &mut [f64]| {
        for v in dst {
            *v = it.next().expect("coordinate vector too short");
        }
    };
    if mask.r {
        fill(std::slice::from_mut(&mut out.r));
    }
    if mask.p1_basis {
        fill(&mut out.p1_basis);
    }
    if mask.p_polys {
        for p in &mut out.p_polys {
            fill(p);
        }
    }
    if mask.q_basis {
        fill(&mut out.q_basis);
    }
    out
}

/// Adds `delta` to every free coordinate.
pub fn perturbed(params: &MollifierParams, mask: ParamMask, delta: f64) -> MollifierParams {
    let x: Vec<f64> = flatten(params, mask).iter().map(|v| v + delta).collect();
    unflatten(params, mask, &x)
}

/// Minimizes `f` from `x0` with Nelder–Mead.
///
/// Restarts rebuild the simplex around the incumbent with edge signs drawn
/// from `rng`. A candidate replaces the incumbent only when strictly better.
pub fn nelder_mead<F>(
    f: F,
    x0: &[f64],
    settings: &OptimizeSettings,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut best = (x0.to_vec(), f(x0));
    if x0.is_empty() {
        return best;
    }
    for _ in 0..=settings.restarts {
        let signs: Vec<f64> = (0..x0.len())
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let (x, v) = nm_run(&f, &best.0, &signs, settings);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

fn nm_run<F>(f: &F, start: &[f64], signs: &[f64], settings: &OptimizeSettings) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;
    let n = start.len();

    let mut points: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += signs[i] * settings.simplex_scale * (1.0 + start[i].abs());
        points.push(p);
    }
    let mut values: Vec<f64> = points.par_iter().map(|p| sanitize(f(p))).collect();

    for _ in 0..settings.max_iters {
        // stable sort keeps earlier vertices first on ties
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = points[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&points[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.abs() < 1e-12 && size < 1e-9 {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| points[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(ALPHA);
        let fr = sanitize(f(&xr));
        if fr < values[0] {
            let xe = along(GAMMA);
            let fe = sanitize(f(&xe));
            if fe < fr {
                points[n] = xe;
                values[n] = fe;
            } else {
                points[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            points[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(RHO);
            let fc = sanitize(f(&xc));
            (xc, fc)
        } else {
            let xc = along(-RHO);
            let fc = sanitize(f(&xc));
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            points[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = points[0].clone();
        let shrunk: Vec<Vec<f64>> = points[1..]
            .iter()
            .map(|p| best.iter().zip(p).map(|(b, x)| b + SIGMA * (x - b)).collect())
            .collect();
        let shrunk_values: Vec<f64> = shrunk.par_iter().map(|p| sanitize(f(p))).collect();
        for (k, (p, v)) in shrunk.into_iter().zip(shrunk_values).enumerate() {
            points[k + 1] = p;
            values[k + 1] = v;
        }
    }
    let mut best = 0;
    for k in 1..=n {
        if values[k] < values[best] {
            best = k;
        }
    }
    (points[best].clone(), values[best])
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// `-kappa` for a basis point, `+inf` when the point is invalid or the bound
/// fails. Uses the configured nodes without refinement.
fn objective(base: &MollifierParams, mask: ParamMask, x: &[f64]) -> f64 {
    let mut params = unflatten(base, mask, x);
    params.quad.refine = false;
    match params.config::<f64>().and_then(|c| compute_bound(&c)) {
        Ok(res) => -res.kappa,
        Err(_) => f64::INFINITY,
    }
}

/// Searches the masked coefficients for a larger `kappa`.
///
/// The final candidate is re-evaluated with refinement; if it does not beat
/// the start strictly, the start and its result are returned.
pub fn optimize(
    start: &MollifierParams,
    settings: &OptimizeSettings,
) -> Result<(MollifierParams, BoundResult<f64>)> {
    let base_result = compute_bound(&start.config::<f64>()?)?;
    let x0 = flatten(start, settings.mask);
    if x0.is_empty() {
        return Ok((start.clone(), base_result));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let (x, _) = nelder_mead(|x| objective(start, settings.mask, x), &x0, settings, &mut rng);
    let candidate = unflatten(start, settings.mask, &x);
    let refined = candidate.config::<f64>().and_then(|c| compute_bound(&c));
    match refined {
        Ok(res) if res.kappa > base_result.kappa => Ok((candidate, res)),
        _ => Ok((start.clone(), base_result)),
    }
}
