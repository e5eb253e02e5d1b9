//! Sampling the measure of maximal entropy and estimating `χ_a`.
//!
//! The measure of maximal entropy `μ` is the limit of the balanced pullbacks
//! `d⁻ⁿ (fⁿ)* δ_z`, so a path that repeatedly jumps to a uniformly chosen
//! preimage ends, after a burn-in, at a `μ`-distributed point. `χ_a` is the
//! `μ`-mean of `log ‖f'‖`.
//!
//! Forward orbits are a poor way to sample `μ` in floating point: the Julia
//! set repels, so a computed orbit started on it drifts into the Fatou set
//! after roughly `53 ln 2 / χ` steps unless the Julia set is the whole
//! sphere. [`birkhoff_from_mu`] sidesteps this by reading one long backward
//! path in reverse, which is an exact forward orbit of its last point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::knorm::chain_norm_log;
use crate::rational::RationalMap;
use crate::sphere::{chordal_distance, SpherePoint};
use crate::sum::mean_stderr;
use crate::{Error, Result};

pub const DEFAULT_BURN_IN: usize = 40;
pub const DEFAULT_PATHS: usize = 4000;
pub const MIN_BURN_IN: usize = 20;
pub const MIN_BIRKHOFF_STEPS: usize = 100;
pub const BIRKHOFF_BLOCKS: usize = 10;
/// `‖f'‖` below this is treated as this (and flagged) when averaging logs.
pub const WINSOR_FLOOR: f64 = 1e-12;
pub const MAX_FLAGGED_FRACTION: f64 = 0.01;
pub const MAX_RESTARTS: usize = 10;

/// Generic start `0.5 + 0.5i`.
const START: (f64, f64) = (0.5, 0.5);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuSample {
    pub points: Vec<SpherePoint>,
    pub seed: u64,
    pub burn_in: usize,
    pub n_paths: usize,
    /// Backward steps taken before each point was emitted.
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiMethod {
    EnsembleBackward,
    BirkhoffForward,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub method: ChiMethod,
    /// Samples whose `log ‖f'‖` was clamped at `log WINSOR_FLOOR`.
    #[serde(skip)]
    pub flagged: usize,
}

impl ChiEstimate {
    /// `|a - b| ≤ k · sqrt(σa² + σb²)`, plus a few ulps so that two
    /// zero-variance estimates of one constant agree.
    pub fn agrees_with(&self, other: &ChiEstimate, k: f64) -> bool {
        let ulps = 64.0 * f64::EPSILON * self.value.abs().max(other.value.abs()).max(1.0);
        (self.value - other.value).abs() <= k * self.stderr.hypot(other.stderr) + ulps
    }
}

/// The `d` preimages of `w` under `f`, with multiplicity.
pub fn preimages(f: &RationalMap, w: &SpherePoint) -> Result<Vec<SpherePoint>> {
    f.preimages(w)
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// A point is exceptional if its grand backward orbit has at most two points.
fn is_exceptional(f: &RationalMap, z: &SpherePoint) -> Result<bool> {
    let mut set = vec![*z];
    let mut frontier = vec![*z];
    for _ in 0..2 {
        let mut next = Vec::new();
        for w in &frontier {
            for p in f.preimages(w)? {
                if set.iter().all(|q| chordal_distance(q, &p) > 1e-9) {
                    set.push(p);
                    next.push(p);
                }
            }
        }
        if set.len() > 2 {
            return Ok(false);
        }
        frontier = next;
    }
    Ok(true)
}

/// The fixed start, nudged off exceptional points.
fn start_point(f: &RationalMap) -> Result<SpherePoint> {
    for k in 0..=MAX_RESTARTS {
        let t = k as f64;
        let z = SpherePoint::from_re_im(START.0 + 0.0137 * t * t.cos(), START.1 + 0.0137 * t * t.sin());
        if !is_exceptional(f, &z)? {
            return Ok(z);
        }
    }
    Err(Error::Exceptional(format!("no admissible start after {MAX_RESTARTS} restarts")))
}

/// `steps` uniformly random backward steps from `z`; calls `visit` on every
/// point after the start.
fn backward_path<R: Rng>(
    f: &RationalMap,
    z: SpherePoint,
    steps: usize,
    rng: &mut R,
    mut visit: impl FnMut(&SpherePoint),
) -> Result<SpherePoint> {
    let d = f.degree();
    let mut z = z;
    for _ in 0..steps {
        let pre = f.preimages(&z)?;
        z = pre[rng.random_range(0..d)];
        visit(&z);
    }
    Ok(z)
}

/// `n_paths` independent draws from `μ` by inverse iteration.
pub fn mu_sample(f: &RationalMap, n_paths: usize, burn_in: usize, seed: u64) -> Result<MuSample> {
    if burn_in < MIN_BURN_IN {
        return Err(Error::InvalidParameter(format!("burn_in must be at least {MIN_BURN_IN}")));
    }
    if n_paths == 0 {
        return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
    }
    let z0 = start_point(f)?;
    let points = (0..n_paths)
        .into_par_iter()
        .map(|i| backward_path(f, z0, burn_in, &mut path_rng(seed, i), |_| {}))
        .collect::<Result<Vec<_>>>()?;
    Ok(MuSample { points, seed, burn_in, n_paths, depth: burn_in })
}

/// `log ‖f'(p)‖` clamped below at `log WINSOR_FLOOR`; the flag is set when clamped.
fn clamped_log_norm(f: &RationalMap, p: &SpherePoint) -> (f64, bool) {
    let v = f.spherical_norm_deriv(p);
    if v < WINSOR_FLOOR {
        (WINSOR_FLOOR.ln(), true)
    } else {
        (v.ln(), false)
    }
}

fn winsorized_logs(f: &RationalMap, points: &[SpherePoint]) -> Result<(Vec<f64>, usize)> {
    let mut flagged = 0;
    let logs: Vec<f64> = points
        .iter()
        .map(|p| {
            let (l, flag) = clamped_log_norm(f, p);
            flagged += flag as usize;
            l
        })
        .collect();
    if flagged as f64 > MAX_FLAGGED_FRACTION * points.len() as f64 {
        return Err(Error::TooManyFlagged { flagged, total: points.len() });
    }
    Ok((logs, flagged))
}

/// `χ_a` as the mean of `log ‖f'‖` over a [`mu_sample`].
pub fn chi_average(f: &RationalMap, n_paths: usize, burn_in: usize, seed: u64) -> Result<ChiEstimate> {
    let sample = mu_sample(f, n_paths, burn_in, seed)?;
    chi_from_sample(f, &sample)
}

pub fn chi_from_sample(f: &RationalMap, sample: &MuSample) -> Result<ChiEstimate> {
    let (logs, flagged) = winsorized_logs(f, &sample.points)?;
    let (value, stderr) = mean_stderr(&logs);
    Ok(ChiEstimate { value, stderr, n_samples: logs.len(), method: ChiMethod::EnsembleBackward, flagged })
}

/// Mean and block-means standard error.
fn block_estimate(logs: &[f64], flagged: usize) -> ChiEstimate {
    let n = logs.len();
    let len = n / BIRKHOFF_BLOCKS;
    let blocks: Vec<f64> = logs.chunks(len).take(BIRKHOFF_BLOCKS).map(|b| mean_stderr(b).0).collect();
    let (_, stderr) = mean_stderr(&blocks);
    let (value, _) = mean_stderr(logs);
    ChiEstimate { value, stderr, n_samples: n, method: ChiMethod::BirkhoffForward, flagged }
}

/// `(1/n) log ‖(fⁿ)'(start)‖` along the computed forward orbit, with a
/// standard error from `BIRKHOFF_BLOCKS` block means.
///
/// An orbit through a critical point gives `value = -∞`, flagged.
pub fn birkhoff_forward(f: &RationalMap, start: &SpherePoint, n_steps: usize) -> Result<ChiEstimate> {
    if n_steps < MIN_BIRKHOFF_STEPS {
        return Err(Error::InvalidParameter(format!("n_steps must be at least {MIN_BIRKHOFF_STEPS}")));
    }
    let mut logs = Vec::with_capacity(n_steps);
    let mut q = *start;
    for _ in 0..n_steps {
        let (v, next) = f.norm_and_image(&q);
        if v == 0.0 {
            return Ok(ChiEstimate {
                value: f64::NEG_INFINITY,
                stderr: f64::INFINITY,
                n_samples: logs.len() + 1,
                method: ChiMethod::BirkhoffForward,
                flagged: 1,
            });
        }
        logs.push(v.ln());
        q = next;
    }
    let mut est = block_estimate(&logs, 0);
    est.value = chain_norm_log(f, n_steps, start) / n_steps as f64;
    Ok(est)
}

/// Forward Birkhoff average along an exact orbit of a `μ`-sampled point.
///
/// One backward path of `burn_in + n_steps` steps is drawn; read backwards
/// from its end, its last `n_steps + 1` points form a forward orbit, and the
/// average of `log ‖f'‖` over the first `n_steps` of them is returned.
pub fn birkhoff_from_mu(f: &RationalMap, n_steps: usize, burn_in: usize, seed: u64) -> Result<ChiEstimate> {
    if n_steps < MIN_BIRKHOFF_STEPS {
        return Err(Error::InvalidParameter(format!("n_steps must be at least {MIN_BIRKHOFF_STEPS}")));
    }
    if burn_in < MIN_BURN_IN {
        return Err(Error::InvalidParameter(format!("burn_in must be at least {MIN_BURN_IN}")));
    }
    let z0 = start_point(f)?;
    let mut rng = path_rng(seed, 0);
    let mut path = Vec::with_capacity(n_steps);
    let mut step = 0;
    backward_path(f, z0, burn_in + n_steps, &mut rng, |p| {
        step += 1;
        if step > burn_in {
            path.push(*p);
        }
    })?;
    path.reverse();
    let (logs, flagged) = winsorized_logs(f, &path)?;
    Ok(block_estimate(&logs, flagged))
}
