//! The maximal spherical derivative `K(f) = max ‖f'‖`, its iterates, and
//! related integrals.
//!
//! Maximization is a grid scan followed by Nelder–Mead polishing in the
//! chart of each seed. The reported value is attained at a returned point,
//! so it is always a lower bound for the true maximum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::rational::RationalMap;
use crate::simplex::{self, NmOptions};
use crate::sphere::{chordal_distance, make_grid, quadrature, GridScheme, SphereGrid, SpherePoint};
use crate::sum::compensated_sum;
use crate::{Error, Result};

pub const MIN_K_GRID: usize = 100;
pub const POLISH_TOL: f64 = 1e-12;
pub const POLISH_MAX_STEPS: usize = 500;
/// Relative tolerance in value for membership in the argmax set.
pub const ARGMAX_VALUE_TOL: f64 = 1e-6;
/// Chordal radius below which argmax points are merged.
pub const ARGMAX_MERGE_DIST: f64 = 1e-6;
/// Upper limit for default grids of iterates.
pub const MAX_DEFAULT_GRID: usize = 200_000;
pub const MIN_K_INNER_GRID: usize = 2000;
pub const MIN_K_INNER_SEEDS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KReport {
    pub value: f64,
    #[serde(rename = "argmax")]
    pub argmax_points: Vec<SpherePoint>,
    pub grid_size: usize,
    pub n_seeds: usize,
    pub polish_tol: f64,
}

/// `max(100, 50 d²)`: enough nodes to land in the basin of each peak of
/// `‖f'‖`, whose width scales like `1/d`.
pub fn default_grid_size(degree: usize) -> usize {
    let d = degree.min(1 << 16);
    (50 * d * d).clamp(MIN_K_GRID, MAX_DEFAULT_GRID)
}

/// Default grid for `K(fⁿ)`, sized for the effective degree `dⁿ`, capped.
pub fn default_iterate_grid_size(degree: usize, n: usize) -> usize {
    let eff = (degree as u128).saturating_pow(n.min(64) as u32).min(1 << 16) as usize;
    default_grid_size(eff)
}

/// `max(100, 50 k²)` nodes, capped: resolves peaks of width `1/k`.
pub fn grid_for_scale(k: f64) -> usize {
    let k = k.clamp(1.0, 1e4);
    ((50.0 * k * k).round() as usize).clamp(MIN_K_GRID, MAX_DEFAULT_GRID)
}

pub(crate) struct Maximum {
    pub log_value: f64,
    /// Deduplicated near-maximal points, best first.
    pub points: Vec<SpherePoint>,
}

/// Maximizes `obj` (a log-scale objective) by grid scan plus simplex polish
/// of the best `n_seeds` separated grid nodes and every point in `extra`.
pub(crate) fn maximize_log<F>(obj: F, grid: &SphereGrid, n_seeds: usize, extra: &[SpherePoint]) -> Result<Maximum>
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    maximize_log_with(obj, grid, n_seeds, extra, &POLISH)
}

const POLISH: NmOptions = NmOptions { ftol: POLISH_TOL, xtol: 1e-9, max_iter: POLISH_MAX_STEPS };
/// Cheaper polish for the inner objective of [`min_k_search`]; the final
/// value is recomputed with the full polish.
const SEARCH_POLISH: NmOptions = NmOptions { ftol: 1e-9, xtol: 1e-6, max_iter: 200 };

fn maximize_log_with<F>(
    obj: F,
    grid: &SphereGrid,
    n_seeds: usize,
    extra: &[SpherePoint],
    opts: &NmOptions,
) -> Result<Maximum>
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    let values: Vec<f64> = grid.points().par_iter().map(&obj).collect();
    if let Some(i) = values.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::Internal(format!(
            "non-finite derivative norm at grid node {i} ({})",
            grid.points()[i]
        )));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let sep = 3.0 * grid.spacing();
    let mut seeds: Vec<SpherePoint> = Vec::with_capacity(n_seeds + extra.len());
    for &i in &order {
        if seeds.len() >= n_seeds {
            break;
        }
        let p = grid.points()[i];
        if seeds.iter().all(|s| chordal_distance(s, &p) > sep) {
            seeds.push(p);
        }
    }
    seeds.extend_from_slice(extra);

    let spacing = grid.spacing();
    let polished: Vec<(f64, SpherePoint)> = seeds.par_iter().map(|s| polish(&obj, s, spacing, opts)).collect();

    let best = polished.iter().map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
    let best = best.max(values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let mut near: Vec<(f64, SpherePoint)> = polished
        .into_iter()
        .filter(|(v, _)| best == f64::NEG_INFINITY || 1.0 - (v - best).exp() <= ARGMAX_VALUE_TOL)
        .collect();
    near.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut points: Vec<SpherePoint> = Vec::new();
    for (_, p) in near {
        if points.iter().all(|q| chordal_distance(q, &p) > ARGMAX_MERGE_DIST) {
            points.push(p);
        }
    }
    Ok(Maximum { log_value: best, points })
}

fn polish<F>(obj: &F, seed: &SpherePoint, spacing: f64, opts: &NmOptions) -> (f64, SpherePoint)
where
    F: Fn(&SpherePoint) -> f64,
{
    let chart = seed.chart();
    let c0 = seed.coord();
    let at = |x: &[f64]| SpherePoint::from_chart(chart, Complex64::new(x[0], x[1]));
    let step = spacing * (1.0 + c0.norm_sqr());
    let r = simplex::minimize(|x| -obj(&at(x)), &[c0.re, c0.im], &[step, step], opts);
    let seed_value = obj(seed);
    if -r.fx > seed_value {
        (-r.fx, at(&r.x))
    } else {
        (seed_value, *seed)
    }
}

fn fibonacci(grid_size: usize) -> Result<SphereGrid> {
    if grid_size < MIN_K_GRID {
        return Err(Error::InvalidParameter(format!(
            "grid size {grid_size} is below the minimum {MIN_K_GRID}"
        )));
    }
    make_grid(grid_size, GridScheme::Fibonacci)
}

fn report(m: Maximum, grid: &SphereGrid, n_seeds: usize) -> KReport {
    KReport {
        value: m.log_value.exp(),
        argmax_points: m.points,
        grid_size: grid.size(),
        n_seeds,
        polish_tol: POLISH_TOL,
    }
}

/// `K(f)`.
pub fn k_norm(f: &RationalMap, grid_size: usize, n_seeds: usize) -> Result<KReport> {
    k_norm_iterate(f, 1, grid_size, n_seeds)
}

/// `K(f)` on a caller-supplied grid.
pub fn k_norm_on_grid(f: &RationalMap, grid: &SphereGrid, n_seeds: usize) -> Result<KReport> {
    let m = maximize_log(|p| chain_norm_log(f, 1, p), grid, n_seeds, &fixed_points(f))?;
    Ok(report(m, grid, n_seeds))
}

/// `Σ_{j<n} log ‖f'(fʲ(p))‖`, the log of `‖(fⁿ)'(p)‖` by the chain rule.
///
/// Returns `-∞` when the orbit passes through a critical point.
pub fn chain_norm_log(f: &RationalMap, n: usize, p: &SpherePoint) -> f64 {
    let mut q = *p;
    let mut acc = 0.0;
    for _ in 0..n {
        let (v, next) = f.norm_and_image(&q);
        if v == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += v.ln();
        q = next;
    }
    acc
}

/// `K(fⁿ)` by maximizing [`chain_norm_log`]; no iterate is formed.
pub fn k_norm_iterate(f: &RationalMap, n: usize, grid_size: usize, n_seeds: usize) -> Result<KReport> {
    k_norm_iterate_seeded(f, n, grid_size, n_seeds, &[])
}

/// As [`k_norm_iterate`], additionally polishing from every point in `extra`.
pub fn k_norm_iterate_seeded(
    f: &RationalMap,
    n: usize,
    grid_size: usize,
    n_seeds: usize,
    extra: &[SpherePoint],
) -> Result<KReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("iterate count must be at least 1".into()));
    }
    let grid = fibonacci(grid_size)?;
    let mut seeds = extra.to_vec();
    seeds.extend(fixed_points(f));
    let m = maximize_log(|p| chain_norm_log(f, n, p), &grid, n_seeds, &seeds)?;
    Ok(report(m, &grid, n_seeds))
}

/// `K(fⁿ)` on a grid fitted to the map. The first pass uses
/// [`default_iterate_grid_size`]; while the value found implies peaks
/// narrower than the grid resolves (a peak of height `K` has width of order
/// `1/K`), the scan is repeated on [`grid_for_scale`] nodes, seeded with the
/// previous maximizers.
pub fn k_norm_iterate_adaptive(f: &RationalMap, n: usize, n_seeds: usize, extra: &[SpherePoint]) -> Result<KReport> {
    let mut grid = default_iterate_grid_size(f.degree(), n);
    let mut rep = k_norm_iterate_seeded(f, n, grid, n_seeds, extra)?;
    loop {
        let target = grid_for_scale(rep.value);
        if target <= grid {
            return Ok(rep);
        }
        grid = target;
        let mut seeds = extra.to_vec();
        seeds.extend_from_slice(&rep.argmax_points);
        rep = k_norm_iterate_seeded(f, n, grid, n_seeds, &seeds)?;
    }
}

/// `K(f)` on an adaptive grid; see [`k_norm_iterate_adaptive`].
pub fn k_norm_adaptive(f: &RationalMap, n_seeds: usize) -> Result<KReport> {
    k_norm_iterate_adaptive(f, 1, n_seeds, &[])
}

/// Fixed points of `f`, or none if the root finder fails; extra polish
/// seeds. Near a repelling fixed point `‖(fⁿ)'‖` peaks on a disc shrinking
/// like `|λ|⁻ⁿ`, which a grid sized for the degree alone can miss, and `f`
/// may itself be an iterate.
fn fixed_points(f: &RationalMap) -> Vec<SpherePoint> {
    let g = f.num() - &(&Poly::monomial(1, Complex64::new(1.0, 0.0)) * f.den());
    let mut out = Vec::new();
    if g.degree().is_none_or(|k| k < f.degree() + 1) {
        out.push(SpherePoint::INFINITY);
    }
    if g.degree().is_some_and(|k| k > 0) {
        if let Ok(roots) = crate::roots::poly_roots(&g) {
            out.extend(roots.into_iter().map(SpherePoint::from_complex));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaIdentity {
    pub integral: f64,
    pub expected: f64,
    pub rel_err: f64,
}

pub const MIN_INTEGRAL_GRID: usize = 1000;

/// `∫ ‖f'‖² dA` against its exact value `π·deg f` (sphere area `π`).
pub fn area_identity(f: &RationalMap, grid_size: usize) -> Result<AreaIdentity> {
    if grid_size < MIN_INTEGRAL_GRID {
        return Err(Error::InvalidParameter(format!(
            "grid size {grid_size} is below the minimum {MIN_INTEGRAL_GRID}"
        )));
    }
    let grid = make_grid(grid_size, GridScheme::Fibonacci)?;
    let integral = quadrature(|p| f.spherical_norm_deriv(p).powi(2), &grid)?;
    let expected = PI * f.degree() as f64;
    Ok(AreaIdentity { integral, expected, rel_err: (integral - expected).abs() / expected })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `∫∫_{|z|≤1} ‖f'‖ / (1 + |z|²) dx dy` with Gauss–Legendre in `r` and the
/// periodic trapezoid rule in `θ`, about `grid_size` nodes in total.
pub fn phi_functional(f: &RationalMap, grid_size: usize) -> Result<f64> {
    if grid_size < MIN_INTEGRAL_GRID {
        return Err(Error::InvalidParameter(format!(
            "grid size {grid_size} is below the minimum {MIN_INTEGRAL_GRID}"
        )));
    }
    let n_r = ((grid_size as f64).sqrt() / 2.0).ceil() as usize;
    let n_theta = grid_size.div_ceil(n_r);
    let (x, w) = gauss_legendre(n_r);
    let dtheta = 2.0 * PI / n_theta as f64;
    let rows: Vec<f64> = (0..n_r)
        .into_par_iter()
        .map(|i| {
            let r = 0.5 * (x[i] + 1.0);
            let ring = compensated_sum((0..n_theta).map(|k| {
                let z = Complex64::from_polar(r, dtheta * k as f64);
                f.spherical_norm_deriv(&SpherePoint::from_complex(z))
            }));
            0.5 * w[i] * ring * dtheta * r / (1.0 + r * r)
        })
        .collect();
    let total = compensated_sum(rows.iter().copied());
    if !total.is_finite() {
        return Err(Error::Internal("non-finite phi integral".into()));
    }
    Ok(total)
}

#[derive(Clone, Debug)]
pub struct MinKResult {
    pub best_map: RationalMap,
    pub k: f64,
    /// Index of the start that produced `best_map`.
    pub best_start: usize,
    /// Starts that produced a valid map of the requested degree.
    pub n_feasible: usize,
}

fn params_of(f: &RationalMap, d: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(4 * (d + 1));
    for p in [f.num(), f.den()] {
        for k in 0..=d {
            let c = p.coeff(k);
            x.push(c.re);
            x.push(c.im);
        }
    }
    x
}

fn map_of(x: &[f64], d: usize) -> Option<RationalMap> {
    let poly = |s: &[f64]| Poly::new(s.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect());
    let f = RationalMap::new(poly(&x[..2 * (d + 1)]), poly(&x[2 * (d + 1)..])).ok()?;
    (f.degree() == d).then_some(f)
}

fn random_start(d: usize, seed: u64, index: usize) -> RationalMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    loop {
        let x: Vec<f64> = (0..4 * (d + 1)).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(f) = map_of(&x, d) {
            return f;
        }
    }
}

/// Multistart simplex descent of `K` over maps of degree `d`, from random
/// Gaussian starts (start `i` uses substream `i` of `seed`).
pub fn min_k_search(d: usize, n_starts: usize, seed: u64) -> Result<MinKResult> {
    if !(2..=6).contains(&d) {
        return Err(Error::InvalidParameter(format!("min-K search degree {d} outside 2..=6")));
    }
    if n_starts == 0 {
        return Err(Error::InvalidParameter("at least one start is required".into()));
    }
    let starts: Vec<RationalMap> = (0..n_starts).map(|i| random_start(d, seed, i)).collect();
    min_k_search_from(d, &starts)
}

/// As [`min_k_search`] from the given starting maps.
pub fn min_k_search_from(d: usize, starts: &[RationalMap]) -> Result<MinKResult> {
    if !(2..=6).contains(&d) {
        return Err(Error::InvalidParameter(format!("min-K search degree {d} outside 2..=6")));
    }
    let grid = make_grid(MIN_K_INNER_GRID, GridScheme::Fibonacci)?;
    let objective = |x: &[f64]| -> f64 {
        match map_of(x, d) {
            Some(f) => maximize_log_with(|p| chain_norm_log(&f, 1, p), &grid, MIN_K_INNER_SEEDS, &[], &SEARCH_POLISH)
                .map(|m| m.log_value.exp())
                .unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        }
    };
    let dim = 4 * (d + 1);
    let opts = NmOptions { ftol: 1e-8, xtol: 1e-6, max_iter: 100 * dim };
    let results: Vec<Option<(f64, RationalMap)>> = starts
        .par_iter()
        .map(|start| {
            if start.degree() != d {
                return None;
            }
            let mut x = params_of(start, d);
            let mut fx = objective(&x);
            if !fx.is_finite() {
                return None;
            }
            // restart from the current best until a restart stops helping
            for _ in 0..3 {
                let r = simplex::minimize(objective, &x, &vec![0.1; dim], &opts);
                let gain = fx - r.fx;
                if r.fx < fx {
                    x = r.x;
                    fx = r.fx;
                }
                if gain <= 1e-9 {
                    break;
                }
            }
            map_of(&x, d).map(|f| (fx, f))
        })
        .collect();
    let n_feasible = results.iter().filter(|r| r.is_some()).count();
    let (best_start, (k_coarse, best_map)) = results
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::NoAdmissibleStart(format!("all {} starts were degenerate", starts.len())))?;
    // both values are attained, so the larger is the better lower bound
    let fine = k_norm(&best_map, default_grid_size(d).max(20_000), 16)?;
    Ok(MinKResult { k: fine.value.max(k_coarse), best_map, best_start, n_feasible })
}
