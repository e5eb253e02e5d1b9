//! Experiments combining the other modules: the `k∞` bracket, the chain
//! `½ log d ≤ χ_a ≤ χ_m = k∞ ≤ log K`, and the tanh-product growth table.

use rayon::prelude::*;
use serde::Serialize;

use crate::ergodic::{chi_average, ChiEstimate, DEFAULT_BURN_IN, DEFAULT_PATHS};
use crate::knorm::{k_norm, k_norm_adaptive, k_norm_iterate_adaptive, k_norm_iterate_seeded, phi_functional};
use crate::periodic::{cycles_up_to_partial, max_exponent, CycleRecord};
use crate::rational::{RationalMap, DEGREE_CAP};
use crate::sphere::{chordal_distance, SpherePoint};
use crate::zoo::theorem1_map;
use crate::{Error, Result};

pub const DEFAULT_N_MAX: usize = 5;
pub const DEFAULT_SEEDS: usize = 32;
/// Tolerance for comparisons between deterministic quantities.
pub const DETERMINISTIC_TOL: f64 = 1e-6;
/// Floor of the Monte Carlo tolerance `max(3σ, 0.02)`.
pub const CHAIN_TOL_FLOOR: f64 = 0.02;
pub const GROWTH_MAX_N: usize = 4;
pub const DEFAULT_PHI_GRID: usize = 200_000;
/// Cycles whose points seed the `K(fⁿ)` maximization.
const SEED_CYCLES: usize = 4;
const MAX_EXTRA_SEEDS: usize = 96;

/// Largest `m` with `dᵐ ≤ DEGREE_CAP`.
pub fn default_m_max(degree: usize) -> Result<usize> {
    if degree < 2 {
        return Err(Error::InvalidParameter("the bracket needs degree at least 2".into()));
    }
    let mut m = 0;
    let mut pow = 1usize;
    while pow.saturating_mul(degree) <= DEGREE_CAP {
        pow *= degree;
        m += 1;
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BracketOptions {
    /// Grid for every `K(fⁿ)`; `None` uses the per-`n` default.
    pub grid_size: Option<usize>,
    pub n_seeds: usize,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions { grid_size: None, n_seeds: DEFAULT_SEEDS }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Bracket {
    /// `min_n aₙ/n` with `aₙ = log K(fⁿ)`.
    pub upper: f64,
    /// Largest cycle exponent over periods `≤ m_max`.
    pub lower: f64,
    /// `aₙ/n` for `n = 1..=n_max`.
    pub per_n: Vec<f64>,
    pub n_max: usize,
    pub m_max: usize,
    /// Periods actually covered by `lower`; below `m_max` when a census
    /// failed numerically.
    pub m_used: usize,
    /// `lower ≤ upper + DETERMINISTIC_TOL`.
    pub consistent: bool,
}

impl Bracket {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// `aₙ = n · per_n[n - 1]`.
    pub fn a(&self, n: usize) -> f64 {
        n as f64 * self.per_n[n - 1]
    }
}

/// Points of the `SEED_CYCLES` cycles with the largest exponents.
fn cycle_seeds(cycles: &[CycleRecord]) -> Vec<SpherePoint> {
    let mut order: Vec<&CycleRecord> = cycles.iter().filter(|c| c.exponent.is_finite()).collect();
    order.sort_by(|a, b| b.exponent.total_cmp(&a.exponent));
    order.iter().take(SEED_CYCLES).flat_map(|c| c.points.iter().copied()).collect()
}

fn push_unique(seeds: &mut Vec<SpherePoint>, p: SpherePoint) {
    if seeds.len() < MAX_EXTRA_SEEDS && seeds.iter().all(|q| chordal_distance(q, &p) > 1e-9) {
        seeds.push(p);
    }
}

/// `aₙ = log K(fⁿ)` for `n = 1..=n_max`. Each maximization is also seeded
/// with the top cycles and with the maximizers for `n - 1` and their
/// preimages, since a maximizer of `‖(fⁿ)'‖` often extends one of
/// `‖(fⁿ⁻¹)'‖` by a step at the front.
fn log_k_sequence(f: &RationalMap, n_max: usize, cycles: &[CycleRecord], opts: &BracketOptions) -> Result<Vec<f64>> {
    let base = cycle_seeds(cycles);
    let mut prev: Vec<SpherePoint> = Vec::new();
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut extra = base.clone();
        for p in &prev {
            push_unique(&mut extra, *p);
            for q in f.preimages(p)? {
                push_unique(&mut extra, q);
            }
        }
        let rep = match opts.grid_size {
            Some(grid) => k_norm_iterate_seeded(f, n, grid, opts.n_seeds, &extra)?,
            None => k_norm_iterate_adaptive(f, n, opts.n_seeds, &extra)?,
        };
        out.push(rep.value.ln());
        prev = rep.argmax_points;
    }
    Ok(out)
}

/// `lower = χ_m` over periods `≤ m_max` and `upper = min aₙ/n` over `n ≤ n_max`.
pub fn k_infinity_bracket(f: &RationalMap, n_max: usize, m_max: usize, opts: &BracketOptions) -> Result<Bracket> {
    if n_max < 2 {
        return Err(Error::InvalidParameter("n_max must be at least 2".into()));
    }
    if m_max == 0 || m_max > default_m_max(f.degree())? {
        return Err(Error::CapExceeded {
            degree: f.degree().saturating_pow(m_max as u32),
            cap: DEGREE_CAP,
        });
    }
    let (cycles, m_used) = cycles_up_to_partial(f, m_max)?;
    let lower = max_exponent(&cycles);
    let a = log_k_sequence(f, n_max, &cycles, opts)?;
    let per_n: Vec<f64> = a.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect();
    let upper = per_n.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Bracket { upper, lower, per_n, n_max, m_max, m_used, consistent: lower <= upper + DETERMINISTIC_TOL })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainOptions {
    pub n_max: usize,
    /// `None` uses [`default_m_max`].
    pub m_max: Option<usize>,
    pub n_paths: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub bracket: BracketOptions,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            n_max: DEFAULT_N_MAX,
            m_max: None,
            n_paths: DEFAULT_PATHS,
            burn_in: DEFAULT_BURN_IN,
            seed: 0,
            bracket: BracketOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Floors {
    pub half_log_d: f64,
    pub log2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentReport {
    pub map_label: String,
    pub degree: usize,
    pub log_k: f64,
    pub k_inf_upper: f64,
    pub k_inf_lower: f64,
    pub chi_a: ChiEstimate,
    pub floors: Floors,
    pub chain_ok: bool,
    pub tol: f64,
    /// `χ_a + tol < k_inf_lower`: the average exponent is strictly below the maximal one.
    pub strict_gap: bool,
    pub per_n: Vec<f64>,
    pub n_max: usize,
    pub m_max: usize,
    pub m_used: usize,
}

/// Evaluates every link of `½ log d ≤ χ_a ≤ χ_m ≤ k∞ ≤ log K`.
pub fn inequality_chain_report(f: &RationalMap, label: &str, opts: &ChainOptions) -> Result<ExponentReport> {
    let d = f.degree();
    let m_max = match opts.m_max {
        Some(m) => m,
        None => default_m_max(d)?,
    };
    let bracket = k_infinity_bracket(f, opts.n_max, m_max, &opts.bracket)?;
    let chi_a = chi_average(f, opts.n_paths, opts.burn_in, opts.seed)?;
    let log_k = bracket.per_n[0];
    let floors = Floors { half_log_d: 0.5 * (d as f64).ln(), log2: 2f64.ln() };
    let tol = (3.0 * chi_a.stderr).max(CHAIN_TOL_FLOOR);
    let chain_ok = floors.half_log_d <= chi_a.value + tol
        && chi_a.value <= bracket.lower + tol
        && bracket.lower <= bracket.upper + tol
        && bracket.upper <= log_k + tol;
    Ok(ExponentReport {
        map_label: label.to_string(),
        degree: d,
        log_k,
        k_inf_upper: bracket.upper,
        k_inf_lower: bracket.lower,
        chi_a,
        floors,
        chain_ok,
        tol,
        strict_gap: chi_a.value + tol < bracket.lower,
        per_n: bracket.per_n,
        n_max: bracket.n_max,
        m_max,
        m_used: bracket.m_used,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthOptions {
    /// `None` fits the grid to each map; see [`k_norm_adaptive`].
    pub grid_size: Option<usize>,
    pub n_seeds: usize,
    pub phi_grid: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { grid_size: None, n_seeds: DEFAULT_SEEDS, phi_grid: DEFAULT_PHI_GRID }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub degree: usize,
    pub k: f64,
    /// `k / √degree`.
    pub ratio: f64,
    pub phi: f64,
}

/// `K` and `φ` of the tanh-product maps `R_1 … R_{n_max}`.
pub fn theorem1_growth_table(n_max: usize, opts: &GrowthOptions) -> Result<Vec<GrowthRow>> {
    if !(1..=GROWTH_MAX_N).contains(&n_max) {
        return Err(Error::InvalidParameter(format!("n_max must lie in 1..={GROWTH_MAX_N}")));
    }
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let f = theorem1_map(n)?;
            let degree = f.degree();
            let k = match opts.grid_size {
                Some(grid) => k_norm(&f, grid, opts.n_seeds)?.value,
                None => k_norm_adaptive(&f, opts.n_seeds)?.value,
            };
            let phi = phi_functional(&f, opts.phi_grid)?;
            Ok(GrowthRow { n, degree, k, ratio: k / (degree as f64).sqrt(), phi })
        })
        .collect()
}

/// Every ratio lies within a factor `factor` of the median ratio.
pub fn ratios_bounded(rows: &[GrowthRow], factor: f64) -> bool {
    if rows.is_empty() {
        return true;
    }
    let mut r: Vec<f64> = rows.iter().map(|row| row.ratio).collect();
    r.sort_by(f64::total_cmp);
    let n = r.len();
    let median = if n % 2 == 1 { r[n / 2] } else { 0.5 * (r[n / 2 - 1] + r[n / 2]) };
    r.iter().all(|v| *v <= factor * median && *v >= median / factor)
}
