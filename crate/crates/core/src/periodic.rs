//! Periodic points of rational maps.
//!
//! The fixed points of `fᵐ = pₘ/qₘ` are the `dᵐ + 1` zeros on the sphere of
//! the homogeneous form `b·Pₘ(a, b) - a·Qₘ(a, b)`. Expanding `pₘ`, `qₘ` into
//! coefficients destroys these zeros already for moderate `m` (the Chebyshev
//! iterate `T₈₁` is a classic example), so the form is instead evaluated by
//! pushing `(a, b)` and its derivative through `f` `m` times, rescaling at
//! every step, and its zeros are found by Aberth–Ehrlich iteration on those
//! values. The map is first conjugated by a fixed rotation so that no fixed
//! point sits at infinity of the working chart. Each zero is then refined by
//! Newton's method on the orbit and the points are grouped into cycles by
//! following `f`.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::knorm::KReport;
use crate::poly::Poly;
use crate::rational::{RationalMap, DEGREE_CAP};
use crate::roots::{aberth, MAX_SWEEPS, RESIDUAL_TOL};
use crate::sphere::{chordal_distance, make_grid, GridScheme, SpherePoint};
use crate::{Error, Result};

/// Chordal radius for merging root approximations into one point.
pub const DEDUP_DIST: f64 = 1e-8;
/// Simple roots closer than this are the same point found twice. Distinct
/// simple fixed points can be much closer than `DEDUP_DIST` (Chebyshev
/// iterates cluster quadratically at the ends of `[-2, 2]`), so the wider
/// radius only applies where `(fᵐ)' ≈ 1` and roots genuinely coalesce.
pub const SAME_POINT_DIST: f64 = 1e-12;
/// `|(fᵐ)' - 1|` below this marks a near-parabolic (possibly multiple) root.
pub const PARABOLIC_GAP: f64 = 1e-3;
/// `‖f'‖` below this anywhere on a cycle marks it superattracting.
pub const SUPERATTRACTING_NORM: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CycleRecord {
    /// `points[i + 1] = f(points[i])`, cyclically.
    pub points: Vec<SpherePoint>,
    pub period: usize,
    /// `(fᵐ)'` at `points[0]`, read in that point's chart.
    pub multiplier: Complex64,
    /// `(1/m) Σ log ‖f'(pᵢ)‖`; `-∞` for superattracting cycles.
    pub exponent: f64,
}

impl CycleRecord {
    pub fn is_superattracting(&self) -> bool {
        self.exponent == f64::NEG_INFINITY
    }
}

impl Serialize for CycleRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CycleRecord", 4)?;
        s.serialize_field("period", &self.period)?;
        s.serialize_field("points", &self.points)?;
        s.serialize_field("multiplier", &[self.multiplier.re, self.multiplier.im])?;
        s.serialize_field("exponent", &self.exponent.is_finite().then_some(self.exponent))?;
        s.end()
    }
}

/// All cycles whose period divides `m`, with the point count check.
#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub m: usize,
    pub cycles: Vec<CycleRecord>,
    /// `dᵐ + 1`, the number of fixed points of `fᵐ` with multiplicity.
    pub expected: usize,
    /// Distinct points after merging.
    pub distinct: usize,
}

impl Census {
    /// Fixed points counted with multiplicity were all found distinct.
    pub fn is_complete(&self) -> bool {
        self.distinct == self.expected
    }
}

/// Derivative of `fᵐ` at `p` in `p`'s chart, and the residual `fᵐ(p) - p` in
/// that chart (`None` if `fᵐ(p)` is the pole of the chart).
fn orbit_map(f: &RationalMap, p: &SpherePoint, m: usize) -> Option<(Complex64, Complex64)> {
    let chart = p.chart();
    let mut q = *p;
    let mut deriv = Complex64::new(1.0, 0.0);
    for j in 0..m {
        let out = (j + 1 == m).then_some(chart);
        let step = f.chart_step(&q, out);
        deriv *= step.deriv;
        if j + 1 == m {
            let r = step.coord - p.coord();
            return (r.re.is_finite() && r.im.is_finite()).then_some((r, deriv));
        }
        q = SpherePoint::from_chart(step.out_chart, step.coord);
    }
    None
}

const REFINE_STEPS: usize = 12;

/// Newton on `fᵐ(x) - x` in the point's chart; a step is kept only if it
/// lowers the residual.
fn refine(f: &RationalMap, p: SpherePoint, m: usize) -> SpherePoint {
    let mut p = p;
    let Some((mut r, mut d)) = orbit_map(f, &p, m) else { return p };
    for _ in 0..REFINE_STEPS {
        let denom = d - Complex64::new(1.0, 0.0);
        if denom.norm() == 0.0 {
            break;
        }
        let cand = SpherePoint::raw(p.chart(), p.coord() - r / denom);
        match orbit_map(f, &cand, m) {
            Some((r2, d2)) if r2.norm() < r.norm() => {
                p = cand;
                r = r2;
                d = d2;
            }
            _ => break,
        }
    }
    p.canonical()
}

/// Lexicographic key on the embedded sphere, used to order output.
fn point_key(p: &SpherePoint) -> [f64; 3] {
    p.to_unit_vector()
}

fn cmp_points(a: &SpherePoint, b: &SpherePoint) -> std::cmp::Ordering {
    let (ka, kb) = (point_key(a), point_key(b));
    ka[0].total_cmp(&kb[0]).then(ka[1].total_cmp(&kb[1])).then(ka[2].total_cmp(&kb[2]))
}

type Pair = (Complex64, Complex64);

/// Unitary `2×2` matrix acting on homogeneous coordinates.
#[derive(Clone, Copy)]
struct Rotation([[Complex64; 2]; 2]);

impl Rotation {
    fn new(theta: f64, phi: f64) -> Self {
        let alpha = Complex64::new(theta.cos(), 0.0);
        let beta = Complex64::from_polar(theta.sin(), phi);
        Rotation([[alpha, beta], [-beta.conj(), alpha.conj()]])
    }

    fn inverse(&self) -> Self {
        let m = self.0;
        Rotation([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    fn apply(&self, v: Pair) -> Pair {
        let m = self.0;
        (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
    }
}

/// `(H, ∂H/∂a, ∂H/∂b)` for the degree-`h` homogenization `H` of `p`.
/// Expects `max(|a|, |b|) = 1`.
fn with_partials(p: &Poly, h: usize, a: Complex64, b: Complex64) -> (Complex64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let hf = h as f64;
    if a.norm() <= b.norm() {
        let t = a / b;
        let (mut v, mut dv) = (zero, zero);
        for &c in p.coeffs().iter().rev() {
            dv = dv * t + v;
            v = v * t + c;
        }
        let bp = b.powu(h as u32 - 1);
        (b * bp * v, bp * dv, bp * (v * hf - t * dv))
    } else {
        let s = b / a;
        let (mut v, mut dv) = (zero, zero);
        for k in 0..=h {
            dv = dv * s + v;
            v = v * s + p.coeff(k);
        }
        let ap = a.powu(h as u32 - 1);
        (a * ap * v, ap * (v * hf - s * dv), ap * dv)
    }
}

/// One step `(v, v') ↦ (F(v), DF(v)·v')` after rescaling both by `max|vᵢ|`.
fn push(f: &RationalMap, v: Pair, dv: Pair) -> Option<(Pair, Pair)> {
    let lam = v.0.norm().max(v.1.norm());
    if !(lam > 0.0 && lam.is_finite()) {
        return None;
    }
    let (a, b) = (v.0 / lam, v.1 / lam);
    let (da, db) = (dv.0 / lam, dv.1 / lam);
    let d = f.degree();
    let (pv, pa, pb) = with_partials(f.num(), d, a, b);
    let (qv, qa, qb) = with_partials(f.den(), d, a, b);
    Some(((pv, qv), (pa * da + pb * db, qa * da + qb * db)))
}

/// Newton correction for the fixed-point form of `ρ fᵐ ρ⁻¹` at `z`.
fn fixed_form_newton(f: &RationalMap, m: usize, rot: &Rotation, inv: &Rotation, z: Complex64) -> (Complex64, bool) {
    let mut v = inv.apply((z, Complex64::new(1.0, 0.0)));
    let mut dv = inv.apply((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
    for _ in 0..m {
        match push(f, v, dv) {
            Some((nv, ndv)) => {
                v = nv;
                dv = ndv;
            }
            None => return (Complex64::new(f64::NAN, 0.0), false),
        }
    }
    let lam = v.0.norm().max(v.1.norm());
    let (a, b) = rot.apply((v.0 / lam, v.1 / lam));
    let (da, db) = rot.apply((dv.0 / lam, dv.1 / lam));
    let g = a - z * b;
    let dg = da - b - z * db;
    if g.norm() == 0.0 {
        return (g, true);
    }
    (g / dg, false)
}

/// Fixed-point residual of `fᵐ` at `p`, relative to `max(1, |(fᵐ)'(p)|)`.
fn relative_orbit_residual(f: &RationalMap, p: &SpherePoint, m: usize) -> f64 {
    match orbit_map(f, p, m) {
        Some((r, d)) => r.norm() / d.norm().max(1.0),
        None => f64::INFINITY,
    }
}

/// The `dᵐ + 1` fixed points of `fᵐ` (with multiplicity), refined.
fn fixed_points(f: &RationalMap, m: usize) -> Result<Vec<SpherePoint>> {
    let big_d = (f.degree() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if big_d > DEGREE_CAP as u128 {
        return Err(Error::CapExceeded { degree: usize::try_from(big_d).unwrap_or(usize::MAX), cap: DEGREE_CAP });
    }
    let n = big_d as usize + 1;
    let starts = initial_points(f, m, n)?;
    let mut worst = f64::INFINITY;
    let mut sweeps = 0;
    // a second rotation is only needed if a fixed point lands on the pole
    for (theta, phi) in [(0.6180339887, 1.2345678901), (1.1071487178, 2.7182818285)] {
        let rot = Rotation::new(theta, phi);
        let inv = rot.inverse();
        let mut z: Vec<Complex64> = starts
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let (a, b) = rot.apply(p.homogeneous());
                let z = if b.norm() > 0.0 { a / b } else { Complex64::new(1e8, 0.0) };
                // separate coincident starts
                z + Complex64::from_polar(1e-7 * (1.0 + z.norm()), 2.399963 * k as f64)
            })
            .collect();
        sweeps = aberth(&mut z, MAX_SWEEPS, |zi| fixed_form_newton(f, m, &rot, &inv, zi));
        let pts: Vec<SpherePoint> = z
            .iter()
            .map(|&w| {
                let (a, b) = inv.apply((w, Complex64::new(1.0, 0.0)));
                let p = SpherePoint::from_homogeneous(a, b).unwrap_or(SpherePoint::INFINITY);
                refine(f, p, m)
            })
            .collect();
        worst = pts.iter().map(|p| relative_orbit_residual(f, p, m)).fold(0.0, f64::max);
        if worst < RESIDUAL_TOL {
            return Ok(pts);
        }
    }
    Err(Error::RootFinding { sweeps, worst_residual: worst })
}

/// Starting points: the `dᵐ` preimages under `fᵐ` of a generic point, one per
/// inverse branch and each close to that branch's fixed point when the
/// branch contracts, plus one more. Falls back to a Fibonacci spiral.
fn initial_points(f: &RationalMap, m: usize, n: usize) -> Result<Vec<SpherePoint>> {
    let w0 = SpherePoint::from_re_im(0.3141592653, 0.2718281828);
    let mut level = vec![w0];
    for _ in 0..m {
        let mut next = Vec::with_capacity(level.len() * f.degree());
        for w in &level {
            match f.preimages(w) {
                Ok(ps) => next.extend(ps),
                Err(_) => {
                    level.clear();
                    break;
                }
            }
        }
        if level.is_empty() {
            break;
        }
        level = next;
    }
    if level.len() + 1 == n {
        level.push(w0.antipode());
        return Ok(level);
    }
    Ok(make_grid(n.max(8), GridScheme::Fibonacci)?.points().iter().take(n).copied().collect())
}

/// Whether two refined fixed points of `fᵐ` are one point.
fn same_point(f: &RationalMap, m: usize, p: &SpherePoint, q: &SpherePoint) -> bool {
    let dist = chordal_distance(p, q);
    if dist <= SAME_POINT_DIST {
        return true;
    }
    dist <= DEDUP_DIST && orbit_map(f, p, m).is_some_and(|(_, d)| (d - 1.0).norm() < PARABOLIC_GAP)
}

/// Index of the point nearest to `q`, and its distance.
fn nearest(points: &[SpherePoint], q: &SpherePoint) -> (usize, f64) {
    points
        .iter()
        .enumerate()
        .map(|(j, p)| (j, chordal_distance(p, q)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((usize::MAX, f64::INFINITY))
}

fn census(f: &RationalMap, m: usize) -> Result<Census> {
    let found = fixed_points(f, m)?;
    let expected = found.len();
    let mut points: Vec<SpherePoint> = Vec::new();
    for p in found {
        if !points.iter().any(|q| same_point(f, m, &p, q)) {
            points.push(p);
        }
    }
    // Close the set under f: the image of a fixed point of fᵐ is one too.
    let mut i = 0;
    while i < points.len() {
        let img = refine(f, f.apply(&points[i]), m);
        let (j, _) = nearest(&points, &img);
        if !same_point(f, m, &img, &points[j]) {
            if relative_orbit_residual(f, &img, m) >= RESIDUAL_TOL || points.len() >= expected {
                return Err(Error::OrbitInconsistent(format!(
                    "f({}) = {img} is not among the fixed points of f^{m}",
                    points[i]
                )));
            }
            points.push(img);
        }
        i += 1;
    }
    points.sort_by(cmp_points);

    let successor: Vec<usize> = points.iter().map(|p| nearest(&points, &refine(f, f.apply(p), m)).0).collect();
    let mut assigned = vec![false; points.len()];
    let mut cycles = Vec::new();
    for start in 0..points.len() {
        if assigned[start] {
            continue;
        }
        let mut idx = vec![start];
        let mut cur = successor[start];
        while cur != start {
            if idx.len() > m || idx.contains(&cur) || assigned[cur] {
                return Err(Error::OrbitInconsistent(format!(
                    "orbit of {} does not close up within {m} steps",
                    points[start]
                )));
            }
            idx.push(cur);
            cur = successor[cur];
        }
        if m % idx.len() != 0 {
            return Err(Error::OrbitInconsistent(format!(
                "cycle of length {} found among fixed points of f^{m}",
                idx.len()
            )));
        }
        for &i in &idx {
            assigned[i] = true;
        }
        cycles.push(cycle_record(f, idx.iter().map(|&i| points[i]).collect()));
    }
    cycles.sort_by(|a, b| a.period.cmp(&b.period).then(cmp_points(&a.points[0], &b.points[0])));
    Ok(Census { m, cycles, expected, distinct: points.len() })
}

fn cycle_record(f: &RationalMap, points: Vec<SpherePoint>) -> CycleRecord {
    let k = points.len();
    let mut multiplier = Complex64::new(1.0, 0.0);
    let mut log_sum = 0.0;
    let mut min_norm = f64::INFINITY;
    for i in 0..k {
        let next = points[(i + 1) % k];
        multiplier *= f.chart_step(&points[i], Some(next.chart())).deriv;
        let v = f.spherical_norm_deriv(&points[i]);
        min_norm = min_norm.min(v);
        log_sum += v.ln();
    }
    let exponent = if min_norm < SUPERATTRACTING_NORM { f64::NEG_INFINITY } else { log_sum / k as f64 };
    CycleRecord { points, period: k, multiplier, exponent }
}

/// Fixed points of `fᵐ` grouped into cycles, with the count check.
pub fn periodic_census(f: &RationalMap, m: usize) -> Result<Census> {
    if m == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    census(f, m)
}

/// Every cycle whose period divides `m`.
pub fn periodic_cycles(f: &RationalMap, m: usize) -> Result<Vec<CycleRecord>> {
    Ok(periodic_census(f, m)?.cycles)
}

/// Every cycle of exact period `1..=m_max`, shortest first.
pub fn cycles_up_to(f: &RationalMap, m_max: usize) -> Result<Vec<CycleRecord>> {
    if m_max == 0 {
        return Err(Error::InvalidParameter("m_max must be at least 1".into()));
    }
    let total = (f.degree() as u128).checked_pow(m_max as u32).unwrap_or(u128::MAX);
    if total > DEGREE_CAP as u128 {
        return Err(Error::CapExceeded { degree: usize::try_from(total).unwrap_or(usize::MAX), cap: DEGREE_CAP });
    }
    let mut out = Vec::new();
    for m in 1..=m_max {
        out.extend(census(f, m)?.cycles.into_iter().filter(|c| c.period == m));
    }
    Ok(out)
}

/// As [`cycles_up_to`], but stops before the first period whose census
/// fails numerically (fixed points of high iterates can cluster beyond
/// double precision near critical orbits). Returns the cycles found and the
/// last complete period.
pub fn cycles_up_to_partial(f: &RationalMap, m_max: usize) -> Result<(Vec<CycleRecord>, usize)> {
    if m_max == 0 {
        return Err(Error::InvalidParameter("m_max must be at least 1".into()));
    }
    let total = (f.degree() as u128).checked_pow(m_max as u32).unwrap_or(u128::MAX);
    if total > DEGREE_CAP as u128 {
        return Err(Error::CapExceeded { degree: usize::try_from(total).unwrap_or(usize::MAX), cap: DEGREE_CAP });
    }
    let mut out = Vec::new();
    for m in 1..=m_max {
        match census(f, m) {
            Ok(c) => out.extend(c.cycles.into_iter().filter(|c| c.period == m)),
            Err(Error::RootFinding { .. } | Error::OrbitInconsistent(_)) if m > 1 => return Ok((out, m - 1)),
            Err(e) => return Err(e),
        }
    }
    Ok((out, m_max))
}

/// Largest cycle exponent over periods `1..=m_max`; `-∞` if every cycle is
/// superattracting.
pub fn chi_max_lower(f: &RationalMap, m_max: usize) -> Result<f64> {
    Ok(max_exponent(&cycles_up_to(f, m_max)?))
}

pub(crate) fn max_exponent(cycles: &[CycleRecord]) -> f64 {
    cycles.iter().map(|c| c.exponent).fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleCheck {
    pub found: bool,
    pub cycle: Option<CycleRecord>,
}

/// Looks for a cycle of period `≤ m_max` on which `‖f'‖ ≥ (1 - tol)·K`
/// everywhere. Among qualifying cycles the shortest (then the one with the
/// largest minimum norm) is returned.
pub fn k_attaining_cycle_check(f: &RationalMap, kreport: &KReport, m_max: usize, tol: f64) -> Result<CycleCheck> {
    let threshold = (1.0 - tol) * kreport.value;
    let cycles = cycles_up_to(f, m_max)?;
    let best = cycles
        .into_iter()
        .filter(|c| !c.is_superattracting())
        .map(|c| {
            let min_norm = c.points.iter().map(|p| f.spherical_norm_deriv(p)).fold(f64::INFINITY, f64::min);
            (min_norm, c)
        })
        .filter(|(v, _)| *v >= threshold)
        .min_by(|a, b| a.1.period.cmp(&b.1.period).then(b.0.total_cmp(&a.0)));
    Ok(CycleCheck { found: best.is_some(), cycle: best.map(|(_, c)| c) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knorm::k_norm;
    use crate::zoo::{chebyshev_map, lattes4, power_map};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn has_point(cycles: &[CycleRecord], z: SpherePoint) -> Option<&CycleRecord> {
        cycles.iter().find(|cy| cy.points.iter().any(|p| chordal_distance(p, &z) < 1e-10))
    }

    #[test]
    fn squaring_fixed_points() {
        let f = power_map(2).unwrap();
        let census = periodic_census(&f, 1).unwrap();
        assert_eq!(census.cycles.len(), 3);
        assert!(census.is_complete());
        let at_one = has_point(&census.cycles, SpherePoint::from_re_im(1.0, 0.0)).unwrap();
        assert!((at_one.exponent - 2f64.ln()).abs() < 1e-12);
        assert!((at_one.multiplier - c(2.0, 0.0)).norm() < 1e-12);
        assert!(has_point(&census.cycles, SpherePoint::ORIGIN).unwrap().is_superattracting());
        assert!(has_point(&census.cycles, SpherePoint::INFINITY).unwrap().is_superattracting());
    }

    #[test]
    fn squaring_two_cycle() {
        let f = power_map(2).unwrap();
        let cycles = periodic_cycles(&f, 2).unwrap();
        let two: Vec<_> = cycles.iter().filter(|c| c.period == 2).collect();
        assert_eq!(two.len(), 1);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!(has_point(&cycles, SpherePoint::from_complex(w)).is_some());
        assert!(has_point(&cycles, SpherePoint::from_complex(w.conj())).is_some());
        assert!((two[0].multiplier - c(4.0, 0.0)).norm() < 1e-10);
        assert!((two[0].exponent - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn lattes_fixed_point_at_infinity() {
        let cycles = periodic_cycles(&lattes4(), 1).unwrap();
        let inf = has_point(&cycles, SpherePoint::INFINITY).unwrap();
        assert!((inf.multiplier - c(4.0, 0.0)).norm() < 1e-8);
        assert!((inf.exponent - 4f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn chi_max_examples() {
        for d in 2..=4 {
            let v = chi_max_lower(&power_map(d).unwrap(), 1).unwrap();
            assert!((v - (d as f64).ln()).abs() < 1e-10);
        }
        assert!(chi_max_lower(&lattes4(), 1).unwrap() >= 4f64.ln() - 1e-8);
        // T₂(2) = 2 with T₂'(2) = 4 and ‖T₂'(2)‖ = 4·5/5
        let t2 = chebyshev_map(2).unwrap();
        let cycles = periodic_cycles(&t2, 1).unwrap();
        let two = has_point(&cycles, SpherePoint::from_re_im(2.0, 0.0)).unwrap();
        assert!((two.exponent - 4f64.ln()).abs() < 1e-10);
        assert!(chi_max_lower(&t2, 2).unwrap() >= 4f64.ln() - 1e-10);
    }

    #[test]
    fn counts_for_powers() {
        for d in 2..=3 {
            let f = power_map(d).unwrap();
            for m in 1..=4 {
                let census = periodic_census(&f, m).unwrap();
                let total: usize = census.cycles.iter().map(|c| c.period).sum();
                assert_eq!(total, d.pow(m as u32) + 1, "d={d} m={m}");
            }
        }
    }

    #[test]
    fn cycles_map_forward() {
        let f = lattes4();
        for cy in periodic_cycles(&f, 2).unwrap() {
            for i in 0..cy.period {
                let img = f.apply(&cy.points[i]);
                assert!(chordal_distance(&img, &cy.points[(i + 1) % cy.period]) < 1e-8);
            }
        }
    }

    #[test]
    fn attaining_cycle_for_powers() {
        for d in 2..=4 {
            let f = power_map(d).unwrap();
            let k = k_norm(&f, 1000, 8).unwrap();
            let check = k_attaining_cycle_check(&f, &k, 1, 1e-6).unwrap();
            assert!(check.found);
            let cy = check.cycle.unwrap();
            assert_eq!(cy.period, 1);
            assert!((cy.points[0].coord().norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn no_attaining_cycle_for_shifted_square() {
        let f = RationalMap::from_real(&[10.0, 0.0, 1.0], &[1.0]).unwrap();
        let k = k_norm(&f, 2000, 8).unwrap();
        let check = k_attaining_cycle_check(&f, &k, 3, 1e-3).unwrap();
        assert!(!check.found);
        let trivial = k_attaining_cycle_check(&f, &k, 1, 1.0).unwrap();
        assert!(trivial.found);
    }

    #[test]
    fn census_json_shape() {
        let cycles = periodic_cycles(&power_map(2).unwrap(), 1).unwrap();
        let v = serde_json::to_value(&cycles).unwrap();
        assert!(v[0]["exponent"].is_null() || v[0]["exponent"].is_number());
        assert_eq!(v[0]["multiplier"].as_array().unwrap().len(), 2);
        assert!(v.as_array().unwrap().iter().any(|c| c["exponent"].is_null()));
    }
}
