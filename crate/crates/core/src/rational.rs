//! Rational maps `f = p/q` of the sphere, evaluated homogeneously.
//!
//! With `P`, `Q` the degree-`d` homogenizations of `p`, `q` and
//! `W = p'q - pq'` homogenized to degree `2d - 2`, the spherical derivative
//! norm at `[a : b]` is
//!
//! ```text
//! ‖f'‖ = |W(a, b)| (|a|² + |b|²) / (|P(a, b)|² + |Q(a, b)|²)
//! ```
//!
//! which is pole-free and reduces to `|f'| (1 + |z|²) / (1 + |f|²)` at `b = 1`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::roots::poly_roots;
use crate::sphere::{Chart, SpherePoint};
use crate::{Error, Result};

/// Largest degree produced by [`compose`] and [`iterate`].
pub const DEGREE_CAP: usize = 4096;
/// Minimum relative size of `P` at a root of `Q` for a map to count as reduced.
pub const COPRIME_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
    degree: usize,
    wronskian: Poly,
}

/// A map value together with the derivative of the chart-to-chart expression.
#[derive(Clone, Copy, Debug)]
pub struct ChartStep {
    /// Image coordinate in `out_chart` (not canonicalized).
    pub coord: Complex64,
    pub out_chart: Chart,
    /// `d(coord)/d(input coord)`.
    pub deriv: Complex64,
}

impl RationalMap {
    /// Normalizes coefficients (max modulus 1) and rejects maps whose numerator
    /// and denominator approximately share a root. No reduction is attempted.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::DegenerateMap("numerator and denominator are both zero".into()));
        }
        if den.is_zero() {
            return Err(Error::DegenerateMap("zero denominator".into()));
        }
        if num.is_zero() {
            return Err(Error::DegenerateMap("constant map 0".into()));
        }
        let all_finite = num.coeffs().iter().chain(den.coeffs()).all(|c| c.re.is_finite() && c.im.is_finite());
        if !all_finite {
            return Err(Error::DegenerateMap("non-finite coefficient".into()));
        }
        let degree = num.degree().unwrap().max(den.degree().unwrap());
        if degree == 0 {
            return Err(Error::DegenerateMap("constant map".into()));
        }
        let scale = num.max_abs_coeff().max(den.max_abs_coeff());
        let inv = Complex64::new(1.0 / scale, 0.0);
        let num = num.scale(inv);
        let den = den.scale(inv);
        coprimality_gate(&num, &den, degree)?;
        let wronskian = wronskian(&num, &den);
        Ok(RationalMap { num, den, degree, wronskian })
    }

    pub fn from_real(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Poly::from_real(num), Poly::from_real(den))
    }

    pub fn identity() -> Self {
        Self::from_real(&[0.0, 1.0], &[1.0]).expect("identity is a valid map")
    }

    /// `(a z + b) / (c z + d)`.
    pub fn mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        Self::new(Poly::new(vec![b, a]), Poly::new(vec![d, c]))
    }

    /// A uniformly random rotation of the sphere and its inverse, as unitary
    /// Möbius maps `(αz + β)/(-β̄z + ᾱ)` with `|α|² + |β|² = 1`.
    pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> (Self, Self) {
        // A uniform unit quaternion is a Haar-distributed element of SU(2).
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let alpha = Complex64::new(q[0] / n, q[1] / n);
        let beta = Complex64::new(q[2] / n, q[3] / n);
        let rho = Self::mobius(alpha, beta, -beta.conj(), alpha.conj()).expect("unitary Möbius map");
        let rho_inv = Self::mobius(alpha.conj(), -beta, beta.conj(), alpha).expect("unitary Möbius map");
        (rho, rho_inv)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Cached `p'q - pq'`.
    pub fn wronskian(&self) -> &Poly {
        &self.wronskian
    }

    fn wronskian_degree(&self) -> usize {
        2 * self.degree - 2
    }

    /// `(P(a, b), Q(a, b))` at the point's homogeneous coordinates.
    pub fn eval_homogeneous(&self, p: &SpherePoint) -> (Complex64, Complex64) {
        let (a, b) = p.homogeneous();
        (
            self.num.eval_homogeneous(a, b, self.degree),
            self.den.eval_homogeneous(a, b, self.degree),
        )
    }

    /// `f(p)`, including poles and the value at infinity.
    ///
    /// # Panics
    /// If `P` and `Q` vanish simultaneously, which the coprimality gate rules out.
    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        let (pv, qv) = self.eval_homogeneous(p);
        SpherePoint::from_homogeneous(pv, qv)
            .unwrap_or_else(|| panic!("internal error: f is 0/0 at {p}"))
    }

    pub fn apply_complex(&self, z: Complex64) -> SpherePoint {
        self.apply(&SpherePoint::from_complex(z))
    }

    /// Spherical derivative norm `‖f'‖` at `p`, evaluated in `p`'s own chart.
    pub fn spherical_norm_deriv(&self, p: &SpherePoint) -> f64 {
        let (a, b) = p.homogeneous();
        let (pv, qv) = (
            self.num.eval_homogeneous(a, b, self.degree),
            self.den.eval_homogeneous(a, b, self.degree),
        );
        let w = self.wronskian.eval_homogeneous(a, b, self.wronskian_degree());
        w.norm() * (a.norm_sqr() + b.norm_sqr()) / (pv.norm_sqr() + qv.norm_sqr())
    }

    /// `(‖f'(p)‖, f(p))` from a single evaluation of `P`, `Q` and `W`.
    pub fn norm_and_image(&self, p: &SpherePoint) -> (f64, SpherePoint) {
        let (a, b) = p.homogeneous();
        let pv = self.num.eval_homogeneous(a, b, self.degree);
        let qv = self.den.eval_homogeneous(a, b, self.degree);
        let w = self.wronskian.eval_homogeneous(a, b, self.wronskian_degree());
        let norm = w.norm() * (a.norm_sqr() + b.norm_sqr()) / (pv.norm_sqr() + qv.norm_sqr());
        let image = SpherePoint::from_homogeneous(pv, qv)
            .unwrap_or_else(|| panic!("internal error: f is 0/0 at {p}"));
        (norm, image)
    }

    /// The `d` preimages of `w` with multiplicity: zeros of `β·P - α·Q` for
    /// `w = [α : β]`, with infinity filling any drop in degree.
    pub fn preimages(&self, w: &SpherePoint) -> Result<Vec<SpherePoint>> {
        let (alpha, beta) = w.homogeneous();
        let g = &self.num.scale(beta) - &self.den.scale(alpha);
        let deg = g.degree().unwrap_or(0);
        if g.is_zero() || g.max_abs_coeff() == 0.0 {
            return Err(Error::Exceptional(format!("every point maps to {w}")));
        }
        let mut out: Vec<SpherePoint> = if deg >= 1 {
            poly_roots(&g)?.into_iter().map(SpherePoint::from_complex).collect()
        } else {
            Vec::new()
        };
        out.resize(self.degree, SpherePoint::INFINITY);
        Ok(out)
    }

    /// One step of `f` in chart coordinates: the image expressed in
    /// `out_chart` (or the canonical chart of the image when `None`) and the
    /// derivative of that coordinate expression.
    pub fn chart_step(&self, p: &SpherePoint, out_chart: Option<Chart>) -> ChartStep {
        let (a, b) = p.homogeneous();
        let pv = self.num.eval_homogeneous(a, b, self.degree);
        let qv = self.den.eval_homogeneous(a, b, self.degree);
        let w = self.wronskian.eval_homogeneous(a, b, self.wronskian_degree());
        let out_chart = out_chart.unwrap_or(if pv.norm() <= qv.norm() { Chart::Z } else { Chart::U });
        let s_in = if p.chart() == Chart::Z { 1.0 } else { -1.0 };
        let (coord, deriv) = match out_chart {
            Chart::Z => (pv / qv, w / (qv * qv) * s_in),
            Chart::U => (qv / pv, -w / (pv * pv) * s_in),
        };
        ChartStep { coord, out_chart, deriv }
    }

    /// Derivative of `f` read in `p`'s chart on both sides; this is the
    /// multiplier when `p` is a fixed point.
    pub fn multiplier_at_fixed_point(&self, p: &SpherePoint) -> Complex64 {
        self.chart_step(p, Some(p.chart())).deriv
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            num: self.num.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            den: self.den.coeffs().iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn from_json(m: &MapJson) -> Result<Self> {
        let to_poly = |v: &[[f64; 2]]| Poly::new(v.iter().map(|c| Complex64::new(c[0], c[1])).collect());
        Self::new(to_poly(&m.num), to_poly(&m.den))
    }
}

/// File schema for a map: coefficient pairs `[re, im]` in ascending powers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub num: Vec<[f64; 2]>,
    pub den: Vec<[f64; 2]>,
}

/// `p'q - pq' = Σ (i - j) pᵢ qⱼ z^(i+j-1)`. Summing by pairs makes the
/// `z^(2d-1)` coefficient (only `i = j = d`) exactly zero.
fn wronskian(num: &Poly, den: &Poly) -> Poly {
    let (p, q) = (num.coeffs(), den.coeffs());
    let len = (p.len() + q.len()).saturating_sub(2);
    let mut w = vec![Complex64::new(0.0, 0.0); len];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            if i != j {
                w[i + j - 1] += pi * qj * (i as f64 - j as f64);
            }
        }
    }
    Poly::new(w)
}

/// Rejects `p/q` when, at some root `r` of `q`, `|P(r)|` is below
/// `COPRIME_TOL` relative to `Σ|pₖ||r|ᵏ + Σ|qₖ||r|ᵏ` (homogeneously, in the
/// canonical chart of `r`). A relative coefficient perturbation of that size
/// would make the two polynomials share a root.
fn coprimality_gate(num: &Poly, den: &Poly, degree: usize) -> Result<()> {
    let Some(dd) = den.degree() else { return Ok(()) };
    if dd == 0 {
        return Ok(());
    }
    let roots = poly_roots(den)?;
    for r in roots {
        let pt = SpherePoint::from_complex(r);
        let (a, b) = pt.homogeneous();
        let pv = num.eval_homogeneous(a, b, degree).norm();
        let scale = num.abs_eval_homogeneous(a, b, degree) + den.abs_eval_homogeneous(a, b, degree);
        if scale == 0.0 || pv == 0.0 {
            return Err(Error::DegenerateMap(format!("common root at {pt}")));
        }
        if !(pv > COPRIME_TOL * scale) {
            return Err(Error::DegenerateMap(format!(
                "approximate common root near {pt} (relative size {:.3e})",
                pv / scale
            )));
        }
    }
    Ok(())
}

/// `f ∘ g`, with degree exactly `deg f · deg g`.
pub fn compose(f: &RationalMap, g: &RationalMap) -> Result<RationalMap> {
    compose_with_cap(f, g, DEGREE_CAP)
}

pub fn compose_with_cap(f: &RationalMap, g: &RationalMap, cap: usize) -> Result<RationalMap> {
    let target = f.degree * g.degree;
    if target > cap {
        return Err(Error::CapExceeded { degree: target, cap });
    }
    // P(gn, gd) = Σ pₖ gnᵏ gd^(d-k) by homogeneous Horner: acc = acc·gn + pₖ·gd^(d-k)
    let d = f.degree;
    let mut gd_pows = Vec::with_capacity(d + 1);
    gd_pows.push(Poly::constant(Complex64::new(1.0, 0.0)));
    for k in 1..=d {
        let next = &gd_pows[k - 1] * &g.den;
        gd_pows.push(next);
    }
    let horner = |p: &Poly| {
        let mut acc = Poly::constant(p.coeff(d));
        for k in (0..d).rev() {
            acc = &(&acc * &g.num) + &gd_pows[d - k].scale(p.coeff(k));
        }
        acc
    };
    let num = horner(&f.num);
    let den = horner(&f.den);
    let got = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
    if got != target || num.is_zero() || den.is_zero() {
        return Err(Error::IllConditioned(format!("expected degree {target}, got {got}")));
    }
    let top = num.coeff(target).norm().max(den.coeff(target).norm());
    let scale = num.max_abs_coeff().max(den.max_abs_coeff());
    if !(top > 1e-290 * scale) || !scale.is_finite() {
        return Err(Error::IllConditioned("leading coefficient lost to underflow".into()));
    }
    RationalMap::new(num, den)
}

/// `fᵐ`, renormalizing after every composition.
pub fn iterate(f: &RationalMap, m: usize) -> Result<RationalMap> {
    if m == 0 {
        return Err(Error::InvalidParameter("iterate count must be at least 1".into()));
    }
    let total = (f.degree as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > DEGREE_CAP as u128 {
        return Err(Error::CapExceeded {
            degree: usize::try_from(total).unwrap_or(usize::MAX),
            cap: DEGREE_CAP,
        });
    }
    let mut acc = f.clone();
    for _ in 1..m {
        acc = compose(f, &acc)?;
    }
    Ok(acc)
}

/// `ρ ∘ f ∘ ρ⁻¹`.
pub fn conjugate(f: &RationalMap, rho: &RationalMap, rho_inv: &RationalMap) -> Result<RationalMap> {
    compose(rho, &compose(f, rho_inv)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::chordal_distance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z_pow(d: usize) -> RationalMap {
        let mut num = vec![0.0; d + 1];
        num[d] = 1.0;
        RationalMap::from_real(&num, &[1.0]).unwrap()
    }

    #[test]
    fn make_map_examples() {
        assert_eq!(z_pow(2).degree(), 2);
        let inv = RationalMap::from_real(&[1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(inv.degree(), 1);
        let err = RationalMap::from_real(&[0.0, 1.0], &[0.0, 1.0]).unwrap_err();
        assert!(err.to_string().contains("degenerate map"));
        assert!(RationalMap::from_real(&[3.0], &[1.0]).is_err());
        assert!(RationalMap::new(Poly::zero(), Poly::zero()).is_err());
    }

    #[test]
    fn near_common_root_rejected() {
        // (z - 1)(z + 2) / ((z - 1 - 1e-13)(z - 3))
        let num = Poly::from_roots(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        let den = Poly::from_roots(&[c(1.0 + 1e-13, 0.0), c(3.0, 0.0)]);
        assert!(matches!(RationalMap::new(num, den), Err(Error::DegenerateMap(_))));
    }

    #[test]
    fn normalization() {
        let f = RationalMap::from_real(&[0.0, 0.0, 4.0], &[2.0]).unwrap();
        assert_eq!(f.num().max_abs_coeff().max(f.den().max_abs_coeff()), 1.0);
    }

    #[test]
    fn apply_examples() {
        let sq = z_pow(2);
        assert!(sq.apply(&SpherePoint::INFINITY).is_infinity());
        let inv = RationalMap::from_real(&[1.0], &[0.0, 1.0]).unwrap();
        assert!(inv.apply(&SpherePoint::ORIGIN).is_infinity());
        let v = sq.apply_complex(c(1.0, 1.0)).to_complex().unwrap();
        assert!((v - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn apply_is_chart_stable_on_unit_circle() {
        let f = RationalMap::new(
            Poly::new(vec![c(0.3, 0.1), c(-1.0, 0.5), c(0.2, 0.0)]),
            Poly::new(vec![c(1.0, 0.0), c(0.0, 0.7)]),
        )
        .unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, k as f64 * 0.4);
            let pz = SpherePoint::raw(Chart::Z, z);
            let pu = SpherePoint::raw(Chart::U, z.inv());
            assert!(chordal_distance(&f.apply(&pz), &f.apply(&pu)) < 1e-12);
        }
    }

    #[test]
    fn norm_examples() {
        let sq = z_pow(2);
        assert!((sq.spherical_norm_deriv(&SpherePoint::from_re_im(1.0, 0.0)) - 2.0).abs() < 1e-15);
        assert_eq!(sq.spherical_norm_deriv(&SpherePoint::INFINITY), 0.0);
        let inv = RationalMap::from_real(&[1.0], &[0.0, 1.0]).unwrap();
        for p in [SpherePoint::ORIGIN, SpherePoint::INFINITY, SpherePoint::from_re_im(0.3, -4.0)] {
            assert!((inv.spherical_norm_deriv(&p) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn norm_near_infinity_matches_limit() {
        // ‖(z²)'‖ at |z| = r is 2r(1+r²)/(1+r⁴) → 0
        let sq = z_pow(2);
        let r: f64 = 1e6;
        let expected = 2.0 * r * (1.0 + r * r) / (1.0 + r.powi(4));
        let got = sq.spherical_norm_deriv(&SpherePoint::from_re_im(r, 0.0));
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn identity_norm_is_exactly_one() {
        let id = RationalMap::identity();
        for p in [SpherePoint::from_re_im(0.3, 0.9), SpherePoint::from_re_im(-7.0, 1.0), SpherePoint::INFINITY] {
            assert_eq!(id.spherical_norm_deriv(&p), 1.0);
        }
    }

    #[test]
    fn compose_examples() {
        let sq = z_pow(2);
        let q = compose(&sq, &sq).unwrap();
        assert_eq!(q, z_pow(4));
        let inv = RationalMap::from_real(&[1.0], &[0.0, 1.0]).unwrap();
        let id = compose(&inv, &inv).unwrap();
        assert_eq!(id.degree(), 1);
        assert_eq!(id, RationalMap::identity());
        let shift = RationalMap::from_real(&[1.0, 1.0], &[1.0]).unwrap();
        let h = compose(&sq, &shift).unwrap();
        let lead = h.num().leading();
        let normalized: Vec<Complex64> = h.num().coeffs().iter().map(|x| x / lead).collect();
        assert_eq!(normalized, vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn compose_cap() {
        let f = z_pow(64);
        let g = z_pow(65);
        assert!(matches!(compose(&f, &g), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(iterate(&z_pow(2), 3).unwrap(), z_pow(8));
        let f = RationalMap::from_real(&[1.0, 0.0, -2.0], &[0.5, 3.0]).unwrap();
        assert_eq!(iterate(&f, 1).unwrap(), f);
        assert!(matches!(iterate(&z_pow(2), 13), Err(Error::CapExceeded { .. })));
        assert!(iterate(&z_pow(2), 12).is_ok());
    }

    #[test]
    fn wronskian_degree_bound() {
        let f = RationalMap::from_real(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!(f.wronskian().degree().unwrap() <= 2 * f.degree() - 2);
        let naive = &(&f.num().derivative() * f.den()) - &(f.num() * &f.den().derivative());
        for k in 0..=2 * f.degree() - 2 {
            assert!((naive.coeff(k) - f.wronskian().coeff(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn map_json_round_trip() {
        let f = RationalMap::from_real(&[1.0, 0.0, -2.0], &[0.5, 3.0]).unwrap();
        let s = serde_json::to_string(&f.to_json()).unwrap();
        let back: MapJson = serde_json::from_str(&s).unwrap();
        assert_eq!(RationalMap::from_json(&back).unwrap(), f);
        let bad: MapJson = serde_json::from_str(r#"{"num": [[0,0],[1,0]], "den": [[0,0],[1,0]]}"#).unwrap();
        assert!(RationalMap::from_json(&bad).is_err());
        assert!(serde_json::from_str::<MapJson>(r#"{"num": [], "den": [], "extra": 1}"#).is_err());
    }
}
