//! Points of the Riemann sphere in two charts, the chordal metric, and
//! deterministic quadrature grids for the spherical area measure.
//!
//! Area is normalized so the whole sphere has area `π`, i.e. the area element
//! is `dx dy / (1 + |z|²)²`. Geometrically this is the round sphere of
//! diameter 1, so the chordal distance below is at most 1.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::sum::compensated_sum;
use crate::{Error, Result};

/// Which affine chart a coordinate lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// The usual coordinate `z`.
    Z,
    /// The coordinate `u = 1/z` around infinity.
    U,
}

impl Chart {
    pub fn as_str(self) -> &'static str {
        match self {
            Chart::Z => "z",
            Chart::U => "u",
        }
    }
}

/// A point of the Riemann sphere.
///
/// Canonical points have `|coord| ≤ 1` in their chart, with `|z| = 1` kept in
/// chart `Z`. Non-canonical points can be built with [`SpherePoint::raw`] to
/// evaluate something in a chosen chart; every constructor other than `raw`
/// canonicalizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    chart: Chart,
    coord: Complex64,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl SpherePoint {
    pub const ORIGIN: SpherePoint = SpherePoint { chart: Chart::Z, coord: ZERO };
    pub const INFINITY: SpherePoint = SpherePoint { chart: Chart::U, coord: ZERO };

    pub fn from_complex(z: Complex64) -> Self {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Self::INFINITY;
        }
        if z.norm() <= 1.0 {
            SpherePoint { chart: Chart::Z, coord: z }
        } else {
            SpherePoint { chart: Chart::U, coord: z.inv() }
        }
    }

    pub fn from_re_im(re: f64, im: f64) -> Self {
        Self::from_complex(Complex64::new(re, im))
    }

    /// Point with coordinate `coord` in `chart`, canonicalized.
    pub fn from_chart(chart: Chart, coord: Complex64) -> Self {
        Self::raw(chart, coord).canonical()
    }

    /// Point `[a : b]` in homogeneous coordinates (`z = a / b`).
    /// Returns `None` for `[0 : 0]`.
    pub fn from_homogeneous(a: Complex64, b: Complex64) -> Option<Self> {
        let (na, nb) = (a.norm(), b.norm());
        if na == 0.0 && nb == 0.0 || !(na.is_finite() && nb.is_finite()) {
            return None;
        }
        if na <= nb {
            Some(SpherePoint { chart: Chart::Z, coord: a / b })
        } else {
            Some(SpherePoint { chart: Chart::U, coord: b / a })
        }
    }

    /// Uncanonicalized point; `coord` may exceed 1 in modulus.
    pub fn raw(chart: Chart, coord: Complex64) -> Self {
        SpherePoint { chart, coord }
    }

    pub fn canonical(self) -> Self {
        match self.chart {
            Chart::Z => Self::from_complex(self.coord),
            Chart::U => {
                let n = self.coord.norm();
                if n < 1.0 {
                    self
                } else {
                    // |u| >= 1 means |z| <= 1; the tie |u| = 1 goes to chart Z.
                    SpherePoint { chart: Chart::Z, coord: self.coord.inv() }
                }
            }
        }
    }

    /// The same point expressed in `chart`, or `None` if it is that chart's pole.
    pub fn in_chart(self, chart: Chart) -> Option<Self> {
        if chart == self.chart {
            return Some(self);
        }
        if self.coord == ZERO {
            return None;
        }
        Some(SpherePoint { chart, coord: self.coord.inv() })
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn coord(&self) -> Complex64 {
        self.coord
    }

    pub fn is_infinity(&self) -> bool {
        self.chart == Chart::U && self.coord == ZERO
    }

    /// The finite value `z`, or `None` at infinity.
    pub fn to_complex(&self) -> Option<Complex64> {
        match self.chart {
            Chart::Z => Some(self.coord),
            Chart::U if self.coord == ZERO => None,
            Chart::U => Some(self.coord.inv()),
        }
    }

    /// Homogeneous coordinates `(a, b)` with `z = a / b`; one entry is exactly 1.
    pub fn homogeneous(&self) -> (Complex64, Complex64) {
        match self.chart {
            Chart::Z => (self.coord, ONE),
            Chart::U => (ONE, self.coord),
        }
    }

    /// Position on the unit sphere in R³ (north pole = infinity).
    pub fn to_unit_vector(&self) -> [f64; 3] {
        let (a, b) = self.homogeneous();
        let s = a.norm_sqr() + b.norm_sqr();
        let w = a * b.conj();
        [2.0 * w.re / s, 2.0 * w.im / s, (a.norm_sqr() - b.norm_sqr()) / s]
    }

    /// Inverse stereographic projection of a (not necessarily normalized) vector.
    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let (x, y, t) = (v[0] / n, v[1] / n, v[2] / n);
        if t <= 0.0 {
            SpherePoint::from_complex(Complex64::new(x, y) / (1.0 - t))
        } else {
            SpherePoint::from_chart(Chart::U, Complex64::new(x, -y) / (1.0 + t))
        }
    }

    /// Uniformly distributed random point.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            if v.iter().map(|c| c * c).sum::<f64>() > 1e-12 {
                return Self::from_unit_vector(v);
            }
        }
    }

    /// The diametrically opposite point, `z ↦ -1/z̄`.
    pub fn antipode(&self) -> Self {
        let (a, b) = self.homogeneous();
        SpherePoint::from_homogeneous(-b.conj(), a.conj()).expect("nonzero homogeneous pair")
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}{:+}i", self.chart.as_str(), self.coord.re, self.coord.im)
    }
}

/// Serialized as `[chart, re, im]`.
impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(3)?;
        t.serialize_element(self.chart.as_str())?;
        t.serialize_element(&self.coord.re)?;
        t.serialize_element(&self.coord.im)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (chart, re, im) = <(Chart, f64, f64)>::deserialize(deserializer)?;
        Ok(SpherePoint::from_chart(chart, Complex64::new(re, im)))
    }
}

/// Chordal distance normalized so antipodal points are at distance 1:
/// `|z - w| / sqrt((1 + |z|²)(1 + |w|²))`, evaluated homogeneously.
pub fn chordal_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    let (a1, b1) = p.homogeneous();
    let (a2, b2) = q.homogeneous();
    let num = (a1 * b2 - a2 * b1).norm();
    let den = ((a1.norm_sqr() + b1.norm_sqr()) * (a2.norm_sqr() + b2.norm_sqr())).sqrt();
    (num / den).min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    /// Golden-angle spiral with equal weights.
    Fibonacci,
    /// Equal-area polar product grid in each of the two charts.
    TwoChartProduct,
}

/// Quadrature nodes and weights for the spherical area measure (total `π`).
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    scheme: GridScheme,
}

impl SphereGrid {
    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    /// Typical chordal spacing between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        (PI / self.points.len() as f64).sqrt()
    }
}

pub const MIN_GRID_SIZE: usize = 8;

pub fn make_grid(n: usize, scheme: GridScheme) -> Result<SphereGrid> {
    if n < MIN_GRID_SIZE {
        return Err(Error::InvalidParameter(format!(
            "grid size {n} is below the minimum {MIN_GRID_SIZE}"
        )));
    }
    let points = match scheme {
        GridScheme::Fibonacci => fibonacci_points(n),
        GridScheme::TwoChartProduct => two_chart_points(n),
    };
    let w = PI / points.len() as f64;
    let weights = vec![w; points.len()];
    Ok(SphereGrid { points, weights, scheme })
}

fn fibonacci_points(n: usize) -> Vec<SpherePoint> {
    let golden = PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let t = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - t * t).max(0.0).sqrt();
            let phi = golden * i as f64;
            SpherePoint::from_unit_vector([r * phi.cos(), r * phi.sin(), t])
        })
        .collect()
}

/// Each hemisphere (`|z| ≤ 1` and `|u| ≤ 1`) is cut into equal-height bands
/// times equal angular sectors; all cells have the same area, so equal
/// weights are exact cell areas.
fn two_chart_points(n: usize) -> Vec<SpherePoint> {
    let n_theta = (n as f64).sqrt().ceil() as usize;
    let n_r = n.div_ceil(2 * n_theta);
    let mut pts = Vec::with_capacity(2 * n_r * n_theta);
    for hemi in [-1.0_f64, 1.0] {
        for j in 0..n_r {
            // t in (-1, 0) for the z-disc, (0, 1) for the u-disc
            let s = (j as f64 + 0.5) / n_r as f64;
            let t = if hemi < 0.0 { -1.0 + s } else { s };
            let r = (1.0 - t * t).sqrt();
            for k in 0..n_theta {
                let offset = if hemi < 0.0 { 0.5 } else { 0.25 };
                let theta = 2.0 * PI * (k as f64 + offset) / n_theta as f64;
                pts.push(SpherePoint::from_unit_vector([r * theta.cos(), r * theta.sin(), t]));
            }
        }
    }
    pts
}

/// `Σ wᵢ g(pᵢ)`, with an error naming the first node where `g` is not finite.
pub fn quadrature<G>(g: G, grid: &SphereGrid) -> Result<f64>
where
    G: Fn(&SpherePoint) -> f64 + Sync,
{
    let values: Vec<f64> = grid.points.par_iter().map(&g).collect();
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index, point: grid.points[index].to_string() });
    }
    Ok(compensated_sum(values.iter().zip(&grid.weights).map(|(v, w)| v * w)))
}
