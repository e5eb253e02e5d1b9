//! Named map families.
//!
//! - `power:d=…`: `z ↦ z^d`
//! - `theorem1:n=…`: the tanh-product map `R_n` with `R_n(e^{2z}) = ∏_{|k|≤n} tanh(nz + 2k)`
//! - `lattes4`: the degree-4 Lattès map of the square lattice
//! - `chebyshev:d=…`: `T_d` with `T_d(w + 1/w) = w^d + w^{-d}`
//! - `random:d=…:seed=…`: Gaussian coefficients from a seeded generator

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::rational::RationalMap;
use crate::{Error, Result};

pub const THEOREM1_MAX_N: usize = 6;
pub const MAX_FAMILY_DEGREE: usize = 16;
const RANDOM_MAX_ATTEMPTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilyLabel {
    Power { d: usize },
    Theorem1 { n: usize },
    Lattes4,
    Chebyshev { d: usize },
    Random { d: usize, seed: u64 },
}

impl FamilyLabel {
    pub fn build(&self) -> Result<RationalMap> {
        match *self {
            FamilyLabel::Power { d } => power_map(d),
            FamilyLabel::Theorem1 { n } => theorem1_map(n),
            FamilyLabel::Lattes4 => Ok(lattes4()),
            FamilyLabel::Chebyshev { d } => chebyshev_map(d),
            FamilyLabel::Random { d, seed } => random_map(d, seed),
        }
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyLabel::Power { d } => write!(f, "power:d={d}"),
            FamilyLabel::Theorem1 { n } => write!(f, "theorem1:n={n}"),
            FamilyLabel::Lattes4 => write!(f, "lattes4"),
            FamilyLabel::Chebyshev { d } => write!(f, "chebyshev:d={d}"),
            FamilyLabel::Random { d, seed } => write!(f, "random:d={d}:seed={seed}"),
        }
    }
}

impl FromStr for FamilyLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.strip_prefix("family=").unwrap_or(s);
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let mut d = None;
        let mut n = None;
        let mut seed = None;
        for kv in parts {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("malformed family parameter '{kv}'")))?;
            let bad = |_| Error::InvalidParameter(format!("bad value for '{k}': '{v}'"));
            match k {
                "d" => d = Some(v.parse::<usize>().map_err(bad)?),
                "n" => n = Some(v.parse::<usize>().map_err(bad)?),
                "seed" => seed = Some(v.parse::<u64>().map_err(bad)?),
                _ => return Err(Error::InvalidParameter(format!("unknown family parameter '{k}'"))),
            }
        }
        let need = |x: Option<usize>, key: &str| {
            x.ok_or_else(|| Error::InvalidParameter(format!("family '{name}' needs parameter '{key}'")))
        };
        let label = match name {
            "power" if n.is_none() && seed.is_none() => FamilyLabel::Power { d: need(d, "d")? },
            "theorem1" if d.is_none() && seed.is_none() => FamilyLabel::Theorem1 { n: need(n, "n")? },
            "lattes4" if d.is_none() && n.is_none() && seed.is_none() => FamilyLabel::Lattes4,
            "chebyshev" if n.is_none() && seed.is_none() => FamilyLabel::Chebyshev { d: need(d, "d")? },
            "random" if n.is_none() => FamilyLabel::Random { d: need(d, "d")?, seed: seed.unwrap_or(0) },
            "power" | "theorem1" | "lattes4" | "chebyshev" | "random" => {
                return Err(Error::InvalidParameter(format!("unexpected parameter for family '{name}'")))
            }
            _ => return Err(Error::InvalidParameter(format!("unknown family '{name}'"))),
        };
        Ok(label)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `z ↦ z^d`.
pub fn power_map(d: usize) -> Result<RationalMap> {
    if d == 0 || d > crate::rational::DEGREE_CAP {
        return Err(Error::InvalidParameter(format!("power map degree {d} out of range")));
    }
    RationalMap::new(Poly::monomial(d, c(1.0)), Poly::constant(c(1.0)))
}

/// `R_n(w) = ∏_{k=-n}^{n} (e^{4k} wⁿ - 1) / (e^{4k} wⁿ + 1)`, expanded in `w`.
///
/// Each factor is scaled by `e^{-2k}` before expanding; the scales multiply
/// to 1, and the balanced factors keep the coefficient range smaller.
/// The degree is `n(2n + 1)`.
pub fn theorem1_map(n: usize) -> Result<RationalMap> {
    if n == 0 || n > THEOREM1_MAX_N {
        return Err(Error::InvalidParameter(format!(
            "theorem1 parameter n={n} outside 1..={THEOREM1_MAX_N}"
        )));
    }
    let ni = n as i64;
    let mut num = Poly::constant(c(1.0));
    let mut den = Poly::constant(c(1.0));
    for k in -ni..=ni {
        let hi = (2.0 * k as f64).exp();
        let lo = (-2.0 * k as f64).exp();
        let mut f_num = vec![Complex64::new(0.0, 0.0); n + 1];
        f_num[0] = c(-lo);
        f_num[n] = c(hi);
        let mut f_den = f_num.clone();
        f_den[0] = c(lo);
        num = &num * &Poly::new(f_num);
        den = &den * &Poly::new(f_den);
    }
    RationalMap::new(num, den)
}

/// The tanh-product oracle `∏_{k=-n}^{n} tanh(ζ + 2k)`.
pub fn tanh_product(n: usize, zeta: Complex64) -> Complex64 {
    let ni = n as i64;
    (-ni..=ni).map(|k| (zeta + c(2.0 * k as f64)).tanh()).product()
}

/// `L(z) = (z² + 1)² / (4z(z² - 1))`, the duplication map of the Weierstrass
/// function with `g₂ = 4`, `g₃ = 0`: `℘(2u) = L(℘(u))`. Infinity is a fixed
/// point with multiplier 4.
pub fn lattes4() -> RationalMap {
    RationalMap::from_real(&[1.0, 0.0, 2.0, 0.0, 1.0], &[0.0, -4.0, 0.0, 4.0])
        .expect("the Lattès map is reduced")
}

/// Chebyshev polynomial normalized by `T_d(w + 1/w) = w^d + w^{-d}`.
pub fn chebyshev_map(d: usize) -> Result<RationalMap> {
    if !(2..=MAX_FAMILY_DEGREE).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "chebyshev degree {d} outside 2..={MAX_FAMILY_DEGREE}"
        )));
    }
    let z = Poly::from_real(&[0.0, 1.0]);
    let mut prev = Poly::constant(c(2.0));
    let mut cur = z.clone();
    for _ in 1..d {
        let next = &(&z * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    RationalMap::new(cur, Poly::constant(c(1.0)))
}

/// Numerator and denominator of degree `d` with i.i.d. complex standard
/// normal coefficients (`E|c|² = 1`).
pub fn random_map(d: usize, seed: u64) -> Result<RationalMap> {
    if !(2..=MAX_FAMILY_DEGREE).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "random map degree {d} outside 2..={MAX_FAMILY_DEGREE}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut normal = move || -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * scale, im * scale)
    };
    let mut last_err = None;
    for _ in 0..RANDOM_MAX_ATTEMPTS {
        let mut draw = || {
            let mut cs: Vec<Complex64> = (0..=d).map(|_| normal()).collect();
            while cs[d].norm() < 0.1 {
                cs[d] = normal();
            }
            Poly::new(cs)
        };
        let num = draw();
        let den = draw();
        match RationalMap::new(num, den) {
            Ok(f) => return Ok(f),
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::NoAdmissibleStart(format!(
        "random_map(d={d}, seed={seed}) failed {RANDOM_MAX_ATTEMPTS} times: {}",
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}
