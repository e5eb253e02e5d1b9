#![allow(dead_code)]

use proptest::test_runner::{Config, RngSeed};
use sphdyn::{Complex64, RationalMap, SpherePoint};

/// Property-test configuration with a fixed RNG seed, so every run draws
/// the same cases.
pub fn cases(n: u32) -> Config {
    Config { cases: n, rng_seed: RngSeed::Fixed(20_261_016), failure_persistence: None, ..Config::default() }
}

/// `|f'(z)| (1 + |z|²) / (1 + |f(z)|²)` from `p`, `q`, `p'`, `q'` evaluated
/// directly in the plane.
pub fn plane_norm(f: &RationalMap, z: Complex64) -> f64 {
    let (p, q) = (f.num().eval(z), f.den().eval(z));
    let (dp, dq) = (f.num().derivative().eval(z), f.den().derivative().eval(z));
    let fz = p / q;
    let dfz = (dp * q - p * dq) / (q * q);
    dfz.norm() * (1.0 + z.norm_sqr()) / (1.0 + fz.norm_sqr())
}

pub fn plane_point(z: Complex64) -> SpherePoint {
    SpherePoint::from_complex(z)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Critical value of the two-sample KS statistic, `c(α) sqrt((n + m)/(n m))`
/// with `c(α) = sqrt(-ln(α/2)/2)`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}
