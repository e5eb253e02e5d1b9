//! All roots of a complex polynomial by Aberth–Ehrlich simultaneous iteration.
//!
//! Starting points come from the Newton polygon of `log |cₖ|`, which places
//! one circle per slope and matches root moduli even when they spread over
//! many orders of magnitude (deep iterates do this). Newton corrections for
//! `|z| > 1` are computed from the reversed polynomial so that evaluation
//! never overflows.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::poly::Poly;
use crate::{Error, Result};

pub const MAX_SWEEPS: usize = 500;
/// Largest degree accepted (fixed points of a degree-4096 iterate give 4097).
pub const MAX_ROOT_DEGREE: usize = 4097;
/// Required relative backward error `|p(r)| / Σ|cₖ||r|ᵏ` for every root.
pub const RESIDUAL_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Newton step `p(z)/p'(z)` and relative backward error at `z`.
fn newton_and_residual(c: &[Complex64], abs_c: &[f64], z: Complex64) -> (Complex64, f64) {
    let n = c.len() - 1;
    let r = z.norm();
    if r <= 1.0 {
        let mut p = c[n];
        let mut dp = ZERO;
        let mut s = abs_c[n];
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
            s = s * r + abs_c[k];
        }
        (p / dp, p.norm() / s)
    } else {
        // p(z) = zⁿ R(y), y = 1/z, R(y) = Σ c_{n-k} yᵏ;  p/p' = z R / (n R - y R')
        let y = z.inv();
        let ry = y.norm();
        let mut rv = c[0];
        let mut drv = ZERO;
        let mut s = abs_c[0];
        for k in 1..=n {
            drv = drv * y + rv;
            rv = rv * y + c[k];
            s = s * ry + abs_c[k];
        }
        (z * rv / (rv * n as f64 - y * drv), rv.norm() / s)
    }
}

/// Initial approximations on circles read off the upper convex hull of
/// `(k, log|cₖ|)`.
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(k, v)| (k, v.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or below the segment a-p
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = 0.7;
    let mut guesses = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let ((i, li), (j, lj)) = (w[0], w[1]);
        let m = j - i;
        let radius = ((li - lj) / m as f64).exp();
        for q in 0..m {
            let angle = 2.0 * PI * q as f64 / m as f64 + 2.0 * PI * i as f64 / n as f64 + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

/// Roots with multiplicity. Exact zero low-order coefficients are deflated
/// as exact roots at 0.
pub fn poly_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let Some(deg) = p.degree() else {
        return Err(Error::InvalidParameter("roots of the zero polynomial".into()));
    };
    if deg == 0 {
        return Err(Error::InvalidParameter("roots of a constant polynomial".into()));
    }
    if deg > MAX_ROOT_DEGREE {
        return Err(Error::CapExceeded { degree: deg, cap: MAX_ROOT_DEGREE });
    }
    if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite polynomial coefficient".into()));
    }
    let zeros = p.coeffs().iter().take_while(|c| **c == ZERO).count();
    let scale = p.max_abs_coeff();
    let c: Vec<Complex64> = p.coeffs()[zeros..].iter().map(|v| v / scale).collect();
    let mut roots = vec![ZERO; zeros];
    let n = c.len() - 1;
    match n {
        0 => return Ok(roots),
        1 => {
            roots.push(-c[0] / c[1]);
            return Ok(roots);
        }
        _ => {}
    }
    let abs_c: Vec<f64> = c.iter().map(|v| v.norm()).collect();
    let mut z = initial_guesses(&c);
    let tiny = 4.0 * f64::EPSILON * n as f64;
    let sweeps = aberth(&mut z, MAX_SWEEPS, |zi| {
        let (ratio, resid) = newton_and_residual(&c, &abs_c, zi);
        (ratio, resid <= tiny || resid == 0.0)
    });
    // Newton polish; keep a step only if it lowers the residual.
    let mut worst: f64 = 0.0;
    for zi in z.iter_mut() {
        let (mut ratio, mut resid) = newton_and_residual(&c, &abs_c, *zi);
        for _ in 0..3 {
            let cand = *zi - ratio;
            if !(cand.re.is_finite() && cand.im.is_finite()) {
                break;
            }
            let (r2, res2) = newton_and_residual(&c, &abs_c, cand);
            if res2 < resid {
                *zi = cand;
                ratio = r2;
                resid = res2;
            } else {
                break;
            }
        }
        worst = worst.max(resid);
    }
    if !(worst < RESIDUAL_TOL) {
        return Err(Error::RootFinding { sweeps, worst_residual: worst });
    }
    roots.extend(z);
    Ok(roots)
}

/// Relative backward error of `z` as a root of `p`.
pub fn relative_residual(p: &Poly, z: Complex64) -> f64 {
    let c = p.coeffs();
    let abs_c: Vec<f64> = c.iter().map(|v| v.norm()).collect();
    newton_and_residual(c, &abs_c, z).1
}

/// Gauss–Seidel Aberth–Ehrlich sweeps on `z` in place. `newton(z)` returns
/// the Newton correction `p/p'` and whether `z` already counts as a root.
/// A root is also frozen once its step is at rounding level, or once steps
/// stop shrinking at a small size (the evaluation noise floor).
/// Returns the number of sweeps used.
pub(crate) fn aberth<F>(z: &mut [Complex64], max_sweeps: usize, newton: F) -> usize
where
    F: Fn(Complex64) -> (Complex64, bool),
{
    let n = z.len();
    let eps = f64::EPSILON;
    let mut done = vec![false; n];
    let mut last_step = vec![f64::INFINITY; n];
    let mut sweeps = 0;
    while sweeps < max_sweeps && done.iter().any(|d| !d) {
        sweeps += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let (ratio, converged) = newton(zi);
            if converged {
                done[i] = true;
                continue;
            }
            let mut s = ZERO;
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    s += (zi - zj).inv();
                }
            }
            let mut w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                w = Complex64::from_polar(1e-8 * zi.norm().max(1e-8), i as f64);
            }
            z[i] = zi - w;
            // step measured chordally so that large roots are treated alike
            let step = w.norm() / (1.0 + z[i].norm_sqr());
            let scale = z[i].norm() / (1.0 + z[i].norm_sqr());
            if step <= 2.0 * eps * scale.max(eps) || (step < 1e-9 && step >= 0.5 * last_step[i]) {
                done[i] = true;
            }
            last_step[i] = step;
        }
    }
    sweeps
}
