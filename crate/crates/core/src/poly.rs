//! Dense univariate polynomials with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients in ascending powers; trailing exact zeros are trimmed, so the
/// last stored coefficient is nonzero (or the list is empty for `0`).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize, c: Complex64) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `∏ (z - rᵢ)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Poly::constant(Complex64::new(1.0, 0.0)), |acc, &r| {
            &acc * &Poly::new(vec![-r, Complex64::new(1.0, 0.0)])
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    /// Coefficient of `z^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `Σ cₖ u^(h-k)`, i.e. the degree-`h` homogenization evaluated at `[1 : u]`.
    /// Requires `h ≥ degree`.
    pub fn eval_reversed(&self, u: Complex64, h: usize) -> Complex64 {
        let Some(deg) = self.degree() else { return ZERO };
        debug_assert!(h >= deg);
        let acc = self.coeffs.iter().fold(ZERO, |acc, &c| acc * u + c);
        acc * u.powu((h - deg) as u32)
    }

    /// Degree-`h` homogenization `Σ cₖ aᵏ b^(h-k)` evaluated at `(a, b)`.
    ///
    /// Either `a` or `b` is expected to be 1 (as for canonical sphere points),
    /// in which case this is plain Horner in the matching chart.
    pub fn eval_homogeneous(&self, a: Complex64, b: Complex64, h: usize) -> Complex64 {
        if b == Complex64::new(1.0, 0.0) {
            self.eval(a)
        } else if a == Complex64::new(1.0, 0.0) {
            self.eval_reversed(b, h)
        } else if a.norm() <= b.norm() {
            self.eval(a / b) * b.powu(h as u32)
        } else {
            self.eval_reversed(b / a, h) * a.powu(h as u32)
        }
    }

    /// `Σ |cₖ| |a|ᵏ |b|^(h-k)`, the natural size scale of the homogeneous value.
    pub fn abs_eval_homogeneous(&self, a: Complex64, b: Complex64, h: usize) -> f64 {
        let (na, nb) = (a.norm(), b.norm());
        if na <= nb {
            let t = if nb > 0.0 { na / nb } else { 0.0 };
            self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.norm()) * nb.powi(h as i32)
        } else {
            let s = nb / na;
            let Some(deg) = self.degree() else { return 0.0 };
            let acc = self.coeffs.iter().fold(0.0, |acc, c| acc * s + c.norm());
            acc * s.powi((h - deg) as i32) * na.powi(h as i32)
        }
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::constant(Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for (o, &b) in out[i..].iter_mut().zip(&rhs.coeffs) {
                *o += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trims_and_degrees() {
        let p = Poly::new(vec![c(1.0, 0.0), ZERO, ZERO]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::from_real(&[0.0, 0.0, 1.0]).degree(), Some(2));
    }

    #[test]
    fn arithmetic() {
        let p = Poly::from_real(&[1.0, 1.0]);
        let sq = &p * &p;
        assert_eq!(sq, Poly::from_real(&[1.0, 2.0, 1.0]));
        assert_eq!(p.pow(3), Poly::from_real(&[1.0, 3.0, 3.0, 1.0]));
        assert_eq!(&sq - &sq, Poly::zero());
        assert_eq!(sq.derivative(), Poly::from_real(&[2.0, 2.0]));
    }

    #[test]
    fn homogeneous_evaluation_agrees_across_charts() {
        let p = Poly::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]);
        let z = c(1.7, -0.4);
        let h = 4;
        let direct = p.eval(z);
        // [z : 1] ~ [1 : 1/z], scaled by z^h
        let via_u = p.eval_homogeneous(c(1.0, 0.0), z.inv(), h) * z.powu(h as u32);
        assert!((direct - via_u).norm() < 1e-12 * direct.norm());
        let general = p.eval_homogeneous(z * 0.3, c(0.3, 0.0), h) / c(0.3, 0.0).powu(h as u32);
        assert!((direct - general).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn abs_eval_bounds_value() {
        let p = Poly::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]);
        for (a, b) in [(c(0.3, 0.2), c(1.0, 0.0)), (c(1.0, 0.0), c(-0.7, 0.1))] {
            let v = p.eval_homogeneous(a, b, 3).norm();
            assert!(v <= p.abs_eval_homogeneous(a, b, 3) * (1.0 + 1e-15));
        }
    }

    #[test]
    fn from_roots_expands() {
        let p = Poly::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(p, Poly::from_real(&[-1.0, 0.0, 1.0]));
    }
}
