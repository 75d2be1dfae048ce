//! Dense univariate polynomials over `Complex64`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative trimming threshold used when none is given.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-14;

/// Polynomial with `coeffs[i]` the coefficient of `z^i`.
///
/// Trailing coefficients whose magnitude is below `zero_threshold * max|c|`
/// are dropped after every operation, so `coeffs.last()` is always the
/// leading coefficient and the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
    #[serde(default = "default_threshold")]
    zero_threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_ZERO_THRESHOLD
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self::with_threshold(coeffs, DEFAULT_ZERO_THRESHOLD)
    }

    pub fn with_threshold(coeffs: Vec<Complex64>, zero_threshold: f64) -> Self {
        let mut p = Self {
            coeffs,
            zero_threshold,
        };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z`.
    pub fn variable() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    /// `a + b z`.
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Self::new(vec![a, b])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    /// Degree, `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn trim(&mut self) {
        let cut = self.zero_threshold * self.max_abs_coeff();
        while let Some(c) = self.coeffs.last() {
            if c.norm() <= cut || c.norm() == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    /// Horner magnitude bound `sum |c_i| |z|^i`, the natural scale for the
    /// rounding error of [`Polynomial::eval`].
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Self::with_threshold(coeffs, self.zero_threshold)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::with_threshold(
            self.coeffs.iter().map(|&c| c * s).collect(),
            self.zero_threshold,
        )
    }

    /// `p(z + a)` as a polynomial in `z`.
    pub fn shift(&self, a: Complex64) -> Self {
        let mut out = Self::with_threshold(Vec::new(), self.zero_threshold);
        let lin = Self::linear(a, Complex64::new(1.0, 0.0));
        for &c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Self::constant(c);
        }
        out.zero_threshold = self.zero_threshold;
        out
    }

    /// Euclidean division, returning `(quotient, remainder)`.
    ///
    /// Panics on a zero divisor.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dn = d.coeffs.len();
        if self.coeffs.len() < dn {
            return (Polynomial::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complex64::new(0.0, 0.0); rem.len() - dn + 1];
        let lead = d.leading();
        for k in (0..quot.len()).rev() {
            let q = rem[k + dn - 1] / lead;
            quot[k] = q;
            for (i, &dc) in d.coeffs.iter().enumerate() {
                rem[k + i] -= q * dc;
            }
        }
        rem.truncate(dn - 1);
        (
            Polynomial::with_threshold(quot, self.zero_threshold),
            Polynomial::with_threshold(rem, self.zero_threshold),
        )
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }
}

fn zip_with(
    a: &Polynomial,
    b: &Polynomial,
    f: impl Fn(Complex64, Complex64) -> Complex64,
) -> Polynomial {
    let n = a.coeffs.len().max(b.coeffs.len());
    let coeffs = (0..n).map(|i| f(a.coeff(i), b.coeff(i))).collect();
    Polynomial::with_threshold(coeffs, a.zero_threshold.min(b.zero_threshold))
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::with_threshold(Vec::new(), self.zero_threshold);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::with_threshold(out, self.zero_threshold.min(rhs.zero_threshold))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn add_and_mul() {
        let s = &Polynomial::from_real(&[1.0, 2.0]) + &Polynomial::from_real(&[3.0]);
        assert_eq!(s.real_coeffs(), vec![4.0, 2.0]);
        let x = Polynomial::variable();
        assert_eq!((&x * &x).real_coeffs(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn scale_to_zero_has_degree_minus_one() {
        let p = Polynomial::from_real(&[1.0, 1.0]).scale(c(0.0));
        assert_eq!(p.degree(), -1);
        assert!(p.is_zero());
    }

    #[test]
    fn trimming_is_relative() {
        let p = Polynomial::from_real(&[1.0, 2.0, 1e-15]);
        assert_eq!(p.degree(), 1);
        let q = Polynomial::with_threshold(vec![c(1.0), c(2.0), c(1e-15)], 0.0);
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn horner_matches_direct_sum() {
        let p = Polynomial::from_real(&[1.0, -3.0, 0.5, 2.0]);
        let z = Complex64::new(0.3, -1.1);
        let direct: Complex64 = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &a)| a * z.powu(i as u32))
            .sum();
        assert!((p.eval(z) - direct).norm() < 1e-14);
        assert_eq!(p.eval(z), p.eval(z));
    }

    #[test]
    fn shift_and_derivative() {
        // (z+1)^2 = z^2 + 2z + 1
        let p = Polynomial::from_real(&[0.0, 0.0, 1.0]).shift(c(1.0));
        assert_eq!(p.real_coeffs(), vec![1.0, 2.0, 1.0]);
        assert_eq!(p.derivative().real_coeffs(), vec![2.0, 2.0]);
    }

    #[test]
    fn division_reconstructs_dividend() {
        let a = Polynomial::from_real(&[1.0, -2.0, 0.0, 3.0, 1.0]);
        let d = Polynomial::from_real(&[0.5, 1.0, 2.0]);
        let (q, r) = a.div_rem(&d);
        assert!(r.degree() < d.degree());
        let back = &(&q * &d) + &r;
        for i in 0..5 {
            assert!((back.coeff(i) - a.coeff(i)).norm() < 1e-13);
        }
    }

    #[test]
    fn from_roots_vanishes_at_roots() {
        let roots = [c(1.0), c(-2.0), Complex64::new(0.5, 0.5)];
        let p = Polynomial::from_roots(&roots);
        assert_eq!(p.degree(), 3);
        for r in roots {
            assert!(p.eval(r).norm() < 1e-14);
        }
    }
}
