//! Monodromy eigenvalues for half-integer `kappa = k - 1/2`: zeros of the
//! determinant polynomial `P(kappa; lambda; mu, nu)` of degree `2k - 1`.
//!
//! `P` is `det Gamma` as a polynomial in `Lambda = lambda - mu`, where
//! `Gamma` is the `(2k+1) x (2k+1)` matrix whose null vectors are the
//! coefficients of polynomial solutions `p(x) e^{2tx}`, `t^2 = nu^2 - mu^2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::delta_solver::continuation_path;
use crate::error::{Error, Result};
use crate::estimate::{EigenvalueEstimate, Method};
use crate::model::cx;
use crate::numerics::{poly_roots, sort_lex, Polynomial};

/// Largest `k` accepted by [`monodromy_polynomial`].
pub const MAX_K: usize = 8;
/// Relative tolerance for the agreement of `det Gamma` at `t` and `-t`.
pub const EVENNESS_TOL: f64 = 1e-10;

/// Square matrix of polynomials in `Lambda`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    pub n: usize,
    pub entries: Vec<Polynomial>,
}

impl PolyMatrix {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Polynomial::zero(); n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.entries[i * self.n + j] = p;
    }

    /// Numeric matrix at `Lambda = z`.
    pub fn eval(&self, z: Complex64) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).eval(z)).collect())
            .collect()
    }
}

// `a + b Lambda`
fn lin(a: Complex64, b: f64) -> Polynomial {
    Polynomial::linear(a, cx(b))
}

fn put_block(m: &mut PolyMatrix, block_row: usize, block_col: usize, b: [[Polynomial; 2]; 2]) {
    let r = 1 + 2 * block_row;
    let c = 2 * block_col;
    for (i, row) in b.into_iter().enumerate() {
        for (j, p) in row.into_iter().enumerate() {
            m.set(r + i, c + j, p);
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 1 || k > MAX_K {
        return Err(Error::InvalidParameter(format!("k = {k} must lie in 1..={MAX_K}")));
    }
    Ok(())
}

/// The matrix `Gamma(kappa; Lambda; mu, nu; t)` with `k = kappa + 1/2`.
///
/// Row 0 is `(0, k, 0, ...)`. Block row `i = 1, ..., k-1` (rows `2i-1, 2i`)
/// carries `S_{i-1}` in block column `i-1`, `B0 - i` in block column `i`,
/// `-R` in block column `i-2` and `Q` further left. The last two rows carry
/// `Q` in block columns `0..k-2`, `-R` in block column `k-1` and
/// `(-k, Lambda)` in the last column.
pub fn gamma_matrix(k: usize, mu: f64, nu: f64, t: Complex64) -> Result<PolyMatrix> {
    check_k(k)?;
    let (mu, nu) = (cx(mu), cx(nu));
    let kf = k as f64;
    let c = |z: Complex64| Polynomial::constant(z);
    let z = Polynomial::zero;
    let n = 2 * k + 1;
    let mut m = PolyMatrix::zeros(n);
    if k == 1 {
        m.set(0, 1, c(cx(1.0)));
        m.set(1, 0, c(cx(-1.0)));
        m.set(1, 1, Polynomial::variable());
        m.set(1, 2, c(cx(-1.0)));
        m.set(2, 0, c(-mu * 2.0));
        m.set(2, 1, c(t * 2.0 - nu * 2.0));
        m.set(2, 2, Polynomial::variable());
        return Ok(m);
    }
    let q = || [[c(cx(-kf)), z()], [z(), z()]];
    let minus_r = || [[c(cx(-kf)), z()], [c(-mu * 2.0), c(t * 2.0 - nu * 2.0)]];
    let s = |i: usize| {
        [
            [c(-nu * 2.0 - t * 2.0 - kf), c(-mu * 2.0)],
            [lin(mu * 2.0, 1.0), c(nu * 2.0 - t * 2.0 + (i as f64 - kf))],
        ]
    };
    let b0_shift = |i: usize| [[c(cx(-(i as f64))), lin(cx(0.0), -1.0)], [z(), c(cx(kf - i as f64))]];

    m.set(0, 1, c(cx(kf)));
    for i in 1..k {
        let br = i - 1;
        put_block(&mut m, br, i, b0_shift(i));
        put_block(&mut m, br, i - 1, s(i - 1));
        if i >= 2 {
            put_block(&mut m, br, i - 2, minus_r());
        }
        for col in 0..i.saturating_sub(2) {
            put_block(&mut m, br, col, q());
        }
    }
    let br = k - 1;
    for col in 0..k - 1 {
        put_block(&mut m, br, col, q());
    }
    put_block(&mut m, br, k - 1, minus_r());
    m.set(n - 2, n - 1, c(cx(-kf)));
    m.set(n - 1, n - 1, Polynomial::variable());
    Ok(m)
}

/// The `(2k+1) x (2k+1)` matrix before the row operations that produce
/// [`gamma_matrix`]; its determinant is the same. Used as a cross-check.
pub fn gamma_hat_matrix(k: usize, mu: f64, nu: f64, t: Complex64) -> Result<PolyMatrix> {
    check_k(k)?;
    let (mu, nu) = (cx(mu), cx(nu));
    let kf = k as f64;
    let c = |z: Complex64| Polynomial::constant(z);
    let z = Polynomial::zero;
    let n = 2 * k + 1;
    let mut m = PolyMatrix::zeros(n);
    let minus_ct = || [[c(nu * 2.0 + t * 2.0), c(mu * 2.0)], [c(-mu * 2.0), c(t * 2.0 - nu * 2.0)]];
    let s = |i: usize| {
        let sh = i as f64 - kf;
        [
            [c(-nu * 2.0 - t * 2.0 + sh), lin(-mu * 2.0, 1.0)],
            [lin(mu * 2.0, 1.0), c(nu * 2.0 - t * 2.0 + sh)],
        ]
    };
    let b0_shift = |i: usize| [[c(cx(-(i as f64))), lin(cx(0.0), -1.0)], [z(), c(cx(kf - i as f64))]];

    m.set(0, 1, c(cx(kf)));
    for i in 1..k {
        let br = i - 1;
        put_block(&mut m, br, i, b0_shift(i));
        put_block(&mut m, br, i - 1, s(i - 1));
        if i >= 2 {
            put_block(&mut m, br, i - 2, minus_ct());
        }
    }
    let r = 2 * k - 1;
    if k >= 2 {
        m.set(r, 2 * (k - 2), c(nu * 2.0 + t * 2.0));
        m.set(r, 2 * (k - 2) + 1, c(mu * 2.0));
    }
    m.set(r, 2 * (k - 1), c(cx(-1.0)));
    m.set(r, 2 * (k - 1) + 1, Polynomial::variable());
    m.set(r, 2 * k, c(cx(-kf)));
    m.set(r + 1, 2 * (k - 1), c(-mu * 2.0));
    m.set(r + 1, 2 * (k - 1) + 1, c(t * 2.0 - nu * 2.0));
    m.set(r + 1, 2 * k, Polynomial::variable());
    Ok(m)
}

/// Determinant by cofactor expansion along the first row, skipping zero entries.
pub fn determinant_cofactor(m: &PolyMatrix) -> Polynomial {
    let rows: Vec<usize> = (0..m.n).collect();
    let cols: Vec<usize> = (0..m.n).collect();
    cofactor(m, &rows, &cols)
}

fn cofactor(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> Polynomial {
    if rows.len() == 1 {
        return m.get(rows[0], cols[0]).clone();
    }
    let mut acc = Polynomial::zero();
    for (jj, &c) in cols.iter().enumerate() {
        let e = m.get(rows[0], c);
        if e.is_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor(m, &rows[1..], &sub_cols);
        let term = e * &minor;
        acc = if jj % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Determinant by interpolation: `det` is evaluated by LU factorization at
/// `n + 1` points on the circle `|Lambda| = radius` (`n` the matrix size,
/// which bounds the degree) and the coefficients are recovered by a
/// discrete Fourier transform.
pub fn determinant_interpolated(m: &PolyMatrix, radius: f64) -> Polynomial {
    let n = m.n;
    let pts = n + 1;
    let vals: Vec<(Complex64, Complex64)> = (0..pts)
        .map(|i| {
            let z = Complex64::from_polar(radius, 2.0 * PI * i as f64 / pts as f64);
            let a = DMatrix::from_fn(n, n, |r, c| m.get(r, c).eval(z));
            (z, a.determinant())
        })
        .collect();
    let coeffs = (0..pts)
        .map(|d| {
            let s: Complex64 = vals.iter().map(|&(z, v)| v * z.powi(-(d as i32))).sum();
            s / pts as f64
        })
        .collect();
    Polynomial::new(coeffs)
}

/// `det Gamma`: cofactor expansion for `k <= 3`, interpolation above.
/// Coefficients beyond the degree `2k - 1` must vanish to rounding and are
/// dropped.
pub fn determinant(m: &PolyMatrix) -> Result<Polynomial> {
    let k = (m.n - 1) / 2;
    let full = if k <= 3 {
        determinant_cofactor(m)
    } else {
        determinant_interpolated(m, k as f64)
    };
    let deg = 2 * k - 1;
    let scale = full.max_abs_coeff().max(f64::MIN_POSITIVE);
    let excess = full.coeffs().iter().skip(deg + 1).map(|c| c.norm()).fold(0.0, f64::max);
    if excess > 1e-9 * scale {
        return Err(Error::Consistency(format!(
            "det Gamma has degree above {deg}: coefficient {excess:.3e} of {scale:.3e}"
        )));
    }
    Ok(Polynomial::new(full.coeffs().iter().take(deg + 1).copied().collect()))
}

/// `k` with `kappa = k - 1/2`, or an error for other `kappa`.
pub fn half_integer_k(kappa: f64) -> Result<usize> {
    let k = (kappa + 0.5).round();
    if k < 1.0 || (kappa + 0.5 - k).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} is not a half-integer >= 1/2")));
    }
    Ok(k as usize)
}

/// Principal `t = sqrt(nu^2 - mu^2)`, complex when `mu^2 > nu^2`.
pub fn t_parameter(mu: f64, nu: f64) -> Complex64 {
    cx(nu * nu - mu * mu).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyPolynomial {
    pub kappa: f64,
    pub k: usize,
    /// `P` as a polynomial in `lambda`, normalized to leading coefficient `+k^2`.
    pub poly: Polynomial,
    pub mu: f64,
    pub nu: f64,
    /// Sign applied to `det Gamma` by the normalization.
    pub sign: f64,
    /// Largest coefficient difference between `det Gamma` at `t` and `-t`,
    /// relative to the largest coefficient.
    pub evenness_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyJson {
    pub kappa: f64,
    pub k: usize,
    pub mu: f64,
    pub nu: f64,
    pub coefficients: Vec<f64>,
    pub roots: Vec<[f64; 2]>,
}

impl MonodromyPolynomial {
    pub fn degree(&self) -> usize {
        self.poly.degree().max(0) as usize
    }

    pub fn to_json(&self, tol: f64) -> Result<MonodromyJson> {
        let roots = roots_of(&self.poly, tol)?;
        Ok(MonodromyJson {
            kappa: self.kappa,
            k: self.k,
            mu: self.mu,
            nu: self.nu,
            coefficients: self.poly.real_coeffs(),
            roots: roots.iter().map(|r| [r.re, r.im]).collect(),
        })
    }
}

fn relative_difference(a: &Polynomial, b: &Polynomial) -> f64 {
    let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(f64::MIN_POSITIVE);
    (a - b).max_abs_coeff() / scale
}

pub fn monodromy_polynomial(kappa: f64, mu: f64, nu: f64) -> Result<MonodromyPolynomial> {
    let k = half_integer_k(kappa)?;
    let t = t_parameter(mu, nu);
    let plus = determinant(&gamma_matrix(k, mu, nu, t)?)?;
    let minus = determinant(&gamma_matrix(k, mu, nu, -t)?)?;
    let defect = relative_difference(&plus, &minus);
    if defect > EVENNESS_TOL {
        return Err(Error::Consistency(format!(
            "det Gamma differs between t and -t by {defect:.3e} (relative)"
        )));
    }
    // Odd powers of t cancel in the average; what remains is real.
    let avg = (&plus + &minus).scale(cx(0.5));
    let real = Polynomial::from_real(&avg.real_coeffs());
    let p = real.shift(cx(-mu));
    let sign = if p.leading().re < 0.0 { -1.0 } else { 1.0 };
    Ok(MonodromyPolynomial {
        kappa,
        k,
        poly: p.scale(cx(sign)),
        mu,
        nu,
        sign,
        evenness_defect: defect,
    })
}

fn roots_of(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    if p.degree() < 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for r in poly_roots(p, tol)? {
        out.extend(std::iter::repeat(r.value).take(r.multiplicity));
    }
    sort_lex(&mut out);
    Ok(out)
}

/// All `2k - 1` zeros of `P(kappa; .; mu, nu)`, sorted by real part.
pub fn monodromy_eigenvalues(kappa: f64, mu: f64, nu: f64, tol: f64) -> Result<Vec<Complex64>> {
    roots_of(&monodromy_polynomial(kappa, mu, nu)?.poly, tol)
}

/// The monodromy eigenvalue `lambda_0^j(kappa; mu, nu)`, `|j| <= k - 1`,
/// followed from `lambda_0^j(kappa; 0, 0) = j` along the continuation path.
pub fn monodromy_eigenvalue(kappa: f64, j: i32, mu: f64, nu: f64, tol: f64) -> Result<EigenvalueEstimate> {
    let k = half_integer_k(kappa)? as i32;
    if j.abs() > k - 1 {
        return Err(Error::InvalidParameter(format!("monodromy index {j} outside {}..={}", 1 - k, k - 1)));
    }
    let mut lambda = cx(f64::from(j));
    let mut poly = monodromy_polynomial(kappa, 0.0, 0.0)?;
    if mu != 0.0 || nu != 0.0 {
        for (m, n) in continuation_path(mu, nu) {
            poly = monodromy_polynomial(kappa, m, n)?;
            let roots = roots_of(&poly.poly, tol)?;
            lambda = *roots
                .iter()
                .min_by(|a, b| (*a - lambda).norm().total_cmp(&(*b - lambda).norm()))
                .ok_or_else(|| Error::TrackingFailure("empty root set".into()))?;
        }
    } else {
        let roots = roots_of(&poly.poly, tol)?;
        lambda = *roots
            .iter()
            .min_by(|a, b| (*a - lambda).norm().total_cmp(&(*b - lambda).norm()))
            .ok_or_else(|| Error::TrackingFailure("empty root set".into()))?;
    }
    if lambda.im.abs() > 1e-8 * (1.0 + lambda.re.abs()) {
        return Err(Error::TrackingFailure(format!("monodromy eigenvalue {lambda} left the real axis")));
    }
    Ok(EigenvalueEstimate {
        value: lambda.re,
        j,
        method: Method::Monodromy,
        order: poly.degree(),
        residual: poly.poly.eval(lambda).norm(),
        flagged: false,
        alternate: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_one_matrix() {
        let m = gamma_matrix(1, 0.3, 0.5, cx(0.4)).unwrap();
        let at = m.eval(cx(2.0));
        let expect = [[0.0, 1.0, 0.0], [-1.0, 2.0, -1.0], [-0.6, -0.2, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((at[i][j] - cx(expect[i][j])).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn k_two_layout() {
        let m = gamma_matrix(2, 0.0, 0.0, cx(0.0)).unwrap();
        let row0: Vec<_> = (0..5).map(|j| m.get(0, j).eval(cx(0.0)).re).collect();
        assert_eq!(row0, vec![0.0, 2.0, 0.0, 0.0, 0.0]);
        // S_0 = [[-2, 0], [Lambda, -2]]
        let lam = cx(0.7);
        assert_eq!(m.get(1, 0).eval(lam), cx(-2.0));
        assert_eq!(m.get(1, 1).eval(lam), cx(0.0));
        assert_eq!(m.get(2, 0).eval(lam), lam);
        assert_eq!(m.get(2, 1).eval(lam), cx(-2.0));
    }

    #[test]
    fn rejects_non_half_integers() {
        assert!(monodromy_polynomial(1.0, 0.0, 0.0).is_err());
        assert!(gamma_matrix(0, 0.0, 0.0, cx(0.0)).is_err());
        assert_eq!(half_integer_k(2.5).unwrap(), 3);
    }

    #[test]
    fn kappa_half_is_lambda_plus_mu() {
        for &(mu, nu) in &[(0.25, 0.75), (-0.4, 0.1), (0.9, -0.3), (0.5, 0.5)] {
            let p = monodromy_polynomial(0.5, mu, nu).unwrap();
            assert_eq!(p.degree(), 1);
            assert!((p.poly.coeff(0) - cx(mu)).norm() < 1e-14);
            assert!((p.poly.coeff(1) - cx(1.0)).norm() < 1e-14);
        }
        let r = monodromy_eigenvalues(0.5, 0.25, 0.75, 1e-14).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - cx(-0.25)).norm() < 1e-14);
    }

    #[test]
    fn integer_roots_at_origin() {
        for k in 1..=MAX_K {
            let kappa = k as f64 - 0.5;
            let p = monodromy_polynomial(kappa, 0.0, 0.0).unwrap();
            assert_eq!(p.degree(), 2 * k - 1);
            assert!((p.poly.leading() - cx((k * k) as f64)).norm() < 1e-9 * (k * k) as f64);
            let r = monodromy_eigenvalues(kappa, 0.0, 0.0, 1e-13).unwrap();
            for (i, z) in r.iter().enumerate() {
                let expect = i as f64 - (k as f64 - 1.0);
                assert!((z - cx(expect)).norm() < 1e-8, "k={k}: {z} vs {expect}");
            }
        }
    }

    #[test]
    fn interpolation_matches_cofactor() {
        for k in 1..=3 {
            for &(mu, nu) in &[(0.3, -0.7), (0.6, 0.2)] {
                let t = t_parameter(mu, nu);
                let m = gamma_matrix(k, mu, nu, t).unwrap();
                let a = determinant_cofactor(&m);
                let b = determinant_interpolated(&m, k as f64);
                assert!(relative_difference(&a, &b) < 1e-12);
            }
        }
    }

    #[test]
    fn row_operations_preserve_determinant() {
        for k in 1..=4 {
            for &(mu, nu) in &[(0.3, -0.7), (0.6, 0.2), (0.0, 0.0)] {
                let t = t_parameter(mu, nu);
                let a = determinant(&gamma_matrix(k, mu, nu, t).unwrap()).unwrap();
                let b = determinant(&gamma_hat_matrix(k, mu, nu, t).unwrap()).unwrap();
                if k == 1 {
                    // the k = 1 matrix is reduced separately
                    continue;
                }
                assert!(relative_difference(&a, &b) < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn t_evenness_and_real_coefficients() {
        for &(mu, nu) in &[(0.01, 0.02), (0.3, 0.1), (-0.2, 0.45), (0.5, 0.5)] {
            let p = monodromy_polynomial(2.5, mu, nu).unwrap();
            assert!(p.evenness_defect < 1e-12);
            assert_eq!(p.degree(), 5);
        }
    }

    #[test]
    fn roots_near_origin_are_real_and_close() {
        let r = monodromy_eigenvalues(1.5, 0.01, 0.02, 1e-13).unwrap();
        assert_eq!(r.len(), 3);
        for (z, e) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!(z.im.abs() < 1e-10 && (z.re - e).abs() < 0.1);
        }
        let e = monodromy_eigenvalue(1.5, 0, 0.01, 0.02, 1e-13).unwrap();
        assert!(e.value.abs() < 0.1);
    }
}
