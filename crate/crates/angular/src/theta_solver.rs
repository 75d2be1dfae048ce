//! The Taylor coefficients `d_n(lambda)` at `x = 0` of the system for
//! `x^{-alpha} (1-x)^{alpha-1} y`, their second components `Theta_n`, and
//! eigenvalues as zeros of `Theta = lim Theta_n`.

use num_complex::Complex64;

use crate::delta_solver::{continuation_path, nearest_real_zero};
use crate::error::Result;
use crate::estimate::{EigenvalueEstimate, Method};
use crate::model::{base_eigenvalue, cx, ModelParams, SpectralIndex};
use crate::numerics::Polynomial;

/// Order used while tracking the zero along the continuation path.
pub const TRACKING_ORDER: usize = 32;
/// Largest order tried by [`eigenvalue_theta`].
pub const MAX_ORDER: usize = 256;

/// The pairs `d_0, ..., d_N` as polynomials in `lambda`.
#[derive(Clone, Debug)]
pub struct ThetaPolynomialSequence {
    pub d: Vec<(Polynomial, Polynomial)>,
}

impl ThetaPolynomialSequence {
    pub fn order(&self) -> usize {
        self.d.len() - 1
    }

    /// `Theta_n`, the second component of `d_n`.
    pub fn theta(&self, n: usize) -> &Polynomial {
        &self.d[n].1
    }
}

pub fn theta_sequence(p: &ModelParams, n_max: usize) -> ThetaPolynomialSequence {
    // No trimming: the top coefficients are tiny but matter for |lambda| > 1.
    let lam = Polynomial::with_threshold(vec![cx(0.0), cx(1.0)], 0.0);
    let k = |x: f64| Polynomial::with_threshold(vec![cx(x)], 0.0);
    let off = &k(p.mu) - &lam;
    let (mu, nu) = (p.mu, p.nu);
    let c = [[-2.0 * nu, -2.0 * mu], [2.0 * mu, 2.0 * nu]];
    let e12 = &k(3.0 * mu) - &lam;
    let e21 = &k(-mu) - &lam;

    let mut d = Vec::with_capacity(n_max + 1);
    d.push((off.clone(), k(p.kappa + 0.5)));
    let zero = (k(0.0), k(0.0));
    for n in 1..=n_max {
        let nn = n as f64;
        let (a1, a2) = &d[n - 1];
        let (b1, b2) = if n >= 2 { &d[n - 2] } else { &zero };
        let r1 = &(&(&k(2.0 * nu - nn) * a1) + &(&e12 * a2))
            + &(&b1.scale(cx(c[0][0])) + &b2.scale(cx(c[0][1])));
        let r2 = &(&(&e21 * a1) + &(&k(-2.0 * nu - nn) * a2))
            + &(&b1.scale(cx(c[1][0])) + &b2.scale(cx(c[1][1])));
        // (B0hat - n) = [[-kappa - 1/2 - n, mu - lambda], [0, -n]]
        let x2 = r2.scale(cx(-1.0 / nn));
        let x1 = (&r1 - &(&off * &x2)).scale(cx(-1.0 / (p.kappa + 0.5 + nn)));
        d.push((x1, x2));
    }
    ThetaPolynomialSequence { d }
}

/// `Theta_N` as a polynomial in `lambda`.
pub fn theta_polynomial(p: &ModelParams, n: usize) -> Polynomial {
    theta_sequence(p, n).d.pop().expect("non-empty").1
}

/// `Theta_N(lambda)` by Horner evaluation of [`theta_polynomial`].
pub fn theta_eval(p: &ModelParams, lambda: Complex64, n: usize) -> Complex64 {
    theta_polynomial(p, n).eval(lambda)
}

/// `(Theta_N(lambda), Theta_N'(lambda))` from the recurrence at fixed real
/// `lambda`, differentiated in forward mode. Equals the Horner value of
/// [`theta_polynomial`] and its derivative polynomial up to rounding, and
/// stays well conditioned for large `N`.
pub fn theta_scalar(p: &ModelParams, lambda: f64, n_max: usize) -> (f64, f64) {
    let (mu, nu) = (p.mu, p.nu);
    let off = mu - lambda;
    let kh = p.kappa + 0.5;
    // (value, derivative) for each component
    let mut prev2 = [(0.0, 0.0); 2];
    let mut prev = [(off, -1.0), (kh, 0.0)];
    for n in 1..=n_max {
        let nn = n as f64;
        let (a1, da1) = prev[0];
        let (a2, da2) = prev[1];
        let (b1, db1) = prev2[0];
        let (b2, db2) = prev2[1];
        let e12 = 3.0 * mu - lambda;
        let e21 = -mu - lambda;
        let r1 = (2.0 * nu - nn) * a1 + e12 * a2 - 2.0 * nu * b1 - 2.0 * mu * b2;
        let dr1 = (2.0 * nu - nn) * da1 + e12 * da2 - a2 - 2.0 * nu * db1 - 2.0 * mu * db2;
        let r2 = e21 * a1 + (-2.0 * nu - nn) * a2 + 2.0 * mu * b1 + 2.0 * nu * b2;
        let dr2 = e21 * da1 - a1 + (-2.0 * nu - nn) * da2 + 2.0 * mu * db1 + 2.0 * nu * db2;
        let x2 = -r2 / nn;
        let dx2 = -dr2 / nn;
        let x1 = -(r1 - off * x2) / (kh + nn);
        let dx1 = -(dr1 - off * dx2 + x2) / (kh + nn);
        prev2 = prev;
        prev = [(x1, dx1), (x2, dx2)];
    }
    prev[1]
}

/// Zero of `Theta_n` near `guess`: safeguarded Newton, falling back to a
/// bracketed search.
fn theta_zero(p: &ModelParams, n: usize, guess: f64, tol: f64) -> Result<f64> {
    let mut x = guess;
    for _ in 0..30 {
        let (v, dv) = theta_scalar(p, x, n);
        if dv == 0.0 || !dv.is_finite() {
            break;
        }
        let step = v / dv;
        x -= step;
        if (x - guess).abs() > 0.05 {
            break;
        }
        if step.abs() <= tol.max(4.0 * f64::EPSILON * x.abs()) {
            return Ok(x);
        }
    }
    let root = nearest_real_zero(|x| Ok(theta_scalar(p, x, n).0), guess, tol)?;
    // Newton polish with the exact derivative.
    let (v, dv) = theta_scalar(p, root, n);
    let polished = root - v / dv;
    Ok(if (polished - root).abs() < 10.0 * tol { polished } else { root })
}

/// Extrapolate `r(N) = r + sum_k c_k N^{-(p0 + k)}` over doubling orders.
fn richardson(values: &[f64], p0: f64) -> f64 {
    let mut row = values.to_vec();
    let mut k = 0;
    while row.len() > 1 {
        let q = 2f64.powf(p0 + k as f64);
        row = row.windows(2).map(|w| w[1] + (w[1] - w[0]) / (q - 1.0)).collect();
        k += 1;
    }
    row[0]
}

/// Eigenvalue `lambda_j(kappa; mu, nu)` as a zero of `Theta_N`.
///
/// The zero is tracked at order [`TRACKING_ORDER`] and then refined by
/// doubling `N` until it moves by less than `tol`. If [`MAX_ORDER`] is
/// reached first the estimate is flagged; its value is then the Richardson
/// extrapolation in `N` with exponents `kappa + 1/2 + k` (the decay of the
/// Taylor coefficients of the `(1-x)^{kappa-1/2}` branch at `x = 1`), and
/// `alternate` holds the raw zero at the cap.
pub fn eigenvalue_theta(p: &ModelParams, j: SpectralIndex, tol: f64) -> Result<EigenvalueEstimate> {
    let tol = tol.max(1e-15);
    let mut lambda = base_eigenvalue(p.kappa, j);
    if p.mu != 0.0 || p.nu != 0.0 {
        for (mu, nu) in continuation_path(p.mu, p.nu) {
            let q = p.with_munu(mu, nu);
            lambda = theta_zero(&q, TRACKING_ORDER, lambda, tol)?;
        }
    } else {
        // the base value is a zero of Theta_N only for half-integer kappa
        lambda = theta_zero(p, TRACKING_ORDER, lambda, tol)?;
    }
    let mut orders = vec![TRACKING_ORDER];
    let mut zeros = vec![lambda];
    let mut n = TRACKING_ORDER;
    let mut converged = false;
    while n < MAX_ORDER {
        n *= 2;
        let prev = *zeros.last().expect("non-empty");
        let r = theta_zero(p, n, prev, tol)?;
        orders.push(n);
        zeros.push(r);
        if (r - prev).abs() < tol {
            converged = true;
            break;
        }
    }
    let raw = *zeros.last().expect("non-empty");
    let value = if converged { raw } else { richardson(&zeros, p.kappa + 0.5) };
    Ok(EigenvalueEstimate {
        value,
        j: j.get(),
        method: Method::Theta,
        order: n,
        residual: theta_scalar(p, raw, n).0.abs(),
        flagged: !converged,
        alternate: (!converged).then_some(raw),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(i: i32) -> SpectralIndex {
        SpectralIndex::new(i).unwrap()
    }

    #[test]
    fn order_zero_is_constant() {
        let p = ModelParams::new(0.5, 0.3, 0.1).unwrap();
        let t = theta_polynomial(&p, 0);
        assert_eq!(t.degree(), 0);
        assert_eq!(t.coeff(0), cx(1.0));
        let s = theta_sequence(&p, 0);
        assert_eq!(s.d[0].0.degree(), 1);
        assert_eq!(s.d[0].0.leading(), cx(-1.0));
    }

    #[test]
    fn degree_growth_and_real_coefficients() {
        let p = ModelParams::new(0.5, 0.02, 0.1).unwrap();
        let s = theta_sequence(&p, 8);
        for n in 0..=8 {
            assert!(s.theta(n).degree() <= 2 * n as isize);
            assert!(s.theta(n).max_imag() < 1e-13 * s.theta(n).max_abs_coeff().max(1.0));
        }
        assert_eq!(s.theta(8).degree(), 16);
    }

    #[test]
    fn scalar_path_matches_polynomial() {
        let p = ModelParams::new(1.5, -0.2, 0.35).unwrap();
        let poly = theta_polynomial(&p, 10);
        let dpoly = poly.derivative();
        for lam in [-2.0, -0.3, 0.9, 2.4] {
            let (v, dv) = theta_scalar(&p, lam, 10);
            let pv = poly.eval_real(lam).re;
            assert!((pv - v).abs() < 1e-12 * poly.eval_scale(cx(lam)), "{lam}: {pv} vs {v}");
            assert!((dpoly.eval_real(lam).re - dv).abs() < 1e-11 * dpoly.eval_scale(cx(lam)));
        }
    }

    #[test]
    fn theta_eigenvalues() {
        let p = ModelParams::new(0.5, 0.0, 0.0).unwrap();
        let e = eigenvalue_theta(&p, j(1), 1e-12).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12 && !e.flagged);
        let p = ModelParams::new(0.5, 0.005, 0.015).unwrap();
        assert!((eigenvalue_theta(&p, j(1), 1e-12).unwrap().value - 1.01167).abs() < 1e-5);
        let p = ModelParams::new(0.5, 0.02, 0.1).unwrap();
        assert!((eigenvalue_theta(&p, j(1), 1e-12).unwrap().value - 1.07379).abs() < 5e-5);
    }

    #[test]
    fn richardson_removes_power_terms() {
        let vals: Vec<f64> = [32.0f64, 64.0, 128.0, 256.0]
            .iter()
            .map(|n| 1.0 + 0.3 * n.powf(-1.5) - 2.0 * n.powf(-2.5) + 0.7 * n.powf(-3.5))
            .collect();
        assert!((richardson(&vals, 1.5) - 1.0).abs() < 1e-14);
    }
}
