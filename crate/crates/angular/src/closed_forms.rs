//! Exactly solvable cases: eigenvalues on the lines `nu = +-mu`, the
//! `mu = nu = 0` eigenfunctions in terms of Jacobi polynomials, and the
//! parameter map to the generalised Heun equation.

use num_complex::Complex64;
use serde::Serialize;

use crate::delta_solver::frobenius_coefficients;
use crate::error::{Error, Result};
use crate::model::{base_eigenvalue, cx, system_matrices, ModelParams, SpectralIndex};
use crate::numerics::{ode_integrate, OdeOptions};

/// `lambda_j(kappa; mu, tau mu)` for `tau = +-1`.
pub fn equal_parameter_eigenvalue(kappa: f64, j: SpectralIndex, tau: i32, mu: f64) -> Result<f64> {
    if tau != 1 && tau != -1 {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be +1 or -1")));
    }
    let tau_f = f64::from(tau);
    if j.get() == tau {
        return Ok(tau_f * (kappa + 0.5) + mu);
    }
    let shifted = base_eigenvalue(kappa, j) - 0.5 * tau_f;
    let radicand = shifted * shifted + 2.0 * tau_f * kappa * mu + mu * mu;
    Ok(0.5 * tau_f + j.sign() * radicand.sqrt())
}

/// `P_n^{(a,b)}(x)` by the three-term recurrence in `n`.
pub fn jacobi_polynomial(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let c1 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (a * a - b * b);
        let c3 = (s - 2.0) * (s - 1.0) * s;
        let c4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let p2 = ((c2 + c3 * x) * p1 - c4 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `d/dx P_n^{(a,b)}(x) = (n + a + b + 1)/2 P_{n-1}^{(a+1,b+1)}(x)`.
pub fn jacobi_derivative(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + a + b + 1.0) * jacobi_polynomial(n - 1, a + 1.0, b + 1.0, x)
}

/// `lambda_n^{+-} = +-(kappa + 1/2 + n)`.
pub fn zero_parameter_eigenvalue(kappa: f64, n: usize, sign: i32) -> f64 {
    f64::from(sign.signum()) * (kappa + 0.5 + n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenfunctionSample {
    pub value: [f64; 2],
    pub derivative: [f64; 2],
}

/// Eigenfunction for `lambda_n^{sign}` at `mu = nu = 0`:
///
/// `sin^{kappa+1/2}(theta) ( sign sqrt(tan(theta/2)) P_n^{(kappa+1/2, kappa-1/2)}(cos theta),
///                           -sqrt(cot(theta/2)) P_n^{(kappa-1/2, kappa+1/2)}(cos theta) )`
/// together with its `theta`-derivative.
pub fn zero_parameter_eigenfunction(kappa: f64, n: usize, sign: i32, theta: f64) -> Result<EigenfunctionSample> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, pi)")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!("sign = {sign} must be +1 or -1")));
    }
    let s = f64::from(sign);
    let (st, ct) = theta.sin_cos();
    let x = ct;
    let (ap, bp) = (kappa + 0.5, kappa - 0.5);
    let env = st.powf(kappa + 0.5);
    let denv = (kappa + 0.5) * ct / st;
    let rt = (theta / 2.0).tan().sqrt();
    let rc = 1.0 / rt;
    let pa = jacobi_polynomial(n, ap, bp, x);
    let pb = jacobi_polynomial(n, bp, ap, x);
    let dpa = -st * jacobi_derivative(n, ap, bp, x);
    let dpb = -st * jacobi_derivative(n, bp, ap, x);
    let s1 = s * env * rt * pa;
    let s2 = -env * rc * pb;
    let half = 0.5 / st;
    let ds1 = s1 * (denv + half) + s * env * rt * dpa;
    let ds2 = s2 * (denv - half) - env * rc * dpb;
    Ok(EigenfunctionSample {
        value: [s1, s2],
        derivative: [ds1, ds2],
    })
}

/// Left side minus right side of the angular equation
/// `[[0,1],[-1,0]] S' + V(theta) S = lambda S` at one point.
pub fn angular_residual(p: &ModelParams, lambda: f64, theta: f64, s: [f64; 2], ds: [f64; 2]) -> [f64; 2] {
    let (st, ct) = theta.sin_cos();
    let off = -p.kappa / st - p.nu * st;
    let r1 = ds[1] - p.mu * ct * s[0] + off * s[1] - lambda * s[0];
    let r2 = -ds[0] + off * s[0] + p.mu * ct * s[1] - lambda * s[1];
    [r1, r2]
}

/// Parameters of the pre-Heun and generalised Heun equations satisfied by
/// the first component of solutions of the transformed system.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HeunParameters {
    pub b: Complex64,
    pub t: Complex64,
    /// Sign of the square root chosen for `t`.
    pub branch: i32,
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub beta0: Complex64,
    pub beta1: Complex64,
    pub beta2: Complex64,
    pub tau: [Complex64; 6],
}

pub fn heun_parameters(p: &ModelParams, lambda: f64, branch: i32) -> Result<HeunParameters> {
    if p.mu == 0.0 {
        return Err(Error::Domain("b undefined for mu = 0".into()));
    }
    if (lambda * lambda - p.mu * p.mu).abs() < 1e-14 * (1.0 + lambda * lambda) {
        return Err(Error::Domain("resonant denominators: lambda^2 = mu^2".into()));
    }
    let branch = if branch < 0 { -1 } else { 1 };
    let (mu, nu, lam) = (cx(p.mu), cx(p.nu), cx(lambda));
    let a = cx(p.alpha_exp());
    let t = (nu * nu - mu * mu).sqrt() * f64::from(branch);
    let b = (mu - lam) / (mu * 2.0);

    let tau0 = (mu * mu - nu * nu) * 4.0;
    let tau1 = lam * lam - a * a * 2.0 + nu * 2.0 + a - mu * mu - a * nu * 4.0 + a * mu * 2.0 / (mu - lam);
    let tau2 = -a * a;
    let tau3 = a * mu * mu * 4.0 / (mu * mu - lam * lam) + nu * 2.0 - tau1;
    let tau4 = a * (cx(1.0) - a);
    let tau5 = (nu * mu * mu + a * mu * mu * 2.0 - nu * lam * lam) * 2.0 / (lam * lam - mu * mu);

    let beta2 = a * t * 8.0;
    let beta1 = mu * mu - lam * lam - t * 2.0 * (b + a * 2.0 * (cx(1.0) + b * 2.0))
        + a * (a - 1.0) * 4.0
        + nu * 2.0 * (a * 2.0 - b)
        - a * mu * 2.0 * (b - 1.0) / (lam + mu)
        + a * mu * b * 2.0 / (mu - lam);
    let beta0 = b * (lam * lam - mu * mu)
        + b * ((nu + t) * 2.0 - a * (nu - t) * 4.0 - a * a * 4.0)
        + a
        - mu * a * b * 2.0 / (lam - mu);

    Ok(HeunParameters {
        b,
        t,
        branch,
        mu0: -2.0 * p.alpha_exp(),
        mu1: 1.0 - 2.0 * p.alpha_exp(),
        mu2: 2.0,
        beta0,
        beta1,
        beta2,
        tau: [tau0, tau1, tau2, tau3, tau4, tau5],
    })
}

/// Largest scaled residual of the generalised Heun equation for
/// `psi = y_1 x^{-alpha} (1-x)^{-alpha} e^{-2tx}`, where `y` solves the
/// transformed system, integrated from the Frobenius solution at `x_samples[0]`.
///
/// Each residual is divided by the sum of magnitudes of the three terms.
pub fn heun_residual(p: &ModelParams, lambda: f64, branch: i32, x_samples: &[f64]) -> Result<f64> {
    let hp = heun_parameters(p, lambda, branch)?;
    let x0 = *x_samples.first().ok_or_else(|| Error::InvalidParameter("no samples".into()))?;
    let x1 = *x_samples.last().expect("non-empty");
    if !(x0 > 0.0 && x1 < 1.0) {
        return Err(Error::Domain("samples must lie in (0, 1)".into()));
    }
    let alpha = p.alpha_exp();
    let mats = system_matrices(p, cx(lambda));
    let coeff = |x: f64| mats.b0 * cx(1.0 / x) + mats.b1 * cx(1.0 / (x - 1.0)) + mats.c;

    // Frobenius solution x^alpha h(x) at the first sample; real for real parameters.
    let series = frobenius_coefficients(p, cx(lambda), 200);
    let mut h = [0.0; 2];
    let mut w = 1.0;
    for hn in &series.h {
        h[0] += hn[0].re * w;
        h[1] += hn[1].re * w;
        w *= x0;
    }
    let y0 = [x0.powf(alpha) * h[0], x0.powf(alpha) * h[1]];

    let traj = ode_integrate(
        |x, y, dy| {
            let a = coeff(x);
            dy[0] = (a[(0, 0)] * y[0] + a[(0, 1)] * y[1]).re;
            dy[1] = (a[(1, 0)] * y[0] + a[(1, 1)] * y[1]).re;
            Ok(())
        },
        x0,
        &y0,
        x1,
        OdeOptions::with_tol(1e-12),
    )?;

    let (t, b) = (hp.t, hp.b);
    let mut worst: f64 = 0.0;
    for &x in x_samples {
        let y = traj.at(x)?;
        let a = coeff(x);
        let da = mats.b0 * cx(-1.0 / (x * x)) + mats.b1 * cx(-1.0 / ((x - 1.0) * (x - 1.0)));
        let yv = nalgebra::Vector2::new(cx(y[0]), cx(y[1]));
        let dy = a * yv;
        let ddy = da * yv + a * dy;
        let (y1, dy1, ddy1) = (yv[0], dy[0], ddy[0]);
        // psi = g y1 with g'/g = l, g''/g = l' + l^2
        let l = cx(-alpha / x + alpha / (1.0 - x)) - t * 2.0;
        let dl = cx(alpha / (x * x) + alpha / ((1.0 - x) * (1.0 - x)));
        let g = cx(x.powf(-alpha) * (1.0 - x).powf(-alpha)) * (-t * 2.0 * x).exp();
        let psi = g * y1;
        let dpsi = g * (dy1 + l * y1);
        let ddpsi = g * (ddy1 + l * dy1 * 2.0 + (dl + l * l) * y1);
        let xc = cx(x);
        let pcoef = cx((1.0 - hp.mu0) / x + (1.0 - hp.mu1) / (x - 1.0)) + cx(1.0 - hp.mu2) / (xc - b) + t * 4.0;
        let qcoef = (hp.beta0 + hp.beta1 * x + hp.beta2 * x * x) / (xc * (xc - 1.0) * (xc - b));
        let terms = [ddpsi, pcoef * dpsi, qcoef * psi];
        let res = (terms[0] + terms[1] + terms[2]).norm();
        let scale: f64 = terms.iter().map(|z| z.norm()).sum();
        worst = worst.max(res / scale.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(i: i32) -> SpectralIndex {
        SpectralIndex::new(i).unwrap()
    }

    #[test]
    fn equal_parameter_special_values() {
        assert!((equal_parameter_eigenvalue(0.5, j(1), 1, 0.3).unwrap() - 1.3).abs() < 1e-15);
        assert!((equal_parameter_eigenvalue(0.5, j(-1), 1, 0.0).unwrap() + 1.0).abs() < 1e-15);
        let v = equal_parameter_eigenvalue(0.5, j(-1), 1, 0.2).unwrap();
        assert!((v - (0.5 - (2.25f64 + 0.2 + 0.04).sqrt())).abs() < 1e-15);
        assert!(equal_parameter_eigenvalue(0.5, j(1), 0, 0.2).is_err());
    }

    #[test]
    fn jacobi_values() {
        assert_eq!(jacobi_polynomial(0, 0.3, 1.2, 0.7), 1.0);
        assert!((jacobi_polynomial(1, 0.0, 0.0, 0.37) - 0.37).abs() < 1e-16);
        // Legendre P_3
        let x: f64 = -0.42;
        assert!((jacobi_polynomial(3, 0.0, 0.0, x) - 0.5 * (5.0 * x.powi(3) - 3.0 * x)).abs() < 1e-15);
        // P_n^{(a,b)}(1) = binom(n + a, n)
        assert!((jacobi_polynomial(5, 2.0, 1.0, 1.0) - 21.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_contiguous_relation() {
        for &(n, a, b, x) in &[(3usize, 0.5, 1.5, 0.2), (5, 1.0, 2.0, -0.7), (2, 2.5, 0.5, 0.9)] {
            let lhs = (a + b + n as f64 + 1.0) * jacobi_polynomial(n, a + 1.0, b, x)
                - (a + n as f64 + 1.0) * jacobi_polynomial(n, a, b, x);
            let rhs = (b + n as f64) * jacobi_polynomial(n, a + 1.0, b - 1.0, x);
            assert!((lhs - rhs).abs() < 1e-12, "{n} {a} {b} {x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn jacobi_derivative_matches_difference() {
        let (n, a, b, x, h) = (4, 1.5, 0.5, 0.3, 1e-5);
        let fd = (jacobi_polynomial(n, a, b, x + h) - jacobi_polynomial(n, a, b, x - h)) / (2.0 * h);
        assert!((fd - jacobi_derivative(n, a, b, x)).abs() < 1e-8);
    }

    #[test]
    fn eigenfunction_solves_equation() {
        for kappa in [0.5, 1.5, 2.0] {
            let p = ModelParams::new(kappa, 0.0, 0.0).unwrap();
            for n in 0..4 {
                for sign in [1, -1] {
                    let lam = zero_parameter_eigenvalue(kappa, n, sign);
                    for k in 1..10 {
                        let th = std::f64::consts::PI * k as f64 / 10.0;
                        let e = zero_parameter_eigenfunction(kappa, n, sign, th).unwrap();
                        let r = angular_residual(&p, lam, th, e.value, e.derivative);
                        assert!(r[0].abs() < 1e-11 && r[1].abs() < 1e-11, "{kappa} {n} {sign} {th} {r:?}");
                    }
                }
            }
        }
        assert!(zero_parameter_eigenfunction(0.5, 0, 1, 0.0).is_err());
    }

    #[test]
    fn eigenfunction_derivative_matches_difference() {
        let (kappa, n, sign, th, h) = (1.5, 3, -1, 1.1, 1e-5);
        let e = zero_parameter_eigenfunction(kappa, n, sign, th).unwrap();
        let a = zero_parameter_eigenfunction(kappa, n, sign, th + h).unwrap();
        let b = zero_parameter_eigenfunction(kappa, n, sign, th - h).unwrap();
        for i in 0..2 {
            let fd = (a.value[i] - b.value[i]) / (2.0 * h);
            assert!((fd - e.derivative[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenfunction_decays_like_sin_kappa() {
        for kappa in [0.5, 1.5] {
            for th in [1e-3, 1e-4, std::f64::consts::PI - 1e-4] {
                let e = zero_parameter_eigenfunction(kappa, 2, 1, th).unwrap();
                let bound = 50.0 * th.sin().powf(kappa);
                assert!(e.value[0].abs() <= bound && e.value[1].abs() <= bound);
            }
        }
    }

    #[test]
    fn heun_map() {
        let p = ModelParams::new(1.5, 0.25, 0.75).unwrap();
        let hp = heun_parameters(&p, 1.25, 1).unwrap();
        assert!((hp.b - cx(-2.0)).norm() < 1e-15);
        assert_eq!(hp.mu0, -2.0);
        assert_eq!(hp.mu2, 2.0);
        assert!((hp.tau[2] + cx(1.0)).norm() < 1e-15);
        assert!(heun_parameters(&p.with_munu(0.0, 0.3), 1.0, 1).is_err());
        assert!(heun_parameters(&p, 0.25, 1).is_err());
    }

    #[test]
    fn heun_residual_small_for_both_branches() {
        let xs: Vec<f64> = (0..=20).map(|i| 0.3 + 0.02 * i as f64).collect();
        for &(kappa, mu, nu, lam) in &[(0.5, 0.25, 0.75, 1.4), (1.5, 0.3, -0.1, 2.2), (1.0, -0.2, 0.5, -1.7)] {
            let p = ModelParams::new(kappa, mu, nu).unwrap();
            for branch in [1, -1] {
                let r = heun_residual(&p, lam, branch, &xs).unwrap();
                assert!(r < 1e-7, "{kappa} {mu} {nu} {branch}: {r}");
            }
        }
    }
}
