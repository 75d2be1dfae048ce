//! Frobenius series at `x = 0` of the transformed system, the function
//! `Delta(lambda) = f^2 - g^2` built from its value at `x = 1/2`, and
//! eigenvalue extraction by continuation from `(mu, nu) = (0, 0)`.

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimate::{EigenvalueEstimate, Method};
use crate::model::{base_eigenvalue, cx, system_matrices, CMat2, ModelParams, SpectralIndex};
use crate::numerics::{find_real_root, sign_changes};

pub type CVec2 = Vector2<Complex64>;

/// Largest truncation order used by the adaptive rule.
pub const MAX_ORDER: usize = 512;
/// Starting truncation order of the adaptive rule.
pub const MIN_ORDER: usize = 32;
/// Largest `max(|d mu|, |d nu|)` of a continuation step.
pub const CONTINUATION_STEP: f64 = 0.2;
/// Half-width of the window searched for the tracked zero at each step.
pub const SEARCH_HALF_WIDTH: f64 = 0.45;
const SEARCH_CELLS: usize = 90;

/// Coefficients `h_0, ..., h_N` of `h(x) = sum h_n x^n` at fixed `lambda`.
#[derive(Clone, Debug)]
pub struct FrobeniusSeries {
    pub params: ModelParams,
    pub lambda: Complex64,
    pub h: Vec<CVec2>,
}

impl FrobeniusSeries {
    pub fn order(&self) -> usize {
        self.h.len() - 1
    }

    /// Largest relative residual of the defining recurrence over `n >= 1`.
    pub fn recurrence_residual(&self) -> f64 {
        let (lhs, rhs_prev, c) = recurrence_parts(&self.params, self.lambda);
        let mut worst: f64 = 0.0;
        for n in 1..self.h.len() {
            let nn = n as f64;
            let prev2 = if n >= 2 { self.h[n - 2] } else { CVec2::zeros() };
            let rhs = (rhs_prev - CMat2::identity() * cx(nn)) * self.h[n - 1] + c * prev2;
            let res = (lhs - CMat2::identity() * cx(nn)) * self.h[n] - rhs;
            let scale = self.h[n].norm().max(f64::MIN_POSITIVE);
            worst = worst.max(res.norm() / scale);
        }
        worst
    }
}

/// `(B0 - alpha, B0 + B1 - C + 1 - alpha, C)`; the `-n` shifts are added by the caller.
fn recurrence_parts(p: &ModelParams, lambda: Complex64) -> (CMat2, CMat2, CMat2) {
    let m = system_matrices(p, lambda);
    let a = cx(p.alpha_exp());
    let id = CMat2::identity();
    (m.b0 - id * a, m.b0 + m.b1 - m.c + id * (cx(1.0) - a), m.c)
}

pub fn frobenius_coefficients(p: &ModelParams, lambda: Complex64, n_max: usize) -> FrobeniusSeries {
    let (_, rhs_prev, c) = recurrence_parts(p, lambda);
    let two_alpha = 2.0 * p.alpha_exp();
    let off = cx(p.mu) - lambda;
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(CVec2::new(off, cx(p.kappa + 0.5)));
    for n in 1..=n_max {
        let nn = n as f64;
        let prev2 = if n >= 2 { h[n - 2] } else { CVec2::zeros() };
        let rhs = (rhs_prev - CMat2::identity() * cx(nn)) * h[n - 1] + c * prev2;
        // (B0 - alpha - n) = [[-2 alpha - n, mu - lambda], [0, -n]]
        let h2 = rhs[1] / (-nn);
        let h1 = (rhs[0] - off * h2) / (-two_alpha - nn);
        h.push(CVec2::new(h1, h2));
    }
    FrobeniusSeries {
        params: *p,
        lambda,
        h,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DeltaValue {
    pub value: Complex64,
    pub f: Complex64,
    pub g: Complex64,
    pub order: usize,
    /// Estimated truncation error of `value`.
    pub tail: f64,
}

impl DeltaValue {
    /// Natural scale `|f|^2 + |g|^2` of `value`.
    pub fn scale(&self) -> f64 {
        self.f.norm_sqr() + self.g.norm_sqr()
    }
}

/// `Delta(lambda)` from the series truncated at order `n_max`.
pub fn delta(p: &ModelParams, lambda: Complex64, n_max: usize) -> DeltaValue {
    let s = frobenius_coefficients(p, lambda, n_max);
    let mut sum = CVec2::zeros();
    let mut w = 1.0;
    for hn in &s.h {
        sum += hn * cx(w);
        w *= 0.5;
    }
    let (f, g) = (sum[0], sum[1]);
    // Geometric remainder with ratio 1/2 after the last retained term.
    let tail_fg = 0.5f64.powi(n_max as i32) * s.h[n_max].norm();
    DeltaValue {
        value: f * f - g * g,
        f,
        g,
        order: n_max,
        tail: 2.0 * (f.norm() + g.norm()) * tail_fg + tail_fg * tail_fg,
    }
}

/// `Delta` with the order doubled from [`MIN_ORDER`] until the tail is
/// below `rel_tol / 10` of the natural scale. Returns `(value, flagged)`,
/// flagged when [`MAX_ORDER`] was not enough.
pub fn delta_adaptive(p: &ModelParams, lambda: Complex64, rel_tol: f64) -> (DeltaValue, bool) {
    let mut n = MIN_ORDER;
    loop {
        let d = delta(p, lambda, n);
        if d.tail <= 0.1 * rel_tol * d.scale().max(1.0) {
            return (d, false);
        }
        if n >= MAX_ORDER {
            return (d, true);
        }
        n = (2 * n).min(MAX_ORDER);
    }
}

/// Order used for the real-axis root search around `lambda`.
pub fn working_order(p: &ModelParams, lambda: f64) -> usize {
    delta_adaptive(p, cx(lambda), 1e-16).0.order
}

fn delta_real(p: &ModelParams, lambda: f64, n: usize) -> f64 {
    delta(p, cx(lambda), n).value.re
}

/// Real zero of `f` nearest to `guess` within `guess +- SEARCH_HALF_WIDTH`.
pub(crate) fn nearest_real_zero<F>(mut f: F, guess: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let a = guess - SEARCH_HALF_WIDTH;
    let b = guess + SEARCH_HALF_WIDTH;
    let brackets = sign_changes(&mut f, a, b, SEARCH_CELLS)?;
    let (lo, hi) = brackets
        .into_iter()
        .min_by(|x, y| {
            let dx = (0.5 * (x.0 + x.1) - guess).abs();
            let dy = (0.5 * (y.0 + y.1) - guess).abs();
            dx.total_cmp(&dy)
        })
        .ok_or_else(|| {
            Error::TrackingFailure(format!("no sign change within {SEARCH_HALF_WIDTH} of {guess}"))
        })?;
    find_real_root(f, lo, hi, tol)
}

/// Points `(mu, nu)` visited by the straight-line continuation.
pub fn continuation_path(mu: f64, nu: f64) -> Vec<(f64, f64)> {
    let r = mu.abs().max(nu.abs());
    let steps = (r / CONTINUATION_STEP).ceil().max(1.0) as usize;
    (1..=steps)
        .map(|k| {
            let s = k as f64 / steps as f64;
            (s * mu, s * nu)
        })
        .collect()
}

/// Eigenvalue `lambda_j(kappa; mu, nu)` as the tracked real zero of `Delta`.
pub fn eigenvalue_delta(p: &ModelParams, j: SpectralIndex, tol: f64) -> Result<EigenvalueEstimate> {
    let tol = tol.max(1e-15);
    let mut lambda = base_eigenvalue(p.kappa, j);
    let mut order = working_order(&p.with_munu(0.0, 0.0), lambda);
    if p.mu != 0.0 || p.nu != 0.0 {
        for (mu, nu) in continuation_path(p.mu, p.nu) {
            let q = p.with_munu(mu, nu);
            order = working_order(&q, lambda);
            lambda = nearest_real_zero(|x| Ok(delta_real(&q, x, order)), lambda, tol)?;
        }
    }
    let d = delta(p, cx(lambda), order);
    Ok(EigenvalueEstimate {
        value: lambda,
        j: j.get(),
        method: Method::Delta,
        order,
        residual: d.value.norm(),
        flagged: d.tail > 1e-12 * d.scale().max(1.0),
        alternate: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(i: i32) -> SpectralIndex {
        SpectralIndex::new(i).unwrap()
    }

    #[test]
    fn first_coefficient_and_recurrence() {
        let p = ModelParams::new(0.5, 0.0, 0.0).unwrap();
        let s = frobenius_coefficients(&p, cx(1.0), 40);
        assert_eq!(s.h[0], CVec2::new(cx(-1.0), cx(1.0)));
        let p = ModelParams::new(1.3, 0.2, -0.4).unwrap();
        let s = frobenius_coefficients(&p, Complex64::new(0.7, 0.1), 80);
        assert!(s.recurrence_residual() < 1e-13);
    }

    #[test]
    fn delta_vanishes_at_base_eigenvalue() {
        let p = ModelParams::new(0.5, 0.0, 0.0).unwrap();
        assert!(delta(&p, cx(1.0), 60).value.norm() < 1e-10);
        assert!(delta(&p, cx(0.5), 60).value.norm() > 0.01);
    }

    #[test]
    fn delta_near_small_parameter_eigenvalue() {
        let p = ModelParams::new(0.5, 0.005, 0.015).unwrap();
        let lo = delta(&p, cx(1.01166), 64).value.re;
        let hi = delta(&p, cx(1.01168), 64).value.re;
        assert!(lo * hi < 0.0);
    }

    #[test]
    fn tail_decays_geometrically() {
        let p = ModelParams::new(1.0, 0.3, -0.2).unwrap();
        for lam in [-1.7, 0.4, 2.2] {
            let mut prev = f64::INFINITY;
            for n in [16, 32, 64] {
                let a = delta(&p, cx(lam), n).value;
                let b = delta(&p, cx(lam), 2 * n).value;
                let diff = (a - b).norm();
                assert!(diff <= 1e3 * 0.5f64.powi(n as i32) + 1e-14, "{lam} {n} {diff}");
                assert!(diff <= prev);
                prev = diff;
            }
        }
    }

    #[test]
    fn eigenvalues_by_continuation() {
        let p = ModelParams::new(0.5, 0.0, 0.0).unwrap();
        assert_eq!(eigenvalue_delta(&p, j(1), 1e-13).unwrap().value, 1.0);
        let p = ModelParams::new(0.5, 0.005, 0.015).unwrap();
        let e = eigenvalue_delta(&p, j(1), 1e-13).unwrap();
        assert!((e.value - 1.01167).abs() < 1e-5);
        let p = ModelParams::new(0.5, 0.25, 0.25).unwrap();
        let e = eigenvalue_delta(&p, j(1), 1e-13).unwrap();
        assert!((e.value - 1.25).abs() < 1e-12);
    }

    #[test]
    fn zeros_are_simple_and_localized() {
        for kappa in [0.5, 1.0, 2.5] {
            for (mu, nu) in [(0.3, -0.1), (-0.45, 0.2), (0.05, 0.6)] {
                let p = ModelParams::new(kappa, mu, nu).unwrap();
                for i in [-3, -1, 1, 2] {
                    let e = eigenvalue_delta(&p, j(i), 1e-13).unwrap();
                    let c = base_eigenvalue(kappa, j(i));
                    assert!((e.value - c).abs() <= p.radius() + 1e-12);
                    let n = e.order;
                    let lo = delta_real(&p, e.value - 1e-6, n);
                    let hi = delta_real(&p, e.value + 1e-6, n);
                    assert!(lo * hi < 0.0);
                }
            }
        }
    }
}
