//! Polynomial roots (Aberth-Ehrlich) and bracketed real roots (Brent).

use num_complex::Complex64;
use serde::Serialize;

use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Iteration cap for [`poly_roots`].
pub const MAX_ABERTH_ITERATIONS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// All roots of `p`, grouped into clusters of (numerically) coincident
/// roots and sorted by real part, then imaginary part.
///
/// Each returned value satisfies `|p(r)| <= tol * p.eval_scale(r)` for
/// simple roots; clusters are reported by their centroid.
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<Root>> {
    let simple = aberth(p, tol)?;
    Ok(cluster(p, simple, tol))
}

/// Unclustered root list, one entry per root counted with multiplicity.
pub fn aberth(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n < 1 {
        return Err(Error::NonPolynomial(n));
    }
    let n = n as usize;
    let lead = p.leading();
    let monic: Vec<Complex64> = p.coeffs().iter().map(|&c| c / lead).collect();
    let monic = Polynomial::with_threshold(monic, 0.0);
    let dp = monic.derivative();

    if n == 1 {
        return Ok(vec![-monic.coeff(0)]);
    }

    let mut z = initial_guesses(&monic);
    let mut converged = vec![false; n];
    let eps = f64::EPSILON;
    for iter in 0..MAX_ABERTH_ITERATIONS {
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let zi = z[i];
            let pz = monic.eval(zi);
            if pz.norm() <= eps * monic.eval_scale(zi) {
                converged[i] = true;
                continue;
            }
            let ratio = pz / dp.eval(zi);
            let sum: Complex64 = (0..n)
                .filter(|&k| k != i)
                .map(|k| Complex64::new(1.0, 0.0) / (zi - z[k]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] = zi - w;
            if w.norm() <= 4.0 * eps * z[i].norm().max(eps) {
                converged[i] = true;
            }
        }
        if converged.iter().all(|&c| c) {
            break;
        }
        if iter + 1 == MAX_ABERTH_ITERATIONS {
            let ok = z
                .iter()
                .all(|&r| monic.eval(r).norm() <= tol * monic.eval_scale(r));
            if !ok {
                return Err(Error::RootsNotConverged {
                    iterations: MAX_ABERTH_ITERATIONS,
                    best: z,
                });
            }
        }
    }
    Ok(z)
}

/// Starting points on a circle whose radius comes from the Fujiwara bound,
/// rotated off the real axis to avoid symmetric stagnation.
fn initial_guesses(monic: &Polynomial) -> Vec<Complex64> {
    let n = monic.degree() as usize;
    let mut radius: f64 = 0.0;
    for k in 1..=n {
        let c = monic.coeff(n - k).norm();
        let r = if k == n { (c / 2.0).powf(1.0 / k as f64) } else { c.powf(1.0 / k as f64) };
        radius = radius.max(r);
    }
    let radius = 2.0 * radius.max(1e-3);
    let centre = -monic.coeff(n - 1) / n as f64;
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            centre + Complex64::from_polar(0.5 * radius, theta)
        })
        .collect()
}

fn cluster(p: &Polynomial, mut roots: Vec<Complex64>, tol: f64) -> Vec<Root> {
    sort_lex(&mut roots);
    let radius = tol.sqrt().max(1e-7);
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut sum = roots[i];
        let mut count = 1;
        for k in i + 1..roots.len() {
            if !used[k] && (roots[k] - roots[i]).norm() <= radius * roots[i].norm().max(1.0) {
                // Only merge when the root is genuinely multiple, i.e. p' also nearly vanishes.
                let d = p.derivative();
                let mid = (roots[i] + roots[k]) / 2.0;
                if d.eval(mid).norm() <= radius * d.eval_scale(mid) {
                    used[k] = true;
                    sum += roots[k];
                    count += 1;
                }
            }
        }
        out.push((sum / count as f64, count));
    }
    let mut out: Vec<Root> = out
        .into_iter()
        .map(|(value, multiplicity)| Root {
            value,
            multiplicity,
        })
        .collect();
    out.sort_by(|a, b| lex(a.value, b.value));
    out
}

fn lex(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn sort_lex(v: &mut [Complex64]) {
    v.sort_by(|a, b| lex(*a, *b));
}

/// Brent's method on `[a, b]`; `f` is never evaluated outside the bracket.
pub fn find_real_root<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketInvalid { a, b, fa, fb });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}
