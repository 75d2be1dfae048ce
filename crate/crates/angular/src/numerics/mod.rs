//! Numerical kernel: polynomials, roots, ODE integration, quadrature and
//! finite differences.

mod diff;
mod ode;
mod poly;
mod quad;
mod roots;

pub use diff::{finite_diff_gradient, Gradient};
pub use ode::{ode_integrate, OdeOptions, Trajectory};
pub use poly::{Polynomial, DEFAULT_ZERO_THRESHOLD};
pub use quad::quadrature;
pub use roots::{aberth, find_real_root, poly_roots, sort_lex, Root, MAX_ABERTH_ITERATIONS};

/// Bracket the sign changes of `f` on a uniform grid of `n` cells over
/// `[a, b]`. Evaluation errors propagate.
pub fn sign_changes<F>(mut f: F, a: f64, b: f64, n: usize) -> crate::Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> crate::Result<f64>,
{
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a)?;
    for i in 1..=n {
        let x1 = a + (b - a) * i as f64 / n as f64;
        let f1 = f(x1)?;
        if f0 == 0.0 || f0.signum() != f1.signum() {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(out)
}
