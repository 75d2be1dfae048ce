//! Central finite differences in two variables.

use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Gradient {
    pub d_mu: f64,
    pub d_nu: f64,
    /// Richardson estimates of the error of `d_mu`, `d_nu`.
    pub err_mu: f64,
    pub err_nu: f64,
}

/// Central-difference gradient of `f` at `(mu, nu)` with step `h`.
///
/// The error estimate compares with the half-step differences:
/// `|D(h) - D(h/2)| * 4/3` estimates the `O(h^2)` error of `D(h)`.
pub fn finite_diff_gradient<F>(mut f: F, mu: f64, nu: f64, h: f64) -> Result<Gradient>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let mut central = |h: f64| -> Result<(f64, f64)> {
        let dm = (f(mu + h, nu)? - f(mu - h, nu)?) / (2.0 * h);
        let dn = (f(mu, nu + h)? - f(mu, nu - h)?) / (2.0 * h);
        Ok((dm, dn))
    };
    let (dm, dn) = central(h)?;
    let (dm2, dn2) = central(0.5 * h)?;
    Ok(Gradient {
        d_mu: dm,
        d_nu: dn,
        err_mu: (dm - dm2).abs() * 4.0 / 3.0,
        err_nu: (dn - dn2).abs() * 4.0 / 3.0,
    })
}
