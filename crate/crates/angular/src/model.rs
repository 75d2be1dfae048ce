//! Problem instance: parameters, coefficient matrices of the transformed
//! system on `x in (0, 1)`, base spectrum and eigenvalue localization.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat2 = Matrix2<Complex64>;

/// Default `J_max` for [`localization_intervals`].
pub const DEFAULT_J_MAX: i32 = 8;

pub(crate) fn cx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The parameters `(kappa, mu, nu)` of the angular operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kappa: f64,
    pub mu: f64,
    pub nu: f64,
}

impl ModelParams {
    pub fn new(kappa: f64, mu: f64, nu: f64) -> Result<Self> {
        if !(kappa >= 0.5) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa = {kappa} must be >= 1/2")));
        }
        if !mu.is_finite() || !nu.is_finite() {
            return Err(Error::InvalidParameter("mu and nu must be finite".into()));
        }
        Ok(Self { kappa, mu, nu })
    }

    /// Exponent `alpha = kappa/2 + 1/4` of the singular points `x = 0, 1`.
    pub fn alpha_exp(&self) -> f64 {
        self.kappa / 2.0 + 0.25
    }

    pub fn with_munu(&self, mu: f64, nu: f64) -> Self {
        Self { mu, nu, ..*self }
    }

    /// Radius `max(|mu|, |nu|)` of the localization intervals.
    pub fn radius(&self) -> f64 {
        self.mu.abs().max(self.nu.abs())
    }
}

/// A nonzero eigenvalue index `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectralIndex(i32);

impl SpectralIndex {
    pub fn new(j: i32) -> Result<Self> {
        if j == 0 {
            Err(Error::InvalidIndex)
        } else {
            Ok(Self(j))
        }
    }

    pub fn get(self) -> i32 {
        self.0
    }

    pub fn sign(self) -> f64 {
        f64::from(self.0.signum())
    }
}

impl TryFrom<i32> for SpectralIndex {
    type Error = Error;
    fn try_from(j: i32) -> Result<Self> {
        Self::new(j)
    }
}

/// `lambda_j(kappa; 0, 0) = sgn(j) (kappa - 1/2 + |j|)`.
pub fn base_eigenvalue(kappa: f64, j: SpectralIndex) -> f64 {
    j.sign() * (kappa - 0.5 + f64::from(j.get().abs()))
}

/// Coefficient matrices of `y' = (B0/x + B1/(x-1) + C) y`, plus the hatted
/// matrices of the system satisfied by `x^{-alpha} (1-x)^{alpha-1} y` and the
/// matrix `E` of its Taylor recurrence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemMatrices {
    pub b0: CMat2,
    pub b1: CMat2,
    pub c: CMat2,
    pub hat_b0: CMat2,
    pub hat_b1: CMat2,
    pub e: CMat2,
}

/// The swap matrix `K`.
pub fn swap_matrix() -> CMat2 {
    CMat2::new(cx(0.0), cx(1.0), cx(1.0), cx(0.0))
}

pub fn system_matrices(p: &ModelParams, lambda: Complex64) -> SystemMatrices {
    let a = cx(p.alpha_exp());
    let mu = cx(p.mu);
    let nu = cx(p.nu);
    let k = cx(p.kappa);
    let z = cx(0.0);
    let b0 = CMat2::new(-a, mu - lambda, z, a);
    let b1 = CMat2::new(a, z, mu - lambda, -a);
    let c = CMat2::new(-nu * 2.0, -mu * 2.0, mu * 2.0, nu * 2.0);
    let hat_b0 = CMat2::new(-k - 0.5, mu - lambda, z, z);
    let hat_b1 = CMat2::new(k - 0.5, z, mu - lambda, cx(-1.0));
    let e = CMat2::new(nu * 2.0, mu * 3.0 - lambda, -mu - lambda, -nu * 2.0);
    SystemMatrices {
        b0,
        b1,
        c,
        hat_b0,
        hat_b1,
        e,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub j: i32,
    pub center: f64,
    pub radius: f64,
}

impl Interval {
    pub fn lo(&self) -> f64 {
        self.center - self.radius
    }

    pub fn hi(&self) -> f64 {
        self.center + self.radius
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        (x - self.center).abs() <= self.radius + slack
    }
}

/// Interval around `lambda_j(kappa; 0, 0)` containing `lambda_j(kappa; mu, nu)`.
pub fn localization_interval(p: &ModelParams, j: SpectralIndex) -> Interval {
    Interval {
        j: j.get(),
        center: base_eigenvalue(p.kappa, j),
        radius: p.radius(),
    }
}

/// Localization intervals for `0 < |j| <= j_max`, ordered by `j`.
pub fn localization_intervals(p: &ModelParams, j_max: i32) -> Vec<Interval> {
    (-j_max..=j_max)
        .filter(|&j| j != 0)
        .map(|j| localization_interval(p, SpectralIndex(j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(i: i32) -> SpectralIndex {
        SpectralIndex::new(i).unwrap()
    }

    #[test]
    fn base_spectrum() {
        assert_eq!(base_eigenvalue(0.5, j(1)), 1.0);
        assert_eq!(base_eigenvalue(0.5, j(-1)), -1.0);
        assert_eq!(base_eigenvalue(1.5, j(2)), 3.0);
        assert!(SpectralIndex::new(0).is_err());
        for kappa in [0.5, 1.0, 2f64.sqrt(), 3.5] {
            for i in 1..6 {
                assert!((base_eigenvalue(kappa, j(i + 1)) - base_eigenvalue(kappa, j(i)) - 1.0).abs() < 1e-14);
            }
            assert!((base_eigenvalue(kappa, j(1)) - base_eigenvalue(kappa, j(-1)) - (2.0 * kappa + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn kappa_below_half_is_rejected() {
        assert!(ModelParams::new(0.4, 0.0, 0.0).is_err());
        let p = ModelParams::new(1.5, 0.0, 0.0).unwrap();
        assert_eq!(p.alpha_exp(), 1.0);
    }

    #[test]
    fn matrices_by_substitution() {
        let p = ModelParams::new(0.5, 0.0, 0.0).unwrap();
        let m = system_matrices(&p, cx(0.0));
        assert_eq!(m.b0, CMat2::new(cx(-0.5), cx(0.0), cx(0.0), cx(0.5)));
        let p = ModelParams::new(0.5, 0.02, 0.1).unwrap();
        let m = system_matrices(&p, cx(1.0));
        let expect = CMat2::new(cx(-0.2), cx(-0.04), cx(0.04), cx(0.2));
        assert!((m.c - expect).norm() < 1e-15);
    }

    #[test]
    fn matrix_symmetries() {
        let k = swap_matrix();
        for &(kappa, mu, nu, lam) in &[(0.5, 0.3, -0.7, 1.2), (2.3, -1.1, 0.4, -0.6)] {
            let p = ModelParams::new(kappa, mu, nu).unwrap();
            let m = system_matrices(&p, Complex64::new(lam, 0.3));
            assert!((k * m.b0 * k - m.b1).norm() < 1e-15);
            assert!((k * m.c * k + m.c).norm() < 1e-15);
            assert!(m.c.trace().norm() < 1e-15);
            assert!((m.c.determinant() - cx(4.0 * (mu * mu - nu * nu))).norm() < 1e-14);
            let a = p.alpha_exp();
            for z in [cx(0.3), Complex64::new(-1.0, 2.0)] {
                let id = CMat2::identity();
                let target = z * z - cx(a * a);
                assert!(((m.b0 - id * z).determinant() - target).norm() < 1e-13);
                assert!(((m.b1 - id * z).determinant() - target).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn localization() {
        let p = ModelParams::new(0.5, 0.005, 0.015).unwrap();
        let i = localization_interval(&p, j(1));
        assert!((i.lo() - 0.985).abs() < 1e-15 && (i.hi() - 1.015).abs() < 1e-15);
        let p = ModelParams::new(0.5, 0.25, 0.75).unwrap();
        let i = localization_interval(&p, j(1));
        assert_eq!((i.lo(), i.hi()), (0.25, 1.75));
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        let all = localization_intervals(&p, DEFAULT_J_MAX);
        assert_eq!(all.len(), 16);
        assert!(all.iter().all(|i| i.radius == 0.0));
    }
}
