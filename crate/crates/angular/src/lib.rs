//! Spectral toolkit for the angular eigenvalue problem of the massive Dirac
//! equation in Kerr-Newman geometry (the Chandrasekhar-Page angular
//! equation): classical and monodromy eigenvalues as functions of
//! `(kappa, mu, nu)`, and numerical checks of their structural properties.

pub mod characteristics;
pub mod closed_forms;
pub mod delta_solver;
pub mod error;
pub mod estimate;
pub mod model;
pub mod monodromy;
pub mod numerics;
pub mod series_expansion;
pub mod theta_solver;

pub use error::{Error, Result};
pub use estimate::{EigenvalueEstimate, Method};
pub use model::{base_eigenvalue, localization_interval, localization_intervals, ModelParams, SpectralIndex};
