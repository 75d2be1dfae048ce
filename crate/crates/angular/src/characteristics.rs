//! Characteristic curves of the eigenvalue PDE in the coordinates `(t, v)`,
//! the Painleve III equation satisfied by `v`, the isomonodromic deformation
//! equation along the curves, and eigenvalue transport.

use serde::Serialize;

use crate::delta_solver::eigenvalue_delta;
use crate::error::{Error, Result};
use crate::estimate::{EigenvalueEstimate, Method};
use crate::model::{cx, system_matrices, CMat2, ModelParams, SpectralIndex};
use crate::monodromy::monodromy_eigenvalue;
use crate::numerics::{ode_integrate, quadrature, OdeOptions, Trajectory};

/// Relative step `delta / t` of the central differences in `t`.
pub const T_STEP: f64 = 1e-4;
/// Smallest `|v|` accepted by the characteristic vector field.
pub const V_FLOOR: f64 = 1e-8;

/// A point `(t, v, w)` on a characteristic curve with sign `sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharacteristicState {
    pub t: f64,
    pub v: f64,
    pub w: f64,
    pub sigma: i32,
}

impl CharacteristicState {
    pub fn new(t: f64, v: f64, w: f64, sigma: i32) -> Result<Self> {
        if !(t > 0.0) || v == 0.0 || !v.is_finite() || !w.is_finite() {
            return Err(Error::Domain(format!("invalid characteristic state t = {t}, v = {v}, w = {w}")));
        }
        if sigma != 1 && sigma != -1 {
            return Err(Error::Domain(format!("sigma = {sigma} must be +1 or -1")));
        }
        Ok(Self { t, v, w, sigma })
    }

    /// Start of the curve through `(mu, nu)` carrying the value `w`.
    pub fn from_coords(mu: f64, nu: f64, w: f64) -> Result<Self> {
        let (t, v, sigma) = tv_from_coords(mu, nu)?;
        Self::new(t, v, w, sigma)
    }

    pub fn coords(&self) -> (f64, f64) {
        munu(self.t, self.v, self.sigma)
    }
}

fn munu(t: f64, v: f64, sigma: i32) -> (f64, f64) {
    let s = f64::from(sigma);
    (0.5 * t * (v + s / v), 0.5 * t * (v - s / v))
}

/// `mu = (t/2)(v + sigma/v)`, `nu = (t/2)(v - sigma/v)`.
pub fn coords_from_tv(t: f64, v: f64, sigma: i32) -> Result<(f64, f64)> {
    if v == 0.0 {
        return Err(Error::Domain("v = 0".into()));
    }
    if sigma != 1 && sigma != -1 {
        return Err(Error::Domain(format!("sigma = {sigma} must be +1 or -1")));
    }
    Ok(munu(t, v, sigma))
}

/// Inverse of [`coords_from_tv`]: `sigma = sgn(mu^2 - nu^2)`,
/// `t = sqrt|mu^2 - nu^2|`, `v = (mu + nu)/t`.
pub fn tv_from_coords(mu: f64, nu: f64) -> Result<(f64, f64, i32)> {
    let d = mu * mu - nu * nu;
    if d == 0.0 {
        return Err(Error::CharacteristicSingular);
    }
    let t = d.abs().sqrt();
    Ok((t, (mu + nu) / t, if d > 0.0 { 1 } else { -1 }))
}

/// Right-hand side `(v', w')` of the characteristic system.
pub fn characteristic_field(kappa: f64, sigma: i32, t: f64, v: f64, w: f64) -> Result<(f64, f64)> {
    if v.abs() < V_FLOOR || !v.is_finite() || !w.is_finite() {
        return Err(Error::Domain(format!("v = {v} left the domain at t = {t}")));
    }
    let s = f64::from(sigma);
    let dv = -2.0 * v * w / t;
    let dw = -kappa * (v + s / v) - 0.5 * t * (v * v - 1.0 / (v * v));
    Ok((dv, dw))
}

/// A solved characteristic curve with dense output. `w_offset` is added to
/// every `w` read from the curve; it is zero for genuine characteristics
/// and is used to probe the sensitivity of the residuals.
#[derive(Clone, Debug)]
pub struct CharacteristicTrajectory {
    pub kappa: f64,
    pub sigma: i32,
    pub w_offset: f64,
    pub tol: f64,
    traj: Trajectory,
}

impl CharacteristicTrajectory {
    pub fn t0(&self) -> f64 {
        self.traj.t0
    }

    pub fn t1(&self) -> f64 {
        self.traj.t1
    }

    /// `(t_min, t_max)`.
    pub fn span(&self) -> (f64, f64) {
        let (a, b) = (self.traj.t0, self.traj.t1);
        (a.min(b), a.max(b))
    }

    pub fn state(&self, t: f64) -> Result<CharacteristicState> {
        let y = self.traj.at(t)?;
        Ok(CharacteristicState {
            t,
            v: y[0],
            w: y[1] + self.w_offset,
            sigma: self.sigma,
        })
    }

    pub fn start(&self) -> CharacteristicState {
        self.state(self.traj.t0).expect("start lies on the trajectory")
    }

    pub fn end(&self) -> CharacteristicState {
        self.state(self.traj.t1).expect("end lies on the trajectory")
    }

    /// States at the accepted integrator steps.
    pub fn mesh_states(&self) -> Vec<CharacteristicState> {
        self.traj
            .mesh
            .iter()
            .zip(&self.traj.states)
            .map(|(&t, y)| CharacteristicState {
                t,
                v: y[0],
                w: y[1] + self.w_offset,
                sigma: self.sigma,
            })
            .collect()
    }

    /// The same curve with `w` shifted by `offset`.
    pub fn perturbed(&self, offset: f64) -> Self {
        Self {
            w_offset: self.w_offset + offset,
            ..self.clone()
        }
    }

    /// `n` interior sample times at least one difference step away from the ends.
    pub fn sample_times(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.span();
        let a = a * (1.0 + 3.0 * T_STEP);
        let b = b * (1.0 - 3.0 * T_STEP);
        (0..n)
            .map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64)
            .collect()
    }

    /// CSV with header `t,v,w,mu,nu`, one row per integrator step.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,v,w,mu,nu\n");
        for s in self.mesh_states() {
            let (mu, nu) = s.coords();
            out.push_str(&format!("{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}\n", s.t, s.v, s.w, mu, nu));
        }
        out
    }

    // -2 v w / t along the stored curve, i.e. v' as implied by (t, v, w).
    fn implied_dv(&self, t: f64) -> Result<f64> {
        let s = self.state(t)?;
        Ok(-2.0 * s.v * s.w / t)
    }
}

// Five-point central difference.
fn central4<F: Fn(f64) -> Result<f64>>(f: F, t: f64, h: f64) -> Result<f64> {
    Ok((f(t - 2.0 * h)? - f(t + 2.0 * h)? + 8.0 * (f(t + h)? - f(t - h)?)) / (12.0 * h))
}

/// Integrate the characteristic system from `s0` to `t = t1`.
pub fn integrate_characteristic(
    s0: CharacteristicState,
    kappa: f64,
    t1: f64,
    tol: f64,
) -> Result<CharacteristicTrajectory> {
    if !(t1 > 0.0) {
        return Err(Error::Domain(format!("t1 = {t1} must be positive")));
    }
    let s0 = CharacteristicState::new(s0.t, s0.v, s0.w, s0.sigma)?;
    let sigma = s0.sigma;
    let field = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (dv, dw) = characteristic_field(kappa, sigma, t, y[0], y[1])?;
        dy[0] = dv;
        dy[1] = dw;
        Ok(())
    };
    let traj = ode_integrate(field, s0.t, &[s0.v, s0.w], t1, OdeOptions::with_tol(tol))?;
    Ok(CharacteristicTrajectory {
        kappa,
        sigma,
        w_offset: 0.0,
        tol,
        traj,
    })
}

/// Largest scaled residual `|t v v'' - t v'^2 + v v' - 2 kappa (v^2 + sigma) v - t (v^4 - 1)| / (1 + |t| + v^4)`
/// over interior samples.
///
/// `v'` is `-2 v w / t` from the stored `(v, w)`; `v''` is the central
/// difference (five-point) of that expression with step `T_STEP * t`.
pub fn painleve_residual(traj: &CharacteristicTrajectory, samples: usize) -> Result<f64> {
    let kappa = traj.kappa;
    let s = f64::from(traj.sigma);
    let mut worst: f64 = 0.0;
    for t in traj.sample_times(samples) {
        let st = traj.state(t)?;
        let v = st.v;
        let dv = -2.0 * v * st.w / t;
        let h = T_STEP * t;
        let ddv = central4(|tau| traj.implied_dv(tau), t, h)?;
        let r = t * v * ddv - t * dv * dv + v * dv - 2.0 * kappa * (v * v + s) * v - t * (v.powi(4) - 1.0);
        worst = worst.max(r.abs() / (1.0 + t.abs() + v.powi(4)));
    }
    Ok(worst)
}

/// Largest `|w + t v' / (2 v)|` over the mesh, with `v'` taken from the
/// vector field evaluated on the unperturbed curve.
pub fn char1_identity_defect(traj: &CharacteristicTrajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for st in traj.mesh_states() {
        let (dv, _) = characteristic_field(traj.kappa, traj.sigma, st.t, st.v, st.w - traj.w_offset)?;
        worst = worst.max((st.w + st.t * dv / (2.0 * st.v)).abs());
    }
    Ok(worst)
}

/// Residual `(mu - 2 nu lambda) d_mu lambda + (nu - 2 mu lambda) d_nu lambda + 2 kappa mu + 2 mu nu`
/// of a surface `lambda(mu, nu)`, with central differences of step `h`.
pub fn pde_residual<F>(mut surface: F, kappa: f64, mu: f64, nu: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let lambda = surface(mu, nu)?;
    let d_mu = (surface(mu + h, nu)? - surface(mu - h, nu)?) / (2.0 * h);
    let d_nu = (surface(mu, nu + h)? - surface(mu, nu - h)?) / (2.0 * h);
    Ok(pde_operator(kappa, mu, nu, lambda, d_mu, d_nu))
}

/// The PDE operator applied to given value and partial derivatives.
pub fn pde_operator(kappa: f64, mu: f64, nu: f64, lambda: f64, d_mu: f64, d_nu: f64) -> f64 {
    (mu - 2.0 * nu * lambda) * d_mu + (nu - 2.0 * mu * lambda) * d_nu + 2.0 * kappa * mu + 2.0 * mu * nu
}

/// `Omega(x, t)` of the deformation equation, for a curve value `v`.
pub fn omega(x: f64, v: f64, sigma: i32) -> CMat2 {
    let s = f64::from(sigma);
    let a = (v * v - s) / v;
    let b = (v * v + s) / v;
    CMat2::new(cx(a * (0.5 - x)), cx(b * (1.0 - x)), cx(b * x), cx(a * (x - 0.5)))
}

/// `dOmega/dx`, constant in `x`.
pub fn omega_dx(v: f64, sigma: i32) -> CMat2 {
    let s = f64::from(sigma);
    let a = (v * v - s) / v;
    let b = (v * v + s) / v;
    CMat2::new(cx(-a), cx(-b), cx(b), cx(a))
}

fn phi_matrix(kappa: f64, st: &CharacteristicState, x: f64) -> Result<CMat2> {
    let (mu, nu) = st.coords();
    let p = ModelParams::new(kappa, mu, nu)?;
    let m = system_matrices(&p, cx(st.w));
    Ok(m.b0 * cx(1.0 / x) + m.b1 * cx(1.0 / (x - 1.0)) + m.c)
}

/// `G_0(t)` with `phi(t) = int_{t_start}^t (v^2 - sigma)/(2v)`.
fn gauge_matrix(traj: &CharacteristicTrajectory, t: f64) -> Result<CMat2> {
    let st = traj.state(t)?;
    let s = f64::from(traj.sigma);
    let t0 = traj.t0();
    let phi = quadrature(
        |tau| {
            let v = traj.state(tau)?.v;
            Ok((v * v - s) / (2.0 * v))
        },
        t0,
        t,
        1e-14,
    )?;
    let (mu, _) = st.coords();
    let e = phi.exp();
    Ok(CMat2::new(
        cx(e),
        cx((mu - st.w) / e),
        cx(0.0),
        cx((traj.kappa + 0.5) / e),
    ))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeformationResidual {
    /// Largest `|dPhi/dt + Phi Omega - Omega Phi - dOmega/dx| / |Phi|` (Frobenius norms).
    pub deformation: f64,
    /// Largest `|dG_0/dt - Omega(0, t) G_0| / |G_0|`.
    pub gauge: f64,
}

/// Residuals of the deformation equation at `(x, t)` for `x` in
/// `x_samples` and `t_samples` interior times, and of the gauge equation
/// for `G_0`. Time derivatives are five-point central differences of the
/// dense output.
pub fn deformation_residual(
    traj: &CharacteristicTrajectory,
    x_samples: &[f64],
    t_samples: usize,
) -> Result<DeformationResidual> {
    let kappa = traj.kappa;
    let sigma = traj.sigma;
    let mut deformation: f64 = 0.0;
    let mut gauge: f64 = 0.0;
    for t in traj.sample_times(t_samples) {
        let h = T_STEP * t;
        let st = traj.state(t)?;
        let states = [
            traj.state(t - 2.0 * h)?,
            traj.state(t - h)?,
            traj.state(t + h)?,
            traj.state(t + 2.0 * h)?,
        ];
        let om_x = omega_dx(st.v, sigma);
        for &x in x_samples {
            let phi = phi_matrix(kappa, &st, x)?;
            let f = |i: usize| phi_matrix(kappa, &states[i], x);
            let dphi = (f(0)? - f(3)? + (f(2)? - f(1)?) * cx(8.0)) * cx(1.0 / (12.0 * h));
            let om = omega(x, st.v, sigma);
            let r = dphi + phi * om - om * phi - om_x;
            deformation = deformation.max(r.norm() / phi.norm().max(f64::MIN_POSITIVE));
        }
        let g = gauge_matrix(traj, t)?;
        let g_at = |tau: f64| gauge_matrix(traj, tau);
        let dg = (g_at(t - 2.0 * h)? - g_at(t + 2.0 * h)? + (g_at(t + h)? - g_at(t - h)?) * cx(8.0))
            * cx(1.0 / (12.0 * h));
        let r = dg - omega(0.0, st.v, sigma) * g;
        gauge = gauge.max(r.norm() / g.norm());
    }
    Ok(DeformationResidual { deformation, gauge })
}

/// Result of carrying an eigenvalue along a characteristic.
#[derive(Clone, Debug)]
pub struct Transport {
    pub trajectory: CharacteristicTrajectory,
    /// `(mu, nu)` at the end of the curve.
    pub endpoint: (f64, f64),
    /// Transported value at the endpoint.
    pub value: f64,
}

/// Carry the value `w0` at `(mu0, nu0)` along the characteristic through
/// that point up to `t = t1`.
pub fn transport_value(kappa: f64, w0: f64, from: (f64, f64), t1: f64, tol: f64) -> Result<Transport> {
    let s0 = CharacteristicState::from_coords(from.0, from.1, w0)?;
    let trajectory = integrate_characteristic(s0, kappa, t1, tol)?;
    let end = trajectory.end();
    Ok(Transport {
        endpoint: end.coords(),
        value: end.w,
        trajectory,
    })
}

fn transport_to(kappa: f64, w0: f64, from: (f64, f64), to: (f64, f64), tol: f64) -> Result<Transport> {
    let (t0, _, s0) = tv_from_coords(from.0, from.1)?;
    let (t1, _, s1) = tv_from_coords(to.0, to.1)?;
    if s0 != s1 {
        return Err(Error::Unreachable(format!("{from:?} and {to:?} lie in different sectors")));
    }
    let tr = transport_value(kappa, w0, from, if t0 == t1 { t0 } else { t1 }, tol.min(1e-10))?;
    let miss = (tr.endpoint.0 - to.0).hypot(tr.endpoint.1 - to.1);
    let allowed = tol.max(1e-9) * (1.0 + to.0.abs() + to.1.abs());
    if miss > allowed {
        return Err(Error::Unreachable(format!(
            "characteristic through {from:?} reaches {:?} at t = {t1}, {miss:.3e} away from {to:?}",
            tr.endpoint
        )));
    }
    Ok(tr)
}

/// Eigenvalue `lambda_j` at `to`, obtained by transporting `lambda_j` at
/// `from` along the characteristic through `from`. Fails unless that
/// characteristic passes through `to`.
pub fn transport_eigenvalue(
    kappa: f64,
    j: SpectralIndex,
    from: (f64, f64),
    to: (f64, f64),
    tol: f64,
) -> Result<EigenvalueEstimate> {
    let p = ModelParams::new(kappa, from.0, from.1)?;
    let start = eigenvalue_delta(&p, j, 1e-14)?;
    let tr = transport_to(kappa, start.value, from, to, tol)?;
    Ok(transport_estimate(&tr, j.get()))
}

/// Monodromy eigenvalue `lambda_0^j` at `to` by transport from `from`.
pub fn transport_monodromy_eigenvalue(
    kappa: f64,
    j: i32,
    from: (f64, f64),
    to: (f64, f64),
    tol: f64,
) -> Result<EigenvalueEstimate> {
    let start = monodromy_eigenvalue(kappa, j, from.0, from.1, 1e-14)?;
    let tr = transport_to(kappa, start.value, from, to, tol)?;
    Ok(transport_estimate(&tr, j))
}

fn transport_estimate(tr: &Transport, j: i32) -> EigenvalueEstimate {
    EigenvalueEstimate {
        value: tr.value,
        j,
        method: Method::Transport,
        order: tr.trajectory.traj.mesh.len() - 1,
        residual: 0.0,
        flagged: false,
        alternate: None,
    }
}
