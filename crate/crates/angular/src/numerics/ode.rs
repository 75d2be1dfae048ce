//! Adaptive Dormand-Prince 5(4) integrator with continuous output.

use crate::error::{Error, Result};

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous extension (Hairer, Norsett & Wanner, dopri5 `contd5`).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    /// Per-step local error bound, applied as `atol = rtol = tol`.
    pub tol: f64,
    pub max_steps: usize,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Largest step as a fraction of `|t1 - t0|`.
    pub max_step_fraction: f64,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_steps: 200_000,
            h_init: None,
            max_step_fraction: 0.1,
        }
    }
}

/// One accepted step with its interpolation data.
#[derive(Clone, Debug)]
struct Segment {
    t0: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

impl Segment {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        for i in 0..out.len() {
            out[i] = self.r[0][i]
                + s * (self.r[1][i]
                    + s1 * (self.r[2][i] + s * (self.r[3][i] + s1 * self.r[4][i])));
        }
    }
}

/// Integrated solution with continuous output on `[t0, t1]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub t0: f64,
    pub t1: f64,
    pub dim: usize,
    /// Accepted mesh points including both ends.
    pub mesh: Vec<f64>,
    /// States at the mesh points.
    pub states: Vec<Vec<f64>>,
    segments: Vec<Segment>,
}

impl Trajectory {
    pub fn end_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.t0 <= self.t1 { (self.t0, self.t1) } else { (self.t1, self.t0) };
        t >= lo - 1e-14 * hi.abs().max(1.0) && t <= hi + 1e-14 * hi.abs().max(1.0)
    }

    /// State at an arbitrary `t` inside the integration interval.
    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        if !self.contains(t) {
            return Err(Error::Domain(format!(
                "t = {t} outside trajectory [{}, {}]",
                self.t0, self.t1
            )));
        }
        let mut out = vec![0.0; self.dim];
        if self.segments.is_empty() {
            out.copy_from_slice(&self.states[0]);
            return Ok(out);
        }
        let dir = (self.t1 - self.t0).signum();
        // Segments are ordered along the direction of integration.
        let idx = self
            .segments
            .partition_point(|s| dir * (s.t0 + s.h - t) < 0.0)
            .min(self.segments.len() - 1);
        self.segments[idx].eval(t, &mut out);
        Ok(out)
    }

    /// States at the requested sample times.
    pub fn sample(&self, ts: &[f64]) -> Result<Vec<Vec<f64>>> {
        ts.iter().map(|&t| self.at(t)).collect()
    }
}

/// Integrate `y' = field(t, y)` from `t0` to `t1`.
///
/// `field` writes the derivative into its third argument and may fail, e.g.
/// when the state leaves the domain of the vector field.
pub fn ode_integrate<F>(mut field: F, t0: f64, y0: &[f64], t1: f64, opts: OdeOptions) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y0.len();
    let mut traj = Trajectory {
        t0,
        t1,
        dim,
        mesh: vec![t0],
        states: vec![y0.to_vec()],
        segments: Vec::new(),
    };
    if t0 == t1 {
        return Ok(traj);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let hmax = span * opts.max_step_fraction;
    let tol = opts.tol;

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut ytmp = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];
    field(t, &y, &mut k[0])?;

    let mut h = match opts.h_init {
        Some(h) => h.abs().min(hmax),
        None => initial_step(&y, &k[0], tol, hmax),
    };
    let mut steps = 0usize;
    let mut last_err: f64 = 1e-4;

    loop {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let remaining = (t1 - t).abs();
        if remaining <= 1e-14 * t1.abs().max(1.0) {
            break;
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, state: y.clone() });
        }
        let hs = dir * h;

        let stage = |ytmp: &mut [f64], coeffs: &[(usize, f64)], k: &[Vec<f64>], y: &[f64]| {
            for i in 0..dim {
                let mut acc = y[i];
                for &(j, a) in coeffs {
                    acc += hs * a * k[j][i];
                }
                ytmp[i] = acc;
            }
        };

        let attempt: Result<()> = (|| {
            stage(&mut ytmp, &[(0, A21)], &k, &y);
            field(t + C2 * hs, &ytmp, &mut k[1])?;
            stage(&mut ytmp, &[(0, A31), (1, A32)], &k, &y);
            field(t + C3 * hs, &ytmp, &mut k[2])?;
            stage(&mut ytmp, &[(0, A41), (1, A42), (2, A43)], &k, &y);
            field(t + C4 * hs, &ytmp, &mut k[3])?;
            stage(&mut ytmp, &[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &y);
            field(t + C5 * hs, &ytmp, &mut k[4])?;
            stage(&mut ytmp, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k, &y);
            field(t + hs, &ytmp, &mut k[5])?;
            stage(&mut ynew, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], &k, &y);
            field(t + hs, &ynew, &mut k[6])?;
            Ok(())
        })();

        let finite = attempt.is_ok()
            && ynew.iter().all(|v| v.is_finite())
            && k[6].iter().all(|v| v.is_finite());
        if !finite {
            // Treat a failed or non-finite stage as a rejected step.
            h *= 0.25;
            steps += 1;
            continue;
        }

        let mut err: f64 = 0.0;
        for i in 0..dim {
            let e = hs
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = tol + tol * y[i].abs().max(ynew[i].abs());
            err = err.max((e / sc).abs());
        }
        steps += 1;

        if err <= 1.0 {
            let mut r = [
                y.clone(),
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
            ];
            for i in 0..dim {
                let dy = ynew[i] - y[i];
                let bspl = hs * k[0][i] - dy;
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - hs * k[6][i] - bspl;
                r[4][i] = hs
                    * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i]
                        + D6 * k[5][i]
                        + D7 * k[6][i]);
            }
            traj.segments.push(Segment { t0: t, h: hs, r });
            t = if last { t1 } else { t + hs };
            y.copy_from_slice(&ynew);
            let k6 = k[6].clone();
            k[0].copy_from_slice(&k6);
            traj.mesh.push(t);
            traj.states.push(y.clone());
            // PI step control.
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * last_err.powf(0.4 / 5.0);
            h = (h * fac.clamp(0.2, 5.0)).min(hmax);
            last_err = err.max(1e-4);
            if last {
                break;
            }
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(traj)
}

fn initial_step(y: &[f64], f: &[f64], tol: f64, hmax: f64) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..y.len() {
        let sc = tol + tol * y[i].abs();
        d0 = d0.max((y[i] / sc).abs());
        d1 = d1.max((f[i] / sc).abs());
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(hmax).max(1e-12 * hmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponential_growth() {
        let tr = ode_integrate(
            |_, y, dy| {
                dy[0] = y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            1.0,
            OdeOptions::with_tol(1e-10),
        )
        .unwrap();
        assert!((tr.end_state()[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn constant_field() {
        let tr = ode_integrate(
            |_, _, dy| {
                dy[0] = 0.0;
                dy[1] = 0.0;
                Ok(())
            },
            0.0,
            &[3.0, -1.0],
            2.0,
            OdeOptions::default(),
        )
        .unwrap();
        for s in tr.sample(&[0.0, 0.7, 2.0]).unwrap() {
            assert_eq!(s, vec![3.0, -1.0]);
        }
    }

    #[test]
    fn backward_integration_and_dense_output() {
        let tr = ode_integrate(
            |t, _, dy| {
                dy[0] = t.cos();
                Ok(())
            },
            2.0,
            &[2f64.sin()],
            -1.0,
            OdeOptions::with_tol(1e-12),
        )
        .unwrap();
        for k in 0..=30 {
            let t = 2.0 - 3.0 * k as f64 / 30.0;
            assert!((tr.at(t).unwrap()[0] - t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y^2, y(0) = 1 explodes at t = 1.
        let r = ode_integrate(
            |_, y, dy| {
                dy[0] = y[0] * y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            2.0,
            OdeOptions::with_tol(1e-8),
        );
        assert!(matches!(r, Err(Error::StepUnderflow { .. }) | Err(Error::TooManySteps(_))));
    }

    #[test]
    fn dense_output_error_scales_with_tol() {
        let errs: Vec<f64> = [1e-6, 1e-8, 1e-10]
            .iter()
            .map(|&tol| {
                let tr = ode_integrate(
                    |_, y, dy| {
                        dy[0] = y[1];
                        dy[1] = -y[0];
                        Ok(())
                    },
                    0.0,
                    &[0.0, 1.0],
                    6.0,
                    OdeOptions::with_tol(tol),
                )
                .unwrap();
                (0..200)
                    .map(|i| {
                        let t = 6.0 * i as f64 / 199.0;
                        (tr.at(t).unwrap()[0] - t.sin()).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < errs[0] / 10.0 && errs[2] < errs[1] / 10.0, "{errs:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn decay_matches_exponential(tol_exp in 6i32..=11) {
            let tol = 10f64.powi(-tol_exp);
            let tr = ode_integrate(
                |_, y, dy| { dy[0] = -y[0]; Ok(()) },
                0.0, &[1.0], 5.0, OdeOptions::with_tol(tol),
            ).unwrap();
            for i in 0..=50 {
                let t = 0.1 * i as f64;
                prop_assert!((tr.at(t).unwrap()[0] - (-t).exp()).abs() <= 10.0 * tol);
            }
        }
    }
}
