use std::f64::consts::SQRT_2;

use cp_angular::characteristics::{painleve_residual, pde_operator, pde_residual, transport_value};
use cp_angular::closed_forms::equal_parameter_eigenvalue;
use cp_angular::delta_solver::eigenvalue_delta;
use cp_angular::monodromy::{monodromy_eigenvalue, monodromy_eigenvalues};
use cp_angular::series_expansion::{convert_to_munu, series_coefficients, series_eval_munu};
use cp_angular::theta_solver::{eigenvalue_theta, theta_polynomial};
use cp_angular::{base_eigenvalue, localization_intervals, ModelParams, SpectralIndex};

fn j(i: i32) -> SpectralIndex {
    SpectralIndex::new(i).unwrap()
}

fn delta_value(kappa: f64, jj: i32, mu: f64, nu: f64) -> f64 {
    eigenvalue_delta(&ModelParams::new(kappa, mu, nu).unwrap(), j(jj), 1e-14).unwrap().value
}

#[test]
fn theta_and_delta_agree_on_grid() {
    let grid = [-0.3, 0.0, 0.3];
    for kappa in [0.5, 1.0, 1.5] {
        for jj in [-2, -1, 1, 2] {
            for &mu in &grid {
                for &nu in &grid {
                    let p = ModelParams::new(kappa, mu, nu).unwrap();
                    let d = eigenvalue_delta(&p, j(jj), 1e-13).unwrap().value;
                    let t = eigenvalue_theta(&p, j(jj), 1e-10).unwrap().value;
                    assert!((t - d).abs() < 1e-6, "kappa {kappa} j {jj} ({mu},{nu}): {t} vs {d}");
                }
            }
        }
    }
}

#[test]
fn theta_zeros_avoid_mid_gap_points() {
    for kappa in [0.5, 1.5] {
        for (mu, nu) in [(0.2, -0.1), (0.45, 0.3), (-0.4, 0.45)] {
            let p = ModelParams::new(kappa, mu, nu).unwrap();
            let th = theta_polynomial(&p, 128);
            for jj in [-3, -2, -1, 1, 2] {
                let b = base_eigenvalue(kappa, j(jj));
                // the midpoint between j = -1 and j = 1 lies in the wider central gap
                for x in [b + 0.5, b - 0.5] {
                    let z = theta_polynomial(&p, 128).eval_real(x);
                    let scale = th.eval_scale(num_complex::Complex64::new(x, 0.0));
                    assert!(z.norm() > 1e-8 * scale, "kappa {kappa} at {x}");
                }
            }
        }
    }
}

#[test]
fn series_matches_delta_for_small_parameters() {
    for (kappa, jj) in [(0.5, 1), (0.5, -1), (1.5, 2), (SQRT_2, -1)] {
        let t = series_coefficients(kappa, j(jj), 8).unwrap();
        for (mu, nu) in [(0.05, 0.0), (0.0, -0.05), (0.03, 0.04), (-0.05, 0.05), (-0.02, -0.05)] {
            let s = series_eval_munu(&t, mu, nu).value;
            let d = delta_value(kappa, jj, mu, nu);
            assert!((s - d).abs() < 1e-5, "kappa {kappa} j {jj} ({mu},{nu}): {s} vs {d}");
        }
    }
}

// Coefficients of mu^a nu^b, a + b <= order, in the PDE applied to the
// truncated series; every product term is kept.
fn series_pde_coefficients(kappa: f64, jj: i32, order: usize) -> Vec<Vec<f64>> {
    let c = convert_to_munu(&series_coefficients(kappa, j(jj), order).unwrap()).unwrap();
    let g = |m: usize, n: usize| if m + n <= order { c.get(m, n) } else { 0.0 };
    let mut r = vec![vec![0.0; order + 1]; order + 1];
    for a in 0..=order {
        for b in 0..=(order - a) {
            // mu d_mu + nu d_nu
            let mut v = (a + b) as f64 * g(a, b);
            // -2 nu lambda d_mu lambda - 2 mu lambda d_nu lambda
            for p in 0..=a {
                for q in 0..=b {
                    let (x, y) = (a - p, b - q);
                    if y >= 1 {
                        v -= 2.0 * g(p, q) * (x + 1) as f64 * g(x + 1, y - 1);
                    }
                    if x >= 1 {
                        v -= 2.0 * g(p, q) * (y + 1) as f64 * g(x - 1, y + 1);
                    }
                }
            }
            match (a, b) {
                (1, 0) => v += 2.0 * kappa,
                (1, 1) => v += 2.0,
                _ => {}
            }
            r[a][b] = v;
        }
    }
    r
}

#[test]
fn truncated_series_solves_pde_through_max_order() {
    for (kappa, jj) in [(0.5, 1), (0.5, -2), (1.5, 1), (SQRT_2, 2)] {
        for order in [4usize, 8, 12] {
            let r = series_pde_coefficients(kappa, jj, order);
            let worst = r.iter().flatten().fold(0.0f64, |w, x| w.max(x.abs()));
            assert!(worst < 1e-12, "kappa {kappa} j {jj} order {order}: {worst:.2e}");
        }
    }
}

#[test]
fn closed_form_second_derivative_matches_tracked_eigenvalue() {
    let h = 1e-2;
    for (kappa, jj, tau) in [(0.5, 2, 1), (1.5, -1, 1), (1.0, 1, -1)] {
        let closed = |mu: f64| equal_parameter_eigenvalue(kappa, j(jj), tau, mu).unwrap();
        let tracked = |mu: f64| delta_value(kappa, jj, mu, f64::from(tau) * mu);
        for mu in [-0.2, 0.15, 0.3] {
            let d2 = |f: &dyn Fn(f64) -> f64| (f(mu + h) - 2.0 * f(mu) + f(mu - h)) / (h * h);
            let (a, b) = (d2(&closed), d2(&tracked));
            assert!((a - b).abs() < 1e-6, "kappa {kappa} j {jj}: {a} vs {b}");
        }
    }
}

#[test]
fn monodromy_eigenvalues_are_separated_from_classical_ones() {
    let pts = [-0.05, 0.0, 0.05];
    for &mu in &pts {
        for &nu in &pts {
            let p = ModelParams::new(1.5, mu, nu).unwrap();
            let classical: Vec<f64> = [-3, -2, -1, 1, 2, 3]
                .iter()
                .map(|&jj| eigenvalue_delta(&p, j(jj), 1e-13).unwrap().value)
                .collect();
            for z in monodromy_eigenvalues(1.5, mu, nu, 1e-14).unwrap() {
                for &c in &classical {
                    assert!((z.re - c).hypot(z.im) >= 0.4, "({mu},{nu}): {z} near {c}");
                }
            }
        }
    }
}

#[test]
fn kappa_half_monodromy_root_solves_pde_exactly() {
    for (mu, nu) in [(0.1, 0.3), (-0.4, 0.2), (0.7, -0.6), (0.0, 0.5)] {
        let lam = monodromy_eigenvalue(0.5, 0, mu, nu, 1e-15).unwrap().value;
        assert!((lam + mu).abs() < 1e-14);
        // lambda = -mu: d_mu = -1, d_nu = 0
        assert!(pde_operator(0.5, mu, nu, -mu, -1.0, 0.0).abs() < 1e-14);
        let r = pde_residual(|m, n| Ok(monodromy_eigenvalue(0.5, 0, m, n, 1e-15)?.value), 0.5, mu, nu, 1e-3).unwrap();
        assert!(r.abs() < 1e-12, "({mu},{nu}): {r}");
    }
}

#[test]
fn painleve_residual_shrinks_with_tolerance() {
    for (kappa, jj, from) in [(0.5, 1, (0.2, 0.1)), (1.5, -1, (0.1, 0.2))] {
        let w0 = delta_value(kappa, jj, from.0, from.1);
        let t0 = (from.1 * from.1 - from.0 * from.0).abs().sqrt();
        let res = |tol: f64| {
            let tr = transport_value(kappa, w0, from, 1.5 * t0, tol).unwrap();
            painleve_residual(&tr.trajectory, 50).unwrap()
        };
        // Above 1e-8 the step count is set by the step-size cap, not by tol.
        // Single decades are noisy (max over samples), so the rate is
        // averaged over four decades.
        let (a, b) = (res(1e-8), res(1e-12));
        let per_decade = (a / b).powf(0.25);
        assert!(per_decade >= 5.0, "kappa {kappa}: {a:.2e} -> {b:.2e}, {per_decade:.2} per decade");
    }
}

#[test]
fn eigenvalues_lie_in_the_union_of_intervals() {
    for (mu, nu) in [(0.25, -0.1), (-0.3, 0.3), (0.05, 0.2)] {
        let p = ModelParams::new(1.5, mu, nu).unwrap();
        let ivs = localization_intervals(&p, 4);
        for jj in [-4, -3, -2, -1, 1, 2, 3, 4] {
            let l = eigenvalue_delta(&p, j(jj), 1e-13).unwrap().value;
            assert!(ivs.iter().any(|iv| iv.contains(l, 1e-12)), "j {jj}: {l}");
        }
    }
}
