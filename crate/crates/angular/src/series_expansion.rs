//! Double power series `lambda(alpha, beta) = sum c_{m,n} alpha^m beta^n` in
//! `alpha = nu - mu`, `beta = nu + mu`, with the level scheme `c^{(l)}_{m,n}`
//! that resolves resonant index pairs for rational `kappa`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{base_eigenvalue, SpectralIndex};

/// `|(m+n) + 2 c_0 (m-n)|` below this counts as a resonance.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Entries with magnitude below this are printed as `0.00000`.
pub const PRINT_ZERO: f64 = 1e-13;

/// Coefficients `c^{(l)}_{m,n}` for `l + m + n <= max_order`.
///
/// Level `l = 0` is the series itself; levels `l >= 1` are only consulted
/// when a resonant pair `(m, n)` has to be resolved.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientTable {
    pub kappa: f64,
    pub j: i32,
    pub max_order: usize,
    /// `levels[l][m][n]`, triangular with `m + n <= max_order - l`.
    pub levels: Vec<Vec<Vec<f64>>>,
    /// Triples `(l, m, n)` obtained from the resonant branch.
    pub resonant: Vec<(usize, usize, usize)>,
}

impl CoefficientTable {
    /// `c_{m,n}`; zero outside the table.
    pub fn c(&self, m: usize, n: usize) -> f64 {
        self.level(0, m, n).unwrap_or(0.0)
    }

    pub fn level(&self, l: usize, m: usize, n: usize) -> Option<f64> {
        self.levels.get(l)?.get(m)?.get(n).copied()
    }

    pub fn c0(&self) -> f64 {
        self.c(0, 0)
    }

    /// CSV rows `l,m,n,value` for every stored coefficient.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,m,n,value\n");
        for (l, lv) in self.levels.iter().enumerate() {
            for (m, row) in lv.iter().enumerate() {
                for (n, &v) in row.iter().enumerate() {
                    out.push_str(&format!("{l},{m},{n},{}\n", format_sci6(v)));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kappa": self.kappa,
            "j": self.j,
            "max_order": self.max_order,
            "coefficients": self.levels[0],
            "levels": self.levels,
            "resonant": self.resonant,
        })
    }
}

/// Six significant figures in the `1.66667e-01` style; numerical zeros
/// print as `0.00000`.
pub fn format_sci6(v: f64) -> String {
    if v.abs() < PRINT_ZERO {
        return "0.00000".to_string();
    }
    let s = format!("{v:.5e}");
    let (mant, exp) = s.split_once('e').expect("scientific format");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

struct Builder {
    max: usize,
    vals: Vec<Option<f64>>,
}

impl Builder {
    fn idx(&self, l: usize, m: usize, n: usize) -> usize {
        let s = self.max + 1;
        (l * s + m) * s + n
    }

    fn get(&self, l: usize, m: usize, n: usize) -> Result<f64> {
        if l + m + n > self.max {
            return Err(Error::ResonanceUnresolved { m, n, level: l });
        }
        self.vals[self.idx(l, m, n)].ok_or(Error::ResonanceUnresolved { m, n, level: l })
    }

    fn set(&mut self, l: usize, m: usize, n: usize, v: f64) {
        if l + m + n <= self.max {
            let i = self.idx(l, m, n);
            self.vals[i] = Some(v);
        }
    }

    /// Sum over `0 < t + r + s < l + m + n` of `c^{(t)}_{r,s} c^{(l-t)}_{m-r,n-s}`,
    /// skipping the pairs formed with the excluded triple (in either slot).
    fn conv(&self, l: usize, m: usize, n: usize, exclude: Option<(usize, usize, usize)>) -> Result<f64> {
        let total = l + m + n;
        let mut acc = 0.0;
        for t in 0..=l {
            for r in 0..=m {
                for s in 0..=n {
                    let k = t + r + s;
                    if k == 0 || k == total {
                        continue;
                    }
                    if let Some(ex) = exclude {
                        let other = (l - t, m - r, n - s);
                        if (t, r, s) == ex || other == ex {
                            continue;
                        }
                    }
                    acc += self.get(t, r, s)? * self.get(l - t, m - r, n - s)?;
                }
            }
        }
        Ok(acc)
    }
}

pub fn series_coefficients(kappa: f64, j: SpectralIndex, max_order: usize) -> Result<CoefficientTable> {
    if !(kappa >= 0.5) {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} must be >= 1/2")));
    }
    let sg = j.sign();
    let c0 = base_eigenvalue(kappa, j);
    let size = (max_order + 1).pow(3);
    let mut b = Builder {
        max: max_order,
        vals: vec![None; size],
    };

    // Level constants and closed-form seeds.
    b.set(0, 0, 0, c0);
    b.set(1, 0, 0, sg);
    for l in 2..=max_order {
        b.set(l, 0, 0, 0.0);
    }
    let p = 2.0 * c0 + 1.0;
    let q = 2.0 * c0 - 1.0;
    b.set(0, 1, 0, kappa / p);
    b.set(0, 0, 1, kappa / q);
    b.set(0, 2, 0, (p * p - 4.0 * kappa * kappa) / (4.0 * p.powi(3)));
    b.set(0, 1, 1, 0.0);
    b.set(0, 0, 2, (q * q - 4.0 * kappa * kappa) / (4.0 * q.powi(3)));
    b.set(1, 1, 0, (p - 2.0 * sg * kappa) / (p * p));
    b.set(1, 0, 1, (q - 2.0 * sg * kappa) / (q * q));

    let mut resonant = Vec::new();
    for total in 3..=max_order {
        let mut pending = Vec::new();
        for l in 0..=total {
            for m in 0..=(total - l) {
                let n = total - l - m;
                if m + n == 0 {
                    continue;
                }
                let pre = (m + n) as f64 + 2.0 * c0 * (m as f64 - n as f64);
                if pre.abs() < RESONANCE_TOL {
                    pending.push((l, m, n));
                } else {
                    let v = (n as f64 - m as f64) / pre * b.conv(l, m, n, None)?;
                    b.set(l, m, n, v);
                }
            }
        }
        // A resonant entry at level l reads level l+1 data of the same total;
        // resolving higher levels first keeps that data available.
        pending.sort_by(|x, y| y.0.cmp(&x.0));
        for (l, m, n) in pending {
            let v = -0.5 * sg * b.conv(l + 1, m, n, Some((1, 0, 0)))?;
            b.set(l, m, n, v);
            resonant.push((l, m, n));
        }
    }

    let mut levels = Vec::with_capacity(max_order + 1);
    for l in 0..=max_order {
        let mut lv = Vec::new();
        for m in 0..=(max_order - l) {
            let mut row = Vec::new();
            for n in 0..=(max_order - l - m) {
                row.push(b.get(l, m, n)?);
            }
            lv.push(row);
        }
        levels.push(lv);
    }
    Ok(CoefficientTable {
        kappa,
        j: j.get(),
        max_order,
        levels,
        resonant,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the last antidiagonal `m + n = max_order`.
    pub tail: f64,
}

pub fn series_eval(table: &CoefficientTable, alpha: f64, beta: f64) -> SeriesValue {
    let mut value = 0.0;
    let mut last = 0.0;
    for s in 0..=table.max_order {
        let diag: f64 = (0..=s)
            .map(|m| table.c(m, s - m) * alpha.powi(m as i32) * beta.powi((s - m) as i32))
            .sum();
        value += diag;
        last = diag;
    }
    SeriesValue {
        value,
        tail: last.abs(),
    }
}

/// Series value at `(mu, nu)`.
pub fn series_eval_munu(table: &CoefficientTable, mu: f64, nu: f64) -> SeriesValue {
    series_eval(table, nu - mu, nu + mu)
}

/// Coefficients `lambda_{m,n}` of `sum lambda_{m,n} mu^m nu^n`.
#[derive(Clone, Debug, Serialize)]
pub struct MuNuCoefficients {
    pub max_order: usize,
    /// `coeffs[m][n]` with `m + n <= max_order`.
    pub coeffs: Vec<Vec<f64>>,
}

impl MuNuCoefficients {
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.coeffs.get(m).and_then(|r| r.get(n)).copied().unwrap_or(0.0)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Re-expand in `(mu, nu)` and check `|lambda_{m,n}| <= (|kappa| + |j|) 2^{m+n}`.
pub fn convert_to_munu(table: &CoefficientTable) -> Result<MuNuCoefficients> {
    let mo = table.max_order;
    let mut coeffs: Vec<Vec<f64>> = (0..=mo).map(|m| vec![0.0; mo - m + 1]).collect();
    // alpha^m beta^n = (nu - mu)^m (nu + mu)^n
    for m in 0..=mo {
        for n in 0..=(mo - m) {
            let c = table.c(m, n);
            if c == 0.0 {
                continue;
            }
            for a in 0..=m {
                for bb in 0..=n {
                    let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                    let pm = a + bb;
                    let pn = m + n - pm;
                    coeffs[pm][pn] += sign * binomial(m, a) * binomial(n, bb) * c;
                }
            }
        }
    }
    let scale = table.kappa.abs() + f64::from(table.j.abs());
    for (m, row) in coeffs.iter().enumerate() {
        for (n, &v) in row.iter().enumerate() {
            let bound = scale * 2f64.powi((m + n) as i32);
            if v.abs() > bound * (1.0 + 1e-12) {
                return Err(Error::BoundViolated { m, n, value: v, bound });
            }
        }
    }
    Ok(MuNuCoefficients {
        max_order: mo,
        coeffs,
    })
}
