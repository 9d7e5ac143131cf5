//! Behaviour of the designs when all nonlinear parameters collapse to one
//! point, `b_i = x + delta r_i`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cheb::{remez, RemezOptions};
use crate::design::{c_from, design_c, design_estar, info_matrix, ChebyshevDesign, Design};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::model::ModelSpec;

/// Default collapse rates, halving from 0.4.
pub const DEFAULT_DELTAS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// Largest `k` for which [`h_const`] is available.
pub const MAX_K: usize = 8;

/// `b_i = x + delta r_i` with `r` strictly increasing and `delta > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseSpec {
    pub x: f64,
    pub r: Vec<f64>,
    pub delta: f64,
}

impl CollapseSpec {
    pub fn new(x: f64, r: Vec<f64>, delta: f64) -> Result<Self> {
        check_r(&r)?;
        if !(delta > 0.0 && delta.is_finite()) || !x.is_finite() {
            return Err(Error::Parameter(format!(
                "need finite x and delta > 0, got x = {x}, delta = {delta}"
            )));
        }
        Ok(Self { x, r, delta })
    }

    pub fn b(&self) -> Vec<f64> {
        self.r.iter().map(|ri| self.x + self.delta * ri).collect()
    }

    /// `model` with its nonlinear parameters replaced by [`Self::b`].
    pub fn apply(&self, model: &ModelSpec) -> Result<ModelSpec> {
        if self.r.len() != model.k() {
            return Err(Error::Parameter(format!(
                "r has {} entries but the model has k = {}",
                self.r.len(),
                model.k()
            )));
        }
        model.check_collapsed(self.x)?;
        model.with_b(self.b())
    }
}

fn check_r(r: &[f64]) -> Result<()> {
    if r.is_empty() {
        return Err(Error::Parameter("r must not be empty".into()));
    }
    if r.iter().any(|v| !v.is_finite()) || r.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(format!("r = {r:?} must be strictly increasing")));
    }
    Ok(())
}

/// `(prod_{j != i} (r_i - r_j)^-2, sum_{j != i} 2 / (r_i - r_j))`
fn gamma_parts(r: &[f64], i: usize) -> (f64, f64) {
    let mut prod = 1.0;
    let mut sum = 0.0;
    for (j, &rj) in r.iter().enumerate() {
        if j != i {
            let d = r[i] - rj;
            prod /= d * d;
            sum += 2.0 / d;
        }
    }
    (prod, sum)
}

fn check_distinct(r: &[f64]) -> Result<()> {
    for i in 0..r.len() {
        for j in 0..i {
            if r[i] == r[j] || !r[i].is_finite() {
                return Err(Error::Parameter(format!("r = {r:?} must have distinct finite entries")));
            }
        }
    }
    Ok(())
}

/// `(0, ..., 0, gamma_1, ..., gamma_2k)` with `gamma_2i = prod_{j != i}
/// (r_i - r_j)^-2` and `gamma_{2i-1} = -gamma_2i sum_{j != i} 2 / (r_i - r_j)`.
pub fn gamma_tilde(r: &[f64], s: usize) -> Result<Vec<f64>> {
    check_distinct(r)?;
    let mut out = vec![0.0; s + 2 * r.len()];
    for i in 0..r.len() {
        let (prod, sum) = gamma_parts(r, i);
        out[s + 2 * i] = -prod * sum;
        out[s + 2 * i + 1] = prod;
    }
    Ok(out)
}

/// [`gamma_tilde`] with the even entries set to zero: the direction of the
/// leading term of `M^{-1}(xi, b)` as `delta -> 0`.
pub fn gamma_bar(r: &[f64], s: usize) -> Result<Vec<f64>> {
    let mut out = gamma_tilde(r, s)?;
    for i in 0..r.len() {
        out[s + 2 * i + 1] = 0.0;
    }
    Ok(out)
}

/// The design on the Chebyshev points of the limiting system, weighted for
/// `c` (default `e_m`).
pub fn limiting_design(model: &ModelSpec, x: f64, c: Option<&[f64]>) -> Result<ChebyshevDesign> {
    let system = model.limiting(x)?;
    let em = unit(model.m(), model.m() - 1);
    let cheb = remez(&system, &RemezOptions::default())?;
    c_from(&system, cheb, c.unwrap_or(&em))
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    e
}

fn factorial_exact(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `((2k-1)!)^2 (Mbar^{-1}(xi, x))_{mm}` for the limiting information matrix
/// `Mbar`.
pub fn h_const(model: &ModelSpec, design: &Design, x: f64) -> Result<f64> {
    let k = model.k();
    if k > MAX_K {
        return Err(Error::Parameter(format!("k = {k} exceeds {MAX_K}")));
    }
    let system = model.limiting(x)?;
    let mbar = info_matrix(&system, design)?;
    let m = model.m();
    let rank = mbar.rank();
    if rank < m {
        return Err(Error::RankDeficient { rank, order: m });
    }
    let inv = mbar.inverse()?;
    let f = factorial_exact(2 * k - 1) as f64;
    Ok(f * f * inv[(m - 1, m - 1)])
}

/// The matrix `L` with rows `psi(delta_i)`, `psi'(delta_i)` for
/// `psi(d) = (1, d, ..., d^{2k-1})`, its inverse `V`, and the zeros
/// `alpha_i` of the odd columns of `V` read as polynomials.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    deltas: Vec<f64>,
    l: DMatrix<f64>,
    v: DMatrix<f64>,
    alpha: Vec<f64>,
}

fn psi(d: f64, n: usize) -> Vec<f64> {
    let mut out = vec![1.0; n];
    for j in 1..n {
        out[j] = out[j - 1] * d;
    }
    out
}

fn psi_prime(d: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    let mut p = 1.0;
    for (j, v) in out.iter_mut().enumerate().skip(1) {
        *v = j as f64 * p;
        p *= d;
    }
    out
}

impl HermiteBasis {
    pub fn new(r: &[f64], delta: f64) -> Result<Self> {
        check_distinct(r)?;
        let k = r.len();
        let n = 2 * k;
        let deltas: Vec<f64> = r.iter().map(|ri| ri * delta).collect();
        let mut l = DMatrix::zeros(n, n);
        for (i, &d) in deltas.iter().enumerate() {
            for (j, (p, q)) in psi(d, n).into_iter().zip(psi_prime(d, n)).enumerate() {
                l[(2 * i, j)] = p;
                l[(2 * i + 1, j)] = q;
            }
        }
        let v = l
            .clone()
            .lu()
            .try_inverse()
            .ok_or(Error::Singular { t: delta })?;
        let alpha = (0..k)
            .map(|i| {
                let sum: f64 = (0..k)
                    .filter(|&j| j != i)
                    .map(|j| 2.0 / (deltas[i] - deltas[j]))
                    .sum();
                deltas[i] + 1.0 / sum
            })
            .collect();
        Ok(Self { deltas, l, v, alpha })
    }

    /// `alpha_i = delta_i + (sum_{j != i} 2 / (delta_i - delta_j))^{-1}`;
    /// infinite when the sum vanishes.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Column `j` (zero based) of `V` evaluated as a polynomial at `d`.
    pub fn column_poly(&self, j: usize, d: f64) -> f64 {
        let n = self.v.nrows();
        dot(self.v.column(j).as_slice(), &psi(d, n))
    }

    /// Closed form of column `2i` (value 1 at `delta_i`).
    pub fn value_poly(&self, i: usize, d: f64) -> f64 {
        let di = self.deltas[i];
        let a = self.alpha[i];
        let lead = if a.is_finite() { (d - a) / (di - a) } else { 1.0 };
        lead * self.others(i, d)
    }

    /// Closed form of column `2i + 1` (slope 1 at `delta_i`).
    pub fn slope_poly(&self, i: usize, d: f64) -> f64 {
        (d - self.deltas[i]) * self.others(i, d)
    }

    fn others(&self, i: usize, d: f64) -> f64 {
        let di = self.deltas[i];
        self.deltas
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &dj)| ((d - dj) / (di - dj)).powi(2))
            .product()
    }

    /// Largest deviation between the columns of `V` and their closed forms,
    /// relative to the size of the polynomial values, over the nodes and a
    /// few points around them.
    pub fn closed_form_residual(&self) -> f64 {
        let lo = self.deltas.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(self.deltas.iter().map(|d| d.abs()).fold(0.0, f64::max)).max(1e-300);
        let samples: Vec<f64> = (0..=8)
            .map(|j| lo - 0.5 * span + 2.0 * span * j as f64 / 8.0)
            .chain(self.deltas.iter().copied())
            .collect();
        let mut worst = 0.0f64;
        for i in 0..self.deltas.len() {
            for &d in &samples {
                let pairs = [
                    (self.column_poly(2 * i, d), self.value_poly(i, d)),
                    (self.column_poly(2 * i + 1, d), self.slope_poly(i, d)),
                ];
                for (a, b) in pairs {
                    worst = worst.max((a - b).abs() / b.abs().max(1.0));
                }
            }
        }
        worst
    }
}

/// One row of [`expansion_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub delta: f64,
    /// `max |delta^{4k-2} M^{-1}(xi, b) - h gbar gbar^T|`
    pub error: Option<f64>,
    /// [`HermiteBasis::closed_form_residual`] at this `delta`.
    pub identity_residual: Option<f64>,
    pub flag: Option<String>,
}

/// Compare `delta^{4k-2} M^{-1}(xi, x + delta r)` with its limit
/// `h gbar gbar^T` for each `delta`. Rows where `M` is numerically singular
/// are flagged.
pub fn expansion_check(
    model: &ModelSpec,
    x: f64,
    r: &[f64],
    design: &Design,
    deltas: &[f64],
) -> Result<Vec<ExpansionRow>> {
    let m = model.m();
    if design.len() < m {
        return Err(Error::Design(format!(
            "design has {} support points, need at least m = {m}",
            design.len()
        )));
    }
    check_r(r)?;
    let k = model.k();
    let h = h_const(model, design, x)?;
    let g = gamma_bar(r, model.s())?;
    let power = (4 * k - 2) as i32;
    deltas
        .iter()
        .map(|&delta| {
            let spec = CollapseSpec::new(x, r.to_vec(), delta)?;
            let collapsed = spec.apply(model)?;
            let identity_residual = HermiteBasis::new(r, delta)
                .ok()
                .map(|hb| hb.closed_form_residual());
            let mat = info_matrix(&collapsed, design)?;
            let eig = mat.eigen();
            let lmax = eig.values[m - 1];
            let flag = |msg: String| ExpansionRow {
                delta,
                error: None,
                identity_residual,
                flag: Some(msg),
            };
            if eig.values[0] <= 1e-15 * lmax {
                return Ok(flag(format!(
                    "information matrix numerically singular (condition {:e})",
                    lmax / eig.values[0]
                )));
            }
            let inv = match mat.inverse() {
                Ok(inv) => inv,
                Err(e) => return Ok(flag(e.to_string())),
            };
            let scale = delta.powi(power);
            let mut error = 0.0f64;
            for i in 0..m {
                for j in 0..m {
                    error = error.max((scale * inv[(i, j)] - h * g[i] * g[j]).abs());
                }
            }
            Ok(ExpansionRow {
                delta,
                error: Some(error),
                identity_residual,
                flag: None,
            })
        })
        .collect()
}

/// One row of [`convergence_check_designs`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    /// Distance of the E candidate from the limiting design.
    pub dist_estar: Option<f64>,
    /// Distance of the c candidate from the limiting design.
    pub dist_c: Option<f64>,
    pub flag: Option<String>,
}

/// `max_j |s_j - t_j| + |w_j - v_j|` over index-matched Chebyshev points.
pub fn design_distance(a: &ChebyshevDesign, b: &ChebyshevDesign) -> Result<f64> {
    let (pa, pb) = (&a.chebyshev.points, &b.chebyshev.points);
    if pa.len() != pb.len() || a.weights.len() != b.weights.len() {
        return Err(Error::Design("designs have different numbers of points".into()));
    }
    Ok(pa
        .iter()
        .zip(pb)
        .zip(a.weights.iter().zip(&b.weights))
        .map(|((s, t), (w, v))| (s - t).abs() + (w - v).abs())
        .fold(0.0, f64::max))
}

/// Distances of the E candidate and the c candidate (default `c = e_m`) at
/// `b = x + delta r` from the limiting `e_m` design.
pub fn convergence_check_designs(
    model: &ModelSpec,
    x: f64,
    r: &[f64],
    c: Option<&[f64]>,
    deltas: &[f64],
) -> Result<Vec<ConvergenceRow>> {
    let m = model.m();
    let em = unit(m, m - 1);
    let c = c.unwrap_or(&em);
    if c.len() != m {
        return Err(Error::Parameter(format!("c has length {}, expected {m}", c.len())));
    }
    let gt = gamma_tilde(r, model.s())?;
    if dot(c, &gt) == 0.0 {
        return Err(Error::Precondition(format!(
            "c^T gamma_tilde = 0 for r = {r:?}: the c-optimal designs have no e_m limit"
        )));
    }
    let limit = limiting_design(model, x, None)?;
    let opts = RemezOptions::default();
    deltas
        .iter()
        .map(|&delta| {
            let collapsed = CollapseSpec::new(x, r.to_vec(), delta)?.apply(model)?;
            let estar = design_estar(&collapsed, &opts).and_then(|d| design_distance(&d, &limit));
            let cdes = design_c(&collapsed, c, &opts).and_then(|d| design_distance(&d, &limit));
            let flag = [&estar, &cdes]
                .iter()
                .filter_map(|r| r.as_ref().err().map(|e| e.to_string()))
                .next();
            Ok(ConvergenceRow {
                delta,
                dist_estar: estar.ok(),
                dist_c: cdes.ok(),
                flag,
            })
        })
        .collect()
}
